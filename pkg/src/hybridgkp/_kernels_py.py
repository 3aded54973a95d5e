"""Pure numpy implementation of the packet-train overlap kernels.

Same math as the compiled ``_kernels`` module. Pairs whose support covers
the Gaussian product well past machine precision use the full-line closed
form; everything else goes through adaptive 32-point Gauss-Legendre.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import erfc

GL_ORDER = 32
TAIL_REL = 1e-16
PANEL_REL = 1e-13
PANEL_ABS = 1e-17
MAX_STACK = 200
EMPTY_REL = 1e-10

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)


def _panel(A: float, k: float, a: float, b: float) -> complex:
    half = 0.5 * (b - a)
    y = 0.5 * (a + b) + half * _NODES
    return complex(half * np.sum(_WEIGHTS * np.exp(-A * y * y + 1j * k * y)))


def _adaptive(A: float, k: float, a: float, b: float, floor: float) -> complex:
    total = 0j
    stack = [(a, b, _panel(A, k, a, b))]
    while stack:
        pa, pb, whole = stack.pop()
        m = 0.5 * (pa + pb)
        left = _panel(A, k, pa, m)
        right = _panel(A, k, m, pb)
        diff = abs(left + right - whole)
        if (diff <= PANEL_REL * abs(left + right) or diff <= floor
                or len(stack) + 2 >= MAX_STACK or (pb - pa) < 1e-14):
            total += left + right
        else:
            stack.append((pa, m, left))
            stack.append((m, pb, right))
    return total


def pair_overlap(ca, sa, la, ra, cb, sb, lb, rb, dbeta) -> complex:
    """Integral of two unit-amplitude packets (b relative phase slope dbeta)."""
    l = max(la, lb)
    r = min(ra, rb)
    # touching supports (zero-length overlap up to rounding) count as disjoint
    if r - l <= EMPTY_REL * min(sa, sb):
        return 0j
    S = sa * sa + sb * sb
    A = S / (2.0 * sa * sa * sb * sb)
    mu = (ca * sb * sb + cb * sa * sa) / S
    K = -(ca - cb) ** 2 / (2.0 * S)
    ek = math.exp(K)
    mass = math.sqrt(math.pi / A) * ek
    if mass == 0.0:
        return 0j
    yl, yr = l - mu, r - mu
    phase = complex(math.cos(dbeta * mu), math.sin(dbeta * mu))
    if yl < 0.0 < yr:
        sq = math.sqrt(A)
        tail = 0.5 * mass * (math.erfc(sq * yr) + math.erfc(-sq * yl))
        if tail <= TAIL_REL * mass:
            return mass * math.exp(-dbeta * dbeta / (4.0 * A)) * phase
    val = _adaptive(A, dbeta, yl, yr, PANEL_ABS * math.sqrt(math.pi / A))
    return val * ek * phase


def train_overlap(ca, pa, sa, loa, hia, cb, pb, sb, lob, hib, dbeta) -> complex:
    """Sum over overlapping packet pairs of conj(pa_i) pb_k <a_i, b_k>.

    Centers must be sorted ascending; supports are ``[c + lo, c + hi]``.
    """
    ca = np.asarray(ca, dtype=float)
    cb = np.asarray(cb, dtype=float)
    if ca.size == 0 or cb.size == 0:
        return 0j
    left = ca + loa
    right = ca + hia
    start = np.searchsorted(cb + hib, left, side="right")
    stop = np.searchsorted(cb + lob, right, side="left")
    counts = np.maximum(stop - start, 0)
    if counts.sum() == 0:
        return 0j
    ii = np.repeat(np.arange(ca.size), counts)
    offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    kk = np.repeat(start, counts) + offs

    a_c, b_c = ca[ii], cb[kk]
    l = np.maximum(a_c + loa, b_c + lob)
    r = np.minimum(a_c + hia, b_c + hib)
    S = sa * sa + sb * sb
    A = S / (2.0 * sa * sa * sb * sb)
    mu = (a_c * sb * sb + b_c * sa * sa) / S
    ek = np.exp(-(a_c - b_c) ** 2 / (2.0 * S))
    mass = math.sqrt(math.pi / A) * ek
    yl, yr = l - mu, r - mu
    sq = math.sqrt(A)
    with np.errstate(over="ignore", invalid="ignore"):
        tail = 0.5 * mass * (erfc(sq * yr) + erfc(-sq * yl))
    real = r - l > EMPTY_REL * min(sa, sb)
    fast = real & (yl < 0) & (yr > 0) & (tail <= TAIL_REL * mass)
    vals = np.zeros(ii.size, dtype=complex)
    vals[fast] = mass[fast] * math.exp(-dbeta * dbeta / (4.0 * A)) * np.exp(1j * dbeta * mu[fast])
    for n in np.nonzero(~fast & real & (mass > 0))[0]:
        vals[n] = pair_overlap(a_c[n], sa, l[n], r[n], b_c[n], sb, l[n], r[n], dbeta)
    return complex(np.sum(np.conj(np.asarray(pa)[ii]) * np.asarray(pb)[kk] * vals))
