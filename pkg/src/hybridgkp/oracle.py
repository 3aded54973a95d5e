"""Independent brute-force references.

Nothing here touches the packet algebra in ``wavepacket``/``hybrid_sim``:
functions are evaluated pointwise straight from their definitions (nearest
lattice point, Gaussian bump, truncation test) and integrated with composite
Simpson on every window where both integrands are nonzero. Gate actions are
applied to the function descriptions analytically:

    shift by t   : f(x) -> f(x - t)            (e^{-itP})
    phase by t   : f(x) -> e^{itx} f(x)        (e^{itQ})
    dilate by a  : f(x) -> a^{-1/2} f(x / a)   (M_a)

Logical maps are assembled index by index from their arithmetic definitions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import simpson


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    points: int = 200_000
    rule: str = "simpson"

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError("x_min must be < x_max")
        if self.points < 10_000:
            raise ValueError("grid needs at least 1e4 points")
        if self.rule == "simpson" and self.points % 2:
            raise ValueError("simpson needs an even number of points")
        if self.rule not in ("simpson", "trapezoid"):
            raise ValueError(f"unknown rule {self.rule!r}")


# --------------------------------------------------------------------------
# pointwise function descriptions

class Fn:
    """A function on the real line with a list of support windows."""

    def __call__(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def windows(self) -> list[tuple[float, float]]:
        raise NotImplementedError

    # analytic gate actions
    def shifted(self, t: float) -> "Fn":
        return _Shifted(self, t)

    def phased(self, t: float) -> "Fn":
        return _Phased(self, t)

    def dilated(self, a: float) -> "Fn":
        return _Dilated(self, a)

    def scaled(self, c: complex) -> "Fn":
        return _Scaled(self, c)


class PacketFn(Fn):
    def __init__(self, amplitude, mu, sigma, l, r, beta=0.0):
        self.a, self.mu, self.s, self.l, self.r, self.beta = complex(amplitude), mu, sigma, l, r, beta

    def __call__(self, x):
        inside = (x >= self.l) & (x <= self.r)
        return np.where(inside, self.a * np.exp(1j * self.beta * x - (x - self.mu) ** 2 / (2 * self.s**2)), 0)

    def windows(self):
        return [(self.l, self.r)]


class LatticeFn(Fn):
    """Unnormalized GKP-type comb: bumps at x_j + s * period for s in ``indices``
    with weights ``weight(s)``, each truncated at half-width ``hw``."""

    def __init__(self, offset, period, sigma, hw, indices: Sequence[int], weight: Callable[[np.ndarray], np.ndarray]):
        self.offset, self.period, self.sigma, self.hw = offset, period, sigma, hw
        self.lo, self.hi = min(indices), max(indices)
        self.weight = weight

    def __call__(self, x):
        s = np.rint((x - self.offset) / self.period)
        c = self.offset + s * self.period
        ok = (np.abs(x - c) <= self.hw) & (s >= self.lo) & (s <= self.hi)
        return np.where(ok, self.weight(s) * np.exp(-(x - c) ** 2 / (2 * self.sigma**2)), 0.0)

    def windows(self):
        return [(self.offset + s * self.period - self.hw, self.offset + s * self.period + self.hw)
                for s in range(self.lo, self.hi + 1)]


class _Shifted(Fn):
    def __init__(self, f, t):
        self.f, self.t = f, t

    def __call__(self, x):
        return self.f(x - self.t)

    def windows(self):
        return [(l + self.t, r + self.t) for l, r in self.f.windows()]


class _Phased(Fn):
    def __init__(self, f, t):
        self.f, self.t = f, t

    def __call__(self, x):
        return np.exp(1j * self.t * x) * self.f(x)

    def windows(self):
        return self.f.windows()


class _Dilated(Fn):
    def __init__(self, f, a):
        if not a > 0:
            raise ValueError("dilation must be positive")
        self.f, self.a = f, a

    def __call__(self, x):
        return self.f(x / self.a) / math.sqrt(self.a)

    def windows(self):
        return [(l * self.a, r * self.a) for l, r in self.f.windows()]


class _Scaled(Fn):
    def __init__(self, f, c):
        self.f, self.c = f, complex(c)

    def __call__(self, x):
        return self.c * self.f(x)

    def windows(self):
        return self.f.windows()


def _merge_windows(ws):
    ws = sorted(ws)
    out = []
    for l, r in ws:
        if out and l <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], r))
        else:
            out.append((l, r))
    return out


def _intersect(wa, wb):
    wa, wb = _merge_windows(wa), _merge_windows(wb)
    i = k = 0
    out = []
    while i < len(wa) and k < len(wb):
        l = max(wa[i][0], wb[k][0])
        r = min(wa[i][1], wb[k][1])
        if r > l:
            out.append((l, r))
        if wa[i][1] < wb[k][1]:
            i += 1
        else:
            k += 1
    return out


def _integrate(h, windows, points, rule):
    total_len = sum(r - l for l, r in windows)
    total = 0j
    for l, r in windows:
        n = max(64, int(points * (r - l) / total_len))
        n += n % 2  # even number of intervals
        x = np.linspace(l, r, n + 1)
        y = h(x)
        total += simpson(y, x=x) if rule == "simpson" else np.trapezoid(y, x)
    return total


def grid_overlap(f: Fn, g: Fn, spec: GridSpec | None = None, tol: float = 1e-9,
                 points: int | None = None) -> complex:
    """Composite-rule integral of conj(f) g with a doubling convergence check."""
    windows = _intersect(f.windows(), g.windows())
    if spec is not None:
        windows = [(max(l, spec.x_min), min(r, spec.x_max)) for l, r in windows]
        windows = [(l, r) for l, r in windows if r > l]
    # tiny slivers from touching supports carry no weight
    windows = [(l, r) for l, r in windows if r - l > 1e-12 * max(1.0, abs(l), abs(r))]
    if not windows:
        return 0j
    if points is None:
        points = spec.points if spec is not None else 200_000
    rule = spec.rule if spec is not None else "simpson"
    h = lambda x: np.conj(f(x)) * g(x)  # noqa: E731
    prev = _integrate(h, windows, points, rule)
    for _ in range(3):
        cur = _integrate(h, windows, 2 * points, rule)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        points *= 2
        prev = cur
    raise OracleError(f"grid overlap did not converge: last change {abs(cur - prev):.3e}")


def normalized(f: Fn, points: int = 200_000) -> Fn:
    n2 = grid_overlap(f, f, points=points).real
    return f.scaled(1.0 / math.sqrt(n2))


def gkp_fn(d: int, j: int, kappa: float, delta: float, eps: float, envelope: str = "gaussian",
           L: int = 0, s_cut: int | None = None) -> Fn:
    """Normalized codeword straight from the defining sum (code frame)."""
    period = math.sqrt(2 * math.pi * d)
    sigma = delta * period
    hw = eps * period
    offset = math.sqrt(2 * math.pi / d) * j
    if envelope == "gaussian":
        S = math.ceil(6.0 / kappa) if s_cut is None else s_cut
        f = LatticeFn(offset, period, sigma, hw, range(-S, S + 1), lambda s: np.exp(-kappa**2 * s**2 / 2))
    else:
        f = LatticeFn(offset, period, sigma, hw, range(-L // 2, L // 2), lambda s: np.ones_like(s))
    return normalized(f)


def vacuum_fn() -> Fn:
    return normalized(PacketFn(1.0, 0.0, 1.0, -8.0, 8.0))


# --------------------------------------------------------------------------
# matrix elements of the basic implementations, from function descriptions

_H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


def qcx_element(fj: Fn, fk: Fn, bj: int, bk: int, ell: int) -> complex:
    """<f_j, b_j| ctrl e^{-i sqrt(2pi/2^ell) P} |f_k, b_k>."""
    if bj != bk:
        return 0j
    g = fk.shifted(math.sqrt(2 * math.pi / 2**ell)) if bk else fk
    return grid_overlap(fj, g)


def lsb_element(fj: Fn, fk: Fn, bj: int, bk: int, ell: int) -> complex:
    """<f_j, b_j| H ctrl e^{i alpha Q} H |f_k, b_k>, alpha = sqrt(pi) 2^{(ell-1)/2}."""
    alpha = math.sqrt(math.pi) * 2 ** ((ell - 1) / 2)
    total = 0j
    for c in (0, 1):
        w = _H[bj, c] * _H[c, bk]
        total += w * grid_overlap(fj, fk.phased(alpha) if c else fk)
    return total


def embed_element(f_target: Fn, f_source: Fn) -> complex:
    return grid_overlap(f_target, f_source.dilated(math.sqrt(2)))


# --------------------------------------------------------------------------
# logical maps from arithmetic definitions

def formula_matrix(kind: str, ell: int, j: int | None = None) -> np.ndarray:
    """Dense matrix of a basic map or bit transfer; basis index 2*x + b.

    kinds: qCX, qCXAdj, LSB, LSBAdj, Embed, EmbedAdj, BitTransfer, BitTransferAdj.
    """
    if ell > 8:
        raise ValueError(f"formula matrices limited to ell <= 8, got {ell}")
    D = 2**ell
    if kind in ("Embed", "EmbedAdj"):
        M = np.zeros((2 * D, D))
        for x in range(D):
            M[2 * x, x] = 1.0
        return M if kind == "Embed" else M.T
    adj = kind.endswith("Adj")
    base = kind[:-3] if adj else kind
    M = np.zeros((2 * D, 2 * D))
    for x in range(D):
        for b in (0, 1):
            if base == "qCX":
                x2, b2 = (x + b) % D, b
            elif base == "LSB":
                x2, b2 = x, b ^ (x & 1)
            elif base == "BitTransfer":
                if j is None or not 0 <= j < ell:
                    raise ValueError("bit transfer needs 0 <= j < ell")
                b2 = b ^ (x >> j & 1)
                x2 = (x - 2**j * b2) % D
            else:
                raise ValueError(f"unknown map {kind!r}")
            M[2 * x2 + b2, 2 * x + b] = 1.0
    return M.T if adj else M


# --------------------------------------------------------------------------
# randomized packet pairs for engine cross-checks

def random_packet_case(rng: np.random.Generator) -> tuple[tuple, tuple]:
    """Two packet parameter tuples (amplitude, mu, sigma, l, r, beta) with
    widths from 1e-3 to 2, supports that usually but not always intersect,
    and moderate phase slopes."""
    out = []
    mu0 = rng.uniform(-5, 5)
    for _ in range(2):
        sigma = 10 ** rng.uniform(-3, 0.3)
        mu = mu0 + rng.normal(scale=2 * sigma)
        hw = sigma * rng.uniform(0.2, 12)
        off = rng.uniform(-0.5, 0.5) * hw
        amp = complex(rng.normal(), rng.normal())
        beta = rng.normal(scale=2.0 / sigma) if rng.random() < 0.7 else 0.0
        out.append((amp, mu, sigma, mu - hw + off, mu + hw + off, beta))
    return out[0], out[1]


def packet_fn(case: tuple) -> PacketFn:
    return PacketFn(*case)
