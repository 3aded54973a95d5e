"""Truncated Gaussian wavepackets with linear phases.

A packet is the function

    amplitude * exp(i beta x) * exp(-(x - mu)^2 / (2 sigma^2))   for x in [l, r]

and zero elsewhere. The family is closed under the three single-mode gate
actions used by the simulator:

* ``translate(w, t)``  -- (e^{-itP} f)(x) = f(x - t)
* ``phase_mul(w, t)``  -- (e^{itQ} f)(x) = e^{itx} f(x)
* ``dilate(w, a)``     -- (M_a f)(x) = a^{-1/2} f(x / a)

``PacketTrain`` is the vectorized form used inside hybrid states: many
packets sharing width, phase slope and relative support, with per-packet
centers and amplitudes. Every gate action is uniform over the train, so a
global factor (translation phase, dilation weight) is returned separately
to be folded into the owning term's coefficient.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels


class ParameterError(ValueError):
    """Raised for out-of-domain physical or code parameters."""


@dataclass(frozen=True)
class Wavepacket:
    amplitude: complex
    center: float
    width: float
    support: tuple[float, float]
    phase_slope: float = 0.0

    def __post_init__(self):
        if not self.width > 0:
            raise ParameterError(f"packet width must be positive, got {self.width}")
        l, r = self.support
        if not l < r:
            raise ParameterError(f"empty support [{l}, {r}]")
        if self.amplitude == 0:
            raise ParameterError("zero-amplitude packets are not stored")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        l, r = self.support
        val = self.amplitude * np.exp(1j * self.phase_slope * x - (x - self.center) ** 2 / (2 * self.width**2))
        return np.where((x >= l) & (x <= r), val, 0.0)

    def norm(self) -> float:
        return math.sqrt(inner_product(self, self).real)

    def normalized(self) -> "Wavepacket":
        return scale(self, 1.0 / self.norm())


def inner_product(a: Wavepacket, b: Wavepacket) -> complex:
    """<a, b> = integral of conj(a) b over the support intersection."""
    l = max(a.support[0], b.support[0])
    r = min(a.support[1], b.support[1])
    if r <= l:
        return 0j
    # conj(a) b only sees the phase slope difference
    base = kernels.pair_overlap(a.center, a.width, l, r, b.center, b.width, l, r,
                                b.phase_slope - a.phase_slope)
    return a.amplitude.conjugate() * b.amplitude * base


def translate(w: Wavepacket, t: float) -> Wavepacket:
    return Wavepacket(
        amplitude=w.amplitude * cmath.exp(-1j * w.phase_slope * t),
        center=w.center + t,
        width=w.width,
        support=(w.support[0] + t, w.support[1] + t),
        phase_slope=w.phase_slope,
    )


def phase_mul(w: Wavepacket, t: float) -> Wavepacket:
    return Wavepacket(w.amplitude, w.center, w.width, w.support, w.phase_slope + t)


def dilate(w: Wavepacket, alpha: float) -> Wavepacket:
    if not alpha > 0:
        raise ParameterError(f"dilation factor must be positive, got {alpha}")
    return Wavepacket(
        amplitude=w.amplitude / math.sqrt(alpha),
        center=alpha * w.center,
        width=alpha * w.width,
        support=(alpha * w.support[0], alpha * w.support[1]),
        phase_slope=w.phase_slope / alpha,
    )


def scale(w: Wavepacket, c: complex) -> Wavepacket:
    return Wavepacket(w.amplitude * c, w.center, w.width, w.support, w.phase_slope)


def gram_matrix(packets: Sequence[Wavepacket]) -> np.ndarray:
    n = len(packets)
    G = np.empty((n, n), dtype=complex)
    for i in range(n):
        for k in range(i, n):
            G[i, k] = inner_product(packets[i], packets[k])
            G[k, i] = G[i, k].conjugate()
    return G


def truncated_gaussian_norm(width: float, lo: float, hi: float) -> float:
    """L2 norm of exp(-y^2/(2 width^2)) restricted to [lo, hi]."""
    return math.sqrt(0.5 * width * math.sqrt(math.pi)
                     * (math.erf(hi / width) - math.erf(lo / width)))


# --------------------------------------------------------------------------
# packet trains

_KEY_DIGITS = 9


def _q(x: float) -> float:
    # quantize a real field for deduplication keys; only absorbs float noise
    return round(x, _KEY_DIGITS) + 0.0


@dataclass(frozen=True, eq=False)
class PacketTrain:
    """Packets ``amps[i] * e^{i beta x} * gauss((x - centers[i]) / sigma)`` on
    ``[centers[i] + lo, centers[i] + hi]``. Centers are sorted ascending.

    ``pattern`` identifies the (centers-up-to-affine-map, amps) content so that
    trains produced from the same constructor along the same gate history
    compare equal through :attr:`key`.
    """

    centers: np.ndarray
    amps: np.ndarray
    sigma: float
    beta: float
    lo: float
    hi: float
    pattern: int
    _key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        c = self.centers
        key = (self.pattern, len(c), _q(c[0]), _q(c[-1]), _q(self.sigma), _q(self.beta),
               _q(self.lo), _q(self.hi))
        object.__setattr__(self, "_key", key)

    @property
    def key(self) -> tuple:
        return self._key

    @classmethod
    def from_arrays(cls, centers, amps, sigma, beta, lo, hi) -> "PacketTrain":
        centers = np.ascontiguousarray(centers, dtype=float)
        amps = np.ascontiguousarray(amps, dtype=complex)
        order = np.argsort(centers, kind="stable")
        centers, amps = centers[order], amps[order]
        centers.setflags(write=False)
        amps.setflags(write=False)
        c0 = centers - centers[0]
        span = c0[-1] if c0[-1] != 0 else 1.0
        pattern = hash((np.round(c0 / span, 12).tobytes(), np.round(amps, 14).tobytes()))
        return cls(centers, amps, float(sigma), float(beta), float(lo), float(hi), pattern)

    @classmethod
    def from_packets(cls, packets: Sequence[Wavepacket]) -> tuple[complex, "PacketTrain"]:
        """Pack compatible packets; returns (global factor, train)."""
        p0 = packets[0]
        lo = p0.support[0] - p0.center
        hi = p0.support[1] - p0.center
        for p in packets:
            if (abs(p.width - p0.width) > 1e-12 * p0.width or p.phase_slope != p0.phase_slope
                    or abs(p.support[0] - p.center - lo) > 1e-12 or abs(p.support[1] - p.center - hi) > 1e-12):
                raise ParameterError("packets in a train must share width, phase slope and relative support")
        return 1.0, cls.from_arrays([p.center for p in packets], [p.amplitude for p in packets],
                                    p0.width, p0.phase_slope, lo, hi)

    def __len__(self) -> int:
        return len(self.centers)

    def packets(self, factor: complex = 1.0) -> list[Wavepacket]:
        return [Wavepacket(complex(factor * a), float(c), self.sigma, (float(c + self.lo), float(c + self.hi)),
                           self.beta) for c, a in zip(self.centers, self.amps) if a != 0]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        # supports are disjoint for code states but not in general: sum all
        for c, a in zip(self.centers, self.amps):
            m = (x >= c + self.lo) & (x <= c + self.hi)
            out[m] += a * np.exp(1j * self.beta * x[m] - (x[m] - c) ** 2 / (2 * self.sigma**2))
        return out

    # gate actions: each returns (factor, new train)
    def translate(self, t: float) -> tuple[complex, "PacketTrain"]:
        c = self.centers + t
        c.setflags(write=False)
        return (cmath.exp(-1j * self.beta * t),
                PacketTrain(c, self.amps, self.sigma, self.beta, self.lo, self.hi, self.pattern))

    def phase_mul(self, t: float) -> tuple[complex, "PacketTrain"]:
        return 1.0, PacketTrain(self.centers, self.amps, self.sigma, self.beta + t, self.lo, self.hi, self.pattern)

    def dilate(self, alpha: float) -> tuple[complex, "PacketTrain"]:
        if not alpha > 0:
            raise ParameterError(f"dilation factor must be positive, got {alpha}")
        c = self.centers * alpha
        c.setflags(write=False)
        return (1.0 / math.sqrt(alpha),
                PacketTrain(c, self.amps, self.sigma * alpha, self.beta / alpha, self.lo * alpha,
                            self.hi * alpha, self.pattern))


def train_inner(a: PacketTrain, b: PacketTrain) -> complex:
    """<a, b> for two packet trains."""
    if a.centers[-1] + a.hi <= b.centers[0] + b.lo or b.centers[-1] + b.hi <= a.centers[0] + a.lo:
        return 0j
    return kernels.train_overlap(a.centers, a.amps, a.sigma, a.lo, a.hi,
                                 b.centers, b.amps, b.sigma, b.lo, b.hi, b.beta - a.beta)
