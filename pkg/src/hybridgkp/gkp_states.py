"""Code states: truncated GKP codewords with Gaussian or flat (comb) envelope.

Width convention: the integer-centered base state has peaks
exp(-(x - s)^2 / (2 Delta^2)) at integers s, each cut off at distance eps.
Squeezing by sqrt(2 pi d) and shifting by sqrt(2 pi / d) j gives codeword j,
so in the code frame each peak is a Gaussian of width

    sigma = Delta * sqrt(2 pi d)

i.e. exp(-(x - x_s)^2 / (4 pi d Delta^2)), centered at its own lattice point
x_s = sqrt(2 pi / d) j + s sqrt(2 pi d), with support half-width
eps * sqrt(2 pi d).
"""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .wavepacket import PacketTrain, ParameterError, Wavepacket, train_inner, truncated_gaussian_norm

Envelope = Literal["gaussian", "comb"]

SIGMA_CUT = 6.0  # Gaussian envelope cutoff: |s| <= ceil(SIGMA_CUT / kappa)


@dataclass(frozen=True)
class GkpCodeParams:
    d: int
    kappa: float
    delta: float
    eps: float
    envelope: Envelope = "gaussian"
    L: int = 0
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ParameterError(f"code dimension d must be an integer >= 2, got {self.d}")
        if not self.delta > 0:
            raise ParameterError(f"Delta must be positive, got {self.delta}")
        if not 0 < self.eps < 0.5:
            raise ParameterError(f"eps must lie in (0, 1/2), got {self.eps}")
        if self.envelope not in ("gaussian", "comb"):
            raise ParameterError(f"unknown envelope {self.envelope!r}")
        if self.envelope == "gaussian" and not self.kappa > 0:
            raise ParameterError(f"kappa must be positive, got {self.kappa}")
        if self.envelope == "comb" and (self.L < 2 or self.L % 2):
            raise ParameterError(f"comb envelope needs an even L >= 2, got {self.L}")

    @property
    def orthogonal(self) -> bool:
        return self.eps <= 1.0 / (2 * self.d) + 1e-15

    @property
    def sigma(self) -> float:
        return self.delta * math.sqrt(2 * math.pi * self.d)

    @property
    def spacing(self) -> float:
        """Distance between neighbouring codewords' peaks, sqrt(2 pi / d)."""
        return math.sqrt(2 * math.pi / self.d)

    @property
    def period(self) -> float:
        return math.sqrt(2 * math.pi * self.d)

    @property
    def s_cut(self) -> int:
        return math.ceil(SIGMA_CUT / self.kappa)

    def with_dim(self, d: int, eps: float | None = None) -> "GkpCodeParams":
        """Same envelope, Delta and kappa in another dimension (embedding targets)."""
        return GkpCodeParams(d, self.kappa, self.delta, self.eps if eps is None else eps,
                             self.envelope, self.L, self.warnings)

    def as_dict(self) -> dict:
        out = {"d": self.d, "kappa": self.kappa, "delta": self.delta, "eps": self.eps,
               "envelope": self.envelope}
        if self.envelope == "comb":
            out["L"] = self.L
        return out


def symmetric_params(kappa: float, d: int) -> GkpCodeParams:
    """Symmetric squeezing: Delta = kappa / (2 pi d), eps = 1/(2d)."""
    if not kappa > 0:
        raise ParameterError(f"kappa must be positive, got {kappa}")
    notes = ()
    if not kappa < 0.25:
        notes = (f"kappa={kappa} outside (0, 1/4): the analytic bounds do not apply",)
        warnings.warn(notes[0], stacklevel=2)
    return GkpCodeParams(d, kappa, kappa / (2 * math.pi * d), 1.0 / (2 * d), "gaussian", 0, notes)


def default_L(delta: float, d: int) -> int:
    if not 0 < delta < 1.0 / d:
        raise ParameterError(f"comb envelope needs 0 < Delta < 1/d, got Delta={delta}, d={d}")
    return 2 ** (2 * (math.ceil(math.log2(1.0 / delta)) - (int(d).bit_length() - 1)))


def comb_params(delta: float, d: int, eps: float | None = None, L: int | None = None) -> GkpCodeParams:
    if L is None:
        L = default_L(delta, d)
    if eps is None:
        eps = 1.0 / (2 * d)
    # kappa is not used by the flat envelope; keep the symmetric-preset value for reporting
    return GkpCodeParams(d, 2 * math.pi * d * delta, delta, eps, "comb", L)


class ModeState:
    """A single-mode state given by one packet train (unit norm when built here)."""

    def __init__(self, train: PacketTrain, label: str = ""):
        self.train = train
        self.label = label

    @property
    def packets(self) -> list[Wavepacket]:
        return self.train.packets()

    def __len__(self):
        return len(self.train)

    def __call__(self, x):
        return self.train(x)

    def inner(self, other: "ModeState") -> complex:
        return train_inner(self.train, other.train)

    def norm(self) -> float:
        return math.sqrt(self.inner(self).real)

    def __repr__(self):
        return f"ModeState({self.label or 'anon'}, packets={len(self.train)})"


def _normalize(train: PacketTrain, factor: complex = 1.0) -> PacketTrain:
    amps = np.asarray(train.amps) * factor
    t = PacketTrain.from_arrays(train.centers, amps, train.sigma, train.beta, train.lo, train.hi)
    n2 = train_inner(t, t).real
    return PacketTrain.from_arrays(t.centers, amps / math.sqrt(n2), t.sigma, t.beta, t.lo, t.hi)


def base_state(p: GkpCodeParams) -> ModeState:
    """Integer-centered base state (unit lattice spacing), normalized."""
    pk = truncated_gaussian_norm(p.delta, -p.eps, p.eps)
    if p.envelope == "gaussian":
        s = np.arange(-p.s_cut, p.s_cut + 1, dtype=float)
        amps = np.exp(-p.kappa**2 * s**2 / 2) / pk
    else:
        s = np.arange(-p.L // 2, p.L // 2, dtype=float)
        amps = np.full(s.shape, 1.0 / math.sqrt(p.L)) / pk
    train = PacketTrain.from_arrays(s, amps, p.delta, 0.0, -p.eps, p.eps)
    return ModeState(_normalize(train), "base")


def _codeword(p: GkpCodeParams, j: int, strict: bool) -> ModeState:
    if int(j) != j or not 0 <= j < p.d:
        raise ParameterError(f"logical index j={j} out of range for d={p.d}")
    if strict and not p.orthogonal:
        raise ParameterError(f"eps={p.eps} > 1/(2d)={1 / (2 * p.d)}: codewords would not be orthogonal")
    base = base_state(p).train
    f1, t = base.dilate(p.period)
    f2, t = t.translate(p.spacing * j)
    t = PacketTrain.from_arrays(t.centers, np.asarray(t.amps) * (f1 * f2), t.sigma, t.beta, t.lo, t.hi)
    return ModeState(t, f"{p.envelope}({j})_{p.d}")


def make_gkp_codeword(p: GkpCodeParams, j: int, strict: bool = True) -> ModeState:
    """Truncated Gaussian-envelope codeword GKP(j)_d.

    ``strict=False`` skips the eps <= 1/(2d) check; used when a state is the
    image of a lower-dimensional codeword (e.g. embedding targets).
    """
    if p.envelope != "gaussian":
        raise ParameterError("make_gkp_codeword needs the gaussian envelope")
    return _codeword(p, j, strict)


def make_comb_codeword(p: GkpCodeParams, j: int, strict: bool = True) -> ModeState:
    if p.envelope != "comb":
        raise ParameterError("make_comb_codeword needs the comb envelope")
    return _codeword(p, j, strict)


def make_codeword(p: GkpCodeParams, j: int, strict: bool = True) -> ModeState:
    return _codeword(p, j, strict)


def make_vacuum() -> ModeState:
    pk = truncated_gaussian_norm(1.0, -8.0, 8.0)
    t = PacketTrain.from_arrays([0.0], [1.0 / pk], 1.0, 0.0, -8.0, 8.0)
    return ModeState(_normalize(t), "vacuum")


def ancilla_params(p: GkpCodeParams, ell: int) -> GkpCodeParams:
    """Parameters of the auxiliary GKP(0)_2 state used by bit transfers on a
    2^ell code: same Delta (and kappa / L), truncation 2^-(ell+1) so that the
    auxiliary mode stays orthogonal when it grows up to dimension 2^ell."""
    return GkpCodeParams(2, p.kappa, p.delta, min(p.eps, 2.0 ** -(ell + 1)), p.envelope, p.L)


def codebook(p: GkpCodeParams) -> list[ModeState]:
    return [make_codeword(p, j) for j in range(p.d)]


def wavefunction_csv(state: ModeState, grid: Sequence[float], params: dict | None = None) -> str:
    """CSV rows (x, Re psi, Im psi); a leading comment row records parameters."""
    x = np.asarray(grid, dtype=float)
    psi = state(x)
    buf = io.StringIO()
    if params:
        buf.write("# " + ",".join(f"{k}={v}" for k, v in params.items()) + "\n")
    buf.write("x,re,im\n")
    for xi, v in zip(x, psi):
        buf.write(f"{xi:.12g},{v.real:.12g},{v.imag:.12g}\n")
    return buf.getvalue()
