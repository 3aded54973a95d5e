"""Qudit gates on d = 2^ell and their factorization into qubit gates.

With x = sum_j x_j 2^j (qubit A_j holds bit j) the diagonal gates split into
phases on single qubits and pairs:

    P      e^{i pi x^2 / d}   = prod_{j,k} U(e^{i pi 2^{j+k} / d}) on (A_j, A_k)
    CZ     omega^{x y}        = prod_{j,k} U(omega^{2^{j+k}})      on (A_j, B_k)
    Z(t)   e^{i t x}          = prod_j R(e^{i t 2^j})             on A_j

where U(phi) = diag(1, 1, 1, phi) and R(phi) = diag(1, phi). The j = k terms
of P act on one qubit. F uses the textbook QFT circuit (Hadamard and
controlled-phase layers, then a swap layer).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import compiler
from .error_analysis import ErrorReport, compose_bounds, transfer_composed
from .gkp_states import symmetric_params
from .hybrid_sim import HADAMARD, SWAP
from .logical_layer import embed_qubit_gate
from .wavepacket import ParameterError

GATES = ("X", "Z", "P", "F", "CZ", "Zphase")
DECOMPOSABLE = ("F", "P", "CZ", "Zphase")


@dataclass(frozen=True)
class QuditGate:
    name: str
    ell: int
    theta: float = 0.0

    def __post_init__(self):
        if self.name not in GATES:
            raise ParameterError(f"unknown gate {self.name!r}; choose from {', '.join(GATES)}")
        if self.ell < 1:
            raise ParameterError(f"ell must be >= 1, got {self.ell}")

    @property
    def d(self) -> int:
        return 2**self.ell


def gate_matrix(g: QuditGate) -> np.ndarray:
    if g.ell > 10 or (g.name == "CZ" and g.ell > 5):
        raise ParameterError(f"dense {g.name} limited to ell <= {5 if g.name == 'CZ' else 10}")
    d = g.d
    x = np.arange(d)
    w = np.exp(2j * np.pi / d)
    if g.name == "X":
        return np.roll(np.eye(d, dtype=complex), 1, axis=0)
    if g.name == "Z":
        return np.diag(w**x)
    if g.name == "P":
        c = d % 2
        return np.diag(np.exp(1j * np.pi * x * (x + c) / d))
    if g.name == "F":
        return np.exp(2j * np.pi * np.outer(x, x) / d) / math.sqrt(d)
    if g.name == "Zphase":
        return np.diag(np.exp(1j * g.theta * x))
    xa, xb = np.divmod(np.arange(d * d), d)
    return np.diag(np.exp(2j * np.pi * (xa * xb % d) / d))


def _U(phi: complex) -> np.ndarray:
    return np.diag([1, 1, 1, phi]).astype(complex)


def _R(phi: complex) -> np.ndarray:
    return np.diag([1, phi]).astype(complex)


@dataclass
class Factor:
    matrix: np.ndarray
    wires: tuple  # ((system, qubit),) or two of them; system "A" or "B"

    def to_dict(self) -> dict:
        m = np.asarray(self.matrix)
        return {"wires": [[s, q] for s, q in self.wires],
                "matrix": [[float(z.real), float(z.imag)] for z in m.ravel()]}


@dataclass
class TwoQubitFactorization:
    gate: QuditGate
    factors: list[Factor] = field(default_factory=list)

    @property
    def T(self) -> int:
        return len(self.factors)

    @property
    def bipartite(self) -> bool:
        return self.gate.name == "CZ"

    def dense(self) -> np.ndarray:
        ell = self.gate.ell
        n = 2 * ell if self.bipartite else ell
        M = np.eye(2**n, dtype=complex)
        for f in self.factors:
            if self.bipartite:
                bits = [ell + q if s == "A" else q for s, q in f.wires]
            else:
                bits = [q for _, q in f.wires]
            M = embed_qubit_gate(f.matrix, n, bits) @ M
        return M

    def to_dict(self) -> dict:
        return {"gate": self.gate.name, "ell": self.gate.ell, "theta": self.gate.theta,
                "T": self.T, "factors": [f.to_dict() for f in self.factors]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def decompose(g: QuditGate) -> TwoQubitFactorization:
    ell = g.ell
    d = g.d
    out = TwoQubitFactorization(g)
    fs = out.factors
    if g.name == "Zphase":
        for j in range(ell):
            fs.append(Factor(_R(np.exp(1j * g.theta * 2**j)), (("A", j),)))
    elif g.name == "P":
        if d % 2:
            raise ParameterError("P factorization assumes even d")
        for j in range(ell):
            for k in range(ell):
                phi = np.exp(1j * np.pi * 2 ** (j + k) / d)
                if j == k:
                    fs.append(Factor(_R(phi), (("A", j),)))
                else:
                    fs.append(Factor(_U(phi), (("A", j), ("A", k))))
    elif g.name == "CZ":
        for j in range(ell):
            for k in range(ell):
                fs.append(Factor(_U(np.exp(2j * np.pi * 2 ** (j + k) / d)), (("A", j), ("B", k))))
    elif g.name == "F":
        for j in range(ell - 1, -1, -1):
            fs.append(Factor(HADAMARD.astype(complex), (("A", j),)))
            for k in range(j - 1, -1, -1):
                fs.append(Factor(_U(np.exp(2j * np.pi * 2**k / 2 ** (j + 1))), (("A", j), ("A", k))))
        for j in range(ell // 2):
            fs.append(Factor(SWAP.astype(complex), (("A", j), ("A", ell - 1 - j))))
    else:
        raise ParameterError(f"no factorization for {g.name!r}; choose from {', '.join(DECOMPOSABLE)}")
    return out


def _phase_normalized(M: np.ndarray) -> np.ndarray:
    flat = M.ravel()
    mag = np.abs(flat)
    # first entry of (numerically) maximal magnitude, so ties break the same way
    ref = flat[np.argmax(mag >= mag.max() - 1e-9)]
    return M * (abs(ref) / ref)


def verification_error(fac: TwoQubitFactorization) -> float:
    """Max elementwise difference to the dense target, both normalized by
    the phase of their largest entry."""
    target = gate_matrix(fac.gate)
    got = fac.dense()
    return float(np.max(np.abs(_phase_normalized(got) - _phase_normalized(target))))


def compile_and_bound(g: QuditGate, kappa: float, squeeze_trick: bool = False
                      ) -> tuple[compiler.ElementaryCircuit, ErrorReport]:
    """Lower every factor through bit transfers and add up the error bounds."""
    fac = decompose(g)
    ell = g.ell
    p = symmetric_params(kappa, g.d)
    circ = None
    steps = []
    cache: dict[int, float] = {}

    def tb(j):
        if j not in cache:
            cache[j] = transfer_composed(p, ell, j)[0]
        return cache[j]

    for f in fac.factors:
        if len(f.wires) == 1:
            (_, j), = f.wires
            part = compiler.lower_single_qubit(ell, j, f.matrix, squeeze_trick)
            steps += [tb(j), tb(j)]
        elif fac.bipartite:
            (_, j), (_, k) = f.wires
            part = compiler.lower_two_qubit_bipartite(ell, j, k, f.matrix, squeeze_trick)
            steps += [tb(j), tb(k), tb(k), tb(j)]
        else:
            (_, j), (_, k) = f.wires
            part = compiler.lower_two_qubit(ell, j, k, f.matrix, squeeze_trick)
            steps += [tb(j), tb(k), tb(k), tb(j)]
        circ = part if circ is None else circ + part
    analytic = fac.T * 400 * ell * kappa
    params = {"gate": g.name, "ell": ell, "theta": g.theta, "kappa": kappa, "T": fac.T}
    count_bound = 340 * ell**2 * fac.T
    checks = [{"name": "count", "measured": circ.count, "bound": count_bound, "pass": circ.count <= count_bound}]
    if g.ell <= (3 if fac.bipartite else 8):  # dense check only where the matrix is small
        err = verification_error(fac)
        checks.append({"name": "decomposition", "measured": err, "bound": 1e-10, "pass": err <= 1e-10})
    rep = ErrorReport(f"clifford:{g.name}", params, compose_bounds(steps), analytic, None, checks,
                      [], {"T": fac.T, "count": circ.count, "counts": circ.counts})
    return circ, rep
