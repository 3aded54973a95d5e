"""Lowering of logical circuits to elementary hybrid circuits.

Basic maps on a code mode X and a qubit b (d = 2^ell):

    qCX(ell)      ctrl_b e^{-i sqrt(2 pi / d) P_X}
    LSB(ell)      H_b . ctrl_b e^{i alpha Q_X} . H_b,  alpha = sqrt(pi) 2^{(ell-1)/2}
    Embed(ell)    M_{sqrt 2} on X

With ``squeeze_trick=True`` the strong controlled phase is rewritten as
(M_{a'}^dag)^n ctrl e^{iQ} M_{a'}^n with n = ceil(|log alpha|), a' = alpha^{1/n}.

Resource table: code mode S = mode 0, auxiliary mode B = mode 1 (bipartite:
S1 = 0, S2 = 1, B = 2); transfer qubits Q1 = qubit 0, Q2 = qubit 1; catalyst
qubit Q = last qubit. A lone bit transfer uses Q' = qubit 0, Q = qubit 1.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import logical_layer as LL
from .hybrid_sim import (CtrlDispP, CtrlDispQ, ElementaryGate, Hadamard, OneQubit, Squeeze,
                         TwoQubit)
from .logical_layer import LogicalCircuit, LogicalMap, UnitaryOp
from .wavepacket import ParameterError


def zeta(ell: int) -> float:
    """Displacement-strength bound sqrt(pi) 2^{(ell-1)/2}."""
    return math.sqrt(math.pi) * 2 ** ((ell - 1) / 2)


def lsb_alpha(ell: int) -> float:
    return math.sqrt(math.pi) * 2 ** ((ell - 1) / 2)


@dataclass(frozen=True)
class SqueezeDecomposition:
    alpha: float
    alpha_p: float
    n: int

    def gates(self, mode: int, qubit: int) -> list[ElementaryGate]:
        """ctrl e^{i alpha Q} as squeezes around a unit controlled phase."""
        if self.n == 0:
            return [CtrlDispQ(qubit, mode, 1.0)]
        return ([Squeeze(mode, self.alpha_p)] * self.n + [CtrlDispQ(qubit, mode, 1.0)]
                + [Squeeze(mode, 1.0 / self.alpha_p)] * self.n)


def squeeze_decompose(alpha: float) -> SqueezeDecomposition:
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    if alpha == 1.0:
        return SqueezeDecomposition(1.0, 1.0, 0)
    n = math.ceil(abs(math.log(alpha)))
    return SqueezeDecomposition(alpha, math.exp(math.log(alpha) / n), n)


@dataclass
class ElementaryCircuit:
    n_modes: int
    n_qubits: int
    gates: list[ElementaryGate] = field(default_factory=list)
    resource_map: dict[str, str] = field(default_factory=dict)
    logical_count: int = 0

    @property
    def count(self) -> int:
        return len(self.gates)

    @property
    def counts(self) -> dict[str, int]:
        return dict(sorted(Counter(g.kind for g in self.gates).items()))

    @property
    def max_squeeze(self) -> float:
        return max((g.strength for g in self.gates if g.kind == "Squeeze"), default=1.0)

    @property
    def max_displacement(self) -> float:
        return max((g.strength for g in self.gates if g.kind not in ("Squeeze", "OneQubit", "TwoQubit")),
                   default=0.0)

    def adjoint(self) -> "ElementaryCircuit":
        return ElementaryCircuit(self.n_modes, self.n_qubits, [g.inverse() for g in reversed(self.gates)],
                                 dict(self.resource_map), self.logical_count)

    def __add__(self, other: "ElementaryCircuit") -> "ElementaryCircuit":
        if (self.n_modes, self.n_qubits) != (other.n_modes, other.n_qubits):
            raise ParameterError("cannot concatenate circuits on different resources")
        rm = dict(self.resource_map)
        rm.update(other.resource_map)
        return ElementaryCircuit(self.n_modes, self.n_qubits, self.gates + other.gates, rm,
                                 self.logical_count + other.logical_count)

    def to_dict(self) -> dict:
        return {
            "n_modes": self.n_modes,
            "n_qubits": self.n_qubits,
            "resource_map": dict(sorted(self.resource_map.items())),
            "count": self.count,
            "counts": self.counts,
            "logical_count": self.logical_count,
            "max_squeeze": self.max_squeeze,
            "max_displacement": self.max_displacement,
            "gates": [g.record() for g in self.gates],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


# --------------------------------------------------------------------------
# basic maps

def basic_gates(m: LogicalMap, mode: int, qubit: int | None = None,
                squeeze_trick: bool = True) -> list[ElementaryGate]:
    if m.kind in ("qCX", "qCXAdj"):
        t = math.sqrt(2 * math.pi / 2**m.ell)
        return [CtrlDispP(qubit, mode, t if m.kind == "qCX" else -t)]
    if m.kind == "Embed":
        return [Squeeze(mode, math.sqrt(2))]
    if m.kind == "EmbedAdj":
        return [Squeeze(mode, 1 / math.sqrt(2))]
    alpha = lsb_alpha(m.ell)
    if squeeze_trick:
        core = squeeze_decompose(alpha).gates(mode, qubit)
    else:
        core = [CtrlDispQ(qubit, mode, alpha)]
    gates = [Hadamard(qubit)] + core + [Hadamard(qubit)]
    if m.kind == "LSBAdj":
        gates = [g.inverse() for g in reversed(gates)]
    return gates


def lower_basic(m: LogicalMap, ell: int | None = None, squeeze_trick: bool = True) -> ElementaryCircuit:
    """Lower a single map on (mode 0, qubit 0)."""
    if ell is not None and ell != m.ell:
        m = LogicalMap(m.kind, ell)
    has_qubit = not m.kind.startswith("Embed")
    gates = basic_gates(m, 0, 0 if has_qubit else None, squeeze_trick)
    rm = {"X": "mode0"} | ({"b": "qubit0"} if has_qubit else {})
    return ElementaryCircuit(1, 1 if has_qubit else 0, gates, rm, 1)


def lower_logical(c: LogicalCircuit, wire_map: dict[str, tuple[str, int]], n_modes: int, n_qubits: int,
                  squeeze_trick: bool = False) -> ElementaryCircuit:
    """Replace every map by its elementary implementation.

    ``wire_map`` sends logical wire names to ("mode", i) or ("qubit", i).
    Qudit wires must land on modes; qubit wires used as controls or LSB
    targets must land on qubits.
    """
    gates: list[ElementaryGate] = []
    for m, wires in c.ops:
        if isinstance(m, UnitaryOp):
            qs = []
            for w in wires:
                kind, i = wire_map[w]
                if kind != "qubit":
                    raise ParameterError(f"unitary on wire {w} which is not a qubit")
                qs.append(i)
            gates.append(OneQubit(qs[0], m.matrix, m.label) if len(qs) == 1
                         else TwoQubit(qs[0], qs[1], m.matrix, m.label))
            continue
        kind, mode = wire_map[wires[0]]
        if kind != "mode":
            raise ParameterError(f"{m} acts on {wires[0]} which is not an oscillator")
        qubit = None
        if len(wires) > 1:
            kq, qubit = wire_map[wires[1]]
            if kq != "qubit":
                raise ParameterError(f"{m} needs a qubit on {wires[1]}")
        gates += basic_gates(m, mode, qubit, squeeze_trick)
    rm = {w: f"{k}{i}" for w, (k, i) in wire_map.items()}
    return ElementaryCircuit(n_modes, n_qubits, gates, rm, c.op_count)


_TRANSFER_WIRES = {"A": ("mode", 0), "c1": ("mode", 1), "b": ("qubit", 0), "c2": ("qubit", 1)}
_SINGLE_WIRES = {"A": ("mode", 0), "c1": ("mode", 1), "t1": ("qubit", 0), "t2": ("qubit", 1),
                 "c2": ("qubit", 2)}
_BIPARTITE_WIRES = {"A": ("mode", 0), "B": ("mode", 1), "c1": ("mode", 2), "t1": ("qubit", 0),
                    "t2": ("qubit", 1), "c2": ("qubit", 2)}
_ROLE_NAMES = {"A": "S", "B": "S2", "c1": "B", "b": "Q'", "t1": "Q1", "t2": "Q2", "c2": "Q"}


def _rename(ec: ElementaryCircuit, bipartite: bool = False) -> ElementaryCircuit:
    names = dict(_ROLE_NAMES)
    if bipartite:
        names["A"] = "S1"
    ec.resource_map = {names[w]: v for w, v in ec.resource_map.items()}
    return ec


def lower_transfer(ell: int, j: int, squeeze_trick: bool = False) -> ElementaryCircuit:
    """Physical bit transfer on modes (S, B) and qubits (Q', Q).

    The default keeps every factor in U_elem(2, zeta) (no squeezing trick);
    ``squeeze_trick=True`` gives the constant-strength form.
    """
    c = LL.build_bit_transfer(ell, j, physical=True)
    return _rename(lower_logical(c, _TRANSFER_WIRES, 2, 2, squeeze_trick))


def lower_single_qubit(ell: int, j: int, U, squeeze_trick: bool = False) -> ElementaryCircuit:
    c = LL.build_single_qubit(ell, j, U, physical=True)
    return _rename(lower_logical(c, _SINGLE_WIRES, 2, 3, squeeze_trick))


def lower_two_qubit(ell: int, j: int, k: int, U, squeeze_trick: bool = False) -> ElementaryCircuit:
    c = LL.build_two_qubit(ell, j, k, U, physical=True)
    return _rename(lower_logical(c, _SINGLE_WIRES, 2, 3, squeeze_trick))


def lower_two_qubit_bipartite(ell: int, j: int, k: int, U, squeeze_trick: bool = False) -> ElementaryCircuit:
    c = LL.build_bipartite_two_qubit(ell, j, k, U, physical=True)
    return _rename(lower_logical(c, _BIPARTITE_WIRES, 3, 3, squeeze_trick), bipartite=True)


# --------------------------------------------------------------------------
# audits

@dataclass
class AuditReport:
    passed: bool
    checks: list[dict]

    def to_dict(self) -> dict:
        return {"pass": self.passed, "checks": self.checks}


def audit(c: ElementaryCircuit, bounds: tuple[float, float, float | None]) -> AuditReport:
    """Check squeezing <= alpha, displacement <= zeta, gate count <= max_count;
    on failure the first violating gate is named."""
    alpha, zeta_, max_count = bounds
    tol = 1e-12
    checks = []
    bad_sq = next(((i, g) for i, g in enumerate(c.gates) if g.kind == "Squeeze" and g.strength > alpha + tol), None)
    checks.append({"name": "squeezing", "measured": c.max_squeeze, "bound": alpha, "pass": bad_sq is None,
                   **({"violation": {"index": bad_sq[0], **bad_sq[1].record()}} if bad_sq else {})})
    bad_d = next(((i, g) for i, g in enumerate(c.gates)
                  if g.kind not in ("Squeeze", "OneQubit", "TwoQubit") and g.strength > zeta_ + tol), None)
    checks.append({"name": "displacement", "measured": c.max_displacement, "bound": zeta_, "pass": bad_d is None,
                   **({"violation": {"index": bad_d[0], **bad_d[1].record()}} if bad_d else {})})
    if max_count is not None:
        checks.append({"name": "count", "measured": c.count, "bound": max_count, "pass": c.count <= max_count})
    return AuditReport(all(ch["pass"] for ch in checks), checks)


def count_bounds(ell: int) -> dict[str, float]:
    return {"lsb": ell + 6, "transfer": 85 * ell**2, "transfer_factors": 36 * ell, "two_qubit": 340 * ell**2}
