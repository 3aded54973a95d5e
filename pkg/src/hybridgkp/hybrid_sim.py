"""States of n oscillators and m qubits as finite sums of product terms.

A term is ``coeff * train_0 (x) ... (x) train_{n-1} (x) |bits>`` where each
train is a :class:`~hybridgkp.wavepacket.PacketTrain` and ``bits`` is an
integer whose bit ``a`` is the state of qubit ``a``. Mode gates act train by
train (no splitting); only non-diagonal qubit gates create new terms.
"""

from __future__ import annotations

import cmath
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .gkp_states import ModeState
from .wavepacket import PacketTrain, ParameterError, train_inner

PRUNE_REL = 1e-15

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)

MODE_KINDS = ("DispQ", "DispP", "Squeeze")
CTRL_KINDS = ("CtrlDispQ", "CtrlDispP")
QUBIT_KINDS = ("OneQubit", "TwoQubit")


@dataclass(frozen=True)
class ElementaryGate:
    """One elementary operation.

    DispQ(mode, t)        e^{itQ}          DispP(mode, t)     e^{-itP}
    Squeeze(mode, beta)   M_beta           CtrlDisp*(qubit, mode, t): controlled versions
    OneQubit(qubit, U)    2x2 unitary      TwoQubit(qa, qb, U): 4x4, basis index 2*b_a + b_b
    """

    kind: str
    mode: int = -1
    qubit: int = -1
    qubit_b: int = -1
    param: float = 0.0
    matrix: np.ndarray | None = field(default=None, compare=False)
    label: str = ""

    def __post_init__(self):
        if self.kind not in MODE_KINDS + CTRL_KINDS + QUBIT_KINDS:
            raise ParameterError(f"unknown gate kind {self.kind!r}")
        if self.kind == "Squeeze" and not self.param > 0:
            raise ParameterError(f"squeezing parameter must be positive, got {self.param}")
        if self.kind in QUBIT_KINDS:
            U = np.asarray(self.matrix, dtype=complex)
            n = 2 if self.kind == "OneQubit" else 4
            if U.shape != (n, n):
                raise ParameterError(f"{self.kind} needs a {n}x{n} matrix, got shape {U.shape}")
            if np.max(np.abs(U.conj().T @ U - np.eye(n))) > 1e-12:
                raise ParameterError(f"{self.kind} matrix is not unitary to 1e-12")
            if self.kind == "TwoQubit" and self.qubit == self.qubit_b:
                raise ParameterError("two-qubit gate needs two distinct qubits")
            object.__setattr__(self, "matrix", U)

    @property
    def strength(self) -> float:
        if self.kind == "Squeeze":
            return max(self.param, 1.0 / self.param)
        if self.kind in QUBIT_KINDS:
            return 0.0
        return abs(self.param)

    @property
    def wires(self) -> tuple:
        if self.kind in MODE_KINDS:
            return (("mode", self.mode),)
        if self.kind in CTRL_KINDS:
            return (("qubit", self.qubit), ("mode", self.mode))
        if self.kind == "OneQubit":
            return (("qubit", self.qubit),)
        return (("qubit", self.qubit), ("qubit", self.qubit_b))

    def inverse(self) -> "ElementaryGate":
        if self.kind == "Squeeze":
            return ElementaryGate("Squeeze", self.mode, param=1.0 / self.param, label=self.label)
        if self.kind in QUBIT_KINDS:
            lab = self.label if self.label in ("H", "X", "CNOT", "SWAP", "I") else (self.label + "^dag" if self.label else "")
            return ElementaryGate(self.kind, qubit=self.qubit, qubit_b=self.qubit_b,
                                  matrix=self.matrix.conj().T, label=lab)
        return ElementaryGate(self.kind, self.mode, self.qubit, param=-self.param, label=self.label)

    def record(self) -> dict:
        wires = [f"{w[0][0]}{w[1]}" for w in self.wires]
        if self.kind in QUBIT_KINDS:
            param = [[float(z.real), float(z.imag)] for z in self.matrix.reshape(-1)]
        else:
            param = float(self.param)
        rec = {"kind": self.kind, "wires": wires, "parameter": param}
        if self.label:
            rec["label"] = self.label
        return rec


def DispQ(mode: int, t: float) -> ElementaryGate:
    return ElementaryGate("DispQ", mode, param=float(t))


def DispP(mode: int, t: float) -> ElementaryGate:
    return ElementaryGate("DispP", mode, param=float(t))


def Squeeze(mode: int, beta: float) -> ElementaryGate:
    return ElementaryGate("Squeeze", mode, param=float(beta))


def CtrlDispQ(qubit: int, mode: int, t: float) -> ElementaryGate:
    return ElementaryGate("CtrlDispQ", mode, qubit, param=float(t))


def CtrlDispP(qubit: int, mode: int, t: float) -> ElementaryGate:
    return ElementaryGate("CtrlDispP", mode, qubit, param=float(t))


def OneQubit(qubit: int, U, label: str = "") -> ElementaryGate:
    return ElementaryGate("OneQubit", qubit=qubit, matrix=np.asarray(U, dtype=complex), label=label)


def TwoQubit(qa: int, qb: int, U, label: str = "") -> ElementaryGate:
    return ElementaryGate("TwoQubit", qubit=qa, qubit_b=qb, matrix=np.asarray(U, dtype=complex), label=label)


def Hadamard(qubit: int) -> ElementaryGate:
    return OneQubit(qubit, HADAMARD, "H")


# --------------------------------------------------------------------------

Term = tuple  # (coeff: complex, trains: tuple[PacketTrain, ...], bits: int)


def bits_from_string(s: str) -> int:
    """Character ``a`` of the string is qubit ``a``."""
    return sum(1 << a for a, ch in enumerate(s) if ch == "1")


def bits_to_string(bits: int, n: int) -> str:
    return "".join("1" if bits >> a & 1 else "0" for a in range(n))


class HybridState:
    def __init__(self, n_modes: int, n_qubits: int, terms: Iterable[Term] = ()):
        self.n_modes = int(n_modes)
        self.n_qubits = int(n_qubits)
        self.terms: list[Term] = [(complex(c), tuple(tr), int(b)) for c, tr, b in terms]
        self.peak_terms = len(self.terms)
        for _, tr, b in self.terms:
            if len(tr) != self.n_modes or b >> self.n_qubits:
                raise ParameterError("term does not match the state's shape")

    @classmethod
    def product(cls, modes: Sequence[ModeState | PacketTrain], bits: str | int = 0,
                n_qubits: int | None = None, coeff: complex = 1.0) -> "HybridState":
        trains = tuple(m.train if isinstance(m, ModeState) else m for m in modes)
        if isinstance(bits, str):
            n_qubits = len(bits) if n_qubits is None else n_qubits
            bits = bits_from_string(bits)
        if n_qubits is None:
            raise ParameterError("n_qubits is required when bits is an int")
        return cls(len(trains), n_qubits, [(coeff, trains, bits)])

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"HybridState(modes={self.n_modes}, qubits={self.n_qubits}, terms={len(self.terms)})"

    def _same_shape(self, other: "HybridState"):
        if (self.n_modes, self.n_qubits) != (other.n_modes, other.n_qubits):
            raise ParameterError(f"shape mismatch: ({self.n_modes},{self.n_qubits}) vs "
                                 f"({other.n_modes},{other.n_qubits})")

    def __add__(self, other: "HybridState") -> "HybridState":
        self._same_shape(other)
        return HybridState(self.n_modes, self.n_qubits, self.terms + other.terms)

    def __sub__(self, other: "HybridState") -> "HybridState":
        return self + (-1.0) * other

    def __rmul__(self, c: complex) -> "HybridState":
        return HybridState(self.n_modes, self.n_qubits, [(c * t[0], t[1], t[2]) for t in self.terms])

    def norm(self) -> float:
        return math.sqrt(max(inner_product(self, self).real, 0.0))

    def qubit_marginal_bits(self) -> set[int]:
        return {b for _, _, b in self.terms}


def merge_terms(s: HybridState) -> HybridState:
    """Sum coefficients of terms with identical trains and bits; prune zeros."""
    acc: dict = {}
    order = []
    for c, trains, bits in s.terms:
        key = (bits, tuple(t.key for t in trains))
        if key in acc:
            acc[key][0] += c
        else:
            acc[key] = [c, trains, bits]
            order.append(key)
    if not order:
        return HybridState(s.n_modes, s.n_qubits)
    cmax = max(abs(acc[k][0]) for k in order)
    out = [(acc[k][0], acc[k][1], acc[k][2]) for k in order
           if acc[k][0] != 0 and abs(acc[k][0]) >= PRUNE_REL * cmax]
    res = HybridState(s.n_modes, s.n_qubits, out)
    res.peak_terms = max(s.peak_terms, len(out))
    return res


def _check_indices(s: HybridState, g: ElementaryGate):
    if g.kind in MODE_KINDS + CTRL_KINDS and not 0 <= g.mode < s.n_modes:
        raise ParameterError(f"mode index {g.mode} out of range for {s.n_modes} modes")
    if g.kind in CTRL_KINDS + QUBIT_KINDS and not 0 <= g.qubit < s.n_qubits:
        raise ParameterError(f"qubit index {g.qubit} out of range for {s.n_qubits} qubits")
    if g.kind == "TwoQubit" and not 0 <= g.qubit_b < s.n_qubits:
        raise ParameterError(f"qubit index {g.qubit_b} out of range for {s.n_qubits} qubits")


def _mode_op(g: ElementaryGate):
    if g.kind in ("DispQ", "CtrlDispQ"):
        return lambda tr: tr.phase_mul(g.param)
    if g.kind in ("DispP", "CtrlDispP"):
        return lambda tr: tr.translate(g.param)
    return lambda tr: tr.dilate(g.param)


def apply_gate(s: HybridState, g: ElementaryGate) -> HybridState:
    _check_indices(s, g)
    if g.kind in MODE_KINDS or g.kind in CTRL_KINDS:
        op = _mode_op(g)
        memo: dict = {}
        out = []
        m = g.mode
        for c, trains, bits in s.terms:
            if g.kind in CTRL_KINDS and not bits >> g.qubit & 1:
                out.append((c, trains, bits))
                continue
            tr = trains[m]
            hit = memo.get(tr.key)
            if hit is None:
                hit = memo[tr.key] = op(tr)
            f, new = hit
            out.append((c * f, trains[:m] + (new,) + trains[m + 1:], bits))
        res = HybridState(s.n_modes, s.n_qubits, out)
        res.peak_terms = max(s.peak_terms, len(out))
        return res

    U = g.matrix
    out = []
    if g.kind == "OneQubit":
        a = g.qubit
        for c, trains, bits in s.terms:
            b = bits >> a & 1
            base = bits & ~(1 << a)
            for b2 in (0, 1):
                u = U[b2, b]
                if u != 0:
                    out.append((c * u, trains, base | (b2 << a)))
    else:
        qa, qb = g.qubit, g.qubit_b
        for c, trains, bits in s.terms:
            idx = 2 * (bits >> qa & 1) + (bits >> qb & 1)
            base = bits & ~(1 << qa) & ~(1 << qb)
            for idx2 in range(4):
                u = U[idx2, idx]
                if u != 0:
                    out.append((c * u, trains, base | ((idx2 >> 1) << qa) | ((idx2 & 1) << qb)))
    res = HybridState(s.n_modes, s.n_qubits, out)
    res.peak_terms = max(s.peak_terms, len(out))
    return merge_terms(res)


def run_circuit(s: HybridState, gates: Sequence[ElementaryGate]) -> HybridState:
    """Apply gates in order; the result's ``peak_terms`` records the largest
    term count seen along the way."""
    for g in gates:
        s = apply_gate(s, g)
    return merge_terms(s)


# --------------------------------------------------------------------------
# inner products

_OVERLAP_CACHE: dict = {}
_CACHE_MAX = 200_000


def _train_overlap_cached(a: PacketTrain, b: PacketTrain) -> complex:
    key = (a.key, b.key)
    v = _OVERLAP_CACHE.get(key)
    if v is None:
        if len(_OVERLAP_CACHE) > _CACHE_MAX:
            _OVERLAP_CACHE.clear()
        v = _OVERLAP_CACHE[key] = train_inner(a, b)
    return v


def clear_overlap_cache():
    _OVERLAP_CACHE.clear()


def _group(s: HybridState):
    groups = defaultdict(list)
    for c, trains, bits in s.terms:
        groups[bits].append((c, trains))
    return groups


def _index(terms, n_modes):
    """Distinct trains per mode and the per-term index tuples."""
    uniq = [dict() for _ in range(n_modes)]
    reps = [[] for _ in range(n_modes)]
    idx = np.empty((len(terms), n_modes), dtype=np.int64)
    for t, (_, trains) in enumerate(terms):
        for m, tr in enumerate(trains):
            k = tr.key
            i = uniq[m].get(k)
            if i is None:
                i = uniq[m][k] = len(reps[m])
                reps[m].append(tr)
            idx[t, m] = i
    coeffs = np.array([c for c, _ in terms], dtype=complex)
    return reps, idx, coeffs


def _dense(idx, coeffs, shape):
    T = np.zeros(shape, dtype=complex)
    np.add.at(T, tuple(idx.T), coeffs)
    return T


def inner_product(a: HybridState, b: HybridState) -> complex:
    """<a, b>: term pairs with equal qubit strings, product of mode overlaps."""
    a._same_shape(b)
    ga, gb = _group(a), _group(b)
    n = a.n_modes
    total = 0j
    for bits in sorted(set(ga) & set(gb)):
        ta, tb = ga[bits], gb[bits]
        if n == 0:
            total += np.conj(sum(c for c, _ in ta)) * sum(c for c, _ in tb)
            continue
        ra, ia, ca = _index(ta, n)
        rb, ib, cb = _index(tb, n)
        grams = [np.array([[_train_overlap_cached(x, y) for y in rb[m]] for x in ra[m]], dtype=complex)
                 for m in range(n)]
        shape_a = tuple(len(r) for r in ra)
        shape_b = tuple(len(r) for r in rb)
        if math.prod(shape_a) <= 4_000_000 and math.prod(shape_b) <= 4_000_000:
            T = _dense(ib, cb, shape_b)
            for m in range(n):
                T = np.moveaxis(np.tensordot(grams[m], T, axes=([1], [m])), 0, m)
            total += np.vdot(_dense(ia, ca, shape_a), T)
        else:  # fall back to blocked pairwise sums
            for start in range(0, len(ca), 512):
                blk = slice(start, start + 512)
                P = np.ones((len(ca[blk]), len(cb)), dtype=complex)
                for m in range(n):
                    P *= grams[m][ia[blk, m][:, None], ib[None, :, m]]
                total += np.conj(ca[blk]) @ P @ cb
    return complex(total)


def state_norm(s: HybridState) -> float:
    return s.norm()
