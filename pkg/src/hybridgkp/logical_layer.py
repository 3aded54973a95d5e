"""Ideal logical layer: bit-manipulation maps on 2^ell-dimensional qudits.

Conventions
-----------
* An ell-bit integer x = sum_j 2^j x_j; the identification J_ell of ell qubits
  with the qudit is the binary one (qubit A_j carries x_j), so J_ell is the
  identity matrix in this indexing.
* Basis index for a register of wires is mixed radix with the first wire most
  significant, e.g. |x> (x) |b> -> 2x + b.
* Two-qubit unitaries act on (first, second) with basis index 2*b_first + b_second.

Maps (``ell`` is the dimension exponent of the qudit the map acts on):

    qCX(ell)   on (X, b):  |x, b> -> |x + b mod 2^ell, b>
    LSB(ell)   on (X, b):  |x, b> -> |x, b xor x_0>
    Embed(ell) on X:       |x> -> |2x>           (2^ell -> 2^(ell+1))
    EmbedAdj(ell):         |2y> -> |y>, odd values are annihilated

The bit transfer C^j_ell X maps |x>|b> to |x - 2^j (b xor x_j)>|b xor x_j>.
It is built from a right-shift W (moving the j low bits of x onto a
catalyst qudit, one bit at a time), a copy-and-clear of the now lowest bit
into the transfer qubit, and W^dag.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .wavepacket import ParameterError

MAP_KINDS = ("qCX", "qCXAdj", "LSB", "LSBAdj", "Embed", "EmbedAdj")
_ADJ = {"qCX": "qCXAdj", "qCXAdj": "qCX", "LSB": "LSBAdj", "LSBAdj": "LSB",
        "Embed": "EmbedAdj", "EmbedAdj": "Embed"}


@dataclass(frozen=True)
class LogicalMap:
    kind: str
    ell: int

    def __post_init__(self):
        if self.kind not in MAP_KINDS:
            raise ParameterError(f"unknown logical map {self.kind!r}")
        if self.ell < (0 if self.kind.startswith("Embed") else 1):
            raise ParameterError(f"{self.kind} needs ell >= 1, got {self.ell}")

    @property
    def dims(self) -> tuple[int, int]:
        D = 2**self.ell
        if self.kind == "Embed":
            return D, 2 * D
        if self.kind == "EmbedAdj":
            return 2 * D, D
        return 2 * D, 2 * D

    def adjoint(self) -> "LogicalMap":
        return LogicalMap(_ADJ[self.kind], self.ell)

    def __str__(self):
        return f"{self.kind}_{self.ell}"


@dataclass(frozen=True)
class UnitaryOp:
    """A one- or two-qubit unitary on qubit wires (not a bit-manipulation map)."""

    matrix: np.ndarray = field(compare=False)
    label: str = "U"

    def adjoint(self) -> "UnitaryOp":
        return UnitaryOp(self.matrix.conj().T, self.label + "^dag")


Op = tuple  # (LogicalMap | UnitaryOp, wires: tuple[str, ...])


def _qudit_target(m: LogicalMap) -> int:
    """Dimension the qudit wire must have before the map."""
    if m.kind == "EmbedAdj":
        return 2 ** (m.ell + 1)
    return 2**m.ell


def _apply_map(m: LogicalMap, vals: list, wires_idx: Sequence[int]) -> bool:
    """In-place action on one basis tuple; returns False if annihilated."""
    D = 2**m.ell
    i = wires_idx[0]
    x = vals[i]
    if m.kind in ("qCX", "qCXAdj"):
        b = vals[wires_idx[1]]
        vals[i] = (x + b) % D if m.kind == "qCX" else (x - b) % D
    elif m.kind in ("LSB", "LSBAdj"):
        k = wires_idx[1]
        vals[k] ^= x & 1
    elif m.kind == "Embed":
        vals[i] = 2 * x
    else:
        if x & 1:
            return False
        vals[i] = x >> 1
    return True


class LogicalCircuit:
    """Ordered maps over named wires with dynamic dimensions.

    ``wires`` maps wire name -> initial dimension. Maps are checked against the
    tracked dimensions when appended; ``op_count`` counts bit-manipulation
    maps only (qubit unitaries are listed separately).
    """

    def __init__(self, wires: dict[str, int], ops: Iterable[Op] = ()):
        self.wires = dict(wires)
        self.order = list(self.wires)
        self.ops: list[Op] = []
        self._dims = dict(self.wires)
        for op in ops:
            self.append(*op)

    def append(self, m, wires: tuple[str, ...]) -> "LogicalCircuit":
        dims = self._dims
        for w in wires:
            if w not in dims:
                raise ParameterError(f"unknown wire {w!r}")
        if isinstance(m, LogicalMap):
            need = _qudit_target(m)
            if dims[wires[0]] != need:
                raise ParameterError(f"{m} needs wire {wires[0]} of dimension {need}, it has {dims[wires[0]]}")
            if m.kind in ("qCX", "qCXAdj", "LSB", "LSBAdj"):
                if len(wires) != 2 or dims[wires[1]] != 2:
                    raise ParameterError(f"{m} needs a qubit on its second wire")
            if m.kind == "Embed":
                dims[wires[0]] *= 2
            elif m.kind == "EmbedAdj":
                dims[wires[0]] //= 2
        else:
            for w in wires:
                if dims[w] != 2:
                    raise ParameterError(f"qubit unitary on wire {w} of dimension {dims[w]}")
        self.ops.append((m, tuple(wires)))
        return self

    def extend(self, ops: Iterable[Op]) -> "LogicalCircuit":
        for op in ops:
            self.append(*op)
        return self

    @property
    def final_dims(self) -> dict[str, int]:
        return dict(self._dims)

    @property
    def op_count(self) -> int:
        return sum(isinstance(m, LogicalMap) for m, _ in self.ops)

    @property
    def unitary_count(self) -> int:
        return sum(isinstance(m, UnitaryOp) for m, _ in self.ops)

    def adjoint(self) -> "LogicalCircuit":
        c = LogicalCircuit(self.final_dims)
        for m, w in reversed(self.ops):
            c.append(m.adjoint(), w)
        return c

    def __add__(self, other: "LogicalCircuit") -> "LogicalCircuit":
        if self.final_dims != other.wires:
            raise ParameterError("wire dimensions do not match for composition")
        return LogicalCircuit(self.wires, self.ops + other.ops)

    # ----- simulation on sparse basis expansions
    def apply(self, state: dict[tuple, complex]) -> dict[tuple, complex]:
        pos = {w: i for i, w in enumerate(self.order)}
        cur = dict(state)
        for m, wires in self.ops:
            idx = [pos[w] for w in wires]
            nxt: dict[tuple, complex] = {}
            if isinstance(m, LogicalMap):
                for vals, amp in cur.items():
                    v = list(vals)
                    if _apply_map(m, v, idx):
                        t = tuple(v)
                        nxt[t] = nxt.get(t, 0) + amp
            else:
                U = m.matrix
                if len(idx) == 1:
                    (a,) = idx
                    for vals, amp in cur.items():
                        for b2 in (0, 1):
                            u = U[b2, vals[a]]
                            if u != 0:
                                v = list(vals)
                                v[a] = b2
                                t = tuple(v)
                                nxt[t] = nxt.get(t, 0) + u * amp
                else:
                    a, b = idx
                    for vals, amp in cur.items():
                        col = 2 * vals[a] + vals[b]
                        for row in range(4):
                            u = U[row, col]
                            if u != 0:
                                v = list(vals)
                                v[a], v[b] = row >> 1, row & 1
                                t = tuple(v)
                                nxt[t] = nxt.get(t, 0) + u * amp
            cur = {k: v for k, v in nxt.items() if v != 0}
        return cur

    def apply_basis(self, **values: int) -> dict[tuple, complex]:
        vals = tuple(values.get(w, 0) for w in self.order)
        return self.apply({vals: 1.0})

    def restricted_matrix(self, data: Sequence[str]) -> tuple[np.ndarray, float]:
        """Matrix on the ``data`` wires with every other wire fixed to 0 at
        input and projected onto 0 at output. Returns (matrix, max leakage)."""
        in_dims = [self.wires[w] for w in data]
        out_dims = [self.final_dims[w] for w in data]
        pos = {w: i for i, w in enumerate(self.order)}
        others = [w for w in self.order if w not in data]
        n_in, n_out = int(np.prod(in_dims)), int(np.prod(out_dims))
        M = np.zeros((n_out, n_in), dtype=complex)
        leak = 0.0
        for col, xs in enumerate(itertools.product(*[range(d) for d in in_dims])):
            vals = [0] * len(self.order)
            for w, x in zip(data, xs):
                vals[pos[w]] = x
            out = self.apply({tuple(vals): 1.0})
            kept = 0.0
            for v, amp in out.items():
                if any(v[pos[w]] for w in others):
                    continue
                row = 0
                for w, d in zip(data, out_dims):
                    row = row * d + v[pos[w]]
                M[row, col] += amp
                kept += abs(amp) ** 2
            leak = max(leak, abs(1.0 - sum(abs(a) ** 2 for a in out.values())) + (sum(abs(a) ** 2 for a in out.values()) - kept))
        return M, leak


# --------------------------------------------------------------------------
# dense matrices of the basic maps

def ideal_matrix(m: LogicalMap) -> np.ndarray:
    if m.ell > 12:
        raise ParameterError(f"dense matrices limited to ell <= 12, got {m.ell}")
    n_in, n_out = m.dims
    M = np.zeros((n_out, n_in))
    if m.kind in ("Embed", "EmbedAdj"):
        for x in range(n_in):
            v = [x]
            if _apply_map(m, v, [0]):
                M[v[0], x] = 1.0
        return M
    for col in range(n_in):
        v = [col >> 1, col & 1]
        _apply_map(m, v, [0, 1])
        M[2 * v[0] + v[1], col] = 1.0
    return M


# --------------------------------------------------------------------------
# bit transfer

def _adjoint_ops(ops: Sequence[Op]) -> list[Op]:
    return [(m.adjoint(), w) for m, w in reversed(ops)]


def right_shift_ops(ell: int, j: int, X: str, Y: str, C: str, physical: bool = False) -> list[Op]:
    """W^ell_j: moves bits x_0..x_{j-1} of X onto Y, using C as scratch qubit.

    Logical variant: Y is a qubit that becomes a qudit of growing dimension.
    Physical variant: Y starts as a dimension-2 qudit (the auxiliary GKP(0)_2
    mode) and cannot be an LSB target, so the first bit goes through C.
    """
    if not 0 <= j < ell:
        raise ParameterError(f"need 0 <= j < ell, got j={j}, ell={ell}")
    if j == 0:
        return []
    if physical:
        ops: list[Op] = [
            (LogicalMap("LSB", ell), (X, C)),
            (LogicalMap("qCXAdj", ell), (X, C)),
            (LogicalMap("EmbedAdj", ell - 1), (X,)),
            (LogicalMap("qCX", 1), (Y, C)),
            (LogicalMap("LSB", 1), (Y, C)),
        ]
    else:
        ops = [
            (LogicalMap("LSB", ell), (X, Y)),
            (LogicalMap("qCXAdj", ell), (X, Y)),
            (LogicalMap("EmbedAdj", ell - 1), (X,)),
        ]
    for k in range(1, j):
        m = ell - k  # current exponent of X; Y has exponent k
        ops += [
            (LogicalMap("LSB", m), (X, C)),
            (LogicalMap("qCXAdj", m), (X, C)),
            (LogicalMap("EmbedAdj", m - 1), (X,)),
            (LogicalMap("Embed", k), (Y,)),
            (LogicalMap("qCX", k + 1), (Y, C)),
            (LogicalMap("LSB", k + 1), (Y, C)),
        ]
    return ops


def bit_transfer_ops(ell: int, j: int, X: str, b: str, Y: str, C: str, physical: bool = False) -> list[Op]:
    W = right_shift_ops(ell, j, X, Y, C, physical)
    mid = [(LogicalMap("LSB", ell - j), (X, b)), (LogicalMap("qCXAdj", ell - j), (X, b))]
    return W + mid + _adjoint_ops(W)


def transfer_bound(j: int) -> int:
    """Map-count bound for the logical construction, max(2, 12j - 4)."""
    return max(2, 12 * j - 4)


def build_bit_transfer(ell: int, j: int, physical: bool = False) -> LogicalCircuit:
    """Circuit on wires A (qudit 2^ell), b (transfer qubit), c1, c2 (catalysts)."""
    if not 0 <= j < ell:
        raise ParameterError(f"need 0 <= j < ell, got j={j}, ell={ell}")
    c = LogicalCircuit({"A": 2**ell, "b": 2, "c1": 2, "c2": 2})
    c.extend(bit_transfer_ops(ell, j, "A", "b", "c1", "c2", physical))
    if not physical:
        assert c.op_count <= transfer_bound(j), (c.op_count, j)
    return c


def _check_unitary(U, n):
    U = np.asarray(U, dtype=complex)
    if U.shape != (n, n):
        raise ParameterError(f"expected a {n}x{n} matrix, got {U.shape}")
    if np.max(np.abs(U.conj().T @ U - np.eye(n))) > 1e-12:
        raise ParameterError("matrix is not unitary to 1e-12")
    return U


def build_single_qubit(ell: int, j: int, U, physical: bool = False) -> LogicalCircuit:
    U = _check_unitary(U, 2)
    c = LogicalCircuit({"A": 2**ell, "t1": 2, "t2": 2, "c1": 2, "c2": 2})
    T = bit_transfer_ops(ell, j, "A", "t1", "c1", "c2", physical)
    c.extend(T).append(UnitaryOp(U), ("t1",)).extend(_adjoint_ops(T))
    return c


def build_two_qubit(ell: int, j: int, k: int, U, physical: bool = False) -> LogicalCircuit:
    """U acting on (A_j, A_k) through two bit transfers and their adjoints."""
    if j == k or not (0 <= j < ell and 0 <= k < ell):
        raise ParameterError(f"need distinct 0 <= j, k < ell, got j={j}, k={k}, ell={ell}")
    U = _check_unitary(U, 4)
    c = LogicalCircuit({"A": 2**ell, "t1": 2, "t2": 2, "c1": 2, "c2": 2})
    Tj = bit_transfer_ops(ell, j, "A", "t1", "c1", "c2", physical)
    Tk = bit_transfer_ops(ell, k, "A", "t2", "c1", "c2", physical)
    c.extend(Tj).extend(Tk).append(UnitaryOp(U), ("t1", "t2"))
    c.extend(_adjoint_ops(Tk)).extend(_adjoint_ops(Tj))
    if not physical:
        assert c.op_count <= 48 * ell - 16
    return c


def build_bipartite_two_qubit(ell: int, j: int, k: int, U, physical: bool = False) -> LogicalCircuit:
    """U acting on (A_j, B_k) for two qudits A, B sharing the catalysts."""
    if not (0 <= j < ell and 0 <= k < ell):
        raise ParameterError(f"need 0 <= j, k < ell, got j={j}, k={k}, ell={ell}")
    U = _check_unitary(U, 4)
    c = LogicalCircuit({"A": 2**ell, "B": 2**ell, "t1": 2, "t2": 2, "c1": 2, "c2": 2})
    Tj = bit_transfer_ops(ell, j, "A", "t1", "c1", "c2", physical)
    Tk = bit_transfer_ops(ell, k, "B", "t2", "c1", "c2", physical)
    c.extend(Tj).extend(Tk).append(UnitaryOp(U), ("t1", "t2"))
    c.extend(_adjoint_ops(Tk)).extend(_adjoint_ops(Tj))
    if not physical:
        assert c.op_count <= 48 * ell - 16
    return c


# --------------------------------------------------------------------------
# dense targets and brute-force verification

def embed_qubit_gate(U, ell: int, qubits: Sequence[int]) -> np.ndarray:
    """Dense 2^ell matrix of U acting on qubits A_q (first listed = most
    significant in U's index)."""
    U = np.asarray(U, dtype=complex)
    n = len(qubits)
    D = 2**ell
    M = np.zeros((D, D), dtype=complex)
    mask = sum(1 << q for q in qubits)
    for x in range(D):
        col = 0
        for q in qubits:
            col = 2 * col + (x >> q & 1)
        for row in range(2**n):
            u = U[row, col]
            if u == 0:
                continue
            y = x & ~mask
            for i, q in enumerate(qubits):
                y |= (row >> (n - 1 - i) & 1) << q
            M[y, x] += u
    return M


def bipartite_target(U, ell: int, j: int, k: int) -> np.ndarray:
    """Dense (2^ell)^2 matrix of U on (A_j, B_k); index x_A * 2^ell + x_B."""
    return embed_qubit_gate(U, 2 * ell, [ell + j, k])


def verify_bit_transfer(ell: int, j: int, physical: bool = False, samples: int = 1000,
                        seed: int = 0) -> tuple[bool, int]:
    """Compare against |x>|b> -> |x - 2^j (b xor x_j)>|b xor x_j> with the
    catalysts restored. Exhaustive for ell <= 6, ``samples`` random inputs
    otherwise. Returns (ok, number of inputs checked)."""
    c = build_bit_transfer(ell, j, physical)
    D = 2**ell
    if ell <= 6:
        inputs = [(x, b) for x in range(D) for b in (0, 1)]
    else:
        rng = np.random.default_rng(seed)
        inputs = [(int(rng.integers(D)), int(rng.integers(2))) for _ in range(samples)]
    for x, b in inputs:
        out = c.apply_basis(A=x, b=b)
        b2 = b ^ (x >> j & 1)
        want = ((x - 2**j * b2) % D, b2, 0, 0)
        if len(out) != 1 or want not in out or abs(out[want] - 1) > 0:
            return False, len(inputs)
    return True, len(inputs)


def max_deviation(M: np.ndarray, target: np.ndarray) -> float:
    return float(np.max(np.abs(M - target)))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    from scipy.stats import unitary_group

    return unitary_group.rvs(n, random_state=rng)


def verify_two_qubit(ell: int, j: int, k: int, U, physical: bool = False) -> float:
    c = build_two_qubit(ell, j, k, U, physical)
    M, leak = c.restricted_matrix(["A"])
    return max(max_deviation(M, embed_qubit_gate(U, ell, [j, k])), leak)


def verify_bipartite(ell: int, j: int, k: int, U, physical: bool = False) -> float:
    c = build_bipartite_two_qubit(ell, j, k, U, physical)
    M, leak = c.restricted_matrix(["A", "B"])
    return max(max_deviation(M, bipartite_target(U, ell, j, k)), leak)
