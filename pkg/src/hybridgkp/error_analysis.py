"""Logical-error bounds from matrix elements.

For an implementation W of a logical map U between codes with bases
{enc_in k} and {enc_out m} the matrix

    B_{jk} = sum_m conj(U_{mj}) <enc_out m | W | enc_in k>

controls the logical gate error: if B is s-sparse with real nonzero
diagonal then

    err <= 8 ((1 - min_j |B_jj|) + (s - 1) max_{j != k} |B_jk|)^{1/2}.

Errors of composite circuits are bounded by summing per-map bounds. The
exact diamond norm is never computed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import compiler
from .gkp_states import GkpCodeParams, ancilla_params, make_codeword, symmetric_params, comb_params
from .hybrid_sim import HybridState, inner_product, run_circuit
from .logical_layer import LogicalMap, bit_transfer_ops, ideal_matrix
from .wavepacket import ParameterError

SPARSITY_THRESHOLD = 1e-12
ORTHO_TOL = 1e-10
IMAG_TOL = 1e-8
VACUOUS = 2.0


class PreconditionError(ValueError):
    pass


@dataclass
class BMatrix:
    entries: np.ndarray
    sparsity: int
    min_diag: float
    max_offdiag: float
    diag_imag_max: float
    discarded_max: float = 0.0

    @classmethod
    def from_entries(cls, B: np.ndarray) -> "BMatrix":
        B = np.asarray(B, dtype=complex)
        if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[0] < 1:
            raise ParameterError(f"B must be square and nonempty, got shape {B.shape}")
        mag = np.abs(B)
        nz = mag > SPARSITY_THRESHOLD
        s = int(max(nz.sum(axis=0).max(), nz.sum(axis=1).max()))
        off = mag.copy()
        np.fill_diagonal(off, 0.0)
        small = mag[~nz]
        return cls(
            entries=B,
            sparsity=max(s, 1),
            min_diag=float(np.min(np.abs(np.diag(B)))),
            max_offdiag=float(off.max()) if B.shape[0] > 1 else 0.0,
            diag_imag_max=float(np.max(np.abs(np.diag(B).imag))),
            discarded_max=float(small.max()) if small.size else 0.0,
        )

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def subspace_deviation(self) -> float:
        return float(np.linalg.norm(self.entries - np.eye(self.dim)))

    def summary(self) -> dict:
        return {"diag_min": self.min_diag, "offdiag_max": self.max_offdiag, "sparsity": self.sparsity}


def _check_orthonormal(states: Sequence[HybridState], name: str):
    n = len(states)
    for a in range(n):
        for b in range(a, n):
            g = inner_product(states[a], states[b])
            want = 1.0 if a == b else 0.0
            if abs(g - want) > ORTHO_TOL:
                raise PreconditionError(
                    f"{name} basis not orthonormal: <{a}|{b}> = {g:.3e} (expected {want})")


def compute_B(implementation, logical: np.ndarray, code_in: Sequence[HybridState],
              code_out: Sequence[HybridState], check: bool = True) -> BMatrix:
    """``implementation`` is an ElementaryCircuit or a gate list; ``logical``
    has shape (len(code_out), len(code_in))."""
    gates = getattr(implementation, "gates", implementation)
    U = np.asarray(logical, dtype=complex)
    if U.shape != (len(code_out), len(code_in)):
        raise ParameterError(f"logical map has shape {U.shape}, codes have "
                             f"{len(code_out)} x {len(code_in)} states")
    if check:
        _check_orthonormal(code_in, "input")
        if code_out is not code_in:
            _check_orthonormal(code_out, "output")
    images = [run_circuit(s, gates) for s in code_in]
    G = np.array([[inner_product(o, w) for w in images] for o in code_out])
    return BMatrix.from_entries(U.conj().T @ G)


def sparse_bound(b: BMatrix) -> float:
    diag = np.diag(b.entries)
    if b.diag_imag_max > IMAG_TOL:
        raise PreconditionError(f"diagonal of B is not real: max |Im B_jj| = {b.diag_imag_max:.3e}")
    if np.min(np.abs(diag)) == 0.0:
        raise PreconditionError("diagonal of B has a zero entry")
    val = (1.0 - b.min_diag) + (b.sparsity - 1) * b.max_offdiag
    return 8.0 * math.sqrt(max(val, 0.0))


def compose_bounds(steps: Sequence[float]) -> float:
    for s in steps:
        if s < 0:
            raise ParameterError(f"negative error bound {s}")
    return float(math.fsum(steps))


def noisy_bound(ideal: float, noise_errors: Sequence[float]) -> float:
    return compose_bounds([ideal, *noise_errors])


# --------------------------------------------------------------------------
# closed forms

ANALYTIC_TARGETS = ("qcx", "lsb", "embed", "transfer", "twoqubit", "bipartite", "circuit",
                    "comb_qcx", "comb_lsb", "comb_circuit")


def analytic_bound(target: str, ell: int | None = None, kappa: float | None = None,
                   delta: float | None = None, eps: float | None = None, L: int | None = None,
                   T: int = 1) -> tuple[float, list[str]]:
    """Closed-form bound and a list of violated hypotheses (empty if none)."""
    flags: list[str] = []
    if kappa is not None and not 0 < kappa < 0.25:
        flags.append(f"kappa={kappa} outside (0, 1/4)")
    if delta is not None and not 0 < delta < 0.25:
        flags.append(f"Delta={delta} outside (0, 1/4)")
    if eps is not None and ell is not None and eps > 2.0 ** -(ell + 1) + 1e-15:
        flags.append(f"eps={eps} > 2^-(ell+1)")

    def need(**kw):
        for k, v in kw.items():
            if v is None:
                raise ParameterError(f"target {target!r} needs {k}")

    if target == "qcx":
        need(kappa=kappa)
        return 8 * kappa, flags
    if target in ("lsb", "comb_lsb"):
        need(ell=ell, delta=delta, eps=eps)
        return 16 * 2**ell * delta + 32 * (delta / eps) ** 2, flags
    if target == "embed":
        return 0.0, flags
    if target == "transfer":
        need(ell=ell, kappa=kappa)
        return 96 * ell * kappa, flags
    if target in ("twoqubit", "bipartite"):
        need(ell=ell, kappa=kappa)
        return 400 * ell * kappa, flags
    if target == "circuit":
        need(ell=ell, kappa=kappa)
        return T * 400 * ell * kappa, flags
    if target == "comb_qcx":
        need(L=L)
        return 12 / math.sqrt(L), flags
    if target == "comb_circuit":
        need(ell=ell, delta=delta)
        if not delta < 2.0**-ell:
            flags.append(f"Delta={delta} not below 2^-ell")
        return 600 * 2 ** (2 * ell) * T * delta, flags
    raise ParameterError(f"unknown target {target!r}; choose from {', '.join(ANALYTIC_TARGETS)}")


# --------------------------------------------------------------------------
# B matrices of the basic maps

def code_states(p: GkpCodeParams, with_qubit: bool = True, strict: bool = True) -> list[HybridState]:
    """Code basis (index 2x + b when a qubit is attached)."""
    cws = [make_codeword(p, x, strict=strict) for x in range(p.d)]
    if not with_qubit:
        return [HybridState.product([c], 0, n_qubits=0) for c in cws]
    return [HybridState.product([c], b, n_qubits=1) for c in cws for b in (0, 1)]


def _params_key(p: GkpCodeParams) -> tuple:
    return (p.d, p.kappa, p.delta, p.eps, p.envelope, p.L)


@lru_cache(maxsize=512)
def _map_B_cached(kind: str, key: tuple) -> BMatrix:
    d, kappa, delta, eps, envelope, L = key
    p = GkpCodeParams(d, kappa, delta, eps, envelope, L)
    ell = int(round(math.log2(d)))
    m = LogicalMap(kind, ell)
    circ = compiler.lower_basic(m, squeeze_trick=True)
    if kind == "Embed":
        p_out = p.with_dim(2 * d)
        return compute_B(circ, ideal_matrix(m), code_states(p, False), code_states(p_out, False, strict=False))
    states = code_states(p)
    return compute_B(circ, ideal_matrix(m), states, states)


def map_B(kind: str, p: GkpCodeParams) -> BMatrix:
    """B of the basic map ``kind`` (qCX, LSB, Embed) on the code ``p``."""
    if kind not in ("qCX", "LSB", "Embed"):
        raise ParameterError(f"no B computation for {kind!r}")
    return _map_B_cached(kind, _params_key(p))


def map_bound(kind: str, p: GkpCodeParams) -> float:
    """Corollary bound for a basic map or its adjoint (same value)."""
    base = kind[:-3] if kind.endswith("Adj") else kind
    return sparse_bound(map_B(base, p))


def element_matrix(kind: str, p: GkpCodeParams) -> np.ndarray:
    """Raw elements <enc_out a | W | enc_in b>."""
    b = map_B(kind, p)
    ell = int(round(math.log2(p.d)))
    return ideal_matrix(LogicalMap(kind, ell)).astype(complex) @ b.entries


# --------------------------------------------------------------------------
# reports

@dataclass
class ErrorReport:
    target: str
    params: dict
    corollary_bound: float
    analytic_bound: float
    b: BMatrix | None = None
    checks: list[dict] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.corollary_bound < 0:
            raise ValueError("corollary bound must be >= 0")

    @property
    def vacuous(self) -> bool:
        return self.analytic_bound >= VACUOUS

    @property
    def subspace_deviation(self) -> float | None:
        return None if self.b is None else self.b.subspace_deviation

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "params": self.params,
            "corollary_bound": self.corollary_bound,
            "analytic_bound": self.analytic_bound,
            "vacuous": self.vacuous,
            "B": None if self.b is None else self.b.summary(),
            "subspace_deviation": self.subspace_deviation,
            "checks": self.checks,
            "flags": self.flags,
            **self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _check(name, measured, bound, ok=None) -> dict:
    return {"name": name, "measured": float(measured), "bound": float(bound),
            "pass": bool(measured <= bound + 1e-15) if ok is None else bool(ok)}


def transfer_composed(p: GkpCodeParams, ell: int, j: int, adjoint: bool = False) -> tuple[float, int]:
    """Sum of per-map corollary bounds over the physical bit transfer.

    Maps on the data mode at exponent m use the code p at dimension 2^m; maps
    on the auxiliary mode use the ancilla code (same Delta, eps 2^-(ell+1))
    at its current dimension. Returns (bound, number of maps)."""
    anc = ancilla_params(p, ell)
    ops = bit_transfer_ops(ell, j, "S", "Qp", "B", "Q", physical=True)
    steps = []
    for m, wires in ops:
        if m.kind.startswith("Embed"):
            steps.append(0.0)
            continue
        base = p if wires[0] == "S" else anc
        steps.append(map_bound(m.kind, base.with_dim(2**m.ell)))
    return compose_bounds(steps), len(ops)


def report(target: str, ell: int, kappa: float | None = None, delta: float | None = None,
           eps: float | None = None, L: int | None = None, T: int = 1, envelope: str = "gaussian",
           j: int | None = None, k: int | None = None) -> ErrorReport:
    """Computed (corollary) bound next to the closed form for one target.

    Gaussian codes use the symmetric preset from kappa; comb codes take
    Delta (and optionally eps, L)."""
    if envelope == "gaussian":
        if kappa is None:
            raise ParameterError("gaussian envelope needs kappa")
        p = symmetric_params(kappa, 2**ell)
    else:
        if delta is None:
            raise ParameterError("comb envelope needs delta")
        p = comb_params(delta, 2**ell, eps=eps, L=L)
    params = {"ell": ell, "T": T, **p.as_dict()}
    prefix = "comb_" if envelope == "comb" else ""
    ab = lambda tgt: analytic_bound(tgt, ell=ell, kappa=p.kappa if envelope == "gaussian" else None,  # noqa: E731
                                    delta=p.delta, eps=p.eps, L=p.L or None, T=T)

    if target in ("qcx", "lsb", "embed"):
        kind = {"qcx": "qCX", "lsb": "LSB", "embed": "Embed"}[target]
        b = map_B(kind, p)
        cb = sparse_bound(b)
        tgt = target if envelope == "gaussian" or target == "embed" else prefix + target
        a, flags = ab(tgt)
        checks = [_check("corollary<=analytic", cb, a)]
        return ErrorReport(target, params, cb, a, b, checks, flags)

    if target == "transfer":
        jj = ell - 1 if j is None else j
        cb, n = transfer_composed(p, ell, jj)
        a, flags = ab("transfer") if envelope == "gaussian" else (float("nan"), [])
        extra = {"maps": n, "j": jj}
        checks = [_check("corollary<=analytic", cb, a)] if envelope == "gaussian" else []
        return ErrorReport(target, params, cb, a, None, checks, flags, extra)

    if target in ("twoqubit", "bipartite", "circuit"):
        jj = ell - 1 if j is None else j
        kk = (ell - 2 if ell > 1 else 0) if k is None else k
        tj, _ = transfer_composed(p, ell, jj)
        tk, _ = transfer_composed(p, ell, kk)
        per_gate = compose_bounds([tj, tk, tk, tj])
        cb = per_gate if target != "circuit" else compose_bounds([per_gate] * T)
        if envelope == "gaussian":
            a, flags = ab(target)
        else:
            a, flags = ab("comb_circuit")
            if target != "circuit":
                a = a / T
        checks = [_check("corollary<=analytic", cb, a)]
        return ErrorReport(target, params, cb, a, None, checks, flags, {"j": jj, "k": kk})

    raise ParameterError(f"unknown target {target!r}")


# --------------------------------------------------------------------------
# matrix-element inequalities

@dataclass
class InequalityReport:
    gate: str
    params: dict
    checks: list[dict]
    elements: np.ndarray | None = None

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def to_dict(self, with_elements: bool = False) -> dict:
        out = {"gate": self.gate, "params": self.params, "pass": self.passed, "checks": self.checks}
        if with_elements and self.elements is not None:
            out["elements"] = [[[float(z.real), float(z.imag)] for z in row] for row in self.elements]
        return out


def _pattern(kind: str, ell: int) -> np.ndarray:
    return ideal_matrix(LogicalMap(kind, ell)) > 0.5


def check_inequalities(p: GkpCodeParams, gate: str, z: int = 1) -> InequalityReport:
    """Compare computed matrix elements with their closed-form bounds.

    gate: qcx, lsb, embed (any code p), comb_shift (comb code p),
    comb_phase (base comb state of p, momentum shift 2 pi z)."""
    ell = int(round(math.log2(p.d)))
    params = p.as_dict()
    checks: list[dict] = []
    M = None
    if gate == "qcx":
        M = element_matrix("qCX", p)
        pat = _pattern("qCX", ell)
        lo = 1 - p.kappa**2 if p.envelope == "gaussian" else 1 - 2 / p.L
        on = M[pat]
        checks.append({"name": "pattern_min", "measured": float(on.real.min()), "bound": float(lo),
                       "pass": bool(on.real.min() >= lo)})
        checks.append(_check("pattern_max", float(np.max(np.abs(on))), 1.0 + 1e-12))
        checks.append(_check("pattern_imag", float(np.max(np.abs(on.imag))), 1e-12))
        checks.append(_check("off_pattern", float(np.max(np.abs(M[~pat]), initial=0.0)), 1e-10))
    elif gate == "lsb":
        M = element_matrix("LSB", p)
        pat = _pattern("LSB", ell)
        # the other nonzero entry per column: same x, flipped output bit
        flip = np.zeros_like(pat)
        for x in range(p.d):
            for b in (0, 1):
                flip[2 * x + (b ^ (x & 1) ^ 1), 2 * x + b] = True
        c = 2 * 2 ** (2 * ell) * p.delta**2 + 8 * (p.delta / p.eps) ** 4
        on = M[pat].real
        checks.append({"name": "diag_min", "measured": float(on.min()), "bound": float(1 - c),
                       "pass": bool(on.min() >= 1 - c)})
        checks.append(_check("offdiag_max", float(np.abs(M[flip]).max()), c))
        rest = ~(pat | flip)
        checks.append(_check("zero_elsewhere", float(np.max(np.abs(M[rest]), initial=0.0)), 1e-10))
    elif gate == "embed":
        b = map_B("Embed", p)
        M = b.entries
        dev = float(np.max(np.abs(np.diag(M) - 1)))
        checks.append(_check("overlap_minus_one", dev, 1e-10))
        off = M.copy()
        np.fill_diagonal(off, 0)
        checks.append(_check("off_diagonal", float(np.abs(off).max(initial=0.0)), 1e-10))
    elif gate == "comb_shift":
        if p.envelope != "comb":
            raise ParameterError("comb_shift needs a comb code")
        M = element_matrix("qCX", p)
        # elements <j+1| e^{-i sqrt(2pi/d) P} |j> live in the b = 1 block
        shift = np.array([M[2 * ((x + 1) % p.d) + 1, 2 * x + 1] for x in range(p.d)])
        want = 1 - 2 / p.L
        checks.append({"name": "shift_equals_1-2/L", "measured": [float(v.real) for v in shift],
                       "bound": want, "pass": bool(np.all(np.abs(shift - want) <= 1e-10))})
        exact = np.array([1.0] * (p.d - 1) + [1 - 1 / p.L])
        checks.append({"name": "shift_closed_form", "measured": [float(v.real) for v in shift],
                       "bound": exact.tolist(), "pass": bool(np.all(np.abs(shift - exact) <= 1e-10))})
        checks.append({"name": "shift_lower_bound", "measured": float(shift.real.min()), "bound": want,
                       "pass": bool(shift.real.min() >= want - 1e-12)})
    elif gate == "comb_phase":
        if p.envelope != "comb":
            raise ParameterError("comb_phase needs a comb code")
        from .gkp_states import base_state
        t = base_state(p).train
        f, moved = t.phase_mul(2 * math.pi * z)
        from .wavepacket import train_inner
        val = f * train_inner(t, moved)
        lo = 1 - 10 * z**2 * p.delta**2 - 16 * (p.delta / p.eps) ** 4
        checks.append({"name": f"phase_z{z}", "measured": float(val.real), "bound": float(lo),
                       "pass": bool(val.real >= lo and abs(val.imag) <= 1e-12)})
        params["z"] = z
    else:
        raise ParameterError(f"unknown inequality family {gate!r}")
    return InequalityReport(gate, params, checks, M)
