import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridgkp import compiler
from hybridgkp import error_analysis as E
from hybridgkp.gkp_states import ancilla_params, comb_params, make_codeword, symmetric_params
from hybridgkp.hybrid_sim import HybridState
from hybridgkp.logical_layer import LogicalMap, ideal_matrix
from hybridgkp.wavepacket import ParameterError


def test_sparse_bound_identity_is_zero():
    assert E.sparse_bound(E.BMatrix.from_entries(np.eye(4))) == 0.0


def test_sparse_bound_formula():
    B = np.array([[0.9, 0.1, 0], [0.1, 0.95, 0], [0, 0, 0.99]])
    b = E.BMatrix.from_entries(B)
    assert b.sparsity == 2
    assert E.sparse_bound(b) == pytest.approx(8 * math.sqrt(0.1 + 0.1))


def test_sparse_bound_preconditions():
    with pytest.raises(E.PreconditionError, match="not real"):
        E.sparse_bound(E.BMatrix.from_entries(np.diag([1, 1j])))
    with pytest.raises(E.PreconditionError, match="zero"):
        E.sparse_bound(E.BMatrix.from_entries(np.diag([1.0, 0.0])))
    with pytest.raises(ParameterError):
        E.BMatrix.from_entries(np.zeros((2, 3)))


def test_compose_bounds():
    assert E.compose_bounds([0.1, 0.2, 0.3]) == pytest.approx(0.6)
    with pytest.raises(ParameterError):
        E.compose_bounds([0.1, -0.1])
    assert E.noisy_bound(0.1, [0.01, 0.02]) == pytest.approx(0.13)


def test_analytic_bound_values():
    assert E.analytic_bound("qcx", kappa=0.1)[0] == pytest.approx(0.8)
    assert E.analytic_bound("transfer", ell=3, kappa=0.01)[0] == pytest.approx(96 * 3 * 0.01)
    assert E.analytic_bound("twoqubit", ell=2, kappa=0.01)[0] == pytest.approx(8.0)
    assert E.analytic_bound("circuit", ell=2, kappa=0.01, T=5)[0] == pytest.approx(40.0)
    assert E.analytic_bound("comb_qcx", L=64)[0] == pytest.approx(1.5)
    v, flags = E.analytic_bound("qcx", kappa=0.3)
    assert flags and "kappa" in flags[0]
    with pytest.raises(ParameterError, match="needs"):
        E.analytic_bound("transfer", kappa=0.1)
    with pytest.raises(ParameterError, match="unknown target"):
        E.analytic_bound("nope")


def test_compute_B_rejects_nonorthonormal():
    p = symmetric_params(0.1, 2)
    s = E.code_states(p)
    bad = [s[0], s[0], s[2], s[3]]
    with pytest.raises(E.PreconditionError, match="<0|1>"):
        E.compute_B([], np.eye(4), bad, bad)


def test_identity_circuit_gives_identity_B():
    p = symmetric_params(0.1, 4)
    s = E.code_states(p)
    b = E.compute_B([], np.eye(8), s, s)
    assert b.subspace_deviation < 1e-12


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_qcx_bound_dominated(ell):
    for kappa in (0.05, 0.1, 0.2):
        p = symmetric_params(kappa, 2**ell)
        assert E.map_bound("qCX", p) <= 8 * kappa
        c = 16 * 2**ell * p.delta + 32 * (p.delta / p.eps) ** 2
        assert E.map_bound("LSB", p) <= c


def test_embed_B_is_identity():
    p = symmetric_params(0.1, 4)
    b = E.map_B("Embed", p)
    assert b.subspace_deviation < 1e-10
    assert E.sparse_bound(b) < 1e-4


def test_bound_monotone_in_kappa():
    ks = [0.02, 0.05, 0.1, 0.15, 0.2]
    for kind in ("qCX", "LSB"):
        vals = [E.map_bound(kind, symmetric_params(k, 4)) for k in ks]
        assert all(a < b for a, b in zip(vals, vals[1:])), (kind, vals)


def test_qcx_slope():
    ks = np.array([0.02, 0.05, 0.1, 0.15, 0.2])
    vals = [E.map_bound("qCX", symmetric_params(k, 4)) for k in ks]
    slope = np.polyfit(ks, vals, 1)[0]
    assert slope <= 8.1
    assert slope == pytest.approx(4.0, abs=0.05)


def test_extended_code_invariance():
    # idle ancilla mode and idle qubits must not change B
    p = symmetric_params(0.1, 4)
    anc = make_codeword(ancilla_params(p, 2), 0)
    circ = compiler.lower_basic(LogicalMap("qCX", 2))
    states = [HybridState.product([make_codeword(p, x), anc], b | (1 << 2), n_qubits=3)
              for x in range(4) for b in (0, 1)]
    ext = E.compute_B(circ.gates, ideal_matrix(LogicalMap("qCX", 2)), states, states)
    base = E.map_B("qCX", p)
    assert np.max(np.abs(ext.entries - base.entries)) < 1e-12


def test_comb_B():
    p = comb_params(1 / 16, 2)
    b = E.map_B("qCX", p)
    assert b.min_diag == pytest.approx(1 - 1 / p.L, abs=1e-10)


def test_transfer_composed_within_analytic():
    for ell in (2, 3):
        p = symmetric_params(0.05, 2**ell)
        for j in range(ell):
            val, n = E.transfer_composed(p, ell, j)
            assert n == max(2, 12 * j)
            assert val <= 96 * ell * 0.05


def test_report_schema_and_determinism():
    r = E.report("qcx", 2, kappa=0.1)
    d = json.loads(r.to_json())
    for key in ("target", "params", "corollary_bound", "analytic_bound", "vacuous", "B",
                "subspace_deviation", "checks", "flags"):
        assert key in d
    assert r.passed and not r.vacuous
    assert r.to_json() == E.report("qcx", 2, kappa=0.1).to_json()


def test_report_vacuous_twoqubit():
    r = E.report("twoqubit", 2, kappa=0.01)
    assert r.analytic_bound == pytest.approx(8.0)
    assert r.vacuous
    assert 0 < r.corollary_bound < r.analytic_bound


def test_check_inequalities_qcx_pass():
    rep = E.check_inequalities(symmetric_params(0.1, 4), "qcx")
    assert rep.passed
    assert rep.elements.shape == (8, 8)


def test_check_inequalities_unknown():
    with pytest.raises(ParameterError):
        E.check_inequalities(symmetric_params(0.1, 2), "swap")
    with pytest.raises(ParameterError):
        E.check_inequalities(symmetric_params(0.1, 2), "comb_shift")


@given(st.floats(0.01, 0.24), st.sampled_from([2, 4, 8]))
@settings(max_examples=15, deadline=None)
def test_qcx_bound_below_analytic_property(kappa, d):
    assert E.map_bound("qCX", symmetric_params(kappa, d)) <= 8 * kappa


@given(st.lists(st.floats(0, 1), min_size=1, max_size=10))
def test_compose_sums_steps(xs):
    assert E.compose_bounds(xs) == pytest.approx(sum(xs))
    assert E.compose_bounds(xs) >= max(xs)
