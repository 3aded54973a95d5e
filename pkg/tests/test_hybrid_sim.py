import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridgkp.gkp_states import make_codeword, make_vacuum, symmetric_params
from hybridgkp.hybrid_sim import (CNOT, HADAMARD, CtrlDispP, CtrlDispQ, DispP, DispQ, Hadamard,
                                  HybridState, OneQubit, Squeeze, TwoQubit, apply_gate,
                                  bits_from_string, bits_to_string, inner_product, merge_terms,
                                  run_circuit)
from hybridgkp.wavepacket import ParameterError


def vac_state(bits="0"):
    return HybridState.product([make_vacuum()], bits)


def test_bits_convention():
    assert bits_from_string("10") == 1
    assert bits_from_string("01") == 2
    assert bits_to_string(6, 3) == "011"


def test_hadamard_twice_is_identity():
    s = vac_state("0")
    out = run_circuit(s, [Hadamard(0), Hadamard(0)])
    assert len(out) == 1
    assert abs(inner_product(s, out) - 1) < 1e-14


def test_hadamard_creates_superposition():
    out = apply_gate(vac_state("0"), Hadamard(0))
    assert len(out) == 2
    assert out.norm() == pytest.approx(1.0, abs=1e-14)


def test_controlled_displacement_only_on_one():
    v = make_vacuum()
    g = CtrlDispP(0, 0, 1.0)
    s0 = apply_gate(HybridState.product([v], "0"), g)
    s1 = apply_gate(HybridState.product([v], "1"), g)
    assert abs(inner_product(HybridState.product([v], "0"), s0) - 1) < 1e-14
    assert inner_product(HybridState.product([v], "1"), s1).real == pytest.approx(math.exp(-0.25), abs=1e-13)


def test_dispq_dispp_commutation_phase():
    # e^{-isP} e^{itQ} = e^{-ist} e^{itQ} e^{-isP}
    s, t = 0.7, 1.3
    v = vac_state()
    a = run_circuit(v, [DispQ(0, t), DispP(0, s)])
    b = run_circuit(v, [DispP(0, s), DispQ(0, t)])
    assert abs(inner_product(a, b) - np.exp(1j * s * t)) < 1e-12


def test_gate_inverse():
    v = HybridState.product([make_codeword(symmetric_params(0.2, 2), 1)], "1")
    gates = [Squeeze(0, 1.7), CtrlDispQ(0, 0, 0.4), Hadamard(0), CtrlDispP(0, 0, -0.9)]
    back = run_circuit(v, gates + [g.inverse() for g in reversed(gates)])
    assert abs(inner_product(v, back) - 1) < 1e-12


def test_cnot_on_two_qubits():
    s = HybridState.product([make_vacuum()], "10")  # qubit 0 set
    out = apply_gate(s, TwoQubit(0, 1, CNOT))
    assert out.qubit_marginal_bits() == {bits_from_string("11")}


def test_merge_combines_identical_terms():
    s = vac_state("0")
    both = s + s
    m = merge_terms(both)
    assert len(m) == 1 and m.terms[0][0] == 2


def test_index_errors():
    s = vac_state("0")
    with pytest.raises(ParameterError):
        apply_gate(s, DispQ(1, 1.0))
    with pytest.raises(ParameterError):
        apply_gate(s, CtrlDispQ(2, 0, 1.0))
    with pytest.raises(ParameterError):
        Squeeze(0, 0.0)
    with pytest.raises(ParameterError):
        OneQubit(0, np.eye(3))


def test_peak_terms_tracked():
    s = HybridState.product([make_vacuum()], "000")
    out = run_circuit(s, [Hadamard(0), Hadamard(1), Hadamard(2)])
    assert out.peak_terms == 8


def _random_gate(draw_kind, t, q):
    return {"dq": DispQ(0, t), "dp": DispP(0, t), "sq": Squeeze(0, math.exp(t / 3)),
            "cq": CtrlDispQ(q, 0, t), "cp": CtrlDispP(q, 0, t), "h": Hadamard(q)}[draw_kind]


gate_lists = st.lists(st.tuples(st.sampled_from(["dq", "dp", "sq", "cq", "cp", "h"]), st.floats(-2, 2),
                                st.integers(0, 1)), min_size=1, max_size=8)


@given(gate_lists)
@settings(max_examples=40, deadline=None)
def test_circuits_preserve_norm(spec):
    s = HybridState.product([make_codeword(symmetric_params(0.2, 2), 0)], "00")
    out = run_circuit(s, [_random_gate(*g) for g in spec])
    assert out.norm() == pytest.approx(1.0, abs=1e-10)


@given(gate_lists, st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False))
@settings(max_examples=30, deadline=None)
def test_circuits_are_linear(spec, c):
    gates = [_random_gate(*g) for g in spec]
    a = HybridState.product([make_vacuum()], "00")
    b = HybridState.product([make_vacuum()], "10")
    lhs = run_circuit(a + c * b, gates)
    rhs = run_circuit(a, gates) + c * run_circuit(b, gates)
    diff = lhs - rhs
    assert inner_product(diff, diff).real < 1e-20


def test_hadamard_matrix_sign():
    assert np.allclose(HADAMARD @ HADAMARD, np.eye(2))
