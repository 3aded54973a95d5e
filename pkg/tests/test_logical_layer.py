import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridgkp import logical_layer as LL
from hybridgkp.oracle import formula_matrix
from hybridgkp.wavepacket import ParameterError


def test_map_dims_and_adjoint():
    m = LL.LogicalMap("Embed", 2)
    assert m.dims == (4, 8)
    assert m.adjoint().kind == "EmbedAdj"
    assert m.adjoint().dims == (8, 4)
    with pytest.raises(ParameterError):
        LL.LogicalMap("Swap", 2)
    with pytest.raises(ParameterError):
        LL.LogicalMap("qCX", 0)


def test_ideal_qcx_small():
    M = LL.ideal_matrix(LL.LogicalMap("qCX", 1))
    # (x, b) -> (x + b mod 2, b): index 2x + b
    want = np.zeros((4, 4))
    for x in range(2):
        for b in range(2):
            want[2 * ((x + b) % 2) + b, 2 * x + b] = 1
    assert np.array_equal(M, want)


def test_adjoints_are_inverses():
    for kind in ("qCX", "LSB"):
        for ell in range(1, 5):
            m = LL.LogicalMap(kind, ell)
            assert np.array_equal(LL.ideal_matrix(m.adjoint()) @ LL.ideal_matrix(m), np.eye(2 ** (ell + 1)))
    E = LL.ideal_matrix(LL.LogicalMap("Embed", 3))
    assert np.array_equal(LL.ideal_matrix(LL.LogicalMap("EmbedAdj", 3)) @ E, np.eye(8))


def test_dimension_checking():
    c = LL.LogicalCircuit({"A": 4, "b": 2})
    with pytest.raises(ParameterError, match="dimension"):
        c.append(LL.LogicalMap("qCX", 3), ("A", "b"))
    c.append(LL.LogicalMap("Embed", 2), ("A",))
    assert c.final_dims["A"] == 8
    with pytest.raises(ParameterError):
        c.append(LL.UnitaryOp(np.eye(2)), ("A",))


@pytest.mark.parametrize("ell", range(1, 7))
def test_bit_transfer_exhaustive(ell):
    for j in range(ell):
        ok, n = LL.verify_bit_transfer(ell, j)
        assert ok and n == 2 ** (ell + 1)
        ok, _ = LL.verify_bit_transfer(ell, j, physical=True)
        assert ok


def test_bit_transfer_sampled_large():
    ok, n = LL.verify_bit_transfer(9, 5, samples=300, seed=3)
    assert ok and n == 300


def test_transfer_counts():
    for ell in range(1, 11):
        for j in range(ell):
            c = LL.build_bit_transfer(ell, j)
            assert c.op_count <= LL.transfer_bound(j)
            assert LL.build_bit_transfer(ell, j, physical=True).op_count == max(2, 12 * j)


def test_transfer_matches_formula_matrix():
    for ell in range(1, 5):
        for j in range(ell):
            M, leak = LL.build_bit_transfer(ell, j).restricted_matrix(["A", "b"])
            assert leak == 0
            assert np.array_equal(M, formula_matrix("BitTransfer", ell, j))


def test_embed_qubit_gate_cnot():
    # control A_1 (listed first), target A_0
    M = LL.embed_qubit_gate(LL.np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]), 2, [1, 0])
    perm = [0, 1, 3, 2]
    assert np.array_equal(M, np.eye(4)[perm].T)


def test_two_qubit_random(rng):
    for ell in (2, 3):
        for j in range(ell):
            for k in range(ell):
                if j == k:
                    continue
                U = LL.random_unitary(4, rng)
                assert LL.verify_two_qubit(ell, j, k, U) < 1e-12


def test_bipartite_random(rng):
    U = LL.random_unitary(4, rng)
    for j, k in [(0, 0), (1, 0), (1, 1)]:
        assert LL.verify_bipartite(2, j, k, U) < 1e-12


def test_single_qubit_gate(rng):
    U = LL.random_unitary(2, rng)
    c = LL.build_single_qubit(3, 2, U)
    M, leak = c.restricted_matrix(["A"])
    assert leak < 1e-14
    assert np.max(np.abs(M - LL.embed_qubit_gate(U, 3, [2]))) < 1e-12


def test_non_unitary_rejected():
    with pytest.raises(ParameterError, match="unitary"):
        LL.build_two_qubit(2, 0, 1, np.ones((4, 4)))
    with pytest.raises(ParameterError):
        LL.build_two_qubit(2, 1, 1, np.eye(4))


@given(st.integers(1, 4), st.integers(1, 6), st.integers(0, 2**32 - 1))
@settings(max_examples=15, deadline=None)
def test_random_depth_T_composition(ell, T, seed):
    # a depth-T product of random one- and two-qubit gates, built gate by gate
    # through the logical layer, equals the dense product of the targets
    rng = np.random.default_rng(seed)
    D = 2**ell
    want = np.eye(D, dtype=complex)
    got = np.eye(D, dtype=complex)
    for _ in range(T):
        if ell == 1 or rng.random() < 0.3:
            j = int(rng.integers(ell))
            U = LL.random_unitary(2, rng)
            M, _ = LL.build_single_qubit(ell, j, U).restricted_matrix(["A"])
            want = LL.embed_qubit_gate(U, ell, [j]) @ want
        else:
            j, k = (int(v) for v in rng.choice(ell, 2, replace=False))
            U = LL.random_unitary(4, rng)
            M, _ = LL.build_two_qubit(ell, j, k, U).restricted_matrix(["A"])
            want = LL.embed_qubit_gate(U, ell, [j, k]) @ want
        got = M @ got
    assert np.max(np.abs(got - want)) < 1e-11


def test_circuit_adjoint_undoes():
    c = LL.build_bit_transfer(4, 2)
    both = c + c.adjoint()
    for x in range(16):
        for b in (0, 1):
            assert both.apply_basis(A=x, b=b) == {(x, b, 0, 0): 1.0}
