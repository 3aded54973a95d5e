import math

import numpy as np
import pytest

from hybridgkp import oracle as O
from hybridgkp.error_analysis import element_matrix
from hybridgkp.gkp_states import symmetric_params
from hybridgkp.logical_layer import LogicalMap, ideal_matrix
from hybridgkp.wavepacket import Wavepacket, inner_product


def test_unit_gaussian():
    f = O.PacketFn(math.pi ** -0.25, 0.0, 1.0, -10.0, 10.0)
    v = O.grid_overlap(f, f, O.GridSpec(-10, 10, 100_000))
    assert abs(v - 1) < 1e-9


def test_disjoint_packets():
    a = O.PacketFn(1.0, 0.0, 1.0, -1.0, 0.0)
    b = O.PacketFn(1.0, 0.0, 1.0, 0.5, 1.0)
    assert abs(O.grid_overlap(a, b)) < 1e-12


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        O.GridSpec(1.0, 0.0, 100)


def test_random_cases_match_engine():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(100):
        a, b = O.random_packet_case(rng)
        e = inner_product(Wavepacket(a[0], a[1], a[2], (a[3], a[4]), a[5]),
                          Wavepacket(b[0], b[1], b[2], (b[3], b[4]), b[5]))
        o = O.grid_overlap(O.packet_fn(a), O.packet_fn(b), points=20_000)
        worst = max(worst, abs(e - o))
    assert worst < 1e-8


def test_gkp_fn_normalized_and_orthogonal():
    p = symmetric_params(0.2, 2)
    f0 = O.gkp_fn(2, 0, 0.2, p.delta, p.eps)
    f1 = O.gkp_fn(2, 1, 0.2, p.delta, p.eps)
    assert abs(O.grid_overlap(f0, f0) - 1) < 1e-9
    assert abs(O.grid_overlap(f0, f1)) < 1e-12


def test_lsb_phase_reference():
    # e^{i pi 2^ell Q} on the unit-spaced lattice is e^{i alpha Q} in the code
    # frame, alpha = sqrt(pi) 2^{(ell-1)/2}; ell=2, kappa=0.1
    ell, kappa = 2, 0.1
    alpha = math.sqrt(math.pi) * 2 ** ((ell - 1) / 2)
    p = symmetric_params(kappa, 4)
    f = O.gkp_fn(4, 0, kappa, p.delta, p.eps)
    ref = O.grid_overlap(f, f.phased(alpha))
    from hybridgkp.gkp_states import make_codeword
    from hybridgkp.wavepacket import train_inner
    t = make_codeword(p, 0).train
    fac, moved = t.phase_mul(alpha)
    assert abs(fac * train_inner(t, moved) - ref) < 1e-8
    lower = 1 - 10 * 2 ** (2 * ell - 2) * p.delta**2 - 16 * (p.delta / p.eps) ** 4
    assert ref.real >= lower


def test_qcx_elements_match_engine():
    p = symmetric_params(0.2, 2)
    fs = [O.gkp_fn(2, x, 0.2, p.delta, p.eps) for x in range(2)]
    M = element_matrix("qCX", p)
    for x in range(2):
        for b in (0, 1):
            for y in range(2):
                for c in (0, 1):
                    want = O.qcx_element(fs[y], fs[x], c, b, 1)
                    assert abs(M[2 * y + c, 2 * x + b] - want) < 1e-8


def test_formula_matrix_small_cx():
    # C^1_2 X: (x, b) -> (x - 2(b xor x_1) mod 4, b xor x_1)
    M = O.formula_matrix("BitTransfer", 2, 1)
    for x in range(4):
        for b in (0, 1):
            b2 = b ^ (x >> 1 & 1)
            assert M[2 * ((x - 2 * b2) % 4) + b2, 2 * x + b] == 1
    assert np.array_equal(M.T @ M, np.eye(8))


def test_formula_matrix_embed_columns():
    M = O.formula_matrix("Embed", 3)
    for x in range(8):
        col = np.zeros(16)
        col[2 * x] = 1
        assert np.array_equal(M[:, x], col)


@pytest.mark.parametrize("kind", ["qCX", "qCXAdj", "LSB", "LSBAdj", "Embed", "EmbedAdj"])
def test_formula_matches_ideal(kind):
    for ell in range(1, 7):
        assert np.array_equal(O.formula_matrix(kind, ell), ideal_matrix(LogicalMap(kind, ell)))


def test_formula_matrix_limit():
    with pytest.raises(ValueError):
        O.formula_matrix("qCX", 9)
