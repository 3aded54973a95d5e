import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridgkp.wavepacket import (PacketTrain, ParameterError, Wavepacket, dilate, gram_matrix,
                                  inner_product, phase_mul, scale, train_inner, translate,
                                  truncated_gaussian_norm)

# mpmath, 30 digits: two normalized packets mu=0, sigma=0.05 on [-0.25, 0.25],
# phase slopes differing by pi
BETA_PI_OVERLAP = 0.99385048340409495701


def _grid_inner(a, b, n=400_001):
    # integrate over the support intersection so the integrand is smooth
    lo = max(a.support[0], b.support[0])
    hi = min(a.support[1], b.support[1])
    x = np.linspace(lo, hi, n)
    from scipy.integrate import simpson
    return simpson(np.conj(a(x)) * b(x), x=x)


def test_norm_of_untruncated_gaussian():
    w = Wavepacket(1.0, 0.3, 0.7, (-20, 20))
    assert w.norm() ** 2 == pytest.approx(math.sqrt(math.pi) * 0.7, rel=1e-13)


def test_normalized_has_unit_norm():
    w = Wavepacket(2 - 1j, 0.0, 0.1, (-0.05, 0.2)).normalized()
    assert w.norm() == pytest.approx(1.0, abs=1e-14)


def test_phase_difference_pi_frozen():
    a = Wavepacket(1.0, 0.0, 0.05, (-0.25, 0.25)).normalized()
    b = phase_mul(a, math.pi)
    v = inner_product(a, b)
    assert abs(v.imag) < 1e-15
    assert v.real == pytest.approx(BETA_PI_OVERLAP, abs=1e-14)


def test_disjoint_supports_are_orthogonal():
    a = Wavepacket(1.0, 0.0, 1.0, (-1, 0))
    b = Wavepacket(1.0, 0.0, 1.0, (0, 1))
    assert inner_product(a, b) == 0


def test_bad_parameters():
    with pytest.raises(ParameterError):
        Wavepacket(1.0, 0.0, 0.0, (-1, 1))
    with pytest.raises(ParameterError):
        Wavepacket(1.0, 0.0, 1.0, (1, 1))
    with pytest.raises(ParameterError):
        dilate(Wavepacket(1.0, 0.0, 1.0, (-1, 1)), -2.0)


def test_translate_matches_pointwise():
    w = Wavepacket(0.5 + 0.2j, 0.1, 0.3, (-0.4, 0.9), 2.5)
    t = 0.77
    x = np.linspace(-1, 2, 101)
    assert np.allclose(translate(w, t)(x), w(x - t), atol=1e-14)


def test_dilate_matches_pointwise():
    w = Wavepacket(1.0, 0.4, 0.2, (0.0, 1.0), -1.3)
    a = 1.7
    x = np.linspace(-1, 2, 97)
    assert np.allclose(dilate(w, a)(x), w(x / a) / math.sqrt(a), atol=1e-14)


def test_inner_matches_grid():
    a = Wavepacket(1.0, 0.0, 0.3, (-0.5, 0.7), 1.0)
    b = Wavepacket(0.3j, 0.2, 0.15, (-0.2, 1.0), -4.0)
    assert abs(inner_product(a, b) - _grid_inner(a, b)) < 1e-10


def test_gram_is_hermitian(rng):
    ps = [Wavepacket(complex(*rng.normal(size=2)), rng.normal(), 0.5, (-1.0, 1.0), rng.normal())
          for _ in range(5)]
    G = gram_matrix(ps)
    assert np.allclose(G, G.conj().T)
    assert np.all(np.linalg.eigvalsh(G) > -1e-12)


def test_truncated_norm_full_line():
    assert truncated_gaussian_norm(1.0, -40, 40) ** 2 == pytest.approx(math.sqrt(math.pi))


def test_train_gate_actions_agree_with_packets():
    ps = [Wavepacket(1.0 + k, float(k), 0.1, (k - 0.3, k + 0.3), 0.5) for k in range(4)]
    _, tr = PacketTrain.from_packets(ps)
    for op, arg, single in [("translate", 0.4, translate), ("phase_mul", 1.1, phase_mul), ("dilate", 1.3, dilate)]:
        f, moved = getattr(tr, op)(arg)
        x = np.random.default_rng(0).uniform(-1, 6, 301)  # avoids landing on support edges
        want = sum(single(p, arg)(x) for p in ps)
        assert np.allclose(f * moved(x), want, atol=1e-13), op


def test_from_packets_rejects_mixed_widths():
    ps = [Wavepacket(1.0, 0.0, 0.1, (-0.3, 0.3)), Wavepacket(1.0, 1.0, 0.2, (0.7, 1.3))]
    with pytest.raises(ParameterError):
        PacketTrain.from_packets(ps)


packets = st.builds(
    lambda amp, c, w, lo, hi, beta: Wavepacket(amp, c, w, (c - lo, c + hi), beta),
    st.complex_numbers(min_magnitude=0.1, max_magnitude=3, allow_nan=False, allow_infinity=False),
    st.floats(-2, 2), st.floats(0.01, 1.0), st.floats(0.01, 3), st.floats(0.01, 3), st.floats(-20, 20),
)


@given(packets, packets)
@settings(max_examples=60, deadline=None)
def test_inner_is_conjugate_symmetric(a, b):
    assert abs(inner_product(a, b) - inner_product(b, a).conjugate()) <= 1e-12 * max(1, a.norm() * b.norm())


@given(packets, st.floats(-5, 5), st.floats(-5, 5), st.floats(0.3, 3))
@settings(max_examples=60, deadline=None)
def test_gates_preserve_norm(w, t, s, a):
    n = w.norm()
    for moved in (translate(w, t), phase_mul(w, s), dilate(w, a)):
        assert moved.norm() == pytest.approx(n, rel=1e-10)


@given(packets, packets, st.floats(-3, 3))
@settings(max_examples=60, deadline=None)
def test_translation_is_unitary(a, b, t):
    lhs = inner_product(translate(a, t), translate(b, t))
    assert abs(lhs - inner_product(a, b)) <= 1e-10 * max(1, a.norm() * b.norm())


@given(packets, st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False).filter(lambda c: abs(c) > 1e-3))
@settings(max_examples=40, deadline=None)
def test_inner_is_linear_in_second_argument(w, c):
    assert abs(inner_product(w, scale(w, c)) - c * inner_product(w, w)) <= 1e-12 * abs(c) * w.norm() ** 2


def test_train_inner_disjoint_fast_exit():
    a = PacketTrain.from_arrays([0.0, 1.0], [1, 1], 0.1, 0.0, -0.2, 0.2)
    b = PacketTrain.from_arrays([5.0, 6.0], [1, 1], 0.1, 0.0, -0.2, 0.2)
    assert train_inner(a, b) == 0
