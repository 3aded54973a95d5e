import os
import subprocess
import sys

import numpy as np
import pytest

from hybridgkp import _kernels_py, kernels

try:
    from hybridgkp import _kernels as _compiled
except ImportError:
    _compiled = None

needs_compiled = pytest.mark.skipif(_compiled is None, reason="compiled extension not built")


def _cases(n, seed=5):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        sa, sb = 10 ** rng.uniform(-3, 0.3, size=2)
        ca, cb = rng.normal(size=2)
        hw = rng.uniform(0.2, 12)
        yield (ca, sa, ca - hw * sa, ca + hw * sa, cb, sb, cb - hw * sb, cb + hw * sb, rng.normal(scale=3 / sa))


@needs_compiled
def test_backends_agree_on_pairs():
    for c in _cases(300):
        a = _kernels_py.pair_overlap(*c)
        b = _compiled.pair_overlap(*c)
        assert abs(a - b) <= 1e-13 * max(1.0, abs(a)), c


@needs_compiled
def test_backends_agree_on_trains():
    rng = np.random.default_rng(2)
    ca = np.sort(rng.uniform(-5, 5, 40))
    cb = np.sort(rng.uniform(-5, 5, 35))
    aa = rng.normal(size=40) + 1j * rng.normal(size=40)
    ab = rng.normal(size=35) + 0j
    args = (ca, aa, 0.05, -0.2, 0.2, cb, ab, 0.07, -0.15, 0.3, 2.2)
    x = _kernels_py.train_overlap(*args)
    y = _compiled.train_overlap(*args)
    assert abs(x - y) < 1e-13 * max(1, abs(x))


def test_selected_backend_name():
    assert kernels.BACKEND in ("cython", "python")
    if _compiled is not None and os.environ.get("HYBRIDGKP_PURE") is None:
        assert kernels.BACKEND == "cython"


def test_pure_env_var_forces_fallback():
    out = subprocess.run([sys.executable, "-c", "import hybridgkp; print(hybridgkp.BACKEND)"],
                         env={**os.environ, "HYBRIDGKP_PURE": "1"}, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_full_line_gaussian_closed_form():
    # exp(-x^2/(2 s^2)) squared integrates to s sqrt(pi)
    s = 0.3
    v = _kernels_py.pair_overlap(0.0, s, -30 * s, 30 * s, 0.0, s, -30 * s, 30 * s, 0.0)
    assert v == pytest.approx(s * np.sqrt(np.pi), rel=1e-14)
