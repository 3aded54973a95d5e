"""Compare the compiled and pure-Python overlap kernels.

    python benches/bench_kernels.py [--repeat 5]

Micro benchmarks call both kernel modules directly. The end-to-end case
(B matrix of the LSB map on a 16-dimensional code) runs in a subprocess per
backend, since the backend is fixed at import time.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import textwrap
import time

import numpy as np

from hybridgkp import _kernels_py
from hybridgkp.gkp_states import make_codeword, symmetric_params

try:
    from hybridgkp import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def pair_cases(n, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        sa, sb = 10 ** rng.uniform(-2, 0, size=2)
        ca, cb = rng.normal(size=2)
        hw = rng.uniform(0.5, 10)
        out.append((ca, sa, ca - hw * sa, ca + hw * sa, cb, sb, cb - hw * sb, cb + hw * sb, rng.normal()))
    return out


def bench_pairs(mod, cases):
    f = mod.pair_overlap
    return lambda: [f(*c) for c in cases]


def bench_trains(mod, a, b):
    args = (a.centers, a.amps, a.sigma, a.lo, a.hi, b.centers, b.amps, b.sigma, b.lo, b.hi, b.beta - a.beta)
    return lambda: mod.train_overlap(*args)


END_TO_END = textwrap.dedent("""
    import time
    from hybridgkp import error_analysis as E, gkp_states as G, kernels
    p = G.symmetric_params(0.05, 16)
    t0 = time.perf_counter()
    E.map_B("LSB", p)
    print(kernels.BACKEND, time.perf_counter() - t0)
""")


def end_to_end(pure: bool) -> tuple[str, float]:
    env = dict(os.environ)
    if pure:
        env["HYBRIDGKP_PURE"] = "1"
    else:
        env.pop("HYBRIDGKP_PURE", None)
    out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True, text=True, check=True)
    name, t = out.stdout.split()
    return name, float(t)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--pairs", type=int, default=2000)
    args = ap.parse_args()

    cases = pair_cases(args.pairs)
    p = symmetric_params(0.05, 8)
    a = make_codeword(p, 3).train
    _, b = a.phase_mul(np.sqrt(np.pi) * 2)  # LSB-type phase, partial support overlap

    mods = [("python", _kernels_py)] + ([("cython", _kernels_c)] if _kernels_c else [])
    print(f"{'case':<28}" + "".join(f"{n:>12}" for n, _ in mods) + ("    speedup" if len(mods) == 2 else ""))
    for label, make in [(f"pair_overlap x{len(cases)}", lambda m: bench_pairs(m, cases)),
                        (f"train_overlap ({len(a)} peaks)", lambda m: bench_trains(m, a, b))]:
        ts = [best_of(make(m), args.repeat) for _, m in mods]
        row = f"{label:<28}" + "".join(f"{t * 1e3:>10.2f}ms" for t in ts)
        if len(ts) == 2:
            row += f"   {ts[0] / ts[1]:>7.1f}x"
        print(row)

    # both backends must agree before their timings mean anything
    if _kernels_c is not None:
        worst = max(abs(_kernels_py.pair_overlap(*c) - _kernels_c.pair_overlap(*c)) for c in cases)
        print(f"max |python - cython| on pairs: {worst:.2e}")

    results = [end_to_end(pure) for pure in (True, False)]
    row = f"{'LSB B-matrix, d=16':<28}" + "".join(f"{t * 1e3:>10.2f}ms" for _, t in results)
    if results[1][0] == "cython":
        row += f"   {results[0][1] / results[1][1]:>7.1f}x"
    print(row)


if __name__ == "__main__":
    main()
