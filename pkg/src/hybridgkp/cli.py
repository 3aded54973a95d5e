"""Command-line entry point: ``hybridgkp <command> [options]``.

Exit codes: 0 all checks passed, 1 a check failed, 2 bad usage or parameters.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import clifford, compiler, error_analysis, gkp_states, logical_layer, oracle
from .wavepacket import ParameterError, Wavepacket, inner_product

SCHEMA = 1


class UsageError(Exception):
    pass


def _floats(s: str | None) -> list[float] | None:
    if s is None:
        return None
    return [float(v) for v in s.split(",") if v.strip()]


def _ints(s: str | None) -> list[int] | None:
    if s is None:
        return None
    return [int(v) for v in s.split(",") if v.strip()]


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _emit(args, payload, rows: list[dict] | None = None):
    if args.format == "csv" and rows is not None:
        buf = io.StringIO()
        keys = list(rows[0].keys()) if rows else []
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(r)
        text = buf.getvalue()
    else:
        text = json.dumps({"schema": SCHEMA, **payload}, sort_keys=True, indent=1, default=_jsonable) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _code(args, d: int) -> gkp_states.GkpCodeParams:
    if args.envelope == "comb":
        if args.delta is None:
            raise UsageError("comb envelope needs --delta")
        return gkp_states.comb_params(_single(args.delta, "--delta"), d, eps=args.eps, L=args.L)
    if args.kappa is None:
        raise UsageError("gaussian envelope needs --kappa")
    kappa = _single(args.kappa, "--kappa")
    if args.delta is None and args.eps is None:
        return gkp_states.symmetric_params(kappa, d)
    if args.delta is None or args.eps is None:
        raise UsageError("give both --delta and --eps to override the symmetric preset")
    return gkp_states.GkpCodeParams(d, kappa, _single(args.delta, "--delta"), args.eps)


def _single(v, name):
    vals = _floats(v) if isinstance(v, str) else [v]
    if len(vals) != 1:
        raise UsageError(f"{name} takes a single value here")
    return vals[0]


# --------------------------------------------------------------------------

def cmd_states(args) -> int:
    if args.d is None or args.j is None:
        raise UsageError("states needs --d and --j")
    p = _code(args, args.d)
    st = gkp_states.make_codeword(p, args.j)
    t = st.train
    lo = float(t.centers[0] + t.lo) - 1.0
    hi = float(t.centers[-1] + t.hi) + 1.0
    grid = np.linspace(lo, hi, args.points)
    params = {**p.as_dict(), "j": args.j, "peaks": len(t), "dx": float(grid[1] - grid[0])}
    text = gkp_states.wavefunction_csv(st, grid, params)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


_MELEM_GATES = {"cx": "qcx", "qcx": "qcx", "lsb": "lsb", "embed": "embed",
                "comb_shift": "comb_shift", "comb_phase": "comb_phase"}


def cmd_melem(args) -> int:
    gate = _MELEM_GATES.get(args.gate)
    if gate is None:
        raise UsageError(f"unknown gate {args.gate!r}; choose from {', '.join(_MELEM_GATES)}")
    ells = _ints(args.l) or []
    if not ells:
        raise UsageError("melem needs --l")
    sweep = _floats(args.kappa if args.envelope == "gaussian" else args.delta)
    if not sweep:
        raise UsageError("melem needs --kappa (gaussian) or --delta (comb)")
    results, rows = [], []
    for ell in ells:
        for v in sweep:
            if args.envelope == "gaussian":
                p = gkp_states.symmetric_params(v, 2**ell)
            else:
                p = gkp_states.comb_params(v, 2**ell, eps=args.eps, L=args.L)
            rep = error_analysis.check_inequalities(p, gate, z=args.z)
            results.append({"ell": ell, **rep.to_dict(with_elements=args.elements)})
            for c in rep.checks:
                rows.append({"ell": ell, "value": v, "check": c["name"], "measured": c["measured"],
                             "bound": c["bound"], "pass": c["pass"]})
    ok = all(r["pass"] for r in results)
    _emit(args, {"command": "melem", "gate": gate, "pass": ok, "results": results}, rows)
    if not ok:
        failed = [f"{c['name']} (ell={r['ell']})" for r in results for c in r["checks"] if not c["pass"]]
        print(f"inequality failed: {', '.join(failed)}", file=sys.stderr)
    return 0 if ok else 1


def cmd_bound(args) -> int:
    ells = _ints(args.l)
    if not ells or not args.target:
        raise UsageError("bound needs --target and --l")
    sweep = _floats(args.kappa if args.envelope == "gaussian" else args.delta)
    if not sweep:
        raise UsageError("bound needs --kappa (gaussian) or --delta (comb)")
    reports, rows = [], []
    for ell in ells:
        for v in sweep:
            kw = {"kappa": v} if args.envelope == "gaussian" else {"delta": v, "eps": args.eps, "L": args.L}
            r = error_analysis.report(args.target, ell, envelope=args.envelope, T=args.T, j=args.j, k=args.k, **kw)
            reports.append(r.to_dict())
            rows.append({"target": args.target, "ell": ell, "value": v, "corollary_bound": r.corollary_bound,
                         "analytic_bound": r.analytic_bound, "vacuous": r.vacuous, "pass": r.passed})
    ok = all(all(c["pass"] for c in r["checks"]) for r in reports)
    _emit(args, {"command": "bound", "pass": ok, "reports": reports}, rows)
    if not ok:
        print("computed bound exceeds the closed form", file=sys.stderr)
    return 0 if ok else 1


def cmd_count(args) -> int:
    ell = _single(args.l, "--l") if args.l else None
    if ell is None:
        raise UsageError("count needs --l")
    ell = int(ell)
    circuit = args.circuit
    rng = np.random.default_rng(args.seed)
    if circuit == "lsb":
        c = compiler.lower_basic(logical_layer.LogicalMap("LSB", ell), squeeze_trick=True)
        bounds = (math.e, 1.0, ell + 6)
    elif circuit == "transfer":
        j = ell - 1 if args.j is None else args.j
        c = compiler.lower_transfer(ell, j, squeeze_trick=args.trick)
        bounds = (math.e if args.trick else 2.0, math.sqrt(math.pi) if args.trick else compiler.zeta(ell),
                  85 * ell**2)
    elif circuit in ("twoqubit", "bipartite"):
        j = ell - 1 if args.j is None else args.j
        k = (0 if j else 1) if args.k is None else args.k
        U = logical_layer.random_unitary(4, rng)
        f = compiler.lower_two_qubit if circuit == "twoqubit" else compiler.lower_two_qubit_bipartite
        c = f(ell, j, k, U, squeeze_trick=args.trick)
        bounds = (math.e if args.trick else 2.0, math.sqrt(math.pi) if args.trick else compiler.zeta(ell),
                  340 * ell**2)
    else:
        raise UsageError(f"unknown circuit {circuit!r}")
    bounds = (args.alpha or bounds[0], args.zeta or bounds[1], args.max_count or bounds[2])
    rep = compiler.audit(c, bounds)
    payload = {"command": "count", "circuit": circuit, "ell": ell, "count": c.count, "counts": c.counts,
               "logical_count": c.logical_count, "resource_map": c.resource_map, **rep.to_dict()}
    _emit(args, payload, [{"check": ch["name"], "measured": ch["measured"], "bound": ch["bound"],
                           "pass": ch["pass"]} for ch in rep.checks])
    if not rep.passed:
        bad = [ch for ch in rep.checks if not ch["pass"]]
        print("; ".join(f"{ch['name']} {ch['measured']} exceeds {ch['bound']}"
                        + (f" at gate {ch['violation']['index']}" if "violation" in ch else "") for ch in bad),
              file=sys.stderr)
    return 0 if rep.passed else 1


def cmd_verify_ideal(args) -> int:
    ells = _ints(args.l) or [args.max_l]
    rng = np.random.default_rng(args.seed)
    results = []
    for ell in ells:
        transfers = {}
        for phys in (False, True):
            for j in range(ell):
                ok, n = logical_layer.verify_bit_transfer(ell, j, phys, seed=args.seed)
                transfers[f"{'physical' if phys else 'logical'}_j{j}"] = ok
        dev2 = dev_b = 0.0
        if ell >= 2:
            for _ in range(args.unitaries):
                U = logical_layer.random_unitary(4, rng)
                j, k = rng.choice(ell, size=2, replace=False)
                dev2 = max(dev2, logical_layer.verify_two_qubit(ell, int(j), int(k), U))
                jb, kb = rng.integers(ell, size=2)
                dev_b = max(dev_b, logical_layer.verify_bipartite(ell, int(jb), int(kb), U))
        ok = all(transfers.values()) and dev2 <= 1e-12 and dev_b <= 1e-12
        results.append({"ell": ell, "transfers": transfers, "two_qubit_dev": dev2,
                        "bipartite_dev": dev_b, "pass": ok})
    ok = all(r["pass"] for r in results)
    _emit(args, {"command": "verify-ideal", "seed": args.seed, "pass": ok, "results": results})
    return 0 if ok else 1


def cmd_clifford(args) -> int:
    if not args.name:
        raise UsageError("clifford needs --name")
    ell = int(_single(args.l, "--l"))
    theta = args.theta if args.theta is not None else 0.0
    g = clifford.QuditGate(args.name, ell, theta)
    kappa = _single(args.kappa, "--kappa") if args.kappa else 0.01
    circ, rep = clifford.compile_and_bound(g, kappa)
    fac = clifford.decompose(g)
    payload = {"command": "clifford", "report": rep.to_dict(), "decomposition": fac.to_dict(),
               "pass": rep.passed}
    _emit(args, payload)
    return 0 if rep.passed else 1


def _crosscheck_case(case):
    a, b = case
    wa = Wavepacket(a[0], a[1], a[2], (a[3], a[4]), a[5])
    wb = Wavepacket(b[0], b[1], b[2], (b[3], b[4]), b[5])
    e = inner_product(wa, wb)
    o = oracle.grid_overlap(oracle.packet_fn(a), oracle.packet_fn(b), points=20_000)
    return abs(e - o)


def cmd_crosscheck(args) -> int:
    rng = np.random.default_rng(args.seed)
    cases = [oracle.random_packet_case(rng) for _ in range(args.cases)]
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as ex:
            deltas = list(ex.map(_crosscheck_case, cases, chunksize=16))
    else:
        deltas = [_crosscheck_case(c) for c in cases]
    worst = max(deltas, default=0.0)
    ok = worst <= 1e-8
    _emit(args, {"command": "crosscheck", "cases": args.cases, "seed": args.seed,
                 "max_delta": worst, "tolerance": 1e-8, "pass": ok})
    if not ok:
        print(f"engine/oracle mismatch {worst:.3e} exceeds 1e-8", file=sys.stderr)
    return 0 if ok else 1


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int)
    common.add_argument("--l", help="ell, or a comma list for sweeps")
    common.add_argument("--j", type=int)
    common.add_argument("--k", type=int)
    common.add_argument("--kappa", help="kappa, or a comma list")
    common.add_argument("--delta", help="Delta, or a comma list")
    common.add_argument("--eps", type=float)
    common.add_argument("--envelope", choices=["gaussian", "comb"], default="gaussian")
    common.add_argument("--L", type=int)
    common.add_argument("--T", type=int, default=1)
    common.add_argument("--theta", type=float)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out")
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    common.add_argument("--format", choices=["json", "csv"], default="json")

    ap = argparse.ArgumentParser(prog="hybridgkp", description="GKP qudit gate compiler and error bounds")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("states", parents=[common], help="sample a codeword wavefunction as CSV")
    s.add_argument("--points", type=int, default=20001)
    s.set_defaults(func=cmd_states)

    s = sub.add_parser("melem", parents=[common], help="matrix elements and their inequalities")
    s.add_argument("--gate", required=True)
    s.add_argument("--z", type=int, default=1)
    s.add_argument("--elements", action="store_true", help="include the element matrix")
    s.set_defaults(func=cmd_melem)

    s = sub.add_parser("bound", parents=[common], help="computed and closed-form error bounds")
    s.add_argument("--target", required=True)
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("count", parents=[common], help="gate counts and strength audit")
    s.add_argument("--circuit", required=True, choices=["lsb", "transfer", "twoqubit", "bipartite"])
    s.add_argument("--trick", action="store_true", help="use the squeezing trick")
    s.add_argument("--alpha", type=float)
    s.add_argument("--zeta", type=float)
    s.add_argument("--max-count", type=int)
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("verify-ideal", parents=[common], help="brute-force the logical layer")
    s.add_argument("--max-l", type=int, default=4)
    s.add_argument("--unitaries", type=int, default=20)
    s.set_defaults(func=cmd_verify_ideal)

    s = sub.add_parser("clifford", parents=[common], help="decompose and compile a qudit Clifford")
    s.add_argument("--name", required=True, choices=list(clifford.GATES))
    s.set_defaults(func=cmd_clifford)

    s = sub.add_parser("crosscheck", parents=[common], help="engine vs grid oracle on random packets")
    s.add_argument("--cases", type=int, default=1000)
    s.set_defaults(func=cmd_crosscheck)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return args.func(args)
    except (UsageError, ParameterError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
