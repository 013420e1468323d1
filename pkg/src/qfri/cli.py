"""``qfri`` command-line entry point.

Exit codes: 0 when everything checked holds, 1 on input or validation
errors, 2 when a computed inequality is violated.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import bounds, hypothesis_testing, io, speed, subgaussian, suites
from .errors import QfriError
from .linalg import DEFAULT_CAP
from .states import as_density, relative_entropy, thermal_state

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VIOLATION = 2

CHECK_TOL = 1e-8
PLAN_MODES = {"exact": "exact_sigma", "approx": "approx_sigma", "pinsker": "pinsker"}
CURVE_POINTS = 20


class InputError(Exception):
    """Bad command-line usage or unreadable input."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for violations here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# -- argument helpers ------------------------------------------------------------

def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer seed: {text!r}")
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _dims(text: str) -> tuple[int, int]:
    parts = text.split("-")
    try:
        lo, hi = (int(parts[0]), int(parts[-1])) if len(parts) <= 2 else (None, None)
    except ValueError:
        lo = hi = None
    if lo is None or lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"dims must look like 2-8, got {text!r}")
    return lo, hi


def _default_seed() -> int:
    raw = os.environ.get("QFRI_SEED")
    if raw is None or raw == "":
        return suites.DEFAULT_SEED
    try:
        return _seed(raw)
    except argparse.ArgumentTypeError as exc:
        raise InputError(f"QFRI_SEED: {exc}")


def _read_matrix(path: str) -> np.ndarray:
    try:
        return io.read_matrix(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg})")


def _read_distribution(path: str):
    try:
        return io.read_distribution(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg})")


# -- output ----------------------------------------------------------------------

def _clean(x):
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _emit(report: dict, fmt: str, tables: Optional[dict] = None) -> None:
    if fmt == "json":
        out = dict(report)
        if tables:
            out.update(tables)
        sys.stdout.write(json.dumps(_clean(out), sort_keys=True, indent=2) + "\n")
        return
    width = max((len(k) for k in report), default=0)
    for k in sorted(report):
        print(f"{k:<{width}}  {_fmt(report[k])}")
    for name, rows in (tables or {}).items():
        if not rows:
            continue
        print(f"\n{name}:")
        cols = list(rows[0])
        print("  ".join(f"{c:>16}" for c in cols))
        for r in rows:
            print("  ".join(f"{_fmt(r[c]):>16}" for c in cols))


# -- subcommands -----------------------------------------------------------------

def run_verify(args) -> int:
    reports = suites.run_verify(args.suite or ["all"], args.cases, args.seed, args.dims, args.jobs)
    total = sum(r.violations for r in reports)
    if args.format == "json":
        doc = {
            "seed": args.seed,
            "cases": args.cases,
            "suites": [r.to_dict(timing=args.timing) for r in reports],
            "violations": total,
        }
        sys.stdout.write(json.dumps(_clean(doc), sort_keys=True, indent=2) + "\n")
    else:
        for r in reports:
            status = "PASS" if r.violations == 0 else "FAIL"
            line = f"{status} {r.suite:<16} cases={r.cases_run} violations={r.violations} worst_slack={r.worst_slack:.3e}"
            if args.timing:
                line += f" elapsed={r.elapsed:.2f}s"
            print(line)
    return EXIT_OK if total == 0 else EXIT_VIOLATION


def run_bound(args) -> int:
    o = _read_matrix(args.obs)
    g1 = as_density(_read_matrix(args.gamma1))
    if args.temperature is not None:
        if args.gamma0 is not None:
            raise InputError("--gamma0 and --temperature are mutually exclusive")
        g0 = thermal_state(o, args.temperature)
    elif args.gamma0 is None:
        raise InputError("one of --gamma0 or --temperature is required")
    else:
        g0 = as_density(_read_matrix(args.gamma0))

    if args.bayes is not None:
        pi0, pi1 = args.bayes
        rep = bounds.bayesian_qfri_bound(o, g0, g1, pi0, pi1)
    elif args.variant == "sub_gaussian":
        rep = bounds.subgaussian_qfri_bound(o, g0, g1)
    else:
        rep = bounds.qfri_bound(o, g0, g1, args.variant)
    report = rep.to_dict()
    if args.temperature is not None:
        eb = bounds.energy_difference_bound(o, g0, g1, args.temperature)
        report["temperature"] = args.temperature
        report["energy_entropy_form"] = eb.entropy_form
        report["energy_free_energy_form"] = eb.free_energy_form
    violated = rep.bound < rep.exact_difference - CHECK_TOL
    report["holds"] = not violated
    _emit(report, args.format)
    return EXIT_VIOLATION if violated else EXIT_OK


def run_test_bound(args) -> int:
    if args.example_m is not None:
        if args.rho0 or args.rho1:
            raise InputError("--example-m replaces --rho0/--rho1")
        rho0, rho1 = hypothesis_testing.example_states(args.example_m)
    elif args.rho0 and args.rho1:
        rho0, rho1 = as_density(_read_matrix(args.rho0)), as_density(_read_matrix(args.rho1))
    else:
        raise InputError("need --rho0 and --rho1, or --example-m")
    if args.m1 is not None:
        povm = hypothesis_testing.Povm.from_effect(_read_matrix(args.m1))
    else:
        povm = hypothesis_testing.likelihood_ratio_povm(rho0, rho1, args.copies, args.lr_threshold, args.cap)
    out = hypothesis_testing.evaluate_test(rho0, rho1, povm, args.copies, args.cap)
    err = out.alpha + out.beta
    violated = (
        err < out.lower_bound - CHECK_TOL
        or err > out.upper_bound + CHECK_TOL
        or (out.helstrom_bound is not None and err < out.helstrom_bound - CHECK_TOL)
        or (out.twin_lower_bound is not None and err < out.twin_lower_bound - CHECK_TOL)
    )
    report = out.to_dict()
    report["holds"] = not violated
    _emit(report, args.format)
    return EXIT_VIOLATION if violated else EXIT_OK


def run_plan(args) -> int:
    if (args.relent is None) == (args.example_m is None):
        raise InputError("give exactly one of --relent or --example-m")
    if args.example_m is not None:
        rho0, rho1 = hypothesis_testing.example_states(args.example_m)
        s01 = relative_entropy(rho1, rho0)
    else:
        s01 = args.relent
    ns = {name: hypothesis_testing.plan_sample_size(args.alpha, args.beta_floor, s01, mode)
          for name, mode in PLAN_MODES.items()}
    chosen = PLAN_MODES[args.mode]
    report = {
        "alpha": args.alpha,
        "beta_floor": args.beta_floor,
        "relative_entropy": s01,
        "mode": args.mode,
        "n": ns[args.mode],
        "sigma0": hypothesis_testing.planner_sigma(args.alpha, chosen),
    }
    for name, n in ns.items():
        report[f"n_{name}"] = n
    top = max(ns.values())
    grid = np.unique(np.round(np.logspace(0, math.log10(max(top, 2)) + 0.1, CURVE_POINTS)).astype(int))
    curve = hypothesis_testing.bound_curve(args.alpha, s01, grid, chosen)
    rows = [{"n": int(n), "beta_lower_bound": float(b)} for n, b in zip(grid, curve)]
    _emit(report, args.format, {"bound_curve": rows})
    return EXIT_OK


def run_subgauss(args) -> int:
    if args.dist is not None:
        if args.obs or args.state:
            raise InputError("--dist replaces --obs/--state")
        dist = _read_distribution(args.dist)
    elif args.obs and args.state:
        dist = subgaussian.induced_distribution(_read_matrix(args.obs), _read_matrix(args.state))
    else:
        raise InputError("need --dist, or --obs with --state")
    res = subgaussian.subgaussian_norm(dist)
    ub = subgaussian.norm_upper_bounds(dist)
    report = {
        "sigma": res.sigma,
        "argmax_t": res.argmax_t,
        "method": res.method,
        "certificate_residual": res.certificate_residual,
        "mean": dist.mean,
        "std": math.sqrt(dist.variance),
        "range_bound": ub.range_bound,
        "bernoulli_dominance_bound": ub.dominance_bound,
    }
    violated = (
        res.sigma < report["std"] - CHECK_TOL
        or res.sigma > ub.range_bound + CHECK_TOL
        or (ub.dominance_bound is not None and res.sigma > ub.dominance_bound + CHECK_TOL)
    )
    report["holds"] = not violated
    _emit(report, args.format)
    return EXIT_VIOLATION if violated else EXIT_OK


def run_speed(args) -> int:
    h, rho, o = _read_matrix(args.h), as_density(_read_matrix(args.rho)), _read_matrix(args.obs)
    v = speed.observable_speed(o, h, rho)
    qb = speed.qfri_speed_bound(o, h, rho)
    mt = speed.mandelstam_tamm_bound(o, h, rho)
    report = {"speed": v, "qfri_bound": qb, "mandelstam_tamm_bound": mt}
    dts = np.logspace(-3, -1, 8) if args.dt is None else np.array([args.dt])
    rows = speed.second_order_table(h, rho, dts)
    if len(rows) > 1:
        for key, name in (("abs_error", "second_order_slope"), ("kubo_mori_abs_error", "kubo_mori_slope")):
            errs = [r[key] for r in rows]
            report[name] = speed.convergence_order(dts, errs) if min(errs) > 0 else None
    violated = abs(v) > qb + CHECK_TOL or abs(v) > mt + CHECK_TOL
    report["holds"] = not violated
    _emit(report, args.format, {"second_order": rows})
    return EXIT_VIOLATION if violated else EXIT_OK


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qfri", description="Fluctuation-response bounds, checks and planners.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--format", choices=("text", "json"), default="text")

    v = sub.add_parser("verify", help="run randomized property suites")
    v.add_argument("--suite", action="append", choices=suites.SUITES + ("all",),
                   help="suite to run (repeatable, default all)")
    v.add_argument("--cases", type=_positive_int, default=suites.DEFAULT_CASES)
    v.add_argument("--seed", type=_seed, default=None, help="default: $QFRI_SEED or %d" % suites.DEFAULT_SEED)
    v.add_argument("--dims", type=_dims, default=None, help="dimension range, e.g. 2-8")
    v.add_argument("--jobs", type=_positive_int, default=1)
    v.add_argument("--timing", action="store_true", help="include elapsed times")
    common(v)
    v.set_defaults(func=run_verify)

    b = sub.add_parser("bound", help="bound |<O>_1 - <O>_0| from state files")
    b.add_argument("--gamma0")
    b.add_argument("--gamma1", required=True)
    b.add_argument("--obs", required=True)
    b.add_argument("--variant", choices=("tight", "golden_thompson", "sub_gaussian"), default="golden_thompson")
    b.add_argument("--bayes", nargs=2, type=float, metavar=("PI0", "PI1"))
    b.add_argument("--temperature", type=float, help="use the thermal state of --obs as gamma0")
    common(b)
    b.set_defaults(func=run_bound)

    t = sub.add_parser("test-bound", help="error rates of a two-outcome test and their bounds")
    t.add_argument("--rho0")
    t.add_argument("--rho1")
    t.add_argument("--m1", help="effect for outcome 1; default is the likelihood-ratio test")
    t.add_argument("--example-m", type=int)
    t.add_argument("--lr-threshold", type=float, default=1.0)
    t.add_argument("--copies", type=_positive_int, default=1)
    t.add_argument("--cap", type=_positive_int, default=DEFAULT_CAP)
    common(t)
    t.set_defaults(func=run_test_bound)

    pl = sub.add_parser("plan", help="copies needed to push the type II floor down")
    pl.add_argument("--alpha", type=float, required=True)
    pl.add_argument("--beta-floor", type=float, required=True)
    pl.add_argument("--relent", type=float)
    pl.add_argument("--example-m", type=int)
    pl.add_argument("--mode", choices=tuple(PLAN_MODES), default="exact")
    common(pl)
    pl.set_defaults(func=run_plan)

    s = sub.add_parser("subgauss", help="sub-Gaussian norm of a distribution")
    s.add_argument("--dist")
    s.add_argument("--obs")
    s.add_argument("--state")
    common(s)
    s.set_defaults(func=run_subgauss)

    sp = sub.add_parser("speed", help="observable speed against both speed limits")
    sp.add_argument("--h", required=True)
    sp.add_argument("--rho", required=True)
    sp.add_argument("--obs", required=True)
    sp.add_argument("--dt", type=float)
    common(sp)
    sp.set_defaults(func=run_speed)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        return args.func(args)
    except (QfriError, InputError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
