"""Command-line entry point.

Every command writes a header echoing the invocation and the resolved run
configuration, then a data payload that depends only on that configuration.
Exit status: 0 success, 1 verification counterexample, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import shlex
import sys
from typing import Optional, Sequence

import numpy as np

from bootperc import analytic, hierarchy, montecarlo, oracle, spanning, variational
from bootperc.lattice import Configuration, Direction, Model, Rect

PROG = "bootperc"
EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- parsing helpers

def _dims(text: str) -> tuple[int, int]:
    try:
        m, n = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must look like 3x4, got {text!r}") from None
    if m < 1 or n < 1:
        raise argparse.ArgumentTypeError("dims must be positive")
    return m, n


def _pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}") from None
    return a, b


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _prob(text: str) -> float:
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < p < 1:
        raise argparse.ArgumentTypeError("probability must lie in (0, 1)")
    return p


def _posint(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            k, v = (s.strip() for s in line.split("=", 1))
            out[k.replace("-", "_")] = v
    return out


def _common(p: argparse.ArgumentParser, mc: bool = False) -> None:
    p.add_argument("--model", choices=[m.value for m in Model], default="standard")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--config", default=None, help="key=value file; flags take precedence")
    if mc:
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument("--trials", type=_posint, default=10_000)
        p.add_argument("--workers", type=_posint, default=None,
                       help=f"worker threads (default ${montecarlo.WORKERS_ENV} or 1)")
        p.add_argument("--level", type=_prob, default=montecarlo.DEFAULT_LEVEL)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog=PROG, description="Bootstrap percolation thresholds toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curves", help="tabulate the rate functions")
    _common(p)
    p.add_argument("--zmin", type=float, default=0.05)
    p.add_argument("--zmax", type=float, default=5.0)
    p.add_argument("--points", type=_posint, default=100)

    p = sub.add_parser("integrals", help="threshold integrals by quadrature")
    _common(p)
    p.add_argument("--which", choices=["f", "g", "g-rational", "g-dilog", "all"], default="all")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--budget", type=_posint, default=200)

    p = sub.add_parser("traverse", help="exact traversability probability and bracket")
    _common(p)
    p.add_argument("--dims", type=_dims, required=True)
    p.add_argument("--p", type=_prob, required=True)
    p.add_argument("--direction", choices=["horizontal", "east"], default="horizontal")

    p = sub.add_parser("simulate-I", help="Monte Carlo spanning probability of R(L, L)")
    _common(p, mc=True)
    p.add_argument("--L", type=_posint, required=True)
    p.add_argument("--p", type=_prob, required=True)

    p = sub.add_parser("simulate-J", help="Monte Carlo activation of the origin by time t")
    _common(p, mc=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--p", type=_prob, required=True)

    p = sub.add_parser("event-A", help="corner-growth event frequency and its analytic bound")
    _common(p, mc=True)
    p.add_argument("--m", type=_posint, required=True)
    p.add_argument("--p", type=_prob, required=True)

    p = sub.add_parser("scan", help="threshold scan with p_half(L)")
    _common(p, mc=True)
    p.add_argument("--L", type=_int_list, default=[32, 64, 128, 256, 512])
    p.add_argument("--p-grid", type=_float_list, default=None,
                   help="shared p values (default: p log L evenly spaced per L)")
    p.add_argument("--points", type=_posint, default=161)

    p = sub.add_parser("merge-tree", help="run the rectangle-merging algorithm on a configuration")
    _common(p)
    p.add_argument("--input", required=True, help="configuration text file ('w h' then rows)")

    p = sub.add_parser("hierarchy", help="build and check a good hierarchy for a spanned configuration")
    _common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--two-z-over-q", type=float, default=4.0)
    p.add_argument("--t-over-q", type=float, default=2.0)

    p = sub.add_parser("variational", help="W(a, b) by the grid evaluator")
    _common(p)
    p.add_argument("--a", type=_pair, required=True)
    p.add_argument("--b", type=_pair, required=True)
    p.add_argument("--grid-steps", type=_posint, default=256)

    p = sub.add_parser("verify", help="exhaustive structural checks")
    _common(p)
    p.add_argument("--property", choices=[pr.value for pr in oracle.Property], required=True)
    p.add_argument("--dims", type=_dims, required=True)
    p.add_argument("--k", type=_posint, default=None)
    return ap


def _subparser(ap: argparse.ArgumentParser, name: str) -> argparse.ArgumentParser:
    for action in ap._subparsers._group_actions:
        if name in action.choices:
            return action.choices[name]
    raise UsageError(f"unknown command {name!r}")


def parse(argv: Sequence[str]) -> argparse.Namespace:
    """Parse ``argv``; values from ``--config`` become defaults so flags win."""
    ap = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if known.config and known.command in COMMANDS:
        sp = _subparser(ap, known.command)
        values = read_config_file(known.config)
        acts = {a.dest: a for a in sp._actions}
        defaults = {}
        for k, v in values.items():
            if k not in acts or k in ("config", "help"):
                raise UsageError(f"config key {k!r} is not an option of {known.command}")
            act = acts[k]
            try:
                defaults[k] = act.type(v) if act.type else v
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"config key {k!r}: {exc}") from None
            if act.choices and defaults[k] not in act.choices:
                raise UsageError(f"config key {k!r}: invalid choice {v!r}")
            act.required = False
        sp.set_defaults(**defaults)
    return ap.parse_args(argv)


# ---------------------------------------------------------------- output

def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _run_config(args) -> dict:
    return {k: (v.value if hasattr(v, "value") else v) for k, v in sorted(vars(args).items())
            if k not in ("out",)}


def _emit(args, argv, payload, rows: Optional[list] = None, columns: Optional[list] = None) -> str:
    invocation = " ".join([PROG] + [shlex.quote(a) for a in argv])
    if args.format == "csv" and rows is not None:
        buf = io.StringIO()
        buf.write(f"# {invocation}\n")
        buf.write(f"# run_config {json.dumps(_run_config(args), sort_keys=True)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in columns])
        text = buf.getvalue()
    else:
        doc = {"invocation": invocation, "run_config": _run_config(args), "result": payload}
        text = json.dumps(doc, sort_keys=True, indent=1, allow_nan=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


def _estimate_row(e: montecarlo.Estimate) -> dict:
    return e.to_dict()


# ---------------------------------------------------------------- commands

def cmd_curves(args, argv):
    if not 0 < args.zmin < args.zmax:
        raise UsageError("need 0 < zmin < zmax")
    zs = np.linspace(args.zmin, args.zmax, args.points)
    rows = [{"z": float(z), "f": analytic.f(float(z)), "g": analytic.g(float(z)),
             "beta": analytic.beta(float(-np.expm1(-z)))} for z in zs]
    _emit(args, argv, rows, rows, ["z", "f", "g", "beta"])
    return EXIT_OK


def cmd_integrals(args, argv):
    which = ["f", "g", "g-rational", "g-dilog"] if args.which == "all" else [args.which]
    out = {}
    for w in which:
        if w == "f":
            r, ref = analytic.lambda_integral("f", args.tol, args.budget), analytic.LAMBDA_MODIFIED
        elif w == "g":
            r, ref = analytic.lambda_integral("g", args.tol, args.budget), analytic.LAMBDA
        elif w == "g-rational":
            r, ref = analytic.g_integral_rational_form(args.tol), analytic.LAMBDA
        else:
            r, ref = analytic.g_integral_dilog_form(args.tol), analytic.LAMBDA
        out[w] = dict(r.to_dict(), reference=ref, deviation=r.value - ref)
    rows = [dict(name=k, **v) for k, v in out.items()]
    _emit(args, argv, out, rows, ["name", "value", "error_estimate", "evaluations", "reference", "deviation"])
    return EXIT_OK


def cmd_traverse(args, argv):
    m, n = args.dims
    rp = analytic.RateParams(args.p)
    q = rp.q
    val = analytic.exact_traverse_prob(m, n, rp, args.direction)
    if args.direction == "horizontal":
        lo, hi = math.exp(-m * analytic.g(n * q)), math.exp(-(m - 1) * analytic.g(n * q))
    else:
        lo, hi = math.exp(-(m - 1) * analytic.g(n * q) - analytic.f(n * q)), math.exp(-m * analytic.g(n * q))
    row = {"m": m, "n": n, "p": args.p, "direction": args.direction, "probability": val,
           "lower": lo, "upper": hi}
    _emit(args, argv, row, [row], list(row))
    return EXIT_OK


def cmd_simulate_I(args, argv):
    e = montecarlo.estimate_I(args.L, args.p, args.trials, args.seed, Model(args.model), args.workers, args.level)
    row = dict(L=args.L, p=args.p, **_estimate_row(e))
    _emit(args, argv, row, [row], list(row))
    return EXIT_OK


def cmd_simulate_J(args, argv):
    e = montecarlo.estimate_J(args.t, args.p, args.trials, args.seed, Model(args.model), args.workers, args.level)
    row = dict(t=args.t, p=args.p, **_estimate_row(e))
    _emit(args, argv, row, [row], list(row))
    return EXIT_OK


def cmd_event_A(args, argv):
    if args.model != "standard":
        raise UsageError("event-A is defined for the standard model only")
    res = montecarlo.estimate_event_A(args.m, args.p, args.trials, args.seed, args.workers, args.level,
                                      strict=False)
    row = dict(m=args.m, p=args.p, r=montecarlo.corner_scale(args.p), **_estimate_row(res.estimate),
               spanned_mean=res.spanned.mean, violations=res.violations,
               analytic_lower_bound=res.analytic_lower_bound)
    _emit(args, argv, row, [row], list(row))
    return EXIT_COUNTEREXAMPLE if res.violations else EXIT_OK


def cmd_scan(args, argv):
    if any(L < 2 for L in args.L):
        raise UsageError("scan side lengths must be at least 2")
    grid = args.p_grid if args.p_grid else {L: montecarlo.default_scan_grid(L, args.points) for L in args.L}
    res = montecarlo.threshold_scan(args.L, grid, args.trials, args.seed, Model(args.model), args.workers,
                                    args.level)
    rows = [{"L": r.L, "p": r.p, "trials": r.estimate.trials, "successes": r.estimate.successes,
             "mean": r.estimate.mean, "ci_low": r.estimate.ci_low, "ci_high": r.estimate.ci_high,
             "p_log_L": r.p_log_L} for r in res.rows]
    payload = {"rows": rows, "p_half": {str(L): v for L, v in res.p_half.items()},
               "p_half_log_L": {str(L): v for L, v in res.p_half_log_L().items()},
               "master_seed": res.master_seed, "model": res.model.value}
    if args.format == "csv":
        rows = rows + [{"L": L, "p": v, "trials": args.trials, "successes": "", "mean": 0.5, "ci_low": "",
                        "ci_high": "", "p_log_L": v * math.log(L)} for L, v in res.p_half.items()]
    _emit(args, argv, payload, rows, ["L", "p", "trials", "successes", "mean", "ci_low", "ci_high", "p_log_L"])
    return EXIT_OK


def _read_config(path: str) -> Configuration:
    try:
        with open(path, encoding="utf-8") as fh:
            return Configuration.from_text(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def cmd_merge_tree(args, argv):
    c = _read_config(args.input)
    if c.count() == 0:
        raise UsageError("configuration has no occupied sites")
    tree = spanning.run_merge_algorithm(c, Model(args.model), check_invariants=True)
    _emit(args, argv, tree.to_dict())
    return EXIT_OK


def cmd_hierarchy(args, argv):
    c = _read_config(args.input)
    m = Model(args.model)
    th = hierarchy.Thresholds(args.two_z_over_q, args.t_over_q)
    wh = hierarchy.build_good_hierarchy(c.domain, c, th, m)
    problems = hierarchy.goodness_violations(wh.hierarchy, th, m) + hierarchy.occurrence_violations(wh, c, m)
    payload = dict(wh.to_dict(), good=not problems, problems=problems)
    _emit(args, argv, payload)
    return EXIT_COUNTEREXAMPLE if problems else EXIT_OK


def cmd_variational(args, argv):
    est = variational.W_estimate(args.a, args.b, max(1, args.grid_steps // 2))
    row = {"a1": args.a[0], "a2": args.a[1], "b1": args.b[0], "b2": args.b[1], "W": est.value,
           "eps_grid": est.eps_grid, "coarse": est.coarse, "grid_steps": est.grid_steps,
           "axis_bound": variational.upper_bound_axis(args.a, args.b)}
    _emit(args, argv, row, [row], list(row))
    return EXIT_OK


def cmd_verify(args, argv):
    m, n = args.dims
    report = oracle.verify_exhaustive(args.property, m, n, Model(args.model), args.k)
    _emit(args, argv, report)
    return EXIT_COUNTEREXAMPLE if report["counterexamples"] else EXIT_OK


COMMANDS = {
    "curves": cmd_curves, "integrals": cmd_integrals, "traverse": cmd_traverse,
    "simulate-I": cmd_simulate_I, "simulate-J": cmd_simulate_J, "event-A": cmd_event_A,
    "scan": cmd_scan, "merge-tree": cmd_merge_tree, "hierarchy": cmd_hierarchy,
    "variational": cmd_variational, "verify": cmd_verify,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse(argv)
        return COMMANDS[args.command](args, argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    except (UsageError, ValueError, analytic.QuadratureError, hierarchy.HierarchyError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
