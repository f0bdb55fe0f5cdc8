"""Command-line front end.

Subcommands: simulate (record fitness trajectories), exact (stationary
analysis of the full chain at small n), converge (convergence-time
detection over independent runs), sweep (detection plus converged-phase
statistics over a parameter grid), verify (stationary-fitness bound
checks). All randomness flows from --seed; bound failures and budget
exhaustion are results written to the output, not process failures.

Exit codes: 0 success, 1 usage error, 2 operational error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .chains import (
    MAX_EXACT_N,
    build_chain,
    closed_form_stationary,
    detailed_balance_violation,
    stationary,
)
from .experiments import (
    ConvergenceConfig,
    converged_phase_stats,
    detect_many,
    phase_reference,
    sweep,
    verify_bounds,
)
from .process import ProcessParams, run
from .tables import write_tables

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_OPERATIONAL = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_common(sub, *, steps=False, runs=None, sample_every=False,
                harness=False):
    sub.add_argument("--n", type=int, required=True, help="problem size")
    sub.add_argument("--r", type=int, required=True, help="swap range, 1..n")
    sub.add_argument("--p", type=float, required=True,
                     help="comparison error probability, 0 < p < 1/2")
    sub.add_argument("--seed", type=int, default=0, help="base RNG seed")
    if steps:
        sub.add_argument("--steps", type=int, required=True, help="steps per run")
    if runs is not None:
        sub.add_argument("--runs", type=int, default=runs,
                         help=f"independent runs (default {runs})")
    if sample_every:
        sub.add_argument("--sample-every", type=int, default=None,
                         help="record every this many steps (default steps/1000)")
    if harness:
        sub.add_argument("--epsilon", type=float, default=0.05,
                         help="relative convergence tolerance (default 0.05)")
        sub.add_argument("--budget", type=float, default=50.0,
                         help="step budget as a multiple of the estimated "
                              "convergence time (default 50)")
    sub.add_argument("--out", default="-", help="output path, or - for stdout")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> _Parser:
    parser = _Parser(prog="swapsort", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True)

    sim = commands.add_parser("simulate", help="record fitness trajectories")
    _add_common(sim, steps=True, runs=1, sample_every=True)
    sim.set_defaults(handler=cmd_simulate)

    exact = commands.add_parser("exact", help="exact stationary analysis")
    _add_common(exact)
    exact.set_defaults(handler=cmd_exact)

    conv = commands.add_parser("converge", help="convergence-time detection")
    _add_common(conv, runs=300, harness=True)
    conv.set_defaults(handler=cmd_converge)

    sw = commands.add_parser("sweep", help="grid of detections plus statistics")
    sw.add_argument("--grid", required=True,
                    help="JSON grid: {\"cells\": [{\"n\",\"r\",\"p\"}...]} or "
                         "{\"n\": [...], \"r\": [...], \"p\": [...]} (cross product)")
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--runs", type=int, default=300)
    sw.add_argument("--epsilon", type=float, default=0.05)
    sw.add_argument("--budget", type=float, default=50.0)
    sw.add_argument("--out", default="-")
    sw.add_argument("--format", choices=("csv", "json"), default="csv")
    sw.set_defaults(handler=cmd_sweep)

    ver = commands.add_parser("verify", help="stationary-fitness bound checks")
    _add_common(ver, runs=50, harness=True)
    ver.add_argument("--slack", type=float, default=0.1,
                     help="multiplicative slack applied to upper bounds")
    ver.set_defaults(handler=cmd_verify)
    return parser


def _check_process_args(args, cap=None):
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    if cap is not None and args.n > cap:
        raise UsageError(f"--n exceeds the exact-analysis cap of {cap}")
    if not 1 <= args.r <= args.n:
        raise UsageError("--r must be in 1..n")
    if not 0.0 < args.p < 0.5:
        raise UsageError("--p must satisfy 0 < p < 1/2")
    if args.seed < 0:
        raise UsageError("--seed must be non-negative")


def _harness_config(args) -> ConvergenceConfig:
    if args.epsilon <= 0:
        raise UsageError("--epsilon must be positive")
    if args.budget <= 0:
        raise UsageError("--budget must be positive")
    return ConvergenceConfig(epsilon=args.epsilon, budget_multiplier=args.budget)


def cmd_simulate(args):
    _check_process_args(args)
    if args.steps < 0:
        raise UsageError("--steps must be non-negative")
    if args.runs < 1:
        raise UsageError("--runs must be at least 1")
    sample_every = args.sample_every
    if sample_every is None:
        sample_every = max(1, -(-args.steps // 1000))
    if sample_every < 1:
        raise UsageError("--sample-every must be at least 1")
    params = ProcessParams(n=args.n, r=args.r, p=args.p, seed=args.seed)
    rows = []
    for k in range(args.runs):
        traj = run(params, args.steps, sample_every=sample_every, run_index=k)
        for t, i, w, d in zip(traj.steps, traj.inversions, traj.weighted,
                              traj.dislocation):
            rows.append({"run": k, "step": int(t), "I": int(i), "W": int(w),
                         "D": int(d)})
    return {"trajectory": (["run", "step", "I", "W", "D"], rows)}


def cmd_exact(args):
    _check_process_args(args, cap=MAX_EXACT_N)
    chain = build_chain(args.n, args.r, args.p)
    result = stationary(chain)
    violation = detailed_balance_violation(chain, result.q)
    closed_dev = None
    if chain.r is not None and min(chain.r, chain.n - 1) == 1:
        closed = closed_form_stationary(args.n, args.p)
        closed_dev = float(abs(result.q - closed.q).max())
    rows = [
        {
            "state": "-".join(map(str, state)),
            "q": float(result.q[i]),
            "I": int(chain.inversions[i]),
            "W": int(chain.weighted[i]),
            "D": int(chain.dislocation[i]),
        }
        for i, state in enumerate(chain.states)
    ]
    summary = [{
        "n": args.n, "r": args.r, "p": args.p,
        "E_I": result.expected_inversions,
        "E_W": result.expected_weighted,
        "E_D": result.expected_dislocation,
        "db_violation": violation,
        "closed_form_max_dev": closed_dev,
    }]
    return {
        "states": (["state", "q", "I", "W", "D"], rows),
        "summary": (["n", "r", "p", "E_I", "E_W", "E_D", "db_violation",
                     "closed_form_max_dev"], summary),
    }


def cmd_converge(args):
    _check_process_args(args)
    if args.runs < 1:
        raise UsageError("--runs must be at least 1")
    config = _harness_config(args)
    params = ProcessParams(n=args.n, r=args.r, p=args.p, seed=args.seed)
    summary = detect_many(params, args.runs, config)
    rows = []
    for k, rep in enumerate(summary.reports):
        rows.append({
            "run": k,
            "t_est": rep.t_est,
            "t_conv": rep.t_conv,
            "converged": rep.converged,
            "I_stationary": rep.stationary_inversions,
            "W_stationary": rep.stationary_weighted,
            "D_stationary": rep.stationary_dislocation,
        })
    agg = [{
        "n": args.n, "r": args.r, "p": args.p, "runs": args.runs,
        "converged_runs": summary.converged_runs,
        "t_est": summary.reports[0].t_est,
        "t_conv_mean": summary.t_conv_mean,
        "t_conv_ci95": summary.t_conv_ci95,
    }]
    return {
        "runs": (["run", "t_est", "t_conv", "converged", "I_stationary",
                  "W_stationary", "D_stationary"], rows),
        "summary": (["n", "r", "p", "runs", "converged_runs", "t_est",
                     "t_conv_mean", "t_conv_ci95"], agg),
    }


def _load_grid(path, seed):
    try:
        with open(path) as f:
            doc = json.load(f)
    except OSError as exc:
        raise RuntimeError(f"cannot read grid file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise RuntimeError(f"grid file is not valid JSON: {exc}") from exc
    if "cells" in doc:
        raw = [(c["n"], c["r"], c["p"]) for c in doc["cells"]]
    elif all(key in doc for key in ("n", "r", "p")):
        raw = [(n, r, p) for n in doc["n"] for r in doc["r"] for p in doc["p"]]
    else:
        raise UsageError("grid file needs either a 'cells' list or 'n','r','p' lists")
    if not raw:
        raise UsageError("grid file defines no cells")
    cells = []
    for n, r, p in raw:
        try:
            cells.append(ProcessParams(n=int(n), r=int(r), p=float(p), seed=seed))
        except ValueError as exc:
            raise UsageError(f"grid cell (n={n}, r={r}, p={p}): {exc}") from exc
    return cells


def cmd_sweep(args):
    if args.runs < 2:
        raise UsageError("--runs must be at least 2")
    if args.seed < 0:
        raise UsageError("--seed must be non-negative")
    config = _harness_config(args)
    cells = _load_grid(args.grid, args.seed)
    results = sweep(cells, args.runs, config)
    rows = []
    for cell in results:
        row = {
            "n": cell.params.n, "r": cell.params.r, "p": cell.params.p,
            "runs": args.runs, "t_est": cell.t_est,
            "t_conv_mean": cell.detection.t_conv_mean,
            "t_conv_ci95": cell.detection.t_conv_ci95,
            "I_mean": None, "I_ci95": None, "W_mean": None, "W_ci95": None,
            "D_mean": None, "D_ci95": None,
        }
        if cell.stats is not None:
            row.update({
                "I_mean": cell.stats.inversions.mean,
                "I_ci95": cell.stats.inversions.ci95,
                "W_mean": cell.stats.weighted.mean,
                "W_ci95": cell.stats.weighted.ci95,
                "D_mean": cell.stats.dislocation.mean,
                "D_ci95": cell.stats.dislocation.ci95,
            })
        rows.append(row)
    fields = ["n", "r", "p", "runs", "t_est", "t_conv_mean", "t_conv_ci95",
              "I_mean", "I_ci95", "W_mean", "W_ci95", "D_mean", "D_ci95"]
    return {"cells": (fields, rows)}


def cmd_verify(args):
    _check_process_args(args)
    if args.runs < 2:
        raise UsageError("--runs must be at least 2")
    if args.slack < 0:
        raise UsageError("--slack must be non-negative")
    config = _harness_config(args)
    params = ProcessParams(n=args.n, r=args.r, p=args.p, seed=args.seed)
    fields = ["n", "r", "p", "bound", "metric", "kind", "applicable",
              "threshold", "slack", "measured", "ratio", "passed"]
    summary = detect_many(params, args.runs, config)
    t_conv = phase_reference(summary)
    if t_conv is None:
        rows = [{"n": args.n, "r": args.r, "p": args.p,
                 "bound": "budget-exhausted", "metric": None, "kind": None,
                 "applicable": False, "threshold": None, "slack": None,
                 "measured": None, "ratio": None, "passed": None}]
        return {"bounds": (fields, rows)}
    stats = converged_phase_stats(params, t_conv, args.runs, config)
    checks = verify_bounds(stats, args.n, args.r, args.p, upper_slack=args.slack)
    rows = [{
        "n": args.n, "r": args.r, "p": args.p,
        "bound": c.name, "metric": c.metric, "kind": c.kind,
        "applicable": c.applicable, "threshold": c.threshold, "slack": c.slack,
        "measured": c.measured, "ratio": c.ratio, "passed": c.passed,
    } for c in checks]
    return {"bounds": (fields, rows)}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"swapsort: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        tables = args.handler(args)
    except UsageError as exc:
        print(f"swapsort: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RuntimeError, OSError, ValueError) as exc:
        print(f"swapsort: error: {exc}", file=sys.stderr)
        return EXIT_OPERATIONAL
    try:
        write_tables(tables, args.out, args.format)
    except OSError as exc:
        print(f"swapsort: error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_OPERATIONAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
