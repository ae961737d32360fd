"""Command-line front end: solve instances, run scenarios, bench, check.

Exit codes: 0 on success, 1 on a failed check, 2 on a parse or validation
error, 3 when no path exists (or exploration hits its step limit).
"""
from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

from .instances import random_bundle_sequence
from .io_formats import (
    ParseError,
    Scenario,
    load_instance,
    load_map,
    load_scenario,
    plan_csv_rows,
    run_scenario,
    write_plan_csv,
    write_solve_csv,
)
from .oracle import oracle_length
from .robot import (
    CenterInsideObstacleError,
    NoPathError,
    StepLimitError,
    UnreachableError,
)
from .rubber_band import rubber_band_solve, trim_bundles
from .shooting import MmsReport, SolveLimits, default_group_count, solve
from .svg import render_instance, render_trace


def _limits(args: argparse.Namespace) -> SolveLimits:
    return SolveLimits(max_iter=args.max_iter, tol_len=args.tol_len,
                       tol_angle=args.tol_angle)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _solve_one(seq, solver: str, k: int | None,
               limits: SolveLimits) -> tuple[MmsReport, int]:
    n = len(seq.interior)
    if solver == "rubber_band":
        report = rubber_band_solve(trim_bundles(seq), seq.p, seq.q, limits)
        return report, 0
    kk = default_group_count(n) if k is None else max(1, min(n, k))
    return solve(seq, kk, limits), kk


def cmd_solve(args: argparse.Namespace) -> int:
    seq = load_instance(args.instance)
    limits = _limits(args)
    report, k = _solve_one(seq, args.solver, args.k, limits)
    print(f"solver: {args.solver}")
    print(f"bundles: {len(seq.interior)}  k: {k}")
    print(f"iterations: {report.iterations}  "
          f"converged_by: {report.converged_by.value}")
    print("trace: " + " ".join(_fmt(v) for v in report.per_iteration_lengths))
    print(f"length: {_fmt(report.length)}")
    if args.oracle:
        segs = [s for b in seq.interior for s in b.segments]
        orc = oracle_length(segs, seq.p, seq.q, m=args.oracle_samples)
        gap = (report.length - orc) / orc if orc > 0 else 0.0
        print(f"oracle: {_fmt(orc)}  gap: {_fmt(gap)}")
    if args.csv:
        write_solve_csv(report, args.csv)
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(render_instance(seq, {args.solver: report.path}))
    return 0


def _apply_overrides(sc: Scenario, args: argparse.Namespace) -> Scenario:
    changes = {}
    if args.solver is not None:
        changes["solver"] = "graph" if args.solver == "graph_only" else args.solver
    if args.radius is not None:
        changes["r"] = args.radius
    if args.k is not None:
        changes["k_rule"] = args.k
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.max_iter is not None or args.tol_len is not None \
            or args.tol_angle is not None:
        lim = sc.limits
        changes["limits"] = SolveLimits(
            max_iter=args.max_iter if args.max_iter is not None else lim.max_iter,
            tol_len=args.tol_len if args.tol_len is not None else lim.tol_len,
            tol_angle=args.tol_angle if args.tol_angle is not None
            else lim.tol_angle)
    if not changes:
        return sc
    return replace(sc, **changes)


def cmd_plan(args: argparse.Namespace) -> int:
    sc = _apply_overrides(load_scenario(args.scenario), args)
    trace = run_scenario(sc)
    for row in plan_csv_rows(trace):
        print(row)
    print(f"reached: {trace.reached}  scans: {trace.scans}  "
          f"walked: {_fmt(trace.path.length)}")
    if args.csv:
        write_plan_csv(trace, args.csv)
    if args.svg:
        world = load_map(sc.map_path)
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(render_trace(world, trace))
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    scenarios = [(i, path, load_scenario(path)) for i, path in
                 enumerate(args.scenarios)]

    def run(item):
        i, path, sc = item
        t0 = time.perf_counter()
        trace = run_scenario(sc)
        dt = time.perf_counter() - t0
        tau = sum(ev.tau_length for ev in trace.events)
        ln = sum(ev.walked.length for ev in trace.events)
        red = 100.0 * (tau - ln) / tau if tau > 0 else 0.0
        return (i, path, sc.solver, len(trace.events), trace.path.length,
                red, dt)

    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        rows = sorted(pool.map(run, scenarios))
    out = ["scenario,solver,events,walked_len,return_reduction_pct,wall_time_s"]
    for i, path, solver, n_ev, ln, red, dt in rows:
        out.append(f"{path},{solver},{n_ev},{_fmt(ln)},{_fmt(red)},{_fmt(dt)}")
    text = "\n".join(out)
    print(text)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return 0


def cmd_oracle_check(args: argparse.Namespace) -> int:
    limits = _limits(args)
    failures = 0
    checked = 0

    def check(seq, name: str) -> None:
        nonlocal failures, checked
        checked += 1
        report, _ = _solve_one(seq, args.solver, args.k, limits)
        segs = [s for b in seq.interior for s in b.segments]
        orc = oracle_length(segs, seq.p, seq.q, m=args.oracle_samples)
        ratio = report.length / orc if orc > 0 else 1.0
        ok = 0.999 <= ratio <= 1.005
        if not ok:
            failures += 1
        print(f"{name}: solver={_fmt(report.length)} oracle={_fmt(orc)} "
              f"ratio={ratio:.6f} {'ok' if ok else 'FAIL'}")

    for path in args.instances:
        check(load_instance(path), path)
    for i in range(args.random):
        seed = args.seed + i
        check(random_bundle_sequence(seed), f"seed {seed}")
    if checked == 0:
        print("nothing to check: pass instance files or --random N",
              file=sys.stderr)
        return 2
    print(f"checked {checked}, failures {failures}")
    return 1 if failures else 0


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="shootpath",
        description="Shortest paths across ordered segment bundles, and an "
                    "exploration simulator that plans with them.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_limit_flags(p, with_default: bool) -> None:
        d = SolveLimits()
        p.add_argument("--max-iter", type=int,
                       default=d.max_iter if with_default else None)
        p.add_argument("--tol-angle", type=float,
                       default=d.tol_angle if with_default else None)
        p.add_argument("--tol-len", type=float,
                       default=d.tol_len if with_default else None)

    p = sub.add_parser("solve", help="solve one bundle-sequence instance")
    p.add_argument("instance")
    p.add_argument("--solver", choices=("mms", "rubber_band"), default="mms")
    p.add_argument("--k", type=int, default=None,
                   help="fixed group count (default: floor(N/5) rule)")
    p.add_argument("--oracle", action="store_true",
                   help="also run the DP oracle and print the gap")
    p.add_argument("--oracle-samples", type=int, default=512)
    p.add_argument("--svg", default=None, help="write an SVG rendering here")
    p.add_argument("--csv", default=None, help="write per-iteration lengths")
    add_limit_flags(p, with_default=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("plan", help="run an exploration scenario")
    p.add_argument("scenario")
    p.add_argument("--solver", choices=("mms", "rubber_band", "graph_only"),
                   default=None, help="override the scenario's solver")
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--svg", default=None)
    p.add_argument("--csv", default=None)
    add_limit_flags(p, with_default=False)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("bench", help="run scenarios across worker threads")
    p.add_argument("scenarios", nargs="+")
    p.add_argument("--jobs", type=int, default=4)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle-check",
                       help="compare a solver against the DP oracle")
    p.add_argument("instances", nargs="*")
    p.add_argument("--random", type=int, default=0, metavar="N",
                   help="also check N seeded random instances")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--solver", choices=("mms", "rubber_band"), default="mms")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--oracle-samples", type=int, default=512)
    add_limit_flags(p, with_default=True)
    p.set_defaults(func=cmd_oracle_check)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, CenterInsideObstacleError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (NoPathError, StepLimitError, UnreachableError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
