"""Command-line interface: simulate measurements, detect placements, benchmark.

All primary output is machine-readable (CSV files, JSON on stdout);
diagnostics go to stderr.  Exit codes: 0 success, 1 runtime failure,
2 usage error.  Every command is deterministic under a fixed --seed except
for the wall-clock timing fields.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .core import allocation_revenue, correlate, read_grid_csv
from .evaluate import (
    BenchConfig,
    run_benchmark,
    write_aggregate_csv,
    write_records_jsonl,
)
from .gap import default_k_max, estimate_k
from .sim import GenerationError, SimSpec, generate, save_instance
from .solver import (
    BudgetError,
    InfeasibleError,
    brute_force_solve,
    greedy_detect,
    sort_bids,
    wdp_solve,
)


def _add_template_args(parser: argparse.ArgumentParser, required: bool) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--w", type=int, help="side of the built-in all-ones template")
    group.add_argument("--template", help="CSV file with a square template grid")


def _load_template(args) -> np.ndarray:
    if args.template is not None:
        return read_grid_csv(args.template)
    return np.ones((args.w, args.w))


def cmd_simulate(args) -> int:
    template = _load_template(args)
    spec = SimSpec(
        n_rows=args.rows,
        n_cols=args.cols,
        template=template,
        k=args.k,
        separation=args.separation,
        snr_db=args.snr_db,
        rng_seed=args.seed,
        require_tight_pair=args.tight_pair,
    )
    instance = generate(spec)
    save_instance(instance, args.out)
    print(f"sigma={instance.sigma!r}")
    return 0


def cmd_detect(args) -> int:
    y = read_grid_csv(args.measurement)
    s = read_grid_csv(args.template)
    w = int(s.shape[0])
    k_hat = None
    if args.estimate_k:
        k_max = args.k_max
        if k_max is None:
            k_max = default_k_max(y.shape[0], y.shape[1], w)
        profile = estimate_k(
            y, s,
            k_max=k_max,
            reps=args.null_reps,
            rng_seed=args.seed,
            null_solver=args.null_solver,
        )
        k_hat = profile.k_hat
        k = k_hat
    else:
        k = args.k
    bids = sort_bids(correlate(y, s), w)
    nodes = prunes_bound = prunes_feasibility = 0
    t0 = time.perf_counter()
    if args.solver == "greedy":
        allocation = greedy_detect(bids, k)
        objective = allocation_revenue(allocation)
    else:
        solve = wdp_solve if args.solver == "exact" else brute_force_solve
        report = solve(bids, k)
        allocation = report.allocation
        objective = report.objective
        nodes = report.nodes_explored
        prunes_bound = report.prunes_bound
        prunes_feasibility = report.prunes_feasibility
    seconds = time.perf_counter() - t0
    out = {
        "locations": [[loc.n, loc.m] for loc in allocation.locations()],
        "objective": objective,
        "solver": args.solver,
        "k": k,
        "k_hat": k_hat,
        "nodes_explored": nodes,
        "prunes_bound": prunes_bound,
        "prunes_feasibility": prunes_feasibility,
        "seconds": seconds,
    }
    print(json.dumps(out, indent=2))
    return 0


def cmd_bench(args) -> int:
    template = _load_template(args)
    config = BenchConfig(
        snr_db_values=tuple(float(v) for v in args.snr_list.split(",")),
        trials=args.trials,
        n_rows=args.rows,
        n_cols=args.cols,
        template=template,
        k=args.k,
        separation=args.separation,
        require_tight_pair=args.tight_pair,
        solvers=tuple(args.solvers.split(",")),
        k_mode=args.k_mode,
        k_max=args.k_max if args.k_max is not None else 8,
        null_reps=args.null_reps,
        null_solver=args.null_solver,
        base_seed=args.seed,
        trial_timeout=args.trial_timeout,
    )
    records, rows = run_benchmark(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_records_jsonl(records, out / "records.jsonl")
    write_aggregate_csv(rows, out / "summary.csv")
    for row in rows:
        print(
            f"{row['solver']} snr_db={row['snr_db']} trials={row['trials']} "
            f"mean_f1={row['mean_f1']} k_accuracy={row['k_accuracy']}"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="auctiondetect",
        description="Exact detection of non-overlapping template occurrences "
        "in noisy 2D measurements.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic measurement")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    _add_template_args(p, required=True)
    p.add_argument("--k", type=int, required=True, help="number of occurrences")
    p.add_argument("--snr-db", type=float, required=True)
    p.add_argument(
        "--separation",
        choices=["dense", "well"],
        default="dense",
        help="minimum anchor spacing: W (dense) or 2W (well)",
    )
    p.add_argument(
        "--tight-pair",
        action="store_true",
        help="force at least one pair at exactly W separation",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("detect", help="detect template occurrences in a grid file")
    p.add_argument("--measurement", required=True, help="CSV measurement grid")
    p.add_argument("--template", required=True, help="CSV template grid")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--k", type=int, help="known number of occurrences")
    group.add_argument(
        "--estimate-k",
        action="store_true",
        help="estimate the count with the gap statistic",
    )
    p.add_argument("--k-max", type=int, help="largest candidate count to scan")
    p.add_argument("--null-reps", type=int, default=50)
    p.add_argument("--null-solver", choices=["exact", "greedy"], default="exact")
    p.add_argument("--solver", choices=["exact", "greedy", "brute"], default="exact")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("bench", help="run an SNR sweep and write records + summary")
    p.add_argument("--snr-list", required=True, help="comma-separated SNR values in dB")
    p.add_argument("--trials", type=int, required=True, help="trials per SNR point")
    p.add_argument("--k-mode", choices=["known", "gap"], default="known")
    p.add_argument("--solvers", default="exact,greedy", help="comma-separated solver names")
    p.add_argument("--rows", type=int, default=40)
    p.add_argument("--cols", type=int, default=40)
    _add_template_args(p, required=False)
    p.add_argument("--k", type=int, default=4, help="true number of occurrences")
    p.add_argument("--separation", choices=["dense", "well"], default="dense")
    p.add_argument("--tight-pair", action="store_true")
    p.add_argument("--k-max", type=int)
    p.add_argument("--null-reps", type=int, default=50)
    p.add_argument("--null-solver", choices=["exact", "greedy"], default="exact")
    p.add_argument("--trial-timeout", type=float, help="per-trial solve budget in seconds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "separation", None) == "well":
        args.separation = "well_separated"
    if args.command == "bench" and args.w is None and args.template is None:
        args.w = 3
    try:
        return args.func(args)
    except (InfeasibleError, BudgetError, GenerationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
