"""Detection scoring and the benchmark harness.

A detection counts as correct when it lands within W/2 pixels of a true
anchor in Chebyshev distance.  Truths and detections are paired one-to-one,
greedily by ascending distance, and the usual precision / true-positive
rate / F1 are computed from the pairing.

``run_benchmark`` sweeps SNR levels: each trial draws a fresh synthetic
measurement, runs the requested solvers (with the true count, or with the
gap-statistic estimate), scores the detections and records everything.
Per-trial seeds are derived from (base seed, SNR index, trial index), so a
sweep is reproducible record for record and trials may be computed in any
order.  Failing trials (generation, infeasibility, timeout) are recorded
with an error message instead of aborting the sweep, and are excluded from
the aggregated means.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .core import Location, allocation_revenue, as_grid, correlate
from .gap import estimate_k
from .sim import GenerationError, SimSpec, generate
from .solver import InfeasibleError, greedy_detect, sort_bids, wdp_solve

__all__ = [
    "MatchResult",
    "TrialRecord",
    "BenchConfig",
    "match_detections",
    "score",
    "run_benchmark",
    "aggregate_records",
    "write_records_jsonl",
    "write_aggregate_csv",
    "AGGREGATE_FIELDS",
]

AGGREGATE_FIELDS = [
    "solver",
    "snr_db",
    "trials",
    "mean_f1",
    "mean_precision",
    "mean_tpr",
    "k_accuracy",
    "mean_nodes",
    "mean_seconds",
]

SOLVER_NAMES = ("exact", "greedy")


@dataclass(frozen=True)
class MatchResult:
    """One-to-one pairing of true and detected anchors."""

    true_positives: int
    false_positives: int
    false_negatives: int
    matched_pairs: tuple[tuple[Location, Location], ...]


def match_detections(
    truth: Sequence[Location],
    detected: Sequence[Location],
    w: int,
) -> MatchResult:
    """Pair detections with true anchors, closest pairs first.

    A pair is eligible when its Chebyshev distance is at most w/2 (as a real
    number, so w=3 admits integer distances up to 1).  Candidate pairs are
    taken in ascending distance, ties broken by (truth index, detection
    index); each side is used at most once.
    """
    if w < 1:
        raise ValueError(f"template width must be >= 1, got {w}")
    limit = w / 2.0
    candidates = []
    for ti, t in enumerate(truth):
        for di, d in enumerate(detected):
            dist = t.chebyshev(d)
            if dist <= limit:
                candidates.append((dist, ti, di))
    candidates.sort()
    used_t = set()
    used_d = set()
    pairs = []
    for _, ti, di in candidates:
        if ti in used_t or di in used_d:
            continue
        used_t.add(ti)
        used_d.add(di)
        pairs.append((truth[ti], detected[di]))
    tp = len(pairs)
    return MatchResult(
        true_positives=tp,
        false_positives=len(detected) - tp,
        false_negatives=len(truth) - tp,
        matched_pairs=tuple(pairs),
    )


def score(match: MatchResult, n_detections: int, n_truth: int) -> tuple[float, float, float]:
    """(precision, true positive rate, F1) with zero-denominator convention 0."""
    tp = match.true_positives
    precision = tp / n_detections if n_detections > 0 else 0.0
    tpr = tp / n_truth if n_truth > 0 else 0.0
    denom = precision + tpr
    f1 = 2.0 * precision * tpr / denom if denom > 0 else 0.0
    return precision, tpr, f1


@dataclass(frozen=True, eq=False)
class BenchConfig:
    """One benchmark sweep: geometry, noise levels, solvers and seeding."""

    snr_db_values: tuple[float, ...]
    trials: int
    n_rows: int = 40
    n_cols: int = 40
    template: np.ndarray = field(default_factory=lambda: np.ones((3, 3)))
    k: int = 4
    separation: str = "dense"
    require_tight_pair: bool = False
    solvers: tuple[str, ...] = ("exact", "greedy")
    k_mode: str = "known"
    k_max: int = 8
    null_reps: int = 50
    null_solver: str = "exact"
    base_seed: int = 0
    trial_timeout: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "template", as_grid(self.template))
        object.__setattr__(self, "snr_db_values", tuple(float(v) for v in self.snr_db_values))
        object.__setattr__(self, "solvers", tuple(self.solvers))
        if self.trials < 0:
            raise ValueError(f"trials must be >= 0, got {self.trials}")
        if self.k_mode not in ("known", "gap"):
            raise ValueError(f"k_mode must be 'known' or 'gap', got {self.k_mode!r}")
        for name in self.solvers:
            if name not in SOLVER_NAMES:
                raise ValueError(f"unknown solver {name!r}; pick from {SOLVER_NAMES}")


@dataclass
class TrialRecord:
    """Everything observed in one (trial, solver) cell of a sweep.

    ``seconds`` and ``gap_seconds`` are wall-clock timings and the only
    fields that vary between identically seeded runs.  ``error`` is None
    for successful trials; failed trials carry a message and null metrics.
    """

    snr_db: float
    trial: int
    solver: str
    n_rows: int
    n_cols: int
    w: int
    k_true: int
    separation: str
    seed: int
    k_input: int | None = None
    k_hat: int | None = None
    truth: list = field(default_factory=list)
    detections: list = field(default_factory=list)
    objective: float | None = None
    precision: float | None = None
    tpr: float | None = None
    f1: float | None = None
    nodes_explored: int = 0
    prunes_bound: int = 0
    prunes_feasibility: int = 0
    seconds: float = 0.0
    gap_seconds: float | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _trial_seeds(base_seed: int, snr_index: int, trial_index: int) -> tuple[int, int]:
    """Independent (generation, gap-estimation) seeds for one trial."""
    ss = np.random.SeedSequence((base_seed, snr_index, trial_index))
    gen_state, gap_state = ss.generate_state(2)
    return int(gen_state), int(gap_state)


def run_benchmark(config: BenchConfig) -> tuple[list[TrialRecord], list[dict]]:
    """Run the sweep and return (per-trial records, aggregated rows)."""
    template = config.template
    w = int(template.shape[0])
    records: list[TrialRecord] = []
    for si, snr_db in enumerate(config.snr_db_values):
        for ti in range(config.trials):
            gen_seed, gap_seed = _trial_seeds(config.base_seed, si, ti)
            base = dict(
                snr_db=snr_db,
                trial=ti,
                n_rows=config.n_rows,
                n_cols=config.n_cols,
                w=w,
                k_true=config.k,
                separation=config.separation,
                seed=gen_seed,
            )
            spec = SimSpec(
                n_rows=config.n_rows,
                n_cols=config.n_cols,
                template=template,
                k=config.k,
                separation=config.separation,
                snr_db=snr_db,
                rng_seed=gen_seed,
                require_tight_pair=config.require_tight_pair,
            )
            try:
                instance = generate(spec)
            except GenerationError as exc:
                for solver in config.solvers:
                    records.append(TrialRecord(solver=solver, error=str(exc), **base))
                continue
            truth = [[loc.n, loc.m] for loc in instance.true_locations]

            k_hat = None
            gap_seconds = None
            if config.k_mode == "gap":
                t0 = time.perf_counter()
                try:
                    profile = estimate_k(
                        instance.noisy,
                        template,
                        k_max=config.k_max,
                        reps=config.null_reps,
                        rng_seed=gap_seed,
                        null_solver=config.null_solver,
                    )
                except InfeasibleError as exc:
                    for solver in config.solvers:
                        records.append(TrialRecord(solver=solver, error=str(exc), **base))
                    continue
                gap_seconds = time.perf_counter() - t0
                k_hat = profile.k_hat
                k_input = k_hat
            else:
                k_input = config.k

            bids = sort_bids(correlate(instance.noisy, template), w)
            for solver in config.solvers:
                rec = TrialRecord(
                    solver=solver,
                    k_input=k_input,
                    k_hat=k_hat,
                    truth=truth,
                    gap_seconds=gap_seconds,
                    **base,
                )
                t0 = time.perf_counter()
                try:
                    if solver == "exact":
                        report = wdp_solve(bids, k_input)
                        allocation = report.allocation
                        rec.nodes_explored = report.nodes_explored
                        rec.prunes_bound = report.prunes_bound
                        rec.prunes_feasibility = report.prunes_feasibility
                    else:
                        allocation = greedy_detect(bids, k_input)
                except InfeasibleError as exc:
                    rec.seconds = time.perf_counter() - t0
                    rec.error = str(exc)
                    records.append(rec)
                    continue
                rec.seconds = time.perf_counter() - t0
                if config.trial_timeout is not None and rec.seconds > config.trial_timeout:
                    rec.error = (
                        f"trial exceeded the {config.trial_timeout:g}s budget "
                        f"({rec.seconds:.1f}s)"
                    )
                    records.append(rec)
                    continue
                detections = allocation.locations()
                rec.detections = [[loc.n, loc.m] for loc in detections]
                rec.objective = allocation_revenue(allocation)
                mres = match_detections(instance.true_locations, detections, w)
                rec.precision, rec.tpr, rec.f1 = score(mres, len(detections), len(truth))
                records.append(rec)
    return records, aggregate_records(records)


def aggregate_records(records: Sequence[TrialRecord]) -> list[dict]:
    """Mean metrics per (solver, snr) over successful trials.

    ``trials`` counts the successful records behind each row; failed trials
    contribute nothing to the means.  ``k_accuracy`` is the fraction of
    successful trials whose estimated count equals the true one, empty when
    no record in the group carries an estimate.
    """
    keys: list[tuple[str, float]] = []
    groups: dict[tuple[str, float], list[TrialRecord]] = {}
    for rec in records:
        key = (rec.solver, rec.snr_db)
        if key not in groups:
            keys.append(key)
            groups[key] = []
        if rec.error is None:
            groups[key].append(rec)
    keys.sort()
    rows = []
    for solver, snr_db in keys:
        ok = groups[(solver, snr_db)]
        n = len(ok)
        row = {"solver": solver, "snr_db": snr_db, "trials": n}
        if n == 0:
            row.update(
                mean_f1="", mean_precision="", mean_tpr="",
                k_accuracy="", mean_nodes="", mean_seconds="",
            )
            rows.append(row)
            continue
        row["mean_f1"] = sum(r.f1 for r in ok) / n
        row["mean_precision"] = sum(r.precision for r in ok) / n
        row["mean_tpr"] = sum(r.tpr for r in ok) / n
        with_khat = [r for r in ok if r.k_hat is not None]
        if with_khat:
            row["k_accuracy"] = sum(
                1 for r in with_khat if r.k_hat == r.k_true
            ) / len(with_khat)
        else:
            row["k_accuracy"] = ""
        row["mean_nodes"] = sum(r.nodes_explored for r in ok) / n
        row["mean_seconds"] = sum(r.seconds for r in ok) / n
        rows.append(row)
    return rows


def write_records_jsonl(records: Sequence[TrialRecord], path) -> None:
    """One JSON object per line, one line per trial record."""
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_dict()))
            fh.write("\n")


def write_aggregate_csv(rows: Sequence[dict], path) -> None:
    """Aggregate table with the fixed header, one row per (solver, snr)."""
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=AGGREGATE_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
