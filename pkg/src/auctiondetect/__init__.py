"""Exact detection of non-overlapping template occurrences in noisy grids.

The maximum-likelihood placement of K copies of a known template is found
by pricing every candidate anchor with the measurement/template correlation
and solving the resulting exactly-K winner-determination problem with a
pruned depth-first tree search.  The package also ships the greedy
sequential-maximum baseline, a brute-force oracle, gap-statistic estimation
of an unknown K, a seeded synthetic-data generator, and a benchmark harness
with CSV/JSON outputs.
"""

from .core import (
    Allocation,
    Bid,
    Location,
    SeparationError,
    allocation_revenue,
    as_grid,
    conflicts,
    correlate,
    make_disk_template,
    read_grid_csv,
    write_grid_csv,
)
from .evaluate import (
    BenchConfig,
    MatchResult,
    TrialRecord,
    aggregate_records,
    match_detections,
    run_benchmark,
    score,
    write_aggregate_csv,
    write_records_jsonl,
)
from .gap import GapProfile, default_k_max, estimate_k, permute_measurement
from .sim import (
    GenerationError,
    SimInstance,
    SimSpec,
    generate,
    load_truth,
    save_instance,
    sigma_for_snr,
    snr_for_sigma,
)
from .solver import (
    BudgetError,
    InfeasibleError,
    SolveReport,
    SortedBids,
    brute_force_solve,
    greedy_detect,
    reorder_bids,
    sort_bids,
    upper_bound_h,
    wdp_solve,
)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "BenchConfig",
    "Bid",
    "BudgetError",
    "GapProfile",
    "GenerationError",
    "InfeasibleError",
    "Location",
    "MatchResult",
    "SeparationError",
    "SimInstance",
    "SimSpec",
    "SolveReport",
    "SortedBids",
    "TrialRecord",
    "aggregate_records",
    "allocation_revenue",
    "as_grid",
    "brute_force_solve",
    "conflicts",
    "correlate",
    "default_k_max",
    "estimate_k",
    "generate",
    "greedy_detect",
    "load_truth",
    "make_disk_template",
    "match_detections",
    "permute_measurement",
    "read_grid_csv",
    "reorder_bids",
    "run_benchmark",
    "save_instance",
    "score",
    "sigma_for_snr",
    "snr_for_sigma",
    "sort_bids",
    "upper_bound_h",
    "wdp_solve",
    "write_aggregate_csv",
    "write_grid_csv",
    "write_records_jsonl",
]
