"""Occurrence-count estimation via the gap statistic.

When the number of template occurrences is unknown, solve the detection
problem for a range of candidate counts and compare the optimal revenue
curve against its expectation under a structure-free null.  The null is
formed by uniformly permuting the measurement's pixels, which keeps the
value multiset (hence mean and energy) intact while destroying every
template occurrence.  For each candidate K,

    gap(K) = observed optimal revenue(K) - mean over R permuted copies,

and the estimate is the K with the largest gap (ties go to the smallest K).
Revenue keeps growing with K on pure noise too; subtracting the null mean
cancels that growth so the gap peaks where real structure runs out.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import allocation_revenue, as_grid, correlate
from .solver import InfeasibleError, greedy_detect, sort_bids, wdp_solve

__all__ = ["GapProfile", "permute_measurement", "estimate_k", "default_k_max"]

DEFAULT_NULL_REPS = 50


def default_k_max(n_rows: int, n_cols: int, w: int) -> int:
    """Loose packing cap on the candidate range: at most 20, at most the
    number of anchors divided by the template area."""
    anchors = (n_rows - w + 1) * (n_cols - w + 1)
    return max(1, min(20, anchors // (w * w)))


@dataclass(frozen=True)
class GapProfile:
    """Per-candidate revenue curves and the resulting estimate.

    Candidates where the solve was infeasible are dropped, so ``k_values``
    may be a strict subset of 1..k_max; all four tuples are aligned.
    """

    k_values: tuple[int, ...]
    observed_revenue: tuple[float, ...]
    null_mean: tuple[float, ...]
    gap: tuple[float, ...]
    k_hat: int


def permute_measurement(y: np.ndarray, rng_seed) -> np.ndarray:
    """Uniformly permute all pixels of ``y`` (same shape, same multiset).

    Uses numpy's Fisher-Yates shuffle; a fixed seed gives a fixed
    rearrangement.
    """
    y = as_grid(y)
    rng = np.random.default_rng(rng_seed)
    return rng.permutation(y.ravel()).reshape(y.shape)


def _optimal_revenues(prices: np.ndarray, w: int, k_values, solver: str) -> dict[int, float | None]:
    """Best revenue per candidate count; infeasible candidates map to None."""
    bids = sort_bids(prices, w)
    out: dict[int, float | None] = {}
    for k in k_values:
        try:
            if solver == "exact":
                out[k] = wdp_solve(bids, k).objective
            elif solver == "greedy":
                out[k] = allocation_revenue(greedy_detect(bids, k))
            else:
                raise ValueError(f"unknown null solver {solver!r}")
        except InfeasibleError:
            out[k] = None
    return out


def estimate_k(
    y: np.ndarray,
    s: np.ndarray,
    k_max: int,
    reps: int = DEFAULT_NULL_REPS,
    rng_seed: int = 0,
    null_solver: str = "exact",
    permute: Callable[[np.ndarray, int], np.ndarray] = permute_measurement,
) -> GapProfile:
    """Estimate the number of occurrences of ``s`` in ``y``.

    Observed revenues always come from the exact solver; ``null_solver``
    chooses "exact" (faithful, default) or "greedy" (faster) for the R
    permuted references.  The r-th reference is permuted with seed
    ``rng_seed + r``, so reps can be computed in any order or in parallel
    with identical results.  ``permute`` is injectable for testing.

    Candidates with an infeasible solve anywhere (observed or any
    reference) are dropped with a warning; if none survive the estimate is
    impossible and InfeasibleError is raised.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    y = as_grid(y)
    s = as_grid(s)
    w = s.shape[0]
    candidates = list(range(1, k_max + 1))

    observed = _optimal_revenues(correlate(y, s), w, candidates, "exact")
    null_revs = {k: [] for k in candidates}
    for r in range(reps):
        y_r = permute(y, rng_seed + r)
        rev_r = _optimal_revenues(correlate(y_r, s), w, candidates, null_solver)
        for k in candidates:
            null_revs[k].append(rev_r[k])

    kept: list[int] = []
    for k in candidates:
        if observed[k] is None or any(v is None for v in null_revs[k]):
            warnings.warn(
                f"dropping infeasible candidate K={k} from the gap profile",
                stacklevel=2,
            )
        else:
            kept.append(k)
    if not kept:
        raise InfeasibleError(f"no feasible candidate count in 1..{k_max}")

    obs = tuple(observed[k] for k in kept)
    null_mean = tuple(float(np.mean(null_revs[k])) for k in kept)
    gap = tuple(o - nm for o, nm in zip(obs, null_mean))
    k_hat = kept[int(np.argmax(gap))]
    return GapProfile(
        k_values=tuple(kept),
        observed_revenue=obs,
        null_mean=null_mean,
        gap=gap,
        k_hat=k_hat,
    )
