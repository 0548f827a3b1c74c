"""Detecting densely packed template occurrences: greedy vs exact search.

Builds a 40x40 measurement containing four copies of an all-ones 3x3
template, two of them at the minimum legal spacing (anchors exactly 3 apart
in Chebyshev distance), adds white Gaussian noise, and compares the greedy
sequential-maximum baseline against the exact winner-determination search.

The greedy walk takes the global correlation maximum first.  Around a tight
pair the correlation forms a ridge whose maximum can sit between the two
true anchors; once greedy commits to it, both true anchors are blocked by
the separation constraint.  The exact search optimizes the total price over
all placements jointly, so it recovers the pair.
"""

import numpy as np

from auctiondetect import (
    SimSpec,
    correlate,
    generate,
    greedy_detect,
    sort_bids,
    wdp_solve,
)


def show(label, locations):
    print(f"  {label:24s} {sorted((loc.n, loc.m) for loc in locations)}")


def main():
    spec = SimSpec(
        n_rows=40,
        n_cols=40,
        template=np.ones((3, 3)),
        k=4,
        separation="dense",
        snr_db=-12.0,
        rng_seed=20,
        require_tight_pair=True,
    )
    instance = generate(spec)
    print(f"noise sigma = {instance.sigma:.4f}  (SNR {spec.snr_db} dB)")
    show("true anchors:", instance.true_locations)

    prices = correlate(instance.noisy, spec.template)
    print(f"\ncorrelation grid: {prices.shape[0]}x{prices.shape[1]} anchors, "
          f"peak price {prices.max():.2f}")

    bids = sort_bids(prices, spec.template_width)
    greedy = greedy_detect(bids, spec.k)
    report = wdp_solve(bids, spec.k)

    print("\ndetections:")
    show("greedy:", greedy.locations())
    show("exact search:", report.allocation.locations())
    print(f"\nobjective: greedy {greedy.revenue:.3f} vs exact {report.objective:.3f}")
    print(
        f"search effort: {report.nodes_explored} nodes, "
        f"{report.prunes_bound} bound prunes, "
        f"{report.prunes_feasibility} feasibility prunes"
    )
    print(
        "\nThe first leaf of the search tree is exactly the greedy solution; "
        "everything after it is the solver\nproving optimality or improving "
        "the incumbent."
    )


if __name__ == "__main__":
    main()
