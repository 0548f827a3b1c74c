"""Estimating how many occurrences a measurement contains.

When the occurrence count is unknown, the detector is run for every
candidate count K and the optimal revenue curve is compared against its
mean over pixel-permuted copies of the measurement (which keep the pixel
value distribution but destroy all structure).  The difference between the
two curves, the gap, stops growing once the candidate count exceeds the
number of real occurrences.
"""

import numpy as np

from auctiondetect import SimSpec, estimate_k, generate


def main():
    true_k = 3
    spec = SimSpec(
        n_rows=32,
        n_cols=32,
        template=np.ones((3, 3)),
        k=true_k,
        separation="dense",
        snr_db=-2.0,
        rng_seed=5,
    )
    instance = generate(spec)
    print(f"measurement holds {true_k} occurrences at SNR {spec.snr_db} dB")

    profile = estimate_k(
        instance.noisy,
        spec.template,
        k_max=6,
        reps=25,
        rng_seed=99,
        null_solver="exact",
    )

    print(f"\n{'K':>3} {'observed':>12} {'null mean':>12} {'gap':>12}")
    for k, obs, null, gap in zip(
        profile.k_values,
        profile.observed_revenue,
        profile.null_mean,
        profile.gap,
    ):
        marker = "  <- estimate" if k == profile.k_hat else ""
        print(f"{k:>3} {obs:>12.3f} {null:>12.3f} {gap:>12.3f}{marker}")

    print(f"\nestimated count: {profile.k_hat} (true count: {true_k})")
    print(
        "\nThe observed revenue climbs steeply while real occurrences remain "
        "to be claimed, then flattens\nto noise-harvesting; the permutation "
        "null keeps climbing at the noise rate throughout, so the\ngap peaks "
        "at the true count."
    )


if __name__ == "__main__":
    main()
