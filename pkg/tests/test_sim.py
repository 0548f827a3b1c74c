import json
import math

import numpy as np
import pytest

from auctiondetect import (
    GenerationError,
    SimSpec,
    generate,
    load_truth,
    read_grid_csv,
    save_instance,
    sigma_for_snr,
    snr_for_sigma,
)


def ones_spec(**overrides):
    base = dict(
        n_rows=40,
        n_cols=40,
        template=np.ones((3, 3)),
        k=4,
        separation="dense",
        snr_db=0.0,
        rng_seed=0,
    )
    base.update(overrides)
    return SimSpec(**base)


def pairwise_chebyshev(locations):
    return [
        max(abs(a.n - b.n), abs(a.m - b.m))
        for i, a in enumerate(locations)
        for b in locations[i + 1 :]
    ]


class TestSigmaForSnr:
    def test_zero_db_reference_point(self):
        # K W^2 == sigma^2 N M forces 0 dB; inverting gives sigma = 0.15.
        assert sigma_for_snr(0.0, 4, 3, 40, 40) == pytest.approx(0.15, abs=1e-15)

    def test_halving_sigma_gains_six_db(self):
        s1 = sigma_for_snr(-10.0, 4, 3, 40, 40)
        gain = snr_for_sigma(s1 / 2, 4, 3, 40, 40) - (-10.0)
        assert gain == pytest.approx(10 * math.log10(4), abs=1e-12)

    @pytest.mark.parametrize("snr_db", [-30.0, -12.5, 0.0, 7.25])
    def test_round_trip(self, snr_db):
        sigma = sigma_for_snr(snr_db, 6, 5, 120, 250)
        assert snr_for_sigma(sigma, 6, 5, 120, 250) == pytest.approx(snr_db, abs=1e-12)

    def test_infinite_snr_disables_noise(self):
        assert sigma_for_snr(math.inf, 4, 3, 40, 40) == 0.0

    def test_rejects_nonpositive_counts(self):
        with pytest.raises(ValueError):
            sigma_for_snr(0.0, 0, 3, 40, 40)


class TestSpecValidation:
    def test_rejects_overpacked(self):
        with pytest.raises(ValueError):
            ones_spec(n_rows=6, n_cols=6, k=5)

    def test_rejects_unknown_separation(self):
        with pytest.raises(ValueError):
            ones_spec(separation="loose")

    def test_rejects_tight_pair_with_well_separated(self):
        with pytest.raises(ValueError):
            ones_spec(separation="well_separated", require_tight_pair=True)

    def test_rejects_template_larger_than_grid(self):
        with pytest.raises(ValueError):
            ones_spec(n_rows=2, n_cols=2, k=1)


class TestGenerate:
    def test_single_placement(self):
        inst = generate(ones_spec(k=1, snr_db=math.inf))
        assert len(inst.true_locations) == 1
        loc = inst.true_locations[0]
        assert 0 <= loc.n <= 37 and 0 <= loc.m <= 37
        rebuilt = np.zeros((40, 40))
        rebuilt[loc.n : loc.n + 3, loc.m : loc.m + 3] += 1.0
        assert np.array_equal(inst.clean, rebuilt)

    def test_infinite_snr_gives_noiseless_measurement(self):
        inst = generate(ones_spec(snr_db=math.inf))
        assert inst.sigma == 0.0
        assert np.array_equal(inst.noisy, inst.clean)

    def test_clean_is_superposition_of_template(self):
        inst = generate(ones_spec(rng_seed=4))
        rebuilt = np.zeros((40, 40))
        for loc in inst.true_locations:
            rebuilt[loc.n : loc.n + 3, loc.m : loc.m + 3] += 1.0
        assert np.array_equal(inst.clean, rebuilt)

    def test_dense_separation_holds(self):
        inst = generate(ones_spec(rng_seed=8))
        assert all(d >= 3 for d in pairwise_chebyshev(inst.true_locations))

    def test_tight_pair_pins_minimum_distance(self):
        for seed in range(5):
            inst = generate(ones_spec(rng_seed=seed, require_tight_pair=True))
            distances = pairwise_chebyshev(inst.true_locations)
            assert min(distances) == 3
            assert all(d >= 3 for d in distances)

    def test_well_separated_implies_dense(self):
        inst = generate(ones_spec(separation="well_separated", rng_seed=2))
        distances = pairwise_chebyshev(inst.true_locations)
        assert all(d >= 6 for d in distances)
        assert all(d >= 3 for d in distances)

    def test_same_seed_reproduces_instance(self):
        a = generate(ones_spec(rng_seed=123))
        b = generate(ones_spec(rng_seed=123))
        assert np.array_equal(a.noisy, b.noisy)
        assert a.true_locations == b.true_locations
        assert a.sigma == b.sigma

    def test_noise_moments(self):
        # 128x128 gives 16384 samples; check mean and variance within
        # three standard errors.
        spec = ones_spec(n_rows=128, n_cols=128, k=4, snr_db=-10.0, rng_seed=5)
        inst = generate(spec)
        noise = inst.noisy - inst.clean
        n = noise.size
        sigma = inst.sigma
        assert abs(noise.mean()) <= 3 * sigma / math.sqrt(n)
        var = noise.var(ddof=1)
        se_var = sigma**2 * math.sqrt(2.0 / (n - 1))
        assert abs(var - sigma**2) <= 3 * se_var

    def test_impossible_density_exhausts_budget(self):
        # A 5x5 grid cannot hold two separated 3x3 placements.
        spec = ones_spec(n_rows=5, n_cols=5, k=2)
        with pytest.raises(GenerationError):
            generate(spec, draw_budget=5000)


class TestSaveInstance:
    def test_files_and_truth_schema(self, tmp_path):
        inst = generate(ones_spec(rng_seed=3, snr_db=-2.5))
        save_instance(inst, tmp_path)
        assert (tmp_path / "clean.csv").exists()
        assert (tmp_path / "noisy.csv").exists()
        truth = load_truth(tmp_path / "truth.json")
        assert set(truth) == {
            "n_rows", "n_cols", "w", "k", "separation",
            "snr_db", "rng_seed", "sigma", "locations",
        }
        assert truth["w"] == 3
        assert truth["k"] == 4
        assert truth["snr_db"] == -2.5
        assert truth["locations"] == [[l.n, l.m] for l in inst.true_locations]

    def test_grids_round_trip(self, tmp_path):
        inst = generate(ones_spec(rng_seed=6))
        save_instance(inst, tmp_path)
        assert np.array_equal(read_grid_csv(tmp_path / "noisy.csv"), inst.noisy)
        assert np.array_equal(read_grid_csv(tmp_path / "clean.csv"), inst.clean)

    def test_save_is_deterministic(self, tmp_path):
        inst = generate(ones_spec(rng_seed=7))
        d1 = tmp_path / "a"
        d2 = tmp_path / "b"
        save_instance(inst, d1)
        save_instance(inst, d2)
        for name in ("clean.csv", "noisy.csv", "truth.json"):
            assert (d1 / name).read_bytes() == (d2 / name).read_bytes()
