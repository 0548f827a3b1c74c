import numpy as np
import pytest

from auctiondetect import (
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


def loc(n, m):
    return Location(n, m)


class TestConflicts:
    def test_identical_placement_overlaps(self):
        assert conflicts(loc(0, 0), loc(0, 0), 3) is True

    def test_boundary_at_exactly_w_is_free(self):
        assert conflicts(loc(0, 0), loc(3, 0), 3) is False

    def test_both_offsets_below_w_overlap(self):
        assert conflicts(loc(0, 0), loc(2, 2), 3) is True

    def test_symmetric(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            a = loc(int(rng.integers(-5, 6)), int(rng.integers(-5, 6)))
            b = loc(int(rng.integers(-5, 6)), int(rng.integers(-5, 6)))
            w = int(rng.integers(1, 5))
            assert conflicts(a, b, w) == conflicts(b, a, w)

    def test_matches_pixel_set_intersection(self):
        # Exhaustive against the definition: two w x w squares overlap.
        for w in range(1, 7):
            for dn in range(-2 * w, 2 * w + 1):
                for dm in range(-2 * w, 2 * w + 1):
                    a = loc(0, 0)
                    b = loc(dn, dm)
                    pixels_a = {(u, v) for u in range(w) for v in range(w)}
                    pixels_b = {(dn + u, dm + v) for u in range(w) for v in range(w)}
                    overlap = bool(pixels_a & pixels_b)
                    assert conflicts(a, b, w) == overlap, (w, dn, dm)

    def test_rejects_bad_width(self):
        with pytest.raises(ValueError):
            conflicts(loc(0, 0), loc(1, 1), 0)


class TestCorrelate:
    def test_zero_measurement_gives_zero_prices(self):
        y = np.zeros((6, 7))
        s = np.ones((3, 3))
        assert np.array_equal(correlate(y, s), np.zeros((4, 5)))

    def test_unit_template_is_identity(self):
        y = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert np.array_equal(correlate(y, np.array([[1.0]])), y)

    def test_two_by_two_sum(self):
        y = np.array([[1.0, 2.0], [3.0, 4.0]])
        s = np.ones((2, 2))
        assert np.array_equal(correlate(y, s), np.array([[10.0]]))

    def test_matches_naive_triple_loop(self):
        rng = np.random.default_rng(42)
        y = rng.normal(size=(7, 9))
        s = rng.normal(size=(3, 3))
        expected = np.zeros((5, 7))
        for i in range(5):
            for j in range(7):
                acc = 0.0
                for u in range(3):
                    for v in range(3):
                        acc += y[i + u, j + v] * s[u, v]
                expected[i, j] = acc
        np.testing.assert_allclose(correlate(y, s), expected, rtol=1e-12)

    def test_linearity(self):
        rng = np.random.default_rng(7)
        y1 = rng.normal(size=(20, 24))
        y2 = rng.normal(size=(20, 24))
        s = rng.normal(size=(4, 4))
        alpha = 3.7
        lhs = correlate(alpha * y1 + y2, s)
        rhs = alpha * correlate(y1, s) + correlate(y2, s)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-9, atol=1e-9 * np.abs(rhs).max())

    @pytest.mark.parametrize("w", [2, 5, 16, 31])
    def test_direct_and_fft_paths_agree(self, w):
        rng = np.random.default_rng(w)
        y = rng.normal(size=(64, 64))
        s = rng.normal(size=(w, w))
        direct = correlate(y, s, method="direct")
        fft = correlate(y, s, method="fft")
        np.testing.assert_allclose(fft, direct, rtol=1e-9, atol=1e-9 * np.abs(direct).max())

    def test_template_larger_than_measurement_raises(self):
        with pytest.raises(ValueError):
            correlate(np.ones((2, 2)), np.ones((3, 3)))

    def test_non_square_template_raises(self):
        with pytest.raises(ValueError):
            correlate(np.ones((5, 5)), np.ones((2, 3)))

    def test_unknown_method_raises(self):
        with pytest.raises(ValueError):
            correlate(np.ones((3, 3)), np.ones((2, 2)), method="magic")


class TestDiskTemplate:
    def test_small_radius_hits_center_only(self):
        t = make_disk_template(3, 0.6)
        expected = np.array([[0, 0, 0], [0, 1, 0], [0, 0, 0]], dtype=float)
        assert np.array_equal(t, expected)

    def test_huge_radius_fills_grid(self):
        assert np.array_equal(make_disk_template(3, 10.0), np.ones((3, 3)))

    def test_w5_radius2_disc_pattern(self):
        # Cell centers sit at offsets {2,1,0,1,2} from the grid center, so
        # dist <= 2 excludes the corners and the four (sqrt(5)) neighbours.
        expected = np.array(
            [
                [0, 0, 1, 0, 0],
                [0, 1, 1, 1, 0],
                [1, 1, 1, 1, 1],
                [0, 1, 1, 1, 0],
                [0, 0, 1, 0, 0],
            ],
            dtype=float,
        )
        assert np.array_equal(make_disk_template(5, 2.0), expected)

    def test_inside_outside_values(self):
        t = make_disk_template(3, 0.6, inside_value=7.5, outside_value=-1.0)
        assert t[1, 1] == 7.5
        assert t[0, 0] == -1.0

    def test_rejects_negative_radius(self):
        with pytest.raises(ValueError):
            make_disk_template(3, -1.0)


class TestAllocation:
    def test_empty_revenue_is_zero(self):
        a = Allocation((), template_width=3)
        assert a.revenue == 0.0
        assert allocation_revenue(a) == 0.0

    def test_revenue_sums_prices(self):
        a = Allocation(
            (Bid(loc(0, 0), 2.5), Bid(loc(5, 5), -1.0)),
            template_width=3,
        )
        assert a.revenue == 1.5

    def test_constructor_rejects_overlap(self):
        with pytest.raises(SeparationError):
            Allocation((Bid(loc(0, 0), 1.0), Bid(loc(2, 2), 1.0)), template_width=3)

    def test_add_validates_new_bid(self):
        a = Allocation((Bid(loc(0, 0), 1.0),), template_width=3)
        b = a.add(Bid(loc(0, 3), 2.0))
        assert len(b) == 2 and b.revenue == 3.0
        with pytest.raises(SeparationError):
            a.add(Bid(loc(1, 1), 5.0))

    def test_noiseless_revenue_is_template_energy_times_k(self):
        # Prices at the true anchors of a clean measurement equal <s, s>
        # because separated occurrences never enter each other's window.
        w = 3
        s = np.ones((w, w))
        anchors = [loc(0, 0), loc(0, 5), loc(6, 2)]
        clean = np.zeros((12, 12))
        for a in anchors:
            clean[a.n : a.n + w, a.m : a.m + w] += s
        prices = correlate(clean, s)
        bids = tuple(Bid(a, float(prices[a.n, a.m])) for a in anchors)
        assert Allocation(bids, w).revenue == 9.0 * len(anchors)


class TestGridValidation:
    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            as_grid([[1.0, float("nan")]])

    def test_rejects_inf(self):
        with pytest.raises(ValueError):
            as_grid([[1.0, float("inf")]])

    def test_rejects_1d(self):
        with pytest.raises(ValueError):
            as_grid([1.0, 2.0])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            as_grid(np.zeros((0, 3)))


class TestGridCsv:
    def test_round_trip_is_exact(self, tmp_path):
        rng = np.random.default_rng(3)
        grid = rng.normal(scale=1e3, size=(17, 5))
        path = tmp_path / "g.csv"
        write_grid_csv(path, grid)
        assert np.array_equal(read_grid_csv(path), grid)

    def test_single_cell(self, tmp_path):
        path = tmp_path / "one.csv"
        write_grid_csv(path, [[0.1234567890123456]])
        back = read_grid_csv(path)
        assert back.shape == (1, 1)
        assert back[0, 0] == 0.1234567890123456

    def test_single_column(self, tmp_path):
        path = tmp_path / "col.csv"
        write_grid_csv(path, [[1.0], [2.0], [3.0]])
        assert read_grid_csv(path).shape == (3, 1)

    def test_write_is_deterministic(self, tmp_path):
        grid = np.random.default_rng(9).normal(size=(4, 4))
        p1 = tmp_path / "a.csv"
        p2 = tmp_path / "b.csv"
        write_grid_csv(p1, grid)
        write_grid_csv(p2, grid)
        assert p1.read_bytes() == p2.read_bytes()
