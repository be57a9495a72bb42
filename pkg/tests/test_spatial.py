import numpy as np
import pytest

from drbench.neighbors import rank_cache
from drbench.spatial import (
    MetricCurve,
    average_ranks,
    continuity,
    correlation,
    count_inversions,
    multiscale_sweep,
    neighborhood_hit,
    neighborhood_preservation,
    normalized_stress,
    rank_difference_histogram,
    shepard_points,
    sweep_k_values,
    trustworthiness,
)

# the 4-point hand fixture: points 2 and 3 swap places in the projection
FIX_DATA = np.array([[0.0], [1.0], [2.2], [4.0]])
FIX_PROJ = np.array([[0.0], [1.0], [4.0], [2.2]])


from oracles import (
    naive_kendall,
    naive_mean_ranks,
    naive_nh,
    naive_np,
    naive_pair_distances,
    naive_pearson,
    naive_stress,
    naive_trustworthiness,
    naive_continuity,
)


class TestNeighborhoodPreservation:
    def test_identity_projection_is_perfect(self):
        rng = np.random.default_rng(0)
        m = rng.normal(size=(12, 2))
        c = rank_cache(m)
        for k in (1, 3, 5):
            assert neighborhood_preservation(c, c, k) == 1.0

    def test_hand_fixture_is_half(self):
        assert (
            neighborhood_preservation(rank_cache(FIX_DATA), rank_cache(FIX_PROJ), 1)
            == 0.5
        )

    def test_full_neighborhood_is_always_one(self):
        rng = np.random.default_rng(1)
        data, proj = rng.normal(size=(9, 4)), rng.normal(size=(9, 2))
        assert neighborhood_preservation(rank_cache(data), rank_cache(proj), 8) == 1.0

    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(2)
        data, proj = rng.normal(size=(30, 5)), rng.normal(size=(30, 2))
        dc, pc = rank_cache(data), rank_cache(proj)
        for k in (1, 4, 9):
            assert neighborhood_preservation(dc, pc, k) == pytest.approx(
                naive_np(data, proj, k), abs=1e-12
            )


class TestNeighborhoodHit:
    def test_single_class_is_one(self):
        rng = np.random.default_rng(3)
        c = rank_cache(rng.normal(size=(10, 2)))
        assert neighborhood_hit(c, np.zeros(10, dtype=int), 3) == 1.0

    def test_two_separated_clusters(self):
        rng = np.random.default_rng(4)
        proj = np.vstack(
            [rng.normal(size=(10, 2)), rng.normal(size=(10, 2)) + 100.0]
        )
        labels = np.array([0] * 10 + [1] * 10)
        assert neighborhood_hit(rank_cache(proj), labels, 3) == 1.0

    def test_alternating_labels_on_a_line(self):
        proj = np.array([[0.0], [1.0], [2.0], [3.0]])
        labels = np.array([0, 1, 0, 1])
        assert neighborhood_hit(rank_cache(proj), labels, 1) == 0.0

    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(5)
        proj = rng.normal(size=(25, 2))
        labels = rng.integers(0, 3, size=25)
        pc = rank_cache(proj)
        for k in (1, 5, 10):
            assert neighborhood_hit(pc, labels, k) == pytest.approx(
                naive_nh(proj, labels, k), abs=1e-12
            )


class TestTrustworthinessContinuity:
    def test_identity_projection_is_perfect(self):
        rng = np.random.default_rng(6)
        c = rank_cache(rng.normal(size=(14, 2)))
        for k in (1, 3, 6):
            assert trustworthiness(c, c, k) == 1.0
            assert continuity(c, c, k) == 1.0

    def test_hand_fixture(self):
        dc, pc = rank_cache(FIX_DATA), rank_cache(FIX_PROJ)
        assert trustworthiness(dc, pc, 1) == 0.75
        assert continuity(dc, pc, 1) == 0.75

    def test_matches_naive_oracles(self):
        rng = np.random.default_rng(7)
        data, proj = rng.normal(size=(50, 8)), rng.normal(size=(50, 2))
        dc, pc = rank_cache(data), rank_cache(proj)
        for k in (1, 5, 12, 24):
            assert trustworthiness(dc, pc, k) == pytest.approx(
                naive_trustworthiness(data, proj, k), abs=1e-12
            )
            assert continuity(dc, pc, k) == pytest.approx(
                naive_continuity(data, proj, k), abs=1e-12
            )

    def test_swap_symmetry(self):
        rng = np.random.default_rng(8)
        data, proj = rng.normal(size=(20, 3)), rng.normal(size=(20, 2))
        dc, pc = rank_cache(data), rank_cache(proj)
        for k in (2, 5):
            assert trustworthiness(dc, pc, k) == pytest.approx(
                continuity(pc, dc, k), abs=1e-15
            )

    def test_values_stay_in_unit_interval(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            n = int(rng.integers(8, 30))
            data = rng.normal(size=(n, int(rng.integers(2, 6))))
            proj = rng.normal(size=(n, 2))
            dc, pc = rank_cache(data), rank_cache(proj)
            k = int(rng.integers(1, max(2, n // 2 - 1)))
            for value in (
                trustworthiness(dc, pc, k),
                continuity(dc, pc, k),
                neighborhood_preservation(dc, pc, k),
            ):
                assert 0.0 <= value <= 1.0

    def test_k_at_least_half_n_rejected(self):
        dc = rank_cache(FIX_DATA)
        with pytest.raises(ValueError):
            trustworthiness(dc, dc, 2)  # N=4, needs k < 2


class TestSweep:
    def test_np_sweep_n100_gives_1_through_20(self):
        assert sweep_k_values(100, (0.01, 0.20), 20) == tuple(range(1, 21))

    def test_nh_sweep_n400_gives_1_through_20(self):
        assert sweep_k_values(400, (0.0025, 0.05), 20) == tuple(range(1, 21))

    def test_small_n_dedups_preserving_order(self):
        ks = sweep_k_values(20, (0.0025, 0.05), 20)
        assert ks == (1,)

    def test_identity_curve_is_constant_one(self):
        rng = np.random.default_rng(10)
        m = rng.normal(size=(60, 2))
        c = rank_cache(m)
        curve = multiscale_sweep("neighborhood_preservation", c, c)
        assert isinstance(curve, MetricCurve)
        assert all(s == 1.0 for s in curve.scores)
        assert curve.aggregate == 1.0

    def test_hit_sweep_requires_labels(self):
        rng = np.random.default_rng(11)
        c = rank_cache(rng.normal(size=(30, 2)))
        with pytest.raises(ValueError):
            multiscale_sweep("neighborhood_hit", None, c)


class TestShepard:
    def test_pair_count(self):
        d = rank_cache(FIX_DATA).dist
        sp = shepard_points(d, d)
        assert len(sp) == 6

    def test_identity_on_diagonal(self):
        rng = np.random.default_rng(12)
        d = rank_cache(rng.normal(size=(9, 2))).dist
        sp = shepard_points(d, d)
        assert np.array_equal(sp.d, sp.d_bar)

    def test_scaling_doubles_projected_distances(self):
        rng = np.random.default_rng(13)
        m = rng.normal(size=(9, 2))
        sp = shepard_points(rank_cache(m).dist, rank_cache(2.0 * m).dist)
        assert np.allclose(sp.d_bar, 2.0 * sp.d, atol=1e-12)

    def test_row_major_pair_order(self):
        d = rank_cache(FIX_DATA).dist
        sp = shepard_points(d, d)
        expected = [d[i, j] for i in range(4) for j in range(i + 1, 4)]
        assert np.array_equal(sp.d, np.array(expected))


class TestNormalizedStress:
    def test_identical_distances_give_zero(self):
        rng = np.random.default_rng(14)
        d = naive_pair_distances(rng.normal(size=(10, 3)))
        sp = shepard_points(rank_cache(rng.normal(size=(10, 3))).dist,
                            rank_cache(rng.normal(size=(10, 3))).dist)
        sp_same = type(sp)(d=d, d_bar=d.copy())
        assert normalized_stress(sp_same) == pytest.approx(0.0, abs=1e-12)

    def test_uniform_scaling_gives_zero(self):
        rng = np.random.default_rng(15)
        d = naive_pair_distances(rng.normal(size=(10, 3)))
        sp = type(shepard_points(np.zeros((2, 2)), np.zeros((2, 2))))(
            d=d, d_bar=3.7 * d
        )
        assert normalized_stress(sp) == pytest.approx(0.0, abs=1e-12)

    def test_matches_two_pass_oracle(self):
        rng = np.random.default_rng(16)
        data, proj = rng.normal(size=(30, 6)), rng.normal(size=(30, 2))
        sp = shepard_points(rank_cache(data).dist, rank_cache(proj).dist)
        assert normalized_stress(sp) == pytest.approx(
            naive_stress(sp.d, sp.d_bar), abs=1e-10
        )

    def test_zero_data_variance_is_an_error(self):
        sp_cls = type(shepard_points(np.zeros((2, 2)), np.zeros((2, 2))))
        sp = sp_cls(d=np.ones(5), d_bar=np.arange(5.0))
        with pytest.raises(ValueError):
            normalized_stress(sp)

    def test_zero_projection_variance_is_finite(self):
        sp_cls = type(shepard_points(np.zeros((2, 2)), np.zeros((2, 2))))
        sp = sp_cls(d=np.arange(5.0), d_bar=np.ones(5))
        value = normalized_stress(sp)
        assert np.isfinite(value) and value == pytest.approx(1.0)

    def test_rms_mode_scale_invariant(self):
        rng = np.random.default_rng(17)
        d = np.abs(rng.normal(size=40)) + 0.1
        sp_cls = type(shepard_points(np.zeros((2, 2)), np.zeros((2, 2))))
        sp = sp_cls(d=d, d_bar=2.5 * d)
        assert normalized_stress(sp, scaling="rms") == pytest.approx(0.0, abs=1e-12)


class TestCorrelation:
    def test_perfect_agreement(self):
        a = np.array([1.0, 2.0, 3.0])
        for kind in ("pearson", "spearman", "kendall"):
            assert correlation(a, a, kind) == pytest.approx(1.0)

    def test_perfect_reversal(self):
        a = np.array([1.0, 2.0, 3.0])
        b = np.array([3.0, 2.0, 1.0])
        for kind in ("pearson", "spearman", "kendall"):
            assert correlation(a, b, kind) == pytest.approx(-1.0)

    def test_kendall_hand_fixture(self):
        # pairs: (1,1)-(2,3) con, (1,1)-(3,2) con, (2,3)-(3,2) dis
        assert correlation([1, 2, 3], [1, 3, 2], "kendall") == pytest.approx(1 / 3)

    def test_zero_variance_names_side(self):
        with pytest.raises(ValueError, match="first"):
            correlation([1.0, 1.0, 1.0], [1.0, 2.0, 3.0], "pearson")
        with pytest.raises(ValueError, match="second"):
            correlation([1.0, 2.0, 3.0], [5.0, 5.0, 5.0], "spearman")

    def test_pearson_matches_naive(self):
        rng = np.random.default_rng(18)
        a, b = rng.normal(size=100), rng.normal(size=100)
        assert correlation(a, b, "pearson") == pytest.approx(
            naive_pearson(a, b), abs=1e-12
        )

    def test_spearman_uses_mean_ranks(self):
        rng = np.random.default_rng(19)
        a = rng.integers(0, 5, size=40).astype(float)  # heavy ties
        b = rng.normal(size=40)
        expected = naive_pearson(naive_mean_ranks(a), naive_mean_ranks(b))
        assert correlation(a, b, "spearman") == pytest.approx(expected, abs=1e-12)

    def test_average_ranks_match_naive(self):
        rng = np.random.default_rng(20)
        x = rng.integers(0, 4, size=30).astype(float)
        assert np.allclose(average_ranks(x), naive_mean_ranks(x))

    def test_fast_kendall_equals_naive_including_ties(self):
        rng = np.random.default_rng(21)
        for trial in range(25):
            n = int(rng.integers(2, 120))
            if trial % 2:
                a = rng.integers(0, 6, size=n).astype(float)
                b = rng.integers(0, 6, size=n).astype(float)
            else:
                a, b = rng.normal(size=n), rng.normal(size=n)
            try:
                expected = naive_kendall(list(a), list(b))
            except ZeroDivisionError:
                continue
            if not np.isfinite(expected):
                continue
            assert correlation(a, b, "kendall") == expected  # exact

    def test_fast_kendall_on_two_thousand_pairs(self):
        rng = np.random.default_rng(22)
        a = rng.integers(0, 40, size=2000).astype(float)
        b = a + rng.integers(-3, 4, size=2000)
        assert correlation(a, b, "kendall") == naive_kendall(list(a), list(b))

    def test_rank_invariance_under_monotone_transform(self):
        rng = np.random.default_rng(23)
        a, b = rng.normal(size=60), rng.normal(size=60)
        for kind in ("spearman", "kendall"):
            before = correlation(a, b, kind)
            after = correlation(np.exp(a), b**3, kind)
            assert before == pytest.approx(after, abs=1e-12)

    def test_count_inversions_matches_naive(self):
        rng = np.random.default_rng(24)
        for _ in range(10):
            x = rng.integers(0, 50, size=int(rng.integers(1, 400))).astype(float)
            naive = sum(
                1 for i in range(len(x)) for j in range(i + 1, len(x)) if x[i] > x[j]
            )
            assert count_inversions(x) == naive


class TestRankDifferenceHistogram:
    def test_monotone_pairs_pile_at_zero(self):
        a = np.arange(10.0)
        edges, freqs = rank_difference_histogram(a, 2 * a + 1, bins=5)
        assert freqs[0] == 1.0
        assert np.all(freqs[1:] == 0.0)

    def test_reversed_order_has_no_mass_at_zero(self):
        a = np.arange(10.0)
        edges, freqs = rank_difference_histogram(a, -a, bins=10)
        assert freqs[0] == 0.0
        # |rank diffs| of a reversal are symmetric: 9,7,5,3,1,1,3,5,7,9
        assert freqs[-1] == pytest.approx(0.2)

    def test_frequencies_sum_to_one(self):
        rng = np.random.default_rng(25)
        a, b = rng.normal(size=77), rng.normal(size=77)
        _, freqs = rank_difference_histogram(a, b, bins=13)
        assert freqs.sum() == pytest.approx(1.0, abs=1e-12)

    def test_bad_bins_rejected(self):
        with pytest.raises(ValueError):
            rank_difference_histogram(np.arange(4.0), np.arange(4.0), bins=0)
