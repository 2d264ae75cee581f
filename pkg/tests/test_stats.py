import math

import numpy as np
import pytest

from stridelab.errors import EmptyEnsemble, EmptyGroupA, EmptyInput, LengthMismatch
from stridelab.model import NormalizedCurve, SpatiotemporalRow, TrialRef
from stridelab.stats import (
    box_stats,
    ensemble_mean_ci,
    highlight_range_filter,
    quantile,
    radar_summary,
)


def curve(values, ref=None):
    return NormalizedCurve(values=np.asarray(values, dtype=float), source=ref,
                           variable="v", side="left")


def ref(i):
    return TrialRef("g", "p", f"t{i}")


class TestEnsembleMeanCi:
    def test_identical_curves_collapse(self):
        curves = [curve([1.0, 2.0, 3.0])] * 5
        s = ensemble_mean_ci(curves, alpha=0.05)
        assert np.allclose(s.mean, [1, 2, 3])
        assert np.array_equal(s.ci_low, s.mean)
        assert np.array_equal(s.ci_high, s.mean)

    def test_two_constant_curves_half_width(self):
        # s = sqrt(2), s/sqrt(n) = 1, half-width = t(0.975, 1) = 12.7062
        s = ensemble_mean_ci([curve([0.0] * 4), curve([2.0] * 4)], alpha=0.05)
        assert np.allclose(s.mean, 1.0)
        half = s.ci_high - s.mean
        assert np.allclose(half, 12.7062, atol=1e-3)
        assert np.allclose(s.mean - s.ci_low, half)

    def test_single_curve_collapses(self):
        s = ensemble_mean_ci([curve([5.0, 6.0])])
        assert np.array_equal(s.ci_low, s.mean)
        assert np.array_equal(s.ci_high, s.mean)
        assert s.n == 1

    def test_permutation_invariant(self):
        rng = np.random.default_rng(51)
        curves = [curve(rng.normal(0, 1, 11)) for _ in range(6)]
        a = ensemble_mean_ci(curves)
        b = ensemble_mean_ci(curves[::-1])
        assert np.allclose(a.mean, b.mean, atol=1e-12, rtol=0)
        assert np.allclose(a.ci_low, b.ci_low, atol=1e-12, rtol=0)

    def test_scaling_linearity(self):
        rng = np.random.default_rng(52)
        curves = [curve(rng.normal(0, 1, 7)) for _ in range(5)]
        base = ensemble_mean_ci(curves)
        scaled = ensemble_mean_ci([curve(3.0 * c.values) for c in curves])
        assert np.allclose(scaled.mean, 3.0 * base.mean, rtol=1e-12, atol=1e-12)
        assert np.allclose(scaled.ci_high - scaled.mean,
                           3.0 * (base.ci_high - base.mean), rtol=1e-9, atol=1e-12)

    def test_invariants_hold(self):
        rng = np.random.default_rng(53)
        curves = [curve(rng.normal(0, 5, 9)) for _ in range(4)]
        s = ensemble_mean_ci(curves)
        assert np.all(s.ci_low <= s.mean + 1e-12)
        assert np.all(s.mean <= s.ci_high + 1e-12)

    def test_errors(self):
        with pytest.raises(EmptyEnsemble):
            ensemble_mean_ci([])
        with pytest.raises(LengthMismatch):
            ensemble_mean_ci([curve([1, 2]), curve([1, 2, 3])])


def brute_quantile(sorted_vals, p):
    """Independent h = (n-1)p implementation for cross-checks."""
    n = len(sorted_vals)
    h = (n - 1) * p
    lo = math.floor(h)
    if lo >= n - 1:
        return float(sorted_vals[-1])
    return float(sorted_vals[lo] + (h - lo) * (sorted_vals[lo + 1] - sorted_vals[lo]))


class TestBoxStats:
    def test_one_to_five(self):
        box = box_stats([(ref(i), float(v)) for i, v in enumerate([1, 2, 3, 4, 5])])
        assert (box.q1, box.median, box.q3) == (2.0, 3.0, 4.0)
        assert box.outliers == ()
        assert (box.whisker_low, box.whisker_high) == (1.0, 5.0)

    def test_outlier_beyond_fence(self):
        values = [(ref(i), float(v)) for i, v in enumerate([1, 2, 3, 4, 5, 100])]
        box = box_stats(values)
        assert box.q1 == 2.25
        assert box.median == 3.5
        assert box.q3 == 4.75
        # fence = 4.75 + 1.5 * 2.5 = 8.5 -> 100 is out, whisker sits on 5
        assert box.whisker_high == 5.0
        assert [v for _, v in box.outliers] == [100.0]
        assert box.outliers[0][0] == ref(5)
        assert box.max == 100.0

    def test_single_value_degenerate(self):
        box = box_stats([(ref(0), 7.0)])
        assert box.min == box.q1 == box.median == box.q3 == box.max == 7.0
        assert box.whisker_low == box.whisker_high == 7.0
        assert box.outliers == ()

    def test_small_n_against_brute_force(self):
        rng = np.random.default_rng(54)
        for _ in range(200):
            n = int(rng.integers(1, 5))
            vals = sorted(rng.normal(0, 10, n))
            box = box_stats([(ref(i), float(v)) for i, v in enumerate(vals)])
            q1 = brute_quantile(vals, 0.25)
            q3 = brute_quantile(vals, 0.75)
            iqr = q3 - q1
            outliers = [v for v in vals if v < q1 - 1.5 * iqr or v > q3 + 1.5 * iqr]
            assert [v for _, v in box.outliers] == pytest.approx(outliers)
            assert box.q1 == pytest.approx(q1)
            assert box.q3 == pytest.approx(q3)

    def test_ordering_invariant_on_gapped_data(self):
        # every point below q1 sits outside the lower fence here; the whisker
        # clamps to q1 so the box ordering invariant still holds
        box = box_stats([(ref(i), float(v)) for i, v in enumerate([0, 100, 101, 102])])
        assert box.min <= box.whisker_low <= box.q1 <= box.median
        assert box.median <= box.q3 <= box.whisker_high <= box.max
        assert [v for _, v in box.outliers] == [0.0]

    def test_quantile_matches_numpy_linear(self):
        rng = np.random.default_rng(55)
        data = np.sort(rng.normal(0, 3, 37))
        for p in (0.1, 0.25, 0.5, 0.75, 0.9):
            assert quantile(data, p) == pytest.approx(
                float(np.quantile(data, p, method="linear")), abs=1e-12
            )

    def test_whisker_range_filter_returns_non_outliers(self):
        rng = np.random.default_rng(56)
        values = [(ref(i), float(v)) for i, v in enumerate(rng.normal(0, 1, 40))]
        values.append((ref(99), 50.0))
        box = box_stats(values)
        inside = highlight_range_filter(values, box.whisker_low, box.whisker_high)
        outlier_refs = {r for r, _ in box.outliers}
        assert inside == {r for r, _ in values} - outlier_refs

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            box_stats([])
        with pytest.raises(EmptyInput):
            box_stats([(ref(0), math.nan)])


class TestRadarSummary:
    def test_two_group_bounds_padded(self):
        rows_a = [SpatiotemporalRow(gait_speed=1.0), SpatiotemporalRow(gait_speed=1.2)]
        rows_b = [SpatiotemporalRow(gait_speed=0.6), SpatiotemporalRow(gait_speed=0.8)]
        axis = {a.parameter: a for a in radar_summary(rows_a, rows_b).axes}["gait_speed"]
        assert axis.mean_a == pytest.approx(1.1)
        assert axis.mean_b == pytest.approx(0.7)
        assert axis.axis_min == pytest.approx(0.57)
        assert axis.axis_max == pytest.approx(1.23)
        assert 0.0 <= axis.normalized_a <= 1.0
        assert 0.0 <= axis.normalized_b <= 1.0

    def test_single_group(self):
        rows_a = [SpatiotemporalRow(cadence=100.0, gait_time=1.2)]
        summary = radar_summary(rows_a, [])
        for axis in summary.axes:
            assert axis.mean_b is None
            assert axis.normalized_b is None

    def test_identical_groups_normalize_equal(self):
        rows = [SpatiotemporalRow(step_width=0.2), SpatiotemporalRow(step_width=0.3)]
        for axis in radar_summary(rows, rows).axes:
            assert axis.normalized_a == axis.normalized_b

    def test_degenerate_range_uses_half(self):
        rows = [SpatiotemporalRow(step_width=0.5)]
        axis = {a.parameter: a for a in radar_summary(rows, rows).axes}["step_width"]
        assert axis.normalized_a == 0.5

    def test_empty_group_a(self):
        with pytest.raises(EmptyGroupA):
            radar_summary([], [SpatiotemporalRow()])


class TestHighlightRangeFilter:
    def test_full_range(self):
        values = [(ref(0), 0.5), (ref(1), 1.5)]
        assert highlight_range_filter(values, -1e9, 1e9) == {ref(0), ref(1)}

    def test_empty_intersection(self):
        values = [(ref(0), 0.5)]
        assert highlight_range_filter(values, 2.0, 3.0) == set()

    def test_inclusive_bounds(self):
        values = [(ref(0), 0.5), (ref(1), 1.5)]
        assert highlight_range_filter(values, 1.0, 2.0) == {ref(1)}
        assert highlight_range_filter(values, 0.5, 1.5) == {ref(0), ref(1)}

    def test_lo_above_hi_rejected(self):
        with pytest.raises(ValueError):
            highlight_range_filter([], 2.0, 1.0)
