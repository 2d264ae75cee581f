"""Statistics behind the ensemble, distribution and summary views.

Confidence bands use the t distribution (small gait ensembles make the t
correction material); quartiles use linear interpolation of order
statistics, the h = (n-1)p rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as _sstats

from .errors import EmptyEnsemble, EmptyGroupA, EmptyInput, LengthMismatch
from .model import SPATIOTEMPORAL_FIELDS, NormalizedCurve, SpatiotemporalRow, TrialRef

DEFAULT_ALPHA = 0.05

# Fraction of the data range added to each side of the radar axis bounds.
RADAR_PADDING = 0.05

WHISKER_IQR_FACTOR = 1.5


@dataclass(frozen=True)
class EnsembleSummary:
    """Pointwise mean and t confidence band over an ensemble of cycles."""

    per_trial: tuple[NormalizedCurve, ...]
    mean: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    n: int
    alpha: float


@dataclass(frozen=True)
class BoxStats:
    min: float
    q1: float
    median: float
    q3: float
    max: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[tuple[TrialRef | None, float], ...]


@dataclass(frozen=True)
class RadarAxis:
    parameter: str
    mean_a: float | None
    mean_b: float | None
    axis_min: float
    axis_max: float
    normalized_a: float | None
    normalized_b: float | None


@dataclass(frozen=True)
class RadarSummary:
    axes: tuple[RadarAxis, ...]


def quantile(sorted_values: np.ndarray, p: float) -> float:
    """Linear interpolation of order statistics: h = (n-1)p."""
    n = len(sorted_values)
    h = (n - 1) * p
    lo = int(math.floor(h))
    hi = min(lo + 1, n - 1)
    frac = h - lo
    return float(sorted_values[lo] * (1 - frac) + sorted_values[hi] * frac)


def ensemble_mean_ci(
    curves: list[NormalizedCurve] | tuple[NormalizedCurve, ...],
    alpha: float = DEFAULT_ALPHA,
) -> EnsembleSummary:
    """Pointwise mean with mean +- t(1-alpha/2, n-1) * s/sqrt(n) bounds.

    For a single curve the band collapses to the mean.
    """
    if not curves:
        raise EmptyEnsemble("need at least one curve")
    lengths = {len(c) for c in curves}
    if len(lengths) != 1:
        raise LengthMismatch(f"curve lengths differ: {sorted(lengths)}")
    data = np.vstack([c.values for c in curves])
    n = data.shape[0]
    mean = data.mean(axis=0)
    if n == 1:
        half = np.zeros_like(mean)
    else:
        s = data.std(axis=0, ddof=1)
        t = float(_sstats.t.ppf(1 - alpha / 2, n - 1))
        half = t * s / math.sqrt(n)
    return EnsembleSummary(
        per_trial=tuple(curves),
        mean=mean,
        ci_low=mean - half,
        ci_high=mean + half,
        n=n,
        alpha=alpha,
    )


def box_stats(values: list[tuple[TrialRef | None, float]]) -> BoxStats:
    """Five-number summary with 1.5*IQR whiskers and ref-tagged outliers.

    Whiskers sit on the furthest data points inside the fences; values
    beyond them are returned as outliers with their trial refs.
    """
    finite = [(ref, float(v)) for ref, v in values if math.isfinite(v)]
    if not finite:
        raise EmptyInput("need at least one finite value")
    data = np.sort(np.array([v for _, v in finite]))
    q1 = quantile(data, 0.25)
    med = quantile(data, 0.5)
    q3 = quantile(data, 0.75)
    iqr = q3 - q1
    lo_fence = q1 - WHISKER_IQR_FACTOR * iqr
    hi_fence = q3 + WHISKER_IQR_FACTOR * iqr
    inside = data[(data >= lo_fence) & (data <= hi_fence)]
    # clamped to the quartiles so min <= whisker_low <= q1 <= q3 <= whisker_high <= max
    # holds even when every point below q1 (or above q3) falls outside its fence
    whisker_low = min(float(inside.min()), q1) if len(inside) else q1
    whisker_high = max(float(inside.max()), q3) if len(inside) else q3
    outliers = tuple(
        (ref, v) for ref, v in finite if v < whisker_low or v > whisker_high
    )
    return BoxStats(
        min=float(data[0]),
        q1=q1,
        median=med,
        q3=q3,
        max=float(data[-1]),
        whisker_low=whisker_low,
        whisker_high=whisker_high,
        outliers=outliers,
    )


def _field_values(rows: list[SpatiotemporalRow], name: str) -> list[float]:
    return [getattr(r, name) for r in rows if getattr(r, name) is not None]


def radar_summary(
    rows_a: list[SpatiotemporalRow],
    rows_b: list[SpatiotemporalRow] | None = None,
) -> RadarSummary:
    """Per-parameter group means on shared normalized axes.

    Axis bounds cover the union of both groups' per-trial values, padded by
    5% of the range on each side so both polygons fit inside the chart.
    """
    if not rows_a:
        raise EmptyGroupA("group A must contain at least one row")
    rows_b = rows_b or []
    axes = []
    for name in SPATIOTEMPORAL_FIELDS:
        vals_a = _field_values(rows_a, name)
        vals_b = _field_values(rows_b, name)
        pooled = vals_a + vals_b
        mean_a = float(np.mean(vals_a)) if vals_a else None
        mean_b = float(np.mean(vals_b)) if vals_b else None
        if pooled:
            lo, hi = min(pooled), max(pooled)
            pad = RADAR_PADDING * (hi - lo)
            axis_min, axis_max = lo - pad, hi + pad
        else:
            axis_min = axis_max = 0.0

        def norm(mean: float | None) -> float | None:
            if mean is None:
                return None
            if axis_max > axis_min:
                return (mean - axis_min) / (axis_max - axis_min)
            return 0.5

        axes.append(
            RadarAxis(
                parameter=name,
                mean_a=mean_a,
                mean_b=mean_b if rows_b else None,
                axis_min=axis_min,
                axis_max=axis_max,
                normalized_a=norm(mean_a),
                normalized_b=norm(mean_b) if rows_b else None,
            )
        )
    return RadarSummary(axes=tuple(axes))


def highlight_range_filter(
    values: list[tuple[TrialRef, float]], lo: float, hi: float
) -> set[TrialRef]:
    """Refs whose value falls in [lo, hi], inclusive."""
    if lo > hi:
        raise ValueError(f"lo {lo} exceeds hi {hi}")
    return {ref for ref, v in values if lo <= v <= hi}
