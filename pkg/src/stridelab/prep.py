"""Signal preparation: low-pass filtering, imputation, resampling.

Defaults follow gait-lab convention: 4th-order zero-phase Butterworth with
a 6 Hz cutoff for kinematics and 20 Hz for forces.  These are configurable
assumptions, not measured constants.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import signal

from .errors import (
    AllMissingChannel,
    CutoffAboveNyquist,
    DataWarning,
    MissingValuesPresent,
    TooFewSamples,
    TooSparse,
)
from .model import TimeSeriesTable

DEFAULT_KINEMATIC_CUTOFF_HZ = 6.0
DEFAULT_FORCE_CUTOFF_HZ = 20.0


@dataclass(frozen=True)
class FilterSpec:
    """Butterworth low-pass configuration.

    ``order`` is the one-pass filter order; zero-phase application squares
    the magnitude response, so gain at the cutoff becomes 1/2.
    """

    cutoff_hz: float
    order: int = 4
    zero_phase: bool = True

    def __post_init__(self):
        if self.cutoff_hz <= 0:
            raise CutoffAboveNyquist(f"cutoff must be positive, got {self.cutoff_hz}")
        if self.order < 2 or self.order % 2:
            raise ValueError(f"order must be an even integer >= 2, got {self.order}")


def _require_no_missing(t: TimeSeriesTable, op: str) -> None:
    if np.isnan(t.values).any():
        rows, cols = np.nonzero(np.isnan(t.values))
        name = t.channels[cols[0]].name
        raise MissingValuesPresent(
            f"{op} requires complete data; channel {name!r} missing at row {rows[0]} "
            "(impute first)"
        )


def lowpass_filter(t: TimeSeriesTable, spec: FilterSpec) -> TimeSeriesTable:
    """Per-channel Butterworth low-pass; zero-phase runs forward then backward.

    Zero-phase filtering uses reflective padding of length 3*order at both
    ends, which bounds edge transients without inventing data.  The two
    sweep orders (forward-backward and backward-forward) are averaged, so
    the result is exactly invariant under time reversal; steady-state
    response is the squared magnitude either way.
    """
    nyquist = t.sample_rate / 2.0
    if spec.cutoff_hz >= nyquist:
        raise CutoffAboveNyquist(
            f"cutoff {spec.cutoff_hz} Hz >= Nyquist {nyquist} Hz at {t.sample_rate} Hz"
        )
    _require_no_missing(t, "lowpass_filter")
    pad = 3 * spec.order
    if t.n_samples <= pad:
        raise TooFewSamples(f"need more than {pad} samples, got {t.n_samples}")

    b, a = signal.butter(spec.order, spec.cutoff_hz, btype="low", fs=t.sample_rate)
    if spec.zero_phase:
        fwd = signal.filtfilt(b, a, t.values, axis=0, padtype="even", padlen=pad)
        bwd = signal.filtfilt(b, a, t.values[::-1], axis=0, padtype="even", padlen=pad)
        out = 0.5 * (fwd + bwd[::-1])
    else:
        out = signal.lfilter(b, a, t.values, axis=0)
    return t.with_values(out)


def impute_linear(t: TimeSeriesTable) -> TimeSeriesTable:
    """Fill gaps by linear interpolation against time; edges take the
    nearest finite value.  Idempotent."""
    out = np.array(t.values)
    times = t.times()
    for c in range(t.n_channels):
        col = out[:, c]
        finite = np.isfinite(col)
        if finite.all():
            continue
        if not finite.any():
            raise AllMissingChannel(f"channel {t.channels[c].name!r} has no finite values")
        out[:, c] = np.interp(times, times[finite], col[finite])
    return t.with_values(out)


def impute_chained(
    t: TimeSeriesTable,
    iterations: int = 10,
    seed: int = 0,
    shuffle_order: bool = False,
) -> TimeSeriesTable:
    """Multivariate imputation by chained equations, deterministic variant.

    Missing cells start at column means; each round refits an ordinary
    least-squares regression of one channel on all others (rows where the
    target was observed) and overwrites that channel's missing cells with
    predictions.  No stochastic residual is drawn, so identical inputs give
    identical outputs; ``seed`` only breaks ties in the channel visiting
    order when ``shuffle_order`` is set.
    """
    if t.n_channels < 2:
        raise TooSparse(f"chained imputation needs >= 2 channels, got {t.n_channels}")
    observed = np.isfinite(t.values)
    frac = observed.mean(axis=0)
    if (frac < 0.2).any():
        name = t.channels[int(np.argmin(frac))].name
        raise TooSparse(f"channel {name!r} is only {frac.min():.0%} observed (< 20%)")
    if observed.all():
        return t

    work = np.array(t.values)
    means = np.nanmean(t.values, axis=0)
    for c in range(t.n_channels):
        work[~observed[:, c], c] = means[c]

    order = list(range(t.n_channels))
    if shuffle_order:
        np.random.default_rng(seed).shuffle(order)

    n = t.n_samples
    for _ in range(max(iterations, 0)):
        for c in order:
            miss = ~observed[:, c]
            if not miss.any():
                continue
            others = [j for j in range(t.n_channels) if j != c]
            design = np.column_stack([np.ones(n), work[:, others]])
            rows = observed[:, c]
            coef, _, rank, _ = np.linalg.lstsq(design[rows], work[rows, c], rcond=None)
            if rank < design.shape[1]:
                warnings.warn(
                    f"regression for channel {t.channels[c].name!r} is rank-deficient; "
                    "falling back to column mean",
                    DataWarning,
                )
                work[miss, c] = means[c]
            else:
                work[miss, c] = design[miss] @ coef
    return t.with_values(work)


def resample(t: TimeSeriesTable, target_hz: float) -> TimeSeriesTable:
    """Linear interpolation onto the uniform grid covering the original span."""
    if target_hz <= 0:
        raise ValueError(f"target rate must be positive, got {target_hz}")
    _require_no_missing(t, "resample")
    times = t.times()
    span = times[-1] - times[0] if len(times) else 0.0
    n_out = int(np.floor(span * target_hz + 1e-9)) + 1
    new_times = t.start_time + np.arange(n_out) / target_hz
    out = np.empty((n_out, t.n_channels))
    for c in range(t.n_channels):
        out[:, c] = np.interp(new_times, times, t.values[:, c])
    return TimeSeriesTable(
        sample_rate=float(target_hz),
        start_time=t.start_time,
        channels=t.channels,
        values=out,
    )
