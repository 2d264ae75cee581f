"""Shared fixture builders for the test suite."""

import numpy as np

from stridelab.formats.canonical import (
    CanonicalKind,
    GRF_CHANNELS,
    JOINT_ANGLE_CHANNELS,
)
from stridelab.model import (
    Channel,
    GaitEvents,
    SpatiotemporalRow,
    SPATIOTEMPORAL_FIELDS,
    TimeSeriesTable,
    Unit,
)

KIND_UNIT = {
    CanonicalKind.MOTION: Unit.METERS,
    CanonicalKind.GRF: Unit.NEWTONS,
    CanonicalKind.JOINT_ANGLES: Unit.DEGREES,
}


def make_table(names, values, rate=100.0, unit=Unit.METERS, start=0.0) -> TimeSeriesTable:
    return TimeSeriesTable(
        sample_rate=rate,
        start_time=start,
        channels=tuple(Channel(n, unit) for n in names),
        values=np.asarray(values, dtype=float),
    )


def random_table(rng: np.random.Generator, kind: CanonicalKind,
                 missing_prob: float = 0.08) -> TimeSeriesTable:
    if kind == CanonicalKind.GRF:
        names = GRF_CHANNELS
    elif kind == CanonicalKind.JOINT_ANGLES:
        names = JOINT_ANGLE_CHANNELS
    else:
        n_markers = rng.integers(1, 4)
        names = tuple(
            f"m{i}_{axis}" for i in range(n_markers) for axis in ("x", "y", "z")
        )
    n = int(rng.integers(2, 60))
    values = rng.normal(0, 100, (n, len(names)))
    mask = rng.random(values.shape) < missing_prob
    values[mask] = np.nan
    rate = float(rng.choice([60, 100, 120, 300, 600, 1000.5]))
    start = float(rng.choice([0.0, 1.25, 10.0]))
    return make_table(names, values, rate=rate, unit=KIND_UNIT[kind], start=start)


def random_events(rng: np.random.Generator) -> GaitEvents:
    events = []
    for foot in ("left", "right"):
        t = float(rng.uniform(0, 0.5))
        for _ in range(int(rng.integers(1, 6))):
            events.append((foot, "touchdown", t))
            t += float(rng.uniform(0.4, 0.9))
            events.append((foot, "toeoff", t))
            t += float(rng.uniform(0.2, 0.6))
    events.sort(key=lambda e: e[2])
    return GaitEvents.from_rows(events)


def random_spatiotemporal(rng: np.random.Generator) -> SpatiotemporalRow:
    gait_time = float(rng.uniform(0.8, 1.6))
    fields = {}
    for name in SPATIOTEMPORAL_FIELDS:
        if rng.random() < 0.15:
            fields[name] = None
        else:
            fields[name] = float(rng.uniform(0.1, 2.0))
    fields["gait_time"] = gait_time
    fields["cadence"] = 120.0 / gait_time
    return SpatiotemporalRow(**fields)


def tables_equal(a: TimeSeriesTable, b: TimeSeriesTable, tol: float = 1e-9) -> bool:
    if a.names != b.names:
        return False
    if [c.unit for c in a.channels] != [c.unit for c in b.channels]:
        return False
    if abs(a.sample_rate - b.sample_rate) > tol * max(a.sample_rate, 1.0):
        return False
    if abs(a.start_time - b.start_time) > tol:
        return False
    if a.values.shape != b.values.shape:
        return False
    nan_a, nan_b = np.isnan(a.values), np.isnan(b.values)
    if not np.array_equal(nan_a, nan_b):
        return False
    return bool(np.all(np.abs(a.values[~nan_a] - b.values[~nan_b]) <= tol))
