"""Gait feature extraction: events from force, sagittal joint angles,
spatiotemporal parameters, and gait-cycle normalization.

Spatial parameters are derived from heel-marker positions at event times;
the gait cycle is anchored at the ipsilateral touchdown.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ChannelMissing,
    BodyWeightUnknown,
    InsufficientCycles,
    MarkerMissing,
    MissingForceChannels,
    MissingValuesPresent,
    NoContactsFound,
)
from .model import (
    LEFT,
    RIGHT,
    SIDES,
    TOEOFF,
    TOUCHDOWN,
    Channel,
    GaitEvent,
    GaitEvents,
    MarkerSet,
    NormalizedCurve,
    SpatiotemporalRow,
    TimeSeriesTable,
    TrialRef,
    Unit,
)

DEFAULT_CYCLE_POINTS = 101


@dataclass(frozen=True)
class EventDetectConfig:
    """Force-threshold event detection parameters.

    10 N with a 100 ms contact debounce is standard force-plate practice;
    labs differ, so everything is configurable.
    """

    threshold_n: float = 10.0
    min_contact_s: float = 0.1
    min_flight_s: float = 0.05
    partial_peak_fraction: float = 0.6
    body_weight_n: float | None = None

    def __post_init__(self):
        if self.threshold_n <= 0 or self.min_contact_s <= 0 or self.min_flight_s <= 0:
            raise ValueError("threshold and debounce durations must be positive")
        if not 0 < self.partial_peak_fraction <= 1:
            raise ValueError(
                f"partial_peak_fraction must be in (0, 1], got {self.partial_peak_fraction}"
            )
        if self.body_weight_n is not None and self.body_weight_n <= 0:
            raise ValueError(f"body_weight_n must be positive, got {self.body_weight_n}")


def _runs(mask: np.ndarray) -> list[list]:
    """Run-length encode a boolean array into [value, start, stop) triples."""
    out: list[list] = []
    start = 0
    for i in range(1, len(mask) + 1):
        if i == len(mask) or mask[i] != mask[start]:
            out.append([bool(mask[start]), start, i])
            start = i
    return out


def _debounce(above: np.ndarray, min_contact_n: float, min_flight_n: float) -> np.ndarray:
    """Merge away short flights, then short contacts, until stable.

    The stretches before the first and after the last sample count as
    flight, so edge flight runs are never merged; edge contact runs are
    debounced like interior ones.
    """
    above = np.array(above, dtype=bool)
    for _ in range(len(above) + 1):
        runs = _runs(above)
        changed = False
        for i, (value, start, stop) in enumerate(runs):
            if not value and 0 < i < len(runs) - 1 and stop - start < min_flight_n:
                above[start:stop] = True
                changed = True
        if changed:
            runs = _runs(above)
            changed = False
        for value, start, stop in runs:
            if value and stop - start < min_contact_n:
                above[start:stop] = False
                changed = True
        if not changed:
            return above
    return above


def detect_gait_events(grf: TimeSeriesTable, cfg: EventDetectConfig | None = None) -> GaitEvents:
    """Detect touchdown and toe-off per foot from vertical force.

    Touchdown is the first sample at or above the threshold after a
    sufficiently long flight; toe-off is the first sample back below it.
    Contacts shorter than ``min_contact_s`` and flights shorter than
    ``min_flight_s`` are merged away.  A contact running past the end of
    the trace yields a touchdown with no toe-off.
    """
    cfg = cfg or EventDetectConfig()
    for name in ("fz_l", "fz_r"):
        if not grf.has_channel(name):
            raise MissingForceChannels(f"grf table lacks channel {name!r}")
    times = grf.times()
    rate = grf.sample_rate
    any_above = False
    events: list[GaitEvent] = []
    for foot, channel in ((LEFT, "fz_l"), (RIGHT, "fz_r")):
        fz = grf.column(channel)
        if np.isnan(fz).any():
            raise MissingValuesPresent(f"channel {channel!r} contains missing values")
        above = fz >= cfg.threshold_n
        if above.any():
            any_above = True
        # strict "shorter than", with a guard for float rounding of s*rate
        above = _debounce(above, cfg.min_contact_s * rate - 1e-9, cfg.min_flight_s * rate - 1e-9)
        for value, start, stop in _runs(above):
            if not value:
                continue
            events.append(GaitEvent(foot, TOUCHDOWN, float(times[start])))
            if stop < len(times):
                events.append(GaitEvent(foot, TOEOFF, float(times[stop])))
    if not any_above:
        raise NoContactsFound(
            f"no sample reaches the {cfg.threshold_n} N threshold on either foot"
        )
    events.sort(key=lambda e: (e.time, e.foot, e.kind))
    return GaitEvents(tuple(events))


def contact_peak(grf: TimeSeriesTable, foot: str, td: float, to: float | None) -> float:
    """Peak vertical force over one contact interval."""
    fz = grf.column("fz_l" if foot == LEFT else "fz_r")
    times = grf.times()
    if len(times) == 0:
        return 0.0
    end = to if to is not None else times[-1]
    mask = (times >= td - 1e-12) & (times <= end + 1e-12)
    if not mask.any():
        return 0.0
    return float(np.max(fz[mask]))


def discard_partial_contacts(
    ev: GaitEvents, grf: TimeSeriesTable, cfg: EventDetectConfig
) -> GaitEvents:
    """Remove contacts whose peak force marks a partial (half) landing.

    A contact pair is dropped when its peak vertical force is below
    ``partial_peak_fraction`` of body weight, e.g. a foot landing half on
    the plate edge.
    """
    if cfg.body_weight_n is None:
        raise BodyWeightUnknown("partial-contact discard needs cfg.body_weight_n")
    cutoff = cfg.partial_peak_fraction * cfg.body_weight_n
    kept: list[GaitEvent] = []
    for foot in SIDES:
        for td, to in ev.contacts(foot):
            if contact_peak(grf, foot, td, to) < cutoff:
                continue
            kept.append(GaitEvent(foot, TOUCHDOWN, td))
            if to is not None:
                kept.append(GaitEvent(foot, TOEOFF, to))
    kept.sort(key=lambda e: (e.time, e.foot, e.kind))
    return GaitEvents(tuple(kept))


# --- joint angles ----------------------------------------------------------


def _marker_xyz(motion: TimeSeriesTable, markers: MarkerSet, role: str, side: str) -> np.ndarray:
    prefix = markers.prefix(role, side)
    cols = []
    for axis in ("x", "y", "z"):
        name = f"{prefix}_{axis}"
        if not motion.has_channel(name):
            raise MarkerMissing(f"channel {name!r} absent for {role}/{side}")
        cols.append(motion.column(name))
    return np.column_stack(cols)


def joint_angles_from_motion(motion: TimeSeriesTable, markers: MarkerSet) -> TimeSeriesTable:
    """Sagittal-plane segment and joint angles in degrees.

    Trunk, thigh and shank measure segment inclination from vertical
    (forward positive); foot measures inclination from horizontal (toe-up
    positive); knee is thigh minus shank (flexion positive).  Angles are
    invariant to translating all markers by a constant offset.
    """
    pos = {
        (role, side): _marker_xyz(motion, markers, role, side)
        for role in ("SHO", "HIP", "KNE", "ANK", "HEE", "TOE")
        for side in SIDES
    }
    for arr in pos.values():
        if np.isnan(arr).any():
            raise MissingValuesPresent("motion channels contain missing values; impute first")

    def incline_from_vertical(vec: np.ndarray) -> np.ndarray:
        return np.degrees(np.arctan2(vec[:, 0], vec[:, 2]))

    trunk_vec = 0.5 * (
        (pos[("SHO", LEFT)] - pos[("HIP", LEFT)]) + (pos[("SHO", RIGHT)] - pos[("HIP", RIGHT)])
    )
    trunk = incline_from_vertical(trunk_vec)
    out = {"trunk": trunk}
    for side in SIDES:
        s = side[0]
        thigh = incline_from_vertical(pos[("HIP", side)] - pos[("KNE", side)])
        shank = incline_from_vertical(pos[("KNE", side)] - pos[("ANK", side)])
        foot_vec = pos[("TOE", side)] - pos[("HEE", side)]
        foot = np.degrees(np.arctan2(foot_vec[:, 2], foot_vec[:, 0]))
        out[f"thigh_{s}"] = thigh
        out[f"shank_{s}"] = shank
        out[f"foot_{s}"] = foot
        out[f"knee_{s}"] = thigh - shank

    names = ("trunk", "thigh_l", "thigh_r", "shank_l", "shank_r",
             "foot_l", "foot_r", "knee_l", "knee_r")
    return TimeSeriesTable(
        sample_rate=motion.sample_rate,
        start_time=motion.start_time,
        channels=tuple(Channel(n, Unit.DEGREES) for n in names),
        values=np.column_stack([out[n] for n in names]),
    )


# --- spatiotemporal parameters ----------------------------------------------


@dataclass(frozen=True)
class CycleMetrics:
    """Per-cycle quantities; swing is defined so stance + swing = gait_time."""

    foot: str
    index: int
    touchdown: float
    next_touchdown: float
    toeoff: float | None
    gait_time: float
    stance_time: float | None
    swing_time: float | None
    stride_length: float
    gait_speed: float
    double_support_time: float


def _overlap(intervals_a, intervals_b, window) -> float:
    """Total time both interval sets overlap inside the window."""
    total = 0.0
    for a0, a1 in intervals_a:
        for b0, b1 in intervals_b:
            lo = max(a0, b0, window[0])
            hi = min(a1, b1, window[1])
            if hi > lo:
                total += hi - lo
    return total


def cycle_details(
    motion: TimeSeriesTable, markers: MarkerSet, ev: GaitEvents
) -> list[CycleMetrics]:
    """Per-cycle metrics for every complete touchdown-to-touchdown interval."""
    markers.require(motion.names, [("HEE", LEFT), ("HEE", RIGHT)])
    heel_x = {side: motion.column(markers.channel("HEE", side, "x")) for side in SIDES}
    times = motion.times()
    end_time = float(times[-1]) if len(times) else 0.0

    def x_at(side: str, t: float) -> float:
        return float(np.interp(t, times, heel_x[side]))

    contact_spans = {
        side: [(td, to if to is not None else end_time) for td, to in ev.contacts(side)]
        for side in SIDES
    }

    out: list[CycleMetrics] = []
    for foot in SIDES:
        other = RIGHT if foot == LEFT else LEFT
        tds = ev.touchdowns(foot)
        toeoffs = dict(ev.contacts(foot))
        for k in range(len(tds) - 1):
            td, nxt = tds[k], tds[k + 1]
            gait_time = nxt - td
            to = toeoffs.get(td)
            stance = to - td if to is not None else None
            swing = gait_time - stance if stance is not None else None
            stride = abs(x_at(foot, nxt) - x_at(foot, td))
            ds = _overlap(contact_spans[foot], contact_spans[other], (td, nxt))
            out.append(
                CycleMetrics(
                    foot=foot,
                    index=k,
                    touchdown=td,
                    next_touchdown=nxt,
                    toeoff=to,
                    gait_time=gait_time,
                    stance_time=stance,
                    swing_time=swing,
                    stride_length=stride,
                    gait_speed=stride / gait_time if gait_time > 0 else math.nan,
                    double_support_time=ds,
                )
            )
    return out


def _mean(values: list[float]) -> float | None:
    return float(np.mean(values)) if values else None


def spatiotemporal_params(
    motion: TimeSeriesTable, markers: MarkerSet, ev: GaitEvents
) -> SpatiotemporalRow:
    """Average per-cycle spatiotemporal parameters over all complete cycles.

    Step length at a touchdown is the anterior distance between the two
    heel markers (landing minus stance foot); marker positions at event
    times come from linear interpolation.
    """
    for foot in SIDES:
        if len(ev.touchdowns(foot)) < 2:
            raise InsufficientCycles(
                f"{foot} foot has {len(ev.touchdowns(foot))} touchdowns, need >= 2"
            )
    markers.require(motion.names, [("HEE", LEFT), ("HEE", RIGHT)])
    times = motion.times()
    heel = {
        side: {axis: motion.column(markers.channel("HEE", side, axis)) for axis in ("x", "y")}
        for side in SIDES
    }

    def at(side: str, axis: str, t: float) -> float:
        return float(np.interp(t, times, heel[side][axis]))

    step_lengths = {
        foot: [
            at(foot, "x", td) - at(RIGHT if foot == LEFT else LEFT, "x", td)
            for td in ev.touchdowns(foot)
        ]
        for foot in SIDES
    }
    all_tds = sorted(ev.touchdowns(LEFT) + ev.touchdowns(RIGHT))
    widths = [abs(at(LEFT, "y", td) - at(RIGHT, "y", td)) for td in all_tds]

    cycles = cycle_details(motion, markers, ev)
    gait_time = _mean([c.gait_time for c in cycles])
    row = SpatiotemporalRow(
        step_length_l=_mean(step_lengths[LEFT]),
        step_length_r=_mean(step_lengths[RIGHT]),
        stride_length=_mean([c.stride_length for c in cycles]),
        step_width=_mean(widths),
        gait_speed=_mean([c.gait_speed for c in cycles]),
        cadence=120.0 / gait_time if gait_time else None,
        stance_time_l=_mean(
            [c.stance_time for c in cycles if c.foot == LEFT and c.stance_time is not None]
        ),
        stance_time_r=_mean(
            [c.stance_time for c in cycles if c.foot == RIGHT and c.stance_time is not None]
        ),
        swing_time_l=_mean(
            [c.swing_time for c in cycles if c.foot == LEFT and c.swing_time is not None]
        ),
        swing_time_r=_mean(
            [c.swing_time for c in cycles if c.foot == RIGHT and c.swing_time is not None]
        ),
        gait_time=gait_time,
        double_support_time=_mean([c.double_support_time for c in cycles]),
    )
    return row


def normalize_gait_cycle(
    series: TimeSeriesTable,
    channel: str,
    ev: GaitEvents,
    side: str,
    cycle_index: int = 0,
    points: int = DEFAULT_CYCLE_POINTS,
    source: TrialRef | None = None,
) -> NormalizedCurve:
    """Resample one channel onto ``points`` instants across a gait cycle.

    The grid spans touchdown to next ipsilateral touchdown inclusive, so the
    first and last values equal the channel at the two events.
    """
    if points < 2:
        raise ValueError(f"points must be >= 2, got {points}")
    if not series.has_channel(channel):
        raise ChannelMissing(f"channel {channel!r} not in table ({', '.join(series.names)})")
    t0, t1 = ev.cycle_span(side, cycle_index)
    times = series.times()
    column = series.column(channel)
    in_window = (times >= t0 - 1.0 / series.sample_rate) & (
        times <= t1 + 1.0 / series.sample_rate
    )
    if np.isnan(column[in_window]).any():
        raise MissingValuesPresent(
            f"channel {channel!r} has missing values inside cycle {cycle_index}; impute first"
        )
    grid = np.linspace(t0, t1, points)
    values = np.interp(grid, times, column)
    return NormalizedCurve(
        values=values, source=source, variable=channel, side=side, cycle_index=cycle_index
    )
