"""Canonical in-memory data model shared by every other module.

All types are immutable after construction and safe to share across
threads.  Missing samples are encoded as IEEE NaN, which never compares
equal to any finite value and serializes to an empty CSV field.

Coordinate convention for motion data: x = anterior (+), y = leftward (+),
z = up (+), in meters.  Importers are responsible for rotating into it.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

MISSING = float("nan")

_REF_PATTERN = re.compile(r"^[a-z0-9][a-z0-9_-]*$")

LEFT = "left"
RIGHT = "right"
SIDES = (LEFT, RIGHT)

TOUCHDOWN = "touchdown"
TOEOFF = "toeoff"


def is_missing(x: float) -> bool:
    return isinstance(x, float) and math.isnan(x)


class Unit(str, Enum):
    """Closed set of channel units; unknown source units import as UNITLESS."""

    METERS = "m"
    NEWTONS = "N"
    DEGREES = "deg"
    VOLTS = "V"
    UNITLESS = "unitless"


class Channel(NamedTuple):
    name: str
    unit: Unit


@dataclass(frozen=True)
class TimeSeriesTable:
    """Uniformly sampled, named-channel numeric table.

    ``values`` is row-major, one row per sample and one column per channel;
    row ``i`` happens at ``start_time + i / sample_rate``.
    """

    sample_rate: float
    channels: tuple[Channel, ...]
    values: np.ndarray
    start_time: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2:
            vals = vals.reshape(-1, len(self.channels))
        vals = np.ascontiguousarray(vals)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "channels", tuple(Channel(c[0], Unit(c[1])) for c in self.channels))

    # -- shape ------------------------------------------------------------

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_channels(self) -> int:
        return len(self.channels)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.channels)

    def times(self) -> np.ndarray:
        return self.start_time + np.arange(self.n_samples) / self.sample_rate

    @property
    def end_time(self) -> float:
        return self.start_time + max(self.n_samples - 1, 0) / self.sample_rate

    # -- access -----------------------------------------------------------

    def has_channel(self, name: str) -> bool:
        return name in self.names

    def channel_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(name) from None

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.channel_index(name)]

    def with_values(self, values: np.ndarray) -> "TimeSeriesTable":
        return replace(self, values=values)

    def value_at(self, name: str, t: float | np.ndarray) -> float | np.ndarray:
        """Channel value at arbitrary time(s) by linear interpolation."""
        return np.interp(t, self.times(), self.column(name))


def validate_table(t: TimeSeriesTable) -> list[str]:
    """Check every table invariant; returns one descriptor per violation."""
    violations: list[str] = []
    if not (t.sample_rate > 0) or not math.isfinite(t.sample_rate):
        violations.append(f"sample_rate must be a positive real, got {t.sample_rate}")
    if not math.isfinite(t.start_time):
        violations.append(f"start_time must be finite, got {t.start_time}")
    seen: set[str] = set()
    for c in t.channels:
        if c.name in seen:
            violations.append(f"duplicate channel name {c.name!r}")
        seen.add(c.name)
        if not c.name:
            violations.append("empty channel name")
    if t.values.ndim != 2 or t.values.shape[1] != len(t.channels):
        violations.append(
            f"values shape {t.values.shape} does not match {len(t.channels)} channels"
        )
    else:
        bad = np.isinf(t.values)
        for row, col in zip(*np.nonzero(bad)):
            violations.append(f"non-finite value at row {row}, channel {t.channels[col].name!r}")
    return violations


class GaitEvent(NamedTuple):
    foot: str
    kind: str
    time: float


@dataclass(frozen=True)
class GaitEvents:
    """Ordered touchdown/toe-off timestamps per foot for one trial."""

    events: tuple[GaitEvent, ...]

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(GaitEvent(*e) for e in self.events))

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def violations(self) -> list[str]:
        out: list[str] = []
        last_t = -math.inf
        for e in self.events:
            if e.foot not in SIDES:
                out.append(f"unknown foot {e.foot!r}")
            if e.kind not in (TOUCHDOWN, TOEOFF):
                out.append(f"unknown event kind {e.kind!r}")
            if e.time < 0:
                out.append(f"negative event time {e.time}")
            if e.time < last_t:
                out.append(f"events not sorted by time at t={e.time}")
            last_t = e.time
        for foot in SIDES:
            expected = TOUCHDOWN
            for e in self.for_foot(foot):
                if e.kind != expected:
                    out.append(f"{foot} foot: expected {expected} at t={e.time}, got {e.kind}")
                    break
                expected = TOEOFF if expected == TOUCHDOWN else TOUCHDOWN
        return out

    def for_foot(self, foot: str) -> tuple[GaitEvent, ...]:
        return tuple(e for e in self.events if e.foot == foot)

    def touchdowns(self, foot: str) -> list[float]:
        return [e.time for e in self.events if e.foot == foot and e.kind == TOUCHDOWN]

    def toeoffs(self, foot: str) -> list[float]:
        return [e.time for e in self.events if e.foot == foot and e.kind == TOEOFF]

    def contacts(self, foot: str) -> list[tuple[float, float | None]]:
        """(touchdown, toeoff) pairs; the last toeoff may be absent."""
        out: list[tuple[float, float | None]] = []
        for e in self.for_foot(foot):
            if e.kind == TOUCHDOWN:
                out.append((e.time, None))
            elif out and out[-1][1] is None:
                out[-1] = (out[-1][0], e.time)
        return out

    def n_cycles(self, foot: str) -> int:
        return max(len(self.touchdowns(foot)) - 1, 0)

    def cycle_span(self, foot: str, index: int) -> tuple[float, float]:
        tds = self.touchdowns(foot)
        if index < 0 or index + 1 >= len(tds):
            from .errors import CycleOutOfRange

            raise CycleOutOfRange(
                f"cycle {index} not available for {foot} foot ({max(len(tds) - 1, 0)} complete)"
            )
        return tds[index], tds[index + 1]

    @staticmethod
    def from_rows(rows: Iterable[tuple[str, str, float]]) -> "GaitEvents":
        return GaitEvents(tuple(GaitEvent(f, k, float(t)) for f, k, t in rows))


# Ordered exactly like the canonical spatiotemporal CSV header.
SPATIOTEMPORAL_FIELDS = (
    "step_length_l",
    "step_length_r",
    "stride_length",
    "step_width",
    "gait_speed",
    "cadence",
    "stance_time_l",
    "stance_time_r",
    "swing_time_l",
    "swing_time_r",
    "gait_time",
    "double_support_time",
)

_TEMPORAL_FIELDS = (
    "stance_time_l",
    "stance_time_r",
    "swing_time_l",
    "swing_time_r",
    "gait_time",
    "double_support_time",
)


@dataclass(frozen=True)
class SpatiotemporalRow:
    """Per-trial single-valued gait parameters; any field may be absent."""

    step_length_l: float | None = None
    step_length_r: float | None = None
    stride_length: float | None = None
    step_width: float | None = None
    gait_speed: float | None = None
    cadence: float | None = None
    stance_time_l: float | None = None
    stance_time_r: float | None = None
    swing_time_l: float | None = None
    swing_time_r: float | None = None
    gait_time: float | None = None
    double_support_time: float | None = None

    def as_dict(self) -> dict[str, float | None]:
        return {name: getattr(self, name) for name in SPATIOTEMPORAL_FIELDS}

    def violations(self) -> list[str]:
        out = []
        for name in _TEMPORAL_FIELDS:
            v = getattr(self, name)
            if v is not None and not v > 0:
                out.append(f"{name} must be > 0 when present, got {v}")
        if self.cadence is not None and self.gait_time is not None:
            if abs(self.cadence - 120.0 / self.gait_time) > 1e-9:
                out.append(
                    f"cadence {self.cadence} inconsistent with 120/gait_time "
                    f"{120.0 / self.gait_time}"
                )
        return out


@dataclass(frozen=True)
class TrialRef:
    """Hierarchical trial address: group -> patient -> trial."""

    group: str
    patient_id: str
    trial_id: str

    def __post_init__(self):
        from .errors import PathInvalid

        for part in (self.group, self.patient_id, self.trial_id):
            if not _REF_PATTERN.match(part):
                raise PathInvalid(
                    f"{part!r} does not match [a-z0-9][a-z0-9_-]* in {self.group}/"
                    f"{self.patient_id}/{self.trial_id}"
                )

    def __str__(self) -> str:
        return f"{self.group}/{self.patient_id}/{self.trial_id}"

    @staticmethod
    def parse(text: str) -> "TrialRef":
        from .errors import PathInvalid

        parts = text.split("/")
        if len(parts) != 3:
            raise PathInvalid(f"expected group/patient/trial, got {text!r}")
        return TrialRef(*parts)


@dataclass(frozen=True)
class NormalizedCurve:
    """One channel resampled onto a fixed 0-100% gait-cycle grid."""

    values: np.ndarray
    source: TrialRef | None
    variable: str
    side: str
    cycle_index: int = 0

    def __post_init__(self):
        vals = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)


# Semantic marker roles; SHO/HIP double as the trunk segment endpoints.
MARKER_ROLES = ("SHO", "HIP", "KNE", "ANK", "HEE", "TOE")


@dataclass(frozen=True)
class MarkerSet:
    """Maps (role, side) to the channel-name prefix in a motion table.

    Every mapped prefix must resolve to channels ``<prefix>_x/_y/_z``.
    """

    mapping: Mapping[tuple[str, str], str] = field(default_factory=dict)

    def __post_init__(self):
        for (role, side), prefix in self.mapping.items():
            if role not in MARKER_ROLES or side not in SIDES:
                raise KeyError(f"unknown marker role {(role, side)!r}")
            if not prefix:
                raise ValueError(f"empty prefix for {(role, side)!r}")
        object.__setattr__(self, "mapping", MappingProxyType(dict(self.mapping)))

    @staticmethod
    def default() -> "MarkerSet":
        mapping = {
            (role, side): f"{role.lower()}_{side[0]}"
            for role in MARKER_ROLES
            for side in SIDES
        }
        return MarkerSet(mapping)

    def prefix(self, role: str, side: str) -> str:
        from .errors import MarkerMissing

        try:
            return self.mapping[(role, side)]
        except KeyError:
            raise MarkerMissing(f"marker role {role}/{side} not mapped") from None

    def channel(self, role: str, side: str, axis: str) -> str:
        return f"{self.prefix(role, side)}_{axis}"

    def require(self, table_names: Sequence[str], roles: Iterable[tuple[str, str]]) -> None:
        from .errors import MarkerMissing

        names = set(table_names)
        for role, side in roles:
            prefix = self.prefix(role, side)
            for axis in ("x", "y", "z"):
                if f"{prefix}_{axis}" not in names:
                    raise MarkerMissing(f"channel {prefix}_{axis} absent for {role}/{side}")
