"""Read/write the canonical CSV family.

Dialect: comma separator, ``\n`` line endings, no quoting, UTF-8.  Missing
values are empty fields.  Reals are serialized with shortest round-trip
precision, so read(write(x)) reproduces every value within 1e-9.
"""

from __future__ import annotations

import math
import re
from enum import Enum

import numpy as np

from ..errors import (
    NonMonotonicTime,
    NonUniformTime,
    RaggedRow,
    SchemaMismatch,
)
from ..model import (
    SIDES,
    SPATIOTEMPORAL_FIELDS,
    TOEOFF,
    TOUCHDOWN,
    Channel,
    GaitEvents,
    SpatiotemporalRow,
    TimeSeriesTable,
    Unit,
)


class CanonicalKind(str, Enum):
    MOTION = "motion"
    GRF = "grf"
    JOINT_ANGLES = "joint_angles"
    EVENTS = "events"
    SPATIOTEMPORAL = "spatiotemporal"


GRF_CHANNELS = ("fx_l", "fy_l", "fz_l", "fx_r", "fy_r", "fz_r")
JOINT_ANGLE_CHANNELS = (
    "trunk",
    "thigh_l",
    "thigh_r",
    "shank_l",
    "shank_r",
    "foot_l",
    "foot_r",
    "knee_l",
    "knee_r",
)
EVENTS_HEADER = ("foot", "event", "time")

KIND_UNITS = {
    CanonicalKind.MOTION: Unit.METERS,
    CanonicalKind.GRF: Unit.NEWTONS,
    CanonicalKind.JOINT_ANGLES: Unit.DEGREES,
}

# Rate inference checks every interval against the median at this tolerance.
UNIFORM_TIME_TOL_S = 1e-6


def _fmt(x: float) -> str:
    if math.isnan(x):
        return ""
    return repr(float(x))


def _parse_field(field: str, line_no: int) -> float:
    if field == "":
        return math.nan
    try:
        return float(field)
    except ValueError:
        raise SchemaMismatch(f"unparseable number {field!r} on line {line_no}") from None


def _split_lines(text: str, separator: str) -> list[list[str]]:
    lines = text.split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    return [line.rstrip("\r").split(separator) for line in lines]


def infer_sample_rate(times: np.ndarray) -> float:
    """Rate = 1/median interval, validated against every interval at 1e-6 s."""
    if len(times) < 2:
        raise SchemaMismatch("time-series CSV needs at least 2 data rows")
    dts = np.diff(times)
    if np.any(dts <= 0):
        i = int(np.argmax(dts <= 0))
        raise NonMonotonicTime(f"time does not increase at row {i + 1}")
    med = float(np.median(dts))
    if np.any(np.abs(dts - med) > UNIFORM_TIME_TOL_S):
        i = int(np.argmax(np.abs(dts - med) > UNIFORM_TIME_TOL_S))
        raise NonUniformTime(
            f"interval at row {i + 1} deviates from median {med:.9g} by more than "
            f"{UNIFORM_TIME_TOL_S} s"
        )
    return 1.0 / med


def _read_timeseries(rows: list[list[str]], kind: CanonicalKind) -> TimeSeriesTable:
    header = rows[0]
    if kind == CanonicalKind.GRF:
        expected = ["time", *GRF_CHANNELS]
        if header != expected:
            raise SchemaMismatch(f"grf header must be {','.join(expected)}")
        names = GRF_CHANNELS
    elif kind == CanonicalKind.JOINT_ANGLES:
        expected = ["time", *JOINT_ANGLE_CHANNELS]
        if header != expected:
            raise SchemaMismatch(f"joint_angles header must be {','.join(expected)}")
        names = JOINT_ANGLE_CHANNELS
    else:  # motion: time followed by <marker>_x/_y/_z triplets
        if not header or header[0] != "time" or (len(header) - 1) % 3 != 0:
            raise SchemaMismatch("motion header must be time,<M>_x,<M>_y,<M>_z,...")
        for i in range(1, len(header), 3):
            triplet = header[i : i + 3]
            stems = [n.rsplit("_", 1) for n in triplet]
            if any(len(s) != 2 for s in stems):
                raise SchemaMismatch(f"motion channel {triplet} lacks _x/_y/_z suffixes")
            if [s[1] for s in stems] != ["x", "y", "z"] or len({s[0] for s in stems}) != 1:
                raise SchemaMismatch(f"motion channels {triplet} are not one marker's x,y,z")
        names = tuple(header[1:])

    n_cols = len(header)
    data = np.empty((len(rows) - 1, n_cols))
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != n_cols:
            raise RaggedRow(f"line {r} has {len(row)} fields, expected {n_cols}")
        for c, field in enumerate(row):
            data[r - 2, c] = _parse_field(field, r)
    times = data[:, 0]
    if np.any(np.isnan(times)):
        raise SchemaMismatch("time column contains empty fields")
    rate = infer_sample_rate(times)
    unit = KIND_UNITS[kind]
    return TimeSeriesTable(
        sample_rate=rate,
        start_time=float(times[0]),
        channels=tuple(Channel(n, unit) for n in names),
        values=data[:, 1:],
    )


def _read_events(rows: list[list[str]]) -> GaitEvents:
    if rows[0] != list(EVENTS_HEADER):
        raise SchemaMismatch("events header must be foot,event,time")
    events = []
    last_t = -math.inf
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise RaggedRow(f"line {r} has {len(row)} fields, expected 3")
        foot, kind, t_text = row
        if foot not in SIDES:
            raise SchemaMismatch(f"unknown foot {foot!r} on line {r}")
        if kind not in (TOUCHDOWN, TOEOFF):
            raise SchemaMismatch(f"unknown event {kind!r} on line {r}")
        t = _parse_field(t_text, r)
        if math.isnan(t):
            raise SchemaMismatch(f"empty event time on line {r}")
        if t < last_t:
            raise NonMonotonicTime(f"event times decrease on line {r}")
        last_t = t
        events.append((foot, kind, t))
    return GaitEvents.from_rows(events)


def _read_spatiotemporal(rows: list[list[str]]) -> SpatiotemporalRow:
    if rows[0] != list(SPATIOTEMPORAL_FIELDS):
        raise SchemaMismatch(
            "spatiotemporal header must be " + ",".join(SPATIOTEMPORAL_FIELDS)
        )
    if len(rows) != 2:
        raise SchemaMismatch(f"spatiotemporal CSV must have exactly 1 data row, got {len(rows) - 1}")
    row = rows[1]
    if len(row) != len(SPATIOTEMPORAL_FIELDS):
        raise RaggedRow(f"line 2 has {len(row)} fields, expected {len(SPATIOTEMPORAL_FIELDS)}")
    parsed = [_parse_field(f, 2) for f in row]
    return SpatiotemporalRow(**{
        name: (None if math.isnan(v) else v)
        for name, v in zip(SPATIOTEMPORAL_FIELDS, parsed)
    })


def read_canonical_csv(
    text: str, kind: CanonicalKind | str, separator: str = ","
) -> TimeSeriesTable | GaitEvents | SpatiotemporalRow:
    """Parse canonical CSV text for the given kind.

    ``separator`` covers the delimited-text import path (e.g. tab-separated
    exports); the canonical on-disk dialect is always comma.
    """
    kind = CanonicalKind(kind)
    rows = _split_lines(text, separator)
    if not rows or rows == [[""]]:
        raise SchemaMismatch("empty input")
    if kind == CanonicalKind.EVENTS:
        return _read_events(rows)
    if kind == CanonicalKind.SPATIOTEMPORAL:
        return _read_spatiotemporal(rows)
    return _read_timeseries(rows, kind)


_NAME_OK = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_.\-]*$")


def _check_table_kind(table: TimeSeriesTable, kind: CanonicalKind) -> None:
    names = table.names
    if kind == CanonicalKind.GRF and names != GRF_CHANNELS:
        raise SchemaMismatch(f"grf table must have channels {GRF_CHANNELS}, got {names}")
    if kind == CanonicalKind.JOINT_ANGLES and names != JOINT_ANGLE_CHANNELS:
        raise SchemaMismatch(
            f"joint_angles table must have channels {JOINT_ANGLE_CHANNELS}, got {names}"
        )
    if kind == CanonicalKind.MOTION:
        if len(names) == 0 or len(names) % 3 != 0:
            raise SchemaMismatch("motion table needs <marker>_x/_y/_z channel triplets")
        for name in names:
            if not _NAME_OK.match(name):
                raise SchemaMismatch(f"channel name {name!r} not writable without quoting")


def write_canonical_csv(data, kind: CanonicalKind | str) -> str:
    """Serialize to canonical CSV; inverse of :func:`read_canonical_csv`."""
    kind = CanonicalKind(kind)
    if kind == CanonicalKind.EVENTS:
        if not isinstance(data, GaitEvents):
            raise SchemaMismatch(f"kind events needs GaitEvents, got {type(data).__name__}")
        lines = [",".join(EVENTS_HEADER)]
        lines += [f"{e.foot},{e.kind},{_fmt(e.time)}" for e in data]
        return "\n".join(lines) + "\n"
    if kind == CanonicalKind.SPATIOTEMPORAL:
        if not isinstance(data, SpatiotemporalRow):
            raise SchemaMismatch(
                f"kind spatiotemporal needs SpatiotemporalRow, got {type(data).__name__}"
            )
        values = data.as_dict()
        row = ",".join(
            "" if values[n] is None else _fmt(values[n]) for n in SPATIOTEMPORAL_FIELDS
        )
        return ",".join(SPATIOTEMPORAL_FIELDS) + "\n" + row + "\n"

    if not isinstance(data, TimeSeriesTable):
        raise SchemaMismatch(f"kind {kind.value} needs TimeSeriesTable, got {type(data).__name__}")
    _check_table_kind(data, kind)
    times = data.times()
    lines = [",".join(("time",) + data.names)]
    for i in range(data.n_samples):
        fields = [_fmt(times[i])]
        fields += [_fmt(v) for v in data.values[i]]
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"
