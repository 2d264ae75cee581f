"""TRC (tab-separated marker trajectory) parser.

The standard layout is a 5-line header followed by one row per frame:

    PathFileType <tab> 4 <tab> (X/Y/Z) <tab> name
    DataRate CameraRate NumFrames NumMarkers Units ...
    <values for the line above>
    Frame# Time <Marker1> <tab> <tab> <Marker2> ...
    <tab> <tab> X1 Y1 Z1 X2 Y2 Z2 ...
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from ..errors import DataWarning, HeaderMalformed, MarkerCountMismatch, NonUniformTime
from ..model import Channel, TimeSeriesTable, Unit

# Frame times may deviate from the declared 1/DataRate grid by at most this.
TIME_TOL_S = 1e-6

_UNIT_SCALE = {"m": 1.0, "mm": 0.001}


def parse_trc(text: str, separator: str = "\t") -> TimeSeriesTable:
    """Parse TRC text into a motion table with ``<marker>_x/_y/_z`` channels.

    Coordinates are converted to meters when the header declares mm; blank
    coordinate cells become missing values.
    """
    lines = text.split("\n")
    while lines and lines[-1].strip() == "":
        lines.pop()
    if len(lines) < 6:
        raise HeaderMalformed(f"TRC needs at least 6 lines, got {len(lines)}")

    field_names = [f.strip() for f in lines[1].rstrip("\r").split(separator)]
    field_values = [f.strip() for f in lines[2].rstrip("\r").split(separator)]
    header = dict(zip(field_names, field_values))
    try:
        rate = float(header["DataRate"])
        n_frames_decl = int(float(header["NumFrames"]))
        n_markers_decl = int(float(header["NumMarkers"]))
        units = header["Units"]
    except (KeyError, ValueError) as exc:
        raise HeaderMalformed(f"TRC header line 2/3 malformed: {exc}") from None
    if rate <= 0:
        raise HeaderMalformed(f"DataRate must be positive, got {rate}")

    scale = _UNIT_SCALE.get(units)
    if scale is None:
        warnings.warn(f"unknown TRC units {units!r}; importing values unscaled", DataWarning)
        scale = 1.0

    marker_cells = lines[3].rstrip("\r").split(separator)[2:]
    markers = [m.strip() for m in marker_cells if m.strip()]

    data_rows = []
    for line in lines[5:]:
        if line.strip() == "":
            continue  # some exporters leave a blank line after the header
        data_rows.append(line.rstrip("\r").split(separator))
    if not data_rows:
        raise HeaderMalformed("TRC has no data rows")

    n_coord_cols = max(len(r) for r in data_rows) - 2
    if n_coord_cols <= 0 or n_coord_cols % 3 != 0:
        raise MarkerCountMismatch(f"coordinate columns {n_coord_cols} not a multiple of 3")
    n_markers = n_coord_cols // 3
    if n_markers != n_markers_decl:
        raise MarkerCountMismatch(
            f"header declares NumMarkers={n_markers_decl} but data has {n_markers}"
        )
    if len(markers) != n_markers:
        # marker-name row disagrees; synthesize names rather than reject
        warnings.warn(
            f"marker-name row has {len(markers)} names for {n_markers} markers", DataWarning
        )
        markers = [f"m{i + 1}" for i in range(n_markers)]
    if n_frames_decl and n_frames_decl != len(data_rows):
        warnings.warn(
            f"NumFrames={n_frames_decl} but {len(data_rows)} data rows present", DataWarning
        )

    times = np.empty(len(data_rows))
    coords = np.full((len(data_rows), n_coord_cols), math.nan)
    for i, row in enumerate(data_rows):
        if len(row) < 2:
            raise HeaderMalformed(f"data row {i + 1} lacks frame and time fields")
        try:
            times[i] = float(row[1])
        except ValueError:
            raise HeaderMalformed(f"unparseable time {row[1]!r} on data row {i + 1}") from None
        for c in range(n_coord_cols):
            cell = row[2 + c].strip() if 2 + c < len(row) else ""
            if cell:
                try:
                    coords[i, c] = float(cell) * scale
                except ValueError:
                    raise HeaderMalformed(
                        f"unparseable coordinate {cell!r} on data row {i + 1}"
                    ) from None

    expected = times[0] + np.arange(len(times)) / rate
    worst = float(np.max(np.abs(times - expected))) if len(times) else 0.0
    if worst > TIME_TOL_S:
        raise NonUniformTime(
            f"frame times deviate from 1/DataRate grid by {worst:.3g} s (> {TIME_TOL_S} s)"
        )

    channels = tuple(
        Channel(f"{m}_{axis}", Unit.METERS) for m in markers for axis in ("x", "y", "z")
    )
    return TimeSeriesTable(
        sample_rate=rate, start_time=float(times[0]), channels=channels, values=coords
    )


def write_trc(table: TimeSeriesTable, units: str = "mm") -> str:
    """Emit TRC text for a motion table (testing aid for cross-format checks)."""
    if table.n_channels % 3 != 0:
        raise MarkerCountMismatch("motion table needs x/y/z channel triplets")
    markers = [table.channels[i].name.rsplit("_", 1)[0] for i in range(0, table.n_channels, 3)]
    scale = 1.0 / _UNIT_SCALE[units]
    lines = [
        "PathFileType\t4\t(X/Y/Z)\tcapture.trc",
        "DataRate\tCameraRate\tNumFrames\tNumMarkers\tUnits\tOrigDataRate\t"
        "OrigDataStartFrame\tOrigNumFrames",
        f"{table.sample_rate!r}\t{table.sample_rate!r}\t{table.n_samples}\t"
        f"{len(markers)}\t{units}\t{table.sample_rate!r}\t1\t{table.n_samples}",
        "Frame#\tTime\t" + "\t\t\t".join(markers) + "\t\t",
        "\t\t" + "\t".join(f"X{i + 1}\tY{i + 1}\tZ{i + 1}" for i in range(len(markers))),
    ]
    times = table.times()
    for i in range(table.n_samples):
        cells = [str(i + 1), repr(float(times[i]))]
        for v in table.values[i]:
            cells.append("" if math.isnan(v) else repr(float(v * scale)))
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"
