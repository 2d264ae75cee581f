"""C3D motion-capture file parser and writer.

Supported dialect: Intel processor type (84).  Point data may be stored as
float32 or as int16 scaled by POINT:SCALE; the writer always emits float32
storage with Intel byte order.  Every read is bounds-checked, so arbitrary
input bytes produce a typed error instead of an overread.

Layout: 512-byte blocks.  Block 1 is the header, the parameter section
starts at the block named by header byte 1 (1-based), and frame data starts
at the block named by the header's data-start word.  Marker coordinates are
scaled to meters using POINT:SCALE and POINT:UNITS; analog channels are
scaled via ANALOG:GEN_SCALE, ANALOG:SCALE and ANALOG:OFFSET.
"""

from __future__ import annotations

import math
import struct
import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import (
    CapacityExceeded,
    DataWarning,
    MagicMismatch,
    ParameterCorrupt,
    TruncatedData,
)
from ..errors import UnsupportedProcessor
from ..model import Channel, TimeSeriesTable, Unit

BLOCK = 512
PROCESSOR_INTEL = 84

_UNIT_FROM_TEXT = {u.value: u for u in Unit}
_POINT_UNIT_SCALE = {"m": 1.0, "mm": 0.001, "cm": 0.01}


@dataclass(frozen=True)
class RawCapture:
    """Marker trajectories plus synchronized analog channels from one capture.

    ``analog.sample_rate`` is an integer multiple of ``points.sample_rate``
    (the per-frame analog subsample factor).
    """

    points: TimeSeriesTable
    analog: TimeSeriesTable
    point_labels: tuple[str, ...]
    analog_labels: tuple[str, ...]

    def analog_per_frame(self) -> int:
        factor = self.analog.sample_rate / self.points.sample_rate
        return max(int(round(factor)), 1)


def grf_from_analog(capture: "RawCapture") -> TimeSeriesTable:
    """Pick the six canonical force channels out of a capture's analog table."""
    from ..errors import SchemaMismatch
    from .canonical import GRF_CHANNELS

    analog = capture.analog
    names = {c.name.lower(): c.name for c in analog.channels}
    missing = [n for n in GRF_CHANNELS if n not in names]
    if missing:
        raise SchemaMismatch(
            f"analog labels lack force channels {missing}; have {list(analog.names)}"
        )
    cols = np.column_stack([analog.column(names[n]) for n in GRF_CHANNELS])
    return TimeSeriesTable(
        sample_rate=analog.sample_rate,
        start_time=analog.start_time,
        channels=tuple(Channel(n, Unit.NEWTONS) for n in GRF_CHANNELS),
        values=cols,
    )


class _Cursor:
    """Bounds-checked little-endian reader over immutable bytes."""

    def __init__(self, data: bytes):
        self.data = data

    def require(self, pos: int, count: int, context: str) -> None:
        if pos < 0 or count < 0 or pos + count > len(self.data):
            raise TruncatedData(f"{context}: need bytes [{pos}, {pos + count}) of {len(self.data)}")

    def u8(self, pos: int, context: str = "u8") -> int:
        self.require(pos, 1, context)
        return self.data[pos]

    def i8(self, pos: int, context: str = "i8") -> int:
        v = self.u8(pos, context)
        return v - 256 if v >= 128 else v

    def u16(self, pos: int, context: str = "u16") -> int:
        self.require(pos, 2, context)
        return struct.unpack_from("<H", self.data, pos)[0]

    def i16(self, pos: int, context: str = "i16") -> int:
        self.require(pos, 2, context)
        return struct.unpack_from("<h", self.data, pos)[0]

    def f32(self, pos: int, context: str = "f32") -> float:
        self.require(pos, 4, context)
        return struct.unpack_from("<f", self.data, pos)[0]

    def raw(self, pos: int, count: int, context: str = "raw") -> bytes:
        self.require(pos, count, context)
        return self.data[pos : pos + count]

    def text(self, pos: int, count: int, context: str = "text") -> str:
        return self.raw(pos, count, context).decode("ascii", errors="replace")


@dataclass
class _Param:
    dims: tuple[int, ...]
    values: list  # flat, column-major over dims


_TYPE_SIZE = {-1: 1, 1: 1, 2: 2, 4: 4}


def _walk_parameters(cur: _Cursor, start: int) -> dict[str, _Param]:
    """Walk the parameter records into a {GROUP:PARAM: values} map."""
    groups: dict[int, str] = {}
    params: dict[str, _Param] = {}
    pending: list[tuple[int, str, _Param]] = []  # group ids may be defined after use
    pos = start + 4
    for _ in range(10000):
        if pos >= len(cur.data):
            break  # section runs to end of file
        n_chars_raw = cur.i8(pos, "parameter name length")
        n_chars = abs(n_chars_raw)
        if n_chars == 0:
            break
        group_id = cur.i8(pos + 1, "parameter group id")
        name = cur.text(pos + 2, n_chars, "parameter name").strip().upper()
        offset_pos = pos + 2 + n_chars
        offset = cur.i16(offset_pos, "parameter offset")
        if offset < 0:
            raise ParameterCorrupt(f"negative record offset at byte {offset_pos}")
        if group_id < 0:
            # group record: description only
            desc_len = cur.u8(offset_pos + 2, "group description length")
            cur.require(offset_pos + 3, desc_len, "group description")
            groups[-group_id] = name
        elif group_id > 0:
            p = offset_pos + 2
            elem_type = cur.i8(p, "parameter element type")
            if elem_type not in _TYPE_SIZE:
                raise ParameterCorrupt(f"unknown element type {elem_type} for {name}")
            n_dims = cur.u8(p + 1, "parameter dimension count")
            if n_dims > 7:
                raise ParameterCorrupt(f"{name}: {n_dims} dimensions exceeds 7")
            dims = tuple(cur.u8(p + 2 + d, "parameter dimension") for d in range(n_dims))
            count = 1
            for d in dims:
                count *= d
            size = _TYPE_SIZE[elem_type]
            data_pos = p + 2 + n_dims
            cur.require(data_pos, count * size, f"{name} data")
            if elem_type == -1:
                values = list(cur.raw(data_pos, count, name))
            elif elem_type == 1:
                values = [cur.i8(data_pos + i, name) for i in range(count)]
            elif elem_type == 2:
                values = [cur.i16(data_pos + 2 * i, name) for i in range(count)]
            else:
                values = [cur.f32(data_pos + 4 * i, name) for i in range(count)]
            param = _Param(dims, values)
            if elem_type == -1:
                param.values = bytes(values)  # keep chars raw for string decode
            pending.append((group_id, name, param))
        else:
            raise ParameterCorrupt(f"group id 0 at byte {pos + 1}")
        if offset == 0:
            break
        nxt = offset_pos + offset
        if nxt <= pos:
            raise ParameterCorrupt(f"parameter walk does not advance at byte {pos}")
        pos = nxt
    else:
        raise ParameterCorrupt("parameter walk exceeds 10000 records")

    for group_id, name, param in pending:
        group = groups.get(group_id, f"G{group_id}")
        params[f"{group}:{name}"] = param
    return params


def _param_scalar(params, key, default=None):
    p = params.get(key)
    if p is None or len(p.values) == 0:
        return default
    v = p.values[0] if not isinstance(p.values, bytes) else p.values[0]
    return v


def _param_floats(params, key) -> list[float]:
    p = params.get(key)
    if p is None:
        return []
    if isinstance(p.values, bytes):
        return []
    return [float(v) for v in p.values]


def _param_strings(params, key) -> list[str]:
    """Decode a char matrix parameter (dims [width, count]) to strings."""
    p = params.get(key)
    if p is None or not isinstance(p.values, bytes):
        return []
    if len(p.dims) == 0:
        return [p.values.decode("ascii", errors="replace").strip()]
    width = p.dims[0]
    if width == 0:
        return []
    count = len(p.values) // width
    return [
        p.values[i * width : (i + 1) * width].decode("ascii", errors="replace").strip()
        for i in range(count)
    ]


def _dedupe(names: list[str], what: str) -> list[str]:
    seen: dict[str, int] = {}
    out = []
    for name in names:
        if name in seen:
            seen[name] += 1
            fixed = f"{name}_{seen[name]}"
            warnings.warn(f"duplicate {what} label {name!r} renamed to {fixed!r}", DataWarning)
            out.append(fixed)
            seen[fixed] = 1
        else:
            seen[name] = 1
            out.append(name)
    return out


def parse_c3d(data: bytes) -> RawCapture:
    """Parse C3D bytes into point and analog tables.

    Raises MagicMismatch, UnsupportedProcessor, TruncatedData, or
    ParameterCorrupt; never reads past the input buffer.
    """
    if len(data) < BLOCK:
        raise TruncatedData(f"C3D needs at least {BLOCK} bytes, got {len(data)}")
    cur = _Cursor(data)
    if cur.u8(1) != 0x50:
        raise MagicMismatch(f"byte 2 is 0x{cur.u8(1):02x}, expected 0x50")

    param_block = cur.u8(0)
    if param_block < 1:
        raise ParameterCorrupt(f"parameter section block {param_block} out of range")
    param_start = (param_block - 1) * BLOCK
    cur.require(param_start, 4, "parameter section start")
    processor = cur.u8(param_start + 3)
    if processor != PROCESSOR_INTEL:
        raise UnsupportedProcessor(f"processor type {processor}, only 84 (Intel) supported")

    n_points = cur.u16(2)
    analog_per_pointframe = cur.u16(4)
    first_frame = cur.u16(6)
    last_frame = cur.u16(8)
    header_scale = cur.f32(12)
    data_block = cur.u16(16)
    analog_subsamples = cur.u16(18)
    header_rate = cur.f32(20)

    try:
        params = _walk_parameters(cur, param_start)
    except TruncatedData as exc:
        raise ParameterCorrupt(f"parameter block walk escapes file bounds: {exc}") from None

    point_scale = float(_param_scalar(params, "POINT:SCALE", header_scale) or header_scale)
    rate = float(_param_scalar(params, "POINT:RATE", header_rate) or header_rate)
    if not math.isfinite(rate) or rate <= 0:
        raise ParameterCorrupt(f"point frame rate {rate} invalid")
    n_frames = last_frame - first_frame + 1
    if n_frames < 0:
        raise ParameterCorrupt(f"frame range {first_frame}..{last_frame} invalid")
    if analog_subsamples < 1:
        analog_subsamples = 1
    if analog_per_pointframe % analog_subsamples != 0:
        raise ParameterCorrupt(
            f"analog count {analog_per_pointframe} not divisible by "
            f"{analog_subsamples} subsamples"
        )
    n_analog = analog_per_pointframe // analog_subsamples

    float_storage = point_scale < 0
    word = 4 if float_storage else 2
    values_per_frame = 4 * n_points + analog_per_pointframe
    if data_block < 1:
        raise ParameterCorrupt(f"data section block {data_block} out of range")
    data_start = (data_block - 1) * BLOCK
    need = n_frames * values_per_frame * word
    if data_start > len(data) or data_start + need > len(data):
        raise TruncatedData(
            f"declared {n_frames} frames need {need} bytes at {data_start}, "
            f"file has {len(data)}"
        )

    dtype = "<f4" if float_storage else "<i2"
    count = n_frames * values_per_frame
    if count:
        raw = np.frombuffer(data, dtype=dtype, count=count, offset=data_start)
        raw = raw.reshape(n_frames, values_per_frame).astype(np.float64)
    else:
        raw = np.zeros((n_frames, values_per_frame))

    point_unit_text = (_param_strings(params, "POINT:UNITS") or ["m"])[0] or "m"
    to_meters = _POINT_UNIT_SCALE.get(point_unit_text)
    if to_meters is None:
        warnings.warn(f"unknown POINT:UNITS {point_unit_text!r}; treating as meters", DataWarning)
        to_meters = 1.0

    point_block = raw[:, : 4 * n_points].reshape(n_frames, n_points, 4)
    coords = point_block[:, :, :3]
    residuals = point_block[:, :, 3]
    if not float_storage:
        coords = coords * abs(point_scale)
    coords = coords * to_meters
    coords = np.where(residuals[:, :, None] < 0, np.nan, coords)

    point_labels = _param_strings(params, "POINT:LABELS")[:n_points]
    if len(point_labels) < n_points:
        point_labels += [f"pt{i + 1}" for i in range(len(point_labels), n_points)]
    point_labels = _dedupe([l if l else f"pt{i + 1}" for i, l in enumerate(point_labels)], "point")

    analog_block = raw[:, 4 * n_points :].reshape(n_frames * analog_subsamples, n_analog)
    gen_scale = float(_param_scalar(params, "ANALOG:GEN_SCALE", 1.0) or 1.0)
    scales = _param_floats(params, "ANALOG:SCALE")
    offsets = _param_floats(params, "ANALOG:OFFSET")
    scales = (scales + [1.0] * n_analog)[:n_analog]
    offsets = (offsets + [0.0] * n_analog)[:n_analog]
    analog_values = (analog_block - np.array(offsets)) * np.array(scales) * gen_scale

    analog_labels = _param_strings(params, "ANALOG:LABELS")[:n_analog]
    if len(analog_labels) < n_analog:
        analog_labels += [f"an{i + 1}" for i in range(len(analog_labels), n_analog)]
    analog_labels = _dedupe(
        [l if l else f"an{i + 1}" for i, l in enumerate(analog_labels)], "analog"
    )

    unit_texts = _param_strings(params, "ANALOG:UNITS")
    analog_units = []
    for i in range(n_analog):
        text = unit_texts[i] if i < len(unit_texts) else "V"
        unit = _UNIT_FROM_TEXT.get(text)
        if unit is None:
            warnings.warn(f"unknown analog unit {text!r}; importing as unitless", DataWarning)
            unit = Unit.UNITLESS
        analog_units.append(unit)

    start_time = (first_frame - 1) / rate
    point_channels = tuple(
        Channel(f"{label}_{axis}", Unit.METERS)
        for label in point_labels
        for axis in ("x", "y", "z")
    )
    points = TimeSeriesTable(
        sample_rate=rate,
        start_time=start_time,
        channels=point_channels,
        values=coords.reshape(n_frames, 3 * n_points),
    )
    analog = TimeSeriesTable(
        sample_rate=rate * analog_subsamples,
        start_time=start_time,
        channels=tuple(Channel(n, u) for n, u in zip(analog_labels, analog_units)),
        values=analog_values,
    )
    return RawCapture(points, analog, tuple(point_labels), tuple(analog_labels))


# --- writer ----------------------------------------------------------------


def _char_matrix(strings: list[str]) -> tuple[tuple[int, ...], bytes]:
    width = max((len(s) for s in strings), default=0)
    width = max(width, 1) if strings else 0
    payload = b"".join(s.ljust(width).encode("ascii") for s in strings)
    return (width, len(strings)), payload


def _param_record(name: str, group_id: int, elem_type: int, dims: tuple[int, ...],
                  payload: bytes, last: bool = False) -> bytes:
    head = struct.pack("<bb", len(name), group_id) + name.encode("ascii")
    body = struct.pack("<bB", elem_type, len(dims)) + bytes(dims) + payload + b"\x00"
    offset = 0 if last else 2 + len(body)
    return head + struct.pack("<h", offset) + body


def _group_record(name: str, group_id: int) -> bytes:
    head = struct.pack("<bb", len(name), -group_id) + name.encode("ascii")
    body = b"\x00"
    return head + struct.pack("<h", 2 + len(body)) + body


def _f32(value: float) -> bytes:
    return struct.pack("<f", value)


def _i16(value: int) -> bytes:
    return struct.pack("<h", value)


def write_c3d(capture: RawCapture) -> bytes:
    """Emit an Intel, float32-storage C3D that :func:`parse_c3d` inverts.

    Limits: at most 65535 frames and 255 analog channels (16-bit header
    fields).  A point with any missing coordinate is stored as a fully
    invalid point (negative residual), so it reads back as all-missing.
    """
    points, analog = capture.points, capture.analog
    n_frames = points.n_samples
    n_points = points.n_channels // 3
    if points.n_channels % 3 != 0:
        raise CapacityExceeded("points table must have x/y/z channel triplets")
    n_analog = analog.n_channels
    apf = capture.analog_per_frame()
    if n_frames > 65535:
        raise CapacityExceeded(f"{n_frames} frames exceeds the 65535 16-bit header limit")
    if n_points > 65535:
        raise CapacityExceeded(f"{n_points} markers exceeds the 65535 16-bit header limit")
    if n_analog > 255:
        raise CapacityExceeded(f"{n_analog} analog channels exceeds 255")
    if n_analog and analog.n_samples != n_frames * apf:
        raise CapacityExceeded(
            f"analog rows {analog.n_samples} must be frames*subsamples = {n_frames * apf}"
        )
    rate = float(points.sample_rate)
    first_frame = int(round(points.start_time * rate)) + 1
    if first_frame < 1 or first_frame > 65535:
        raise CapacityExceeded(f"start_time {points.start_time} outside frame-number range")

    point_labels = list(capture.point_labels) or [
        points.channels[i].name.rsplit("_", 1)[0] for i in range(0, points.n_channels, 3)
    ]
    analog_labels = list(capture.analog_labels) or [c.name for c in analog.channels]

    label_dims, label_payload = _char_matrix(point_labels)
    alabel_dims, alabel_payload = _char_matrix(analog_labels)
    aunit_strings = [c.unit.value for c in analog.channels]
    aunit_dims, aunit_payload = _char_matrix(aunit_strings)

    records = [
        _group_record("POINT", 1),
        _group_record("ANALOG", 2),
        _param_record("USED", 1, 2, (), _i16(n_points)),
        _param_record("SCALE", 1, 4, (), _f32(-1.0)),
        _param_record("RATE", 1, 4, (), _f32(rate)),
        _param_record("FRAMES", 1, 4, (), _f32(float(n_frames))),
        _param_record("UNITS", 1, -1, (1,), b"m"),
        _param_record("LABELS", 1, -1, label_dims, label_payload),
        _param_record("USED", 2, 2, (), _i16(n_analog)),
        _param_record("GEN_SCALE", 2, 4, (), _f32(1.0)),
        _param_record("RATE", 2, 4, (), _f32(rate * apf)),
        _param_record("SCALE", 2, 4, (n_analog,) if n_analog else (0,),
                      b"".join(_f32(1.0) for _ in range(n_analog))),
        _param_record("OFFSET", 2, 2, (n_analog,) if n_analog else (0,),
                      b"".join(_i16(0) for _ in range(n_analog))),
        _param_record("LABELS", 2, -1, alabel_dims, alabel_payload),
        _param_record("UNITS", 2, -1, aunit_dims, aunit_payload, last=True),
    ]
    param_body = b"".join(records)
    param_section = struct.pack("<BBBB", 1, 0x50, 0, PROCESSOR_INTEL) + param_body
    n_param_blocks = (len(param_section) + BLOCK - 1) // BLOCK
    param_section = param_section[:2] + bytes([n_param_blocks]) + param_section[3:]
    param_section = param_section.ljust(n_param_blocks * BLOCK, b"\x00")
    data_block = 2 + n_param_blocks

    header = bytearray(BLOCK)
    header[0] = 2  # parameter section starts at block 2
    header[1] = 0x50
    struct.pack_into("<H", header, 2, n_points)
    struct.pack_into("<H", header, 4, n_analog * apf)
    struct.pack_into("<H", header, 6, first_frame)
    struct.pack_into("<H", header, 8, max(first_frame + n_frames - 1, 0))
    struct.pack_into("<H", header, 10, 0)
    struct.pack_into("<f", header, 12, -1.0)
    struct.pack_into("<H", header, 16, data_block)
    struct.pack_into("<H", header, 18, apf)
    struct.pack_into("<f", header, 20, rate)

    frame_values = np.zeros((n_frames, 4 * n_points + n_analog * apf), dtype="<f4")
    if n_points:
        coords = points.values.reshape(n_frames, n_points, 3)
        invalid = np.isnan(coords).any(axis=2)
        block = np.zeros((n_frames, n_points, 4), dtype="<f4")
        block[:, :, :3] = np.where(invalid[:, :, None], 0.0, coords)
        block[:, :, 3] = np.where(invalid, -1.0, 0.0)
        frame_values[:, : 4 * n_points] = block.reshape(n_frames, 4 * n_points)
    if n_analog:
        frame_values[:, 4 * n_points :] = analog.values.reshape(n_frames, apf * n_analog)

    data_section = frame_values.tobytes()
    n_data_blocks = max((len(data_section) + BLOCK - 1) // BLOCK, 1)
    data_section = data_section.ljust(n_data_blocks * BLOCK, b"\x00")
    return bytes(header) + param_section + data_section
