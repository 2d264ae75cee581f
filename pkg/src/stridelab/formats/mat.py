"""Level-5 MAT-file parser (numeric 2-D real matrices only).

Top-level double/single matrices are returned; struct, cell, sparse,
character, complex and higher-dimensional variables are skipped with a
warning.  Deflate-compressed elements are transparently decompressed.
"""

from __future__ import annotations

import struct
import warnings
import zlib

import numpy as np

from ..errors import DataWarning, ElementCorrupt, EndianUnsupported, NotLevel5

HEADER_LEN = 128

# Cap on a decompressed element; anything larger is treated as corrupt
# rather than ballooning memory.
MAX_DECOMPRESSED = 256 * 1024 * 1024

# Storage (mi*) data types by tag id; the stored type may be narrower than
# the matrix class, so all real numeric storages convert to float64.
_STORAGE_DTYPES = {
    1: "<i1",
    2: "<u1",
    3: "<i2",
    4: "<u2",
    5: "<i4",
    6: "<u4",
    7: "<f4",
    9: "<f8",
    12: "<i8",
    13: "<u8",
}

_MI_COMPRESSED = 15
_MI_MATRIX = 14
_MI_INT32 = 5
_MI_UINT32 = 6

_CLASS_NAMES = {
    1: "cell",
    2: "struct",
    3: "object",
    4: "char",
    5: "sparse",
    6: "double",
    7: "single",
    8: "int8",
    9: "uint8",
    10: "int16",
    11: "uint16",
    12: "int32",
    13: "uint32",
    14: "int64",
    15: "uint64",
}


def _read_tag(buf: bytes, pos: int) -> tuple[int, int, int, int]:
    """Returns (type, nbytes, data_pos, next_pos) with 8-byte alignment."""
    if pos + 8 > len(buf):
        raise ElementCorrupt(f"element tag at byte {pos} exceeds buffer of {len(buf)}")
    mtype, msize = struct.unpack_from("<II", buf, pos)
    if mtype >> 16:
        # small data element: size and type packed into one word
        nbytes = mtype >> 16
        mtype &= 0xFFFF
        if nbytes > 4:
            raise ElementCorrupt(f"small element at byte {pos} claims {nbytes} bytes")
        return mtype, nbytes, pos + 4, pos + 8
    data_pos = pos + 8
    if msize > len(buf) - data_pos:
        raise ElementCorrupt(
            f"element at byte {pos} claims {msize} bytes, {len(buf) - data_pos} remain"
        )
    next_pos = data_pos + msize
    next_pos += (8 - next_pos % 8) % 8
    return mtype, msize, data_pos, next_pos


def _read_subelement(buf: bytes, pos: int, end: int) -> tuple[int, bytes, int]:
    mtype, nbytes, data_pos, next_pos = _read_tag(buf, pos)
    if data_pos + nbytes > end:
        raise ElementCorrupt(f"subelement at byte {pos} escapes its matrix element")
    return mtype, buf[data_pos : data_pos + nbytes], min(next_pos, end)


def _parse_matrix(buf: bytes, pos: int, end: int) -> tuple[str, np.ndarray | None, str]:
    """Returns (name, matrix-or-None, reason when skipped)."""
    mtype, payload, pos = _read_subelement(buf, pos, end)
    if mtype != _MI_UINT32 or len(payload) < 8:
        raise ElementCorrupt("matrix element lacks array-flags subelement")
    flags = struct.unpack_from("<I", payload, 0)[0]
    array_class = flags & 0xFF
    is_complex = bool(flags & 0x0800)

    mtype, payload, pos = _read_subelement(buf, pos, end)
    if mtype != _MI_INT32 or len(payload) % 4:
        raise ElementCorrupt("matrix element lacks dimensions subelement")
    dims = struct.unpack_from(f"<{len(payload) // 4}i", payload, 0)

    mtype, payload, pos = _read_subelement(buf, pos, end)
    name = payload.decode("ascii", errors="replace").strip("\x00").strip()

    class_name = _CLASS_NAMES.get(array_class, f"class{array_class}")
    if array_class not in (6, 7):
        return name, None, f"{class_name} variable"
    if is_complex:
        return name, None, "complex matrix"
    if len(dims) != 2:
        return name, None, f"{len(dims)}-D array"

    mtype, payload, pos = _read_subelement(buf, pos, end)
    dtype = _STORAGE_DTYPES.get(mtype)
    if dtype is None:
        raise ElementCorrupt(f"matrix {name!r} stores unsupported data type {mtype}")
    itemsize = np.dtype(dtype).itemsize
    if len(payload) % itemsize:
        raise ElementCorrupt(
            f"matrix {name!r} data length {len(payload)} not a multiple of {itemsize}"
        )
    flat = np.frombuffer(payload, dtype=dtype)
    n_expect = dims[0] * dims[1]
    if n_expect < 0 or len(flat) != n_expect:
        raise ElementCorrupt(
            f"matrix {name!r} declares {dims[0]}x{dims[1]} but stores {len(flat)} values"
        )
    matrix = flat.astype(np.float64).reshape(dims, order="F")
    return name, matrix, ""


def matrix_to_table(matrix: np.ndarray, kind, rate: float | None = None):
    """Interpret a numeric matrix as a canonical time-series table.

    Accepts ``n_channels`` value columns (rate required) or a leading time
    column; transposed matrices are flipped when the shape only fits that
    way.  Supports the fixed-channel kinds (grf, joint_angles).
    """
    from ..errors import SchemaMismatch
    from ..model import Channel, TimeSeriesTable, Unit
    from .canonical import CanonicalKind, GRF_CHANNELS, JOINT_ANGLE_CHANNELS

    kind = CanonicalKind(kind)
    if kind == CanonicalKind.GRF:
        names, unit = GRF_CHANNELS, Unit.NEWTONS
    elif kind == CanonicalKind.JOINT_ANGLES:
        names, unit = JOINT_ANGLE_CHANNELS, Unit.DEGREES
    else:
        raise SchemaMismatch("matrix conversion supports kind grf or joint_angles only")
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise SchemaMismatch(f"need a 2-D matrix, got shape {matrix.shape}")
    n = len(names)
    if matrix.shape[1] not in (n, n + 1) and matrix.shape[0] in (n, n + 1):
        matrix = matrix.T
    channels = tuple(Channel(name, unit) for name in names)
    if matrix.shape[1] == n + 1:  # first column is time
        times = matrix[:, 0]
        dts = np.diff(times)
        if len(dts) == 0 or np.any(dts <= 0):
            raise SchemaMismatch("matrix time column is not strictly increasing")
        return TimeSeriesTable(
            sample_rate=1.0 / float(np.median(dts)),
            start_time=float(times[0]),
            channels=channels,
            values=matrix[:, 1:],
        )
    if matrix.shape[1] == n:
        if rate is None:
            raise SchemaMismatch(f"matrix has {n} value columns and no time column; a rate is required")
        return TimeSeriesTable(sample_rate=float(rate), channels=channels, values=matrix)
    raise SchemaMismatch(f"matrix shape {matrix.shape} does not fit {kind.value} ({n} channels)")


def parse_mat(data: bytes) -> list[tuple[str, np.ndarray]]:
    """Parse Level-5 MAT bytes into (name, 2-D float64 matrix) pairs."""
    if len(data) < HEADER_LEN:
        raise NotLevel5(f"MAT header needs {HEADER_LEN} bytes, got {len(data)}")
    text = data[:116].decode("ascii", errors="replace")
    if "MATLAB 5.0" not in text:
        raise NotLevel5("header text lacks 'MATLAB 5.0'")
    endian = data[126:128]
    if endian != b"IM":
        raise EndianUnsupported(f"endian indicator {endian!r}, expected b'IM'")

    out: list[tuple[str, np.ndarray]] = []
    pos = HEADER_LEN
    while pos < len(data):
        mtype, nbytes, data_pos, next_pos = _read_tag(data, pos)
        payload = data[data_pos : data_pos + nbytes]
        if mtype == _MI_COMPRESSED:
            try:
                decomp = zlib.decompressobj()
                inner = decomp.decompress(payload, MAX_DECOMPRESSED)
                if decomp.unconsumed_tail:
                    raise ElementCorrupt(f"compressed element at byte {pos} exceeds size cap")
            except zlib.error as exc:
                raise ElementCorrupt(f"compressed element at byte {pos}: {exc}") from None
            itype, insize, idata, _ = _read_tag(inner, 0)
            if itype == _MI_MATRIX:
                name, matrix, reason = _parse_matrix(inner, idata, idata + insize)
                if matrix is None:
                    warnings.warn(f"skipping variable {name!r}: {reason}", DataWarning)
                else:
                    out.append((name, matrix))
            else:
                warnings.warn(f"skipping non-matrix element type {itype}", DataWarning)
        elif mtype == _MI_MATRIX:
            name, matrix, reason = _parse_matrix(data, data_pos, data_pos + nbytes)
            if matrix is None:
                warnings.warn(f"skipping variable {name!r}: {reason}", DataWarning)
            else:
                out.append((name, matrix))
        else:
            warnings.warn(f"skipping non-matrix element type {mtype}", DataWarning)
        if next_pos <= pos:
            raise ElementCorrupt(f"element walk does not advance at byte {pos}")
        pos = next_pos
    return out
