"""External capture formats and the canonical CSV family."""

from .c3d import RawCapture, parse_c3d, write_c3d
from .canonical import (
    CanonicalKind,
    GRF_CHANNELS,
    JOINT_ANGLE_CHANNELS,
    read_canonical_csv,
    write_canonical_csv,
)
from .mat import parse_mat
from .trc import parse_trc, write_trc

__all__ = [
    "CanonicalKind",
    "GRF_CHANNELS",
    "JOINT_ANGLE_CHANNELS",
    "RawCapture",
    "parse_c3d",
    "parse_mat",
    "parse_trc",
    "read_canonical_csv",
    "write_c3d",
    "write_canonical_csv",
    "write_trc",
]
