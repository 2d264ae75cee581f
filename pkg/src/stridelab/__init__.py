"""Gait analytics toolkit.

Harmonizes motion-capture data (C3D/TRC/MAT/CSV) into canonical tables,
prepares signals (filtering, imputation, resampling), extracts gait events
and spatiotemporal parameters, manages trials in a hierarchical store, and
serves chart-ready ensemble statistics over HTTP.
"""

from .errors import DataWarning, GaitError
from .features import (
    EventDetectConfig,
    cycle_details,
    detect_gait_events,
    discard_partial_contacts,
    joint_angles_from_motion,
    normalize_gait_cycle,
    spatiotemporal_params,
)
from .formats import (
    CanonicalKind,
    RawCapture,
    parse_c3d,
    parse_mat,
    parse_trc,
    read_canonical_csv,
    write_c3d,
    write_canonical_csv,
)
from .model import (
    Channel,
    GaitEvent,
    GaitEvents,
    MarkerSet,
    NormalizedCurve,
    SpatiotemporalRow,
    TimeSeriesTable,
    TrialRef,
    Unit,
    validate_table,
)
from .prep import FilterSpec, impute_chained, impute_linear, lowpass_filter, resample
from .stats import (
    BoxStats,
    EnsembleSummary,
    RadarSummary,
    box_stats,
    ensemble_mean_ci,
    highlight_range_filter,
    radar_summary,
)
from .store import TrialBundle, list_hierarchy, load_trial, save_trial
from .synth import GaitProfile, SyntheticTrial, generate_trial

__version__ = "0.1.0"

__all__ = [
    "BoxStats",
    "CanonicalKind",
    "Channel",
    "DataWarning",
    "EnsembleSummary",
    "EventDetectConfig",
    "FilterSpec",
    "GaitError",
    "GaitEvent",
    "GaitEvents",
    "GaitProfile",
    "MarkerSet",
    "NormalizedCurve",
    "RadarSummary",
    "RawCapture",
    "SpatiotemporalRow",
    "SyntheticTrial",
    "TimeSeriesTable",
    "TrialBundle",
    "TrialRef",
    "Unit",
    "box_stats",
    "cycle_details",
    "detect_gait_events",
    "discard_partial_contacts",
    "ensemble_mean_ci",
    "generate_trial",
    "highlight_range_filter",
    "impute_chained",
    "impute_linear",
    "joint_angles_from_motion",
    "list_hierarchy",
    "load_trial",
    "lowpass_filter",
    "normalize_gait_cycle",
    "parse_c3d",
    "parse_mat",
    "parse_trc",
    "radar_summary",
    "read_canonical_csv",
    "resample",
    "save_trial",
    "spatiotemporal_params",
    "validate_table",
    "write_c3d",
    "write_canonical_csv",
]
