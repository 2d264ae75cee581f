"""One-liner notebook API over the stridelab gait engine.

Every function takes and returns pandas DataFrames in canonical-CSV shape
(a ``time`` column plus channel columns; events as ``foot,event,time``) and
delegates straight to the engine; no analytical logic lives here, so
numeric outputs match the engine bitwise where representable.

Typical session::

    import stridelab_nb as nb

    grf = nb.mat_to_csv("session1.mat", kind="grf")
    events = nb.grf_to_events(grf, discard_partial=True, body_weight=800)
    angles = nb.motion_to_joint_angle(motion)
    params = nb.spatiotemporal(motion, events)
    nb.save("data", "stroke/p01/t1", grf=grf, events=events, body_weight=800)
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
import pandas as pd

from stridelab.features import (
    EventDetectConfig,
    detect_gait_events,
    discard_partial_contacts,
    joint_angles_from_motion,
    normalize_gait_cycle,
    spatiotemporal_params,
)
from stridelab.errors import SchemaMismatch
from stridelab.formats.canonical import (
    CanonicalKind,
    infer_sample_rate,
    read_canonical_csv,
    write_canonical_csv,
)
from stridelab.formats.mat import matrix_to_table, parse_mat
from stridelab.model import MarkerSet, TimeSeriesTable, TrialRef
from stridelab.prep import FilterSpec, impute_chained, impute_linear, lowpass_filter, resample
from stridelab.store import TrialBundle, list_hierarchy, load_trial, save_trial

__all__ = [
    "filter_data",
    "grf_to_events",
    "impute",
    "list_trials",
    "load",
    "mat_to_csv",
    "motion_to_joint_angle",
    "normalize",
    "resample_data",
    "save",
    "spatiotemporal",
]


def _df_to_obj(df: pd.DataFrame, kind: CanonicalKind | str):
    """Marshal a DataFrame through canonical CSV semantics."""
    return read_canonical_csv(df.to_csv(index=False), kind)


def _obj_to_df(obj, kind: CanonicalKind | str) -> pd.DataFrame:
    # round_trip parsing keeps outputs bitwise equal to the engine's values
    return pd.read_csv(io.StringIO(write_canonical_csv(obj, kind)),
                       float_precision="round_trip")


def _table_from_df(df: pd.DataFrame) -> TimeSeriesTable:
    """Any numeric DataFrame with a time column becomes a table."""
    if "time" not in df.columns:
        raise SchemaMismatch("DataFrame needs a 'time' column")
    times = df["time"].to_numpy(dtype=float)
    names = [c for c in df.columns if c != "time"]
    return TimeSeriesTable(
        sample_rate=infer_sample_rate(times),
        start_time=float(times[0]),
        channels=tuple((n, "unitless") for n in names),
        values=df[names].to_numpy(dtype=float),
    )


def _table_to_df(table: TimeSeriesTable) -> pd.DataFrame:
    data = {"time": table.times()}
    for i, name in enumerate(table.names):
        data[name] = table.values[:, i]
    return pd.DataFrame(data)


def mat_to_csv(src, kind: str = "grf", var: str | None = None,
               rate: float | None = None, out=None) -> pd.DataFrame:
    """Convert one matrix of a Level-5 MAT file to canonical-CSV shape.

    ``src`` is a path or raw bytes; ``var`` picks the matrix when the file
    holds several.  Writes the CSV to ``out`` when given.
    """
    data = src if isinstance(src, (bytes, bytearray)) else Path(src).read_bytes()
    matrices = dict(parse_mat(bytes(data)))
    if not matrices:
        raise SchemaMismatch("MAT file contains no numeric 2-D matrices")
    name = var or (next(iter(matrices)) if len(matrices) == 1 else None)
    if name is None or name not in matrices:
        raise SchemaMismatch(f"choose a matrix via var=; available: {sorted(matrices)}")
    table = matrix_to_table(matrices[name], kind, rate)
    text = write_canonical_csv(table, kind)
    if out is not None:
        Path(out).write_text(text, encoding="utf-8")
    return pd.read_csv(io.StringIO(text), float_precision="round_trip")


def motion_to_joint_angle(motion: pd.DataFrame,
                          markers: MarkerSet | None = None) -> pd.DataFrame:
    """Sagittal joint angles (degrees) from a motion DataFrame."""
    angles = joint_angles_from_motion(_table_from_df(motion), markers or MarkerSet.default())
    return _obj_to_df(angles, "joint_angles")


def grf_to_events(grf: pd.DataFrame, threshold: float = 10.0,
                  min_contact: float = 0.1, min_flight: float = 0.05,
                  discard_partial: bool = False, body_weight: float | None = None,
                  peak_fraction: float = 0.6) -> pd.DataFrame:
    """Touchdown/toe-off events from vertical force; optionally drop half
    landings whose peak force stays below ``peak_fraction * body_weight``."""
    table = _table_from_df(grf)
    cfg = EventDetectConfig(
        threshold_n=threshold, min_contact_s=min_contact, min_flight_s=min_flight,
        partial_peak_fraction=peak_fraction, body_weight_n=body_weight,
    )
    events = detect_gait_events(table, cfg)
    if discard_partial:
        events = discard_partial_contacts(events, table, cfg)
    return _obj_to_df(events, "events")


def spatiotemporal(motion: pd.DataFrame, events: pd.DataFrame,
                   markers: MarkerSet | None = None) -> pd.DataFrame:
    """Single-row DataFrame of averaged spatiotemporal parameters."""
    row = spatiotemporal_params(
        _table_from_df(motion), markers or MarkerSet.default(), _df_to_obj(events, "events")
    )
    return _obj_to_df(row, "spatiotemporal")


def impute(df: pd.DataFrame, method: str = "linear", iterations: int = 10,
           seed: int = 0) -> pd.DataFrame:
    """Fill missing cells: ``linear`` interpolation or ``chained`` regression."""
    table = _table_from_df(df)
    if method == "linear":
        out = impute_linear(table)
    elif method == "chained":
        out = impute_chained(table, iterations=iterations, seed=seed)
    else:
        raise ValueError(f"method must be linear or chained, got {method!r}")
    return _table_to_df(out)


def filter_data(df: pd.DataFrame, cutoff: float = 6.0, order: int = 4,
                zero_phase: bool = True) -> pd.DataFrame:
    """Zero-phase Butterworth low-pass over every channel column."""
    spec = FilterSpec(cutoff_hz=cutoff, order=order, zero_phase=zero_phase)
    return _table_to_df(lowpass_filter(_table_from_df(df), spec))


def resample_data(df: pd.DataFrame, rate: float) -> pd.DataFrame:
    """Linear resampling onto a uniform grid at ``rate`` Hz."""
    return _table_to_df(resample(_table_from_df(df), rate))


def normalize(series: pd.DataFrame, events: pd.DataFrame, channel: str,
              side: str = "left", cycle: int = 0, points: int = 101) -> pd.DataFrame:
    """One channel resampled over a gait cycle; columns percent,value."""
    curve = normalize_gait_cycle(
        _table_from_df(series), channel, _df_to_obj(events, "events"),
        side, cycle_index=cycle, points=points,
    )
    return pd.DataFrame({
        "percent": np.linspace(0.0, 100.0, points),
        "value": curve.values,
    })


_KIND_ARGS = ("motion", "grf", "joint_angles", "events", "spatiotemporal")


def save(root, ref: str, motion: pd.DataFrame | None = None,
         grf: pd.DataFrame | None = None, joint_angles: pd.DataFrame | None = None,
         events: pd.DataFrame | None = None, spatiotemporal: pd.DataFrame | None = None,
         video=None, meta: dict | None = None,
         body_weight: float | None = None) -> None:
    """Save a trial atomically under ``root/group/patient/trial``."""
    frames = {
        "motion": motion, "grf": grf, "joint_angles": joint_angles,
        "events": events, "spatiotemporal": spatiotemporal,
    }
    files = {
        CanonicalKind(kind): _df_to_obj(df, kind)
        for kind, df in frames.items() if df is not None
    }
    meta = dict(meta or {})
    if body_weight is not None:
        meta["body_weight_n"] = body_weight
    bundle = TrialBundle(
        ref=TrialRef.parse(ref), files=files,
        video=Path(video) if video is not None else None, meta=meta,
    )
    save_trial(root, bundle)


def load(root, ref: str) -> dict:
    """Load a trial as DataFrames plus ``meta`` dict and ``video`` path."""
    bundle = load_trial(root, TrialRef.parse(ref))
    out: dict = {"meta": bundle.meta, "video": bundle.video}
    for kind, obj in bundle.files.items():
        out[kind.value] = _obj_to_df(obj, kind)
    return out


def list_trials(root) -> dict:
    """Hierarchy of group -> patient -> trial ids under a store root."""
    return list_hierarchy(root)
