"""HTTP API serving chart-ready payloads over a trial store.

All handlers are read-only; the only mutable state is an in-memory
parsed-trial cache keyed by the trial's file stamps (name, mtime, size),
guarded by a mutex so concurrent requests stay consistent.  Statistics are
computed server-side so the frontend stays thin, and per-trial parameter
values ship with the spatiotemporal payload so brushing needs no second
round trip.  Missing values serialize as JSON null, never NaN.
"""

from __future__ import annotations

import math
import os
import re
import threading
from pathlib import Path
from typing import Literal, Union

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field

from . import stats as gstats
from .errors import (
    ChannelMissing,
    CycleOutOfRange,
    GaitError,
    InsufficientData,
    MissingEvents,
    NoVideo,
    NotFound,
    PathInvalid,
    RangeNotSatisfiable,
)
from .features import normalize_gait_cycle, spatiotemporal_params
from .formats.canonical import CanonicalKind
from .model import (
    SPATIOTEMPORAL_FIELDS,
    GaitEvents,
    MarkerSet,
    SpatiotemporalRow,
    TimeSeriesTable,
    TrialRef,
)
from .prep import impute_linear
from .stats import DEFAULT_ALPHA
from .store import TrialBundle, VIDEO_FILENAME, list_hierarchy, load_trial, trial_dir

DEFAULT_PORT = 8080

_SERIES_KINDS = {
    "motion": CanonicalKind.MOTION,
    "grf": CanonicalKind.GRF,
    "joint_angles": CanonicalKind.JOINT_ANGLES,
}

_STATUS = {
    "not_found": 404,
    "no_video": 404,
    "path_invalid": 400,
    "range_not_satisfiable": 416,
}


class TrialRefModel(BaseModel):
    group: str
    patient_id: str
    trial_id: str

    def to_ref(self) -> TrialRef:
        return TrialRef(self.group, self.patient_id, self.trial_id)


class EnsembleRequest(BaseModel):
    trials_a: list[TrialRefModel] = Field(min_length=1)
    trials_b: list[TrialRefModel] = Field(default_factory=list)
    variable: str
    side: Literal["left", "right"] = "left"
    cycle: Union[int, Literal["first", "all"]] = "first"
    points: int = Field(default=101, ge=2, le=10001)
    alpha: float = Field(default=DEFAULT_ALPHA, gt=0.0, lt=1.0)


class SpatiotemporalRequest(BaseModel):
    trials_a: list[TrialRefModel] = Field(min_length=1)
    trials_b: list[TrialRefModel] = Field(default_factory=list)


class _TrialCache:
    """Parsed-bundle cache invalidated by directory file stamps."""

    def __init__(self, root: Path):
        self.root = root
        self._lock = threading.Lock()
        self._entries: dict[str, tuple[tuple, TrialBundle]] = {}

    def _stamp(self, ref: TrialRef) -> tuple:
        directory = trial_dir(self.root, ref)
        try:
            with os.scandir(directory) as it:
                return tuple(
                    sorted((e.name, e.stat().st_mtime_ns, e.stat().st_size) for e in it)
                )
        except OSError:
            raise NotFound(f"trial {ref} not found") from None

    def get(self, ref: TrialRef) -> TrialBundle:
        stamp = self._stamp(ref)
        key = str(ref)
        with self._lock:
            hit = self._entries.get(key)
            if hit is not None and hit[0] == stamp:
                return hit[1]
        bundle = load_trial(self.root, ref)
        with self._lock:
            self._entries[key] = (stamp, bundle)
        return bundle


def resolve_variable(variable: str) -> tuple[CanonicalKind, str]:
    """Split a dotted variable path like ``grf.fx`` into (kind, base channel)."""
    m = re.fullmatch(r"([a-z_]+)\.([A-Za-z0-9_.\-]+)", variable)
    if not m or m.group(1) not in _SERIES_KINDS:
        raise ChannelMissing(
            f"variable {variable!r} must be <motion|grf|joint_angles>.<channel>"
        )
    return _SERIES_KINDS[m.group(1)], m.group(2)


def resolve_channel(table: TimeSeriesTable, base: str, side: str) -> str:
    """Find the concrete channel for a side: exact name, ``_l/_r`` suffix,
    or side inserted before the axis suffix for motion channels."""
    candidates = [base, f"{base}_{side[0]}"]
    if "_" in base:
        stem, axis = base.rsplit("_", 1)
        candidates.append(f"{stem}_{side[0]}_{axis}")
    for name in candidates:
        if table.has_channel(name):
            return name
    raise ChannelMissing(
        f"no channel for {base!r} (side {side}); tried {candidates}, "
        f"table has {', '.join(table.names)}"
    )


def _json_floats(arr: np.ndarray) -> list:
    return [None if math.isnan(v) else float(v) for v in np.asarray(arr, dtype=float)]


def _ref_json(ref: TrialRef) -> dict:
    return {"group": ref.group, "patient_id": ref.patient_id, "trial_id": ref.trial_id}


def _require_events(bundle: TrialBundle) -> GaitEvents:
    obj = bundle.files.get(CanonicalKind.EVENTS)
    if not isinstance(obj, GaitEvents):
        raise MissingEvents(f"trial {bundle.ref} has no events.csv")
    return obj


def _require_series(bundle: TrialBundle, kind: CanonicalKind) -> TimeSeriesTable:
    obj = bundle.files.get(kind)
    if not isinstance(obj, TimeSeriesTable):
        raise ChannelMissing(f"trial {bundle.ref} has no {kind.value}.csv")
    if np.isnan(obj.values).any():
        obj = impute_linear(obj)
    return obj


def build_ensemble_payload(cache: _TrialCache, req: EnsembleRequest) -> dict:
    kind, base = resolve_variable(req.variable)

    def group_payload(models: list[TrialRefModel]) -> dict | None:
        if not models:
            return None
        curves = []
        for model in models:
            ref = model.to_ref()
            bundle = cache.get(ref)
            series = _require_series(bundle, kind)
            events = _require_events(bundle)
            channel = resolve_channel(series, base, req.side)
            if req.cycle == "all":
                indices = list(range(events.n_cycles(req.side)))
                if not indices:
                    raise CycleOutOfRange(f"trial {ref} has no complete {req.side} cycle")
            else:
                indices = [0 if req.cycle == "first" else int(req.cycle)]
            for idx in indices:
                curves.append(
                    normalize_gait_cycle(
                        series, channel, events, req.side,
                        cycle_index=idx, points=req.points, source=ref,
                    )
                )
        summary = gstats.ensemble_mean_ci(curves, req.alpha)
        return {
            "n": summary.n,
            "alpha": summary.alpha,
            "mean": _json_floats(summary.mean),
            "ci_low": _json_floats(summary.ci_low),
            "ci_high": _json_floats(summary.ci_high),
            "per_trial": [
                {
                    "ref": _ref_json(c.source),
                    "side": c.side,
                    "cycle_index": c.cycle_index,
                    "variable": c.variable,
                    "values": _json_floats(c.values),
                }
                for c in summary.per_trial
            ],
        }

    return {
        "variable": req.variable,
        "side": req.side,
        "points": req.points,
        "group_a": group_payload(req.trials_a),
        "group_b": group_payload(req.trials_b),
    }


def _trial_row(cache: _TrialCache, ref: TrialRef) -> SpatiotemporalRow:
    bundle = cache.get(ref)
    row = bundle.files.get(CanonicalKind.SPATIOTEMPORAL)
    if isinstance(row, SpatiotemporalRow):
        return row
    motion = bundle.files.get(CanonicalKind.MOTION)
    events = bundle.files.get(CanonicalKind.EVENTS)
    if isinstance(motion, TimeSeriesTable) and isinstance(events, GaitEvents):
        try:
            return spatiotemporal_params(motion, MarkerSet.default(), events)
        except GaitError as exc:
            raise InsufficientData(f"trial {ref}: cannot compute parameters: {exc}") from exc
    raise InsufficientData(
        f"trial {ref} lacks spatiotemporal.csv and the motion+events inputs to compute it"
    )


def _box_json(box: gstats.BoxStats) -> dict:
    return {
        "min": box.min,
        "q1": box.q1,
        "median": box.median,
        "q3": box.q3,
        "max": box.max,
        "whisker_low": box.whisker_low,
        "whisker_high": box.whisker_high,
        "outliers": [
            {"ref": _ref_json(ref) if ref else None, "value": v} for ref, v in box.outliers
        ],
    }


def build_spatiotemporal_payload(cache: _TrialCache, req: SpatiotemporalRequest) -> dict:
    rows: dict[str, list[tuple[TrialRef, SpatiotemporalRow]]] = {"a": [], "b": []}
    for key, models in (("a", req.trials_a), ("b", req.trials_b)):
        for model in models:
            ref = model.to_ref()
            rows[key].append((ref, _trial_row(cache, ref)))

    box = {}
    for name in SPATIOTEMPORAL_FIELDS:
        per_group = {}
        for key in ("a", "b"):
            values = [
                (ref, getattr(row, name))
                for ref, row in rows[key]
                if getattr(row, name) is not None
            ]
            per_group[key] = _box_json(gstats.box_stats(values)) if values else None
        box[name] = per_group

    radar = gstats.radar_summary(
        [row for _, row in rows["a"]], [row for _, row in rows["b"]]
    )
    radar_json = [
        {
            "parameter": axis.parameter,
            "mean_a": axis.mean_a,
            "mean_b": axis.mean_b,
            "axis_min": axis.axis_min,
            "axis_max": axis.axis_max,
            "normalized_a": axis.normalized_a,
            "normalized_b": axis.normalized_b,
        }
        for axis in radar.axes
    ]
    per_trial = {
        key: [
            {
                "ref": _ref_json(ref),
                "params": {
                    name: getattr(row, name) for name in SPATIOTEMPORAL_FIELDS
                },
            }
            for ref, row in rows[key]
        ]
        for key in ("a", "b")
    }
    return {
        "parameters": list(SPATIOTEMPORAL_FIELDS),
        "box": box,
        "radar": {"axes": radar_json},
        "per_trial": per_trial,
    }


_RANGE_RE = re.compile(r"bytes=(\d*)-(\d*)$")


def resolve_range(header: str | None, size: int) -> tuple[int, int] | None:
    """Single-range header -> (start, end) inclusive, None for full body.

    Malformed headers are ignored per HTTP semantics; syntactically valid
    but unsatisfiable ranges raise RangeNotSatisfiable.
    """
    if not header:
        return None
    m = _RANGE_RE.fullmatch(header.strip())
    if not m:
        return None
    first, last = m.group(1), m.group(2)
    if first == "" and last == "":
        return None
    if first == "":  # suffix form: last N bytes
        n = int(last)
        if n == 0 or size == 0:
            raise RangeNotSatisfiable(f"suffix of {n} bytes on {size}-byte body")
        start = max(size - n, 0)
        return start, size - 1
    start = int(first)
    if start >= size:
        raise RangeNotSatisfiable(f"range starts at {start}, body has {size} bytes")
    end = min(int(last), size - 1) if last != "" else size - 1
    if end < start:
        raise RangeNotSatisfiable(f"range {start}-{end} is empty")
    return start, end


def create_app(root: Path | str, cors_origin: str = "*") -> FastAPI:
    root = Path(root)
    app = FastAPI(title="gait analytics service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[cors_origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    cache = _TrialCache(root)

    @app.exception_handler(GaitError)
    async def _gait_error(request: Request, exc: GaitError):
        status = _STATUS.get(exc.code, 422)
        headers = {}
        if isinstance(exc, RangeNotSatisfiable):
            headers["Content-Range"] = f"bytes */{getattr(exc, 'size', 0)}"
        return JSONResponse(
            status_code=status,
            content={"error": exc.code, "detail": str(exc)},
            headers=headers,
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": "bad_request", "detail": str(exc.errors())},
        )

    @app.get("/api/groups")
    def groups() -> list[str]:
        return sorted(list_hierarchy(root).keys())

    @app.get("/api/groups/{group}/patients")
    def patients(group: str) -> list[str]:
        tree = list_hierarchy(root)
        if group not in tree:
            raise NotFound(f"group {group!r} not found")
        return sorted(tree[group].keys())

    @app.get("/api/groups/{group}/patients/{pid}/trials")
    def trials(group: str, pid: str) -> list[str]:
        tree = list_hierarchy(root)
        if group not in tree:
            raise NotFound(f"group {group!r} not found")
        if pid not in tree[group]:
            raise NotFound(f"patient {pid!r} not found in group {group!r}")
        return sorted(tree[group][pid])

    @app.post("/api/ensemble")
    def ensemble(req: EnsembleRequest) -> dict:
        return build_ensemble_payload(cache, req)

    @app.post("/api/spatiotemporal")
    def spatiotemporal(req: SpatiotemporalRequest) -> dict:
        return build_spatiotemporal_payload(cache, req)

    @app.get("/api/window/{group}/{pid}/{trial}")
    def window(group: str, pid: str, trial: str, side: str = "left",
               cycle: str = "first") -> dict:
        if side not in ("left", "right"):
            raise PathInvalid(f"side must be left or right, got {side!r}")
        ref = TrialRef(group, pid, trial)
        bundle = cache.get(ref)
        events = _require_events(bundle)
        try:
            index = 0 if cycle == "first" else int(cycle)
        except ValueError:
            raise PathInvalid(f"cycle must be an index or 'first', got {cycle!r}") from None
        t0, t1 = events.cycle_span(side, index)
        return {"t_start": t0, "t_end": t1}

    @app.get("/api/video/{group}/{pid}/{trial}")
    def video(group: str, pid: str, trial: str, request: Request) -> Response:
        ref = TrialRef(group, pid, trial)
        path = trial_dir(root, ref) / VIDEO_FILENAME
        if not trial_dir(root, ref).is_dir():
            raise NotFound(f"trial {ref} not found")
        if not path.is_file():
            raise NoVideo(f"trial {ref} has no {VIDEO_FILENAME}")
        size = path.stat().st_size
        try:
            span = resolve_range(request.headers.get("range"), size)
        except RangeNotSatisfiable as exc:
            exc.size = size
            raise
        headers = {"Accept-Ranges": "bytes"}
        if span is None:
            return Response(
                content=path.read_bytes(), media_type="video/mp4", headers=headers
            )
        start, end = span
        with open(path, "rb") as fh:
            fh.seek(start)
            chunk = fh.read(end - start + 1)
        headers["Content-Range"] = f"bytes {start}-{end}/{size}"
        return Response(
            content=chunk, status_code=206, media_type="video/mp4", headers=headers
        )

    return app


def serve(root: Path | str, port: int = DEFAULT_PORT, cors_origin: str = "*",
          host: str = "127.0.0.1") -> None:
    import uvicorn

    uvicorn.run(create_app(root, cors_origin), host=host, port=port, log_level="warning")
