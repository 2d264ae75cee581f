"""Hierarchical trial repository: ``<root>/<group>/<patient>/<trial>/``.

Plain directories keep data shareable across labs (rsync/git).  Fixed file
names per trial: ``motion.csv, grf.csv, joint_angles.csv, events.csv,
spatiotemporal.csv, video.mp4, meta.json``.  A trial is the consistency
unit: saves stage into a temp directory and swap it in, so readers never
observe a half-written trial.  Writers take an advisory ``.lock`` file;
readers never block.
"""

from __future__ import annotations

import datetime
import json
import os
import shutil
import tempfile
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    CorruptFile,
    DataWarning,
    GaitError,
    IoFailure,
    NotFound,
    PathInvalid,
    ValidationFailed,
)
from .formats.canonical import CanonicalKind, read_canonical_csv, write_canonical_csv
from .model import GaitEvents, SpatiotemporalRow, TimeSeriesTable, TrialRef, validate_table

KIND_FILENAMES = {
    CanonicalKind.MOTION: "motion.csv",
    CanonicalKind.GRF: "grf.csv",
    CanonicalKind.JOINT_ANGLES: "joint_angles.csv",
    CanonicalKind.EVENTS: "events.csv",
    CanonicalKind.SPATIOTEMPORAL: "spatiotemporal.csv",
}
VIDEO_FILENAME = "video.mp4"
META_FILENAME = "meta.json"
LOCK_FILENAME = ".lock"

META_KEYS = ("body_weight_n", "session_date", "label", "notes")


@dataclass
class TrialBundle:
    """One trial's canonical files plus optional video and metadata.

    ``meta`` holds the full JSON object; unknown keys survive a rewrite.
    """

    ref: TrialRef
    files: dict[CanonicalKind, TimeSeriesTable | GaitEvents | SpatiotemporalRow] = field(
        default_factory=dict
    )
    video: Path | bytes | None = None
    meta: dict = field(default_factory=dict)

    @property
    def body_weight_n(self) -> float | None:
        v = self.meta.get("body_weight_n")
        return float(v) if v is not None else None

    def table(self, kind: CanonicalKind | str) -> TimeSeriesTable:
        kind = CanonicalKind(kind)
        obj = self.files.get(kind)
        if not isinstance(obj, TimeSeriesTable):
            raise NotFound(f"{self.ref} has no {kind.value} table")
        return obj

    def events(self) -> GaitEvents:
        obj = self.files.get(CanonicalKind.EVENTS)
        if not isinstance(obj, GaitEvents):
            raise NotFound(f"{self.ref} has no events")
        return obj


def validate_meta(meta: dict) -> list[str]:
    out = []
    if not isinstance(meta, dict):
        return [f"meta must be an object, got {type(meta).__name__}"]
    bw = meta.get("body_weight_n")
    if bw is not None and not isinstance(bw, (int, float)):
        out.append(f"body_weight_n must be a number, got {bw!r}")
    date = meta.get("session_date")
    if date is not None:
        if not isinstance(date, str):
            out.append(f"session_date must be an ISO-8601 string, got {date!r}")
        else:
            try:
                datetime.date.fromisoformat(date)
            except ValueError:
                out.append(f"session_date {date!r} is not ISO-8601")
    for key in ("label", "notes"):
        v = meta.get(key)
        if v is not None and not isinstance(v, str):
            out.append(f"{key} must be a string, got {v!r}")
    return out


def validate_bundle(bundle: TrialBundle) -> list[str]:
    out = []
    for kind, obj in bundle.files.items():
        kind = CanonicalKind(kind)
        try:
            write_canonical_csv(obj, kind)  # raises when object/kind mismatch
        except GaitError as exc:
            out.append(f"{kind.value}: {exc}")
            continue
        if isinstance(obj, TimeSeriesTable):
            out += [f"{kind.value}: {v}" for v in validate_table(obj)]
        elif isinstance(obj, GaitEvents):
            out += [f"{kind.value}: {v}" for v in obj.violations()]
        elif isinstance(obj, SpatiotemporalRow):
            out += [f"{kind.value}: {v}" for v in obj.violations()]
    out += validate_meta(bundle.meta)
    if isinstance(bundle.video, Path) and not bundle.video.is_file():
        out.append(f"video file {bundle.video} does not exist")
    return out


def trial_dir(root: Path | str, ref: TrialRef) -> Path:
    return Path(root) / ref.group / ref.patient_id / ref.trial_id


class _TrialLock:
    """Advisory single-writer lock via O_EXCL creation of ``.lock``."""

    def __init__(self, directory: Path, timeout_s: float = 5.0):
        self.path = directory / LOCK_FILENAME
        self.timeout_s = timeout_s
        self._fd: int | None = None

    def __enter__(self):
        deadline = time.monotonic() + self.timeout_s
        while True:
            try:
                self._fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
                os.write(self._fd, str(os.getpid()).encode())
                return self
            except FileExistsError:
                if time.monotonic() > deadline:
                    raise IoFailure(f"trial locked by another writer: {self.path}") from None
                time.sleep(0.05)

    def __exit__(self, *exc):
        if self._fd is not None:
            os.close(self._fd)
            self._fd = None
        try:
            self.path.unlink()
        except OSError:
            pass


def save_trial(root: Path | str, bundle: TrialBundle) -> None:
    """Atomically write a whole trial; an existing trial is replaced as a unit."""
    problems = validate_bundle(bundle)
    if problems:
        raise ValidationFailed("; ".join(problems))
    root = Path(root)
    dest = trial_dir(root, bundle.ref)
    try:
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.mkdir(exist_ok=True)
        with _TrialLock(dest):
            staging = Path(tempfile.mkdtemp(prefix=f".tmp-{bundle.ref.trial_id}-",
                                            dir=dest.parent))
            try:
                for kind, obj in bundle.files.items():
                    kind = CanonicalKind(kind)
                    text = write_canonical_csv(obj, kind)
                    (staging / KIND_FILENAMES[kind]).write_text(text, encoding="utf-8")
                if isinstance(bundle.video, bytes):
                    (staging / VIDEO_FILENAME).write_bytes(bundle.video)
                elif isinstance(bundle.video, Path):
                    shutil.copyfile(bundle.video, staging / VIDEO_FILENAME)
                if bundle.meta:
                    (staging / META_FILENAME).write_text(
                        json.dumps(bundle.meta, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8",
                    )
                old = dest.parent / f".old-{bundle.ref.trial_id}-{os.getpid()}"
                os.rename(dest, old)
                os.rename(staging, dest)
                shutil.rmtree(old)
            except Exception:
                shutil.rmtree(staging, ignore_errors=True)
                raise
    except OSError as exc:
        raise IoFailure(f"saving {bundle.ref}: {exc}") from exc


_LOADERS = {filename: kind for kind, filename in KIND_FILENAMES.items()}


def load_trial(root: Path | str, ref: TrialRef) -> TrialBundle:
    """Load every recognized file of a trial; unrecognized files warn."""
    directory = trial_dir(root, ref)
    if not directory.is_dir():
        raise NotFound(f"trial {ref} not found under {root}")
    bundle = TrialBundle(ref=ref)
    for entry in sorted(directory.iterdir()):
        name = entry.name
        if name == LOCK_FILENAME or name.startswith(".tmp-") or name.startswith(".old-"):
            continue
        if name in _LOADERS:
            kind = _LOADERS[name]
            try:
                text = entry.read_text(encoding="utf-8")
                bundle.files[kind] = read_canonical_csv(text, kind)
            except OSError as exc:
                raise IoFailure(f"reading {entry}: {exc}") from exc
            except GaitError as exc:
                raise CorruptFile(f"{name}: {exc.code}: {exc}") from exc
        elif name == VIDEO_FILENAME:
            bundle.video = entry
        elif name == META_FILENAME:
            try:
                bundle.meta = json.loads(entry.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise CorruptFile(f"{name}: {exc}") from exc
            problems = validate_meta(bundle.meta)
            if problems:
                raise CorruptFile(f"{name}: " + "; ".join(problems))
        else:
            warnings.warn(f"ignoring unrecognized file {entry}", DataWarning)
    return bundle


def _conforming_dirs(parent: Path) -> list[str]:
    out = []
    for entry in sorted(parent.iterdir()):
        if entry.name.startswith((".tmp-", ".old-")) or entry.name == LOCK_FILENAME:
            continue
        if not entry.is_dir():
            warnings.warn(f"ignoring stray file {entry}", DataWarning)
            continue
        try:
            TrialRef(entry.name, "x", "x")  # reuse the component pattern check
        except PathInvalid:
            warnings.warn(f"ignoring non-conforming directory {entry}", DataWarning)
            continue
        out.append(entry.name)
    return out


def list_hierarchy(root: Path | str) -> dict[str, dict[str, list[str]]]:
    """Group -> patient -> sorted trial ids; non-conforming names are skipped."""
    root = Path(root)
    if not root.is_dir():
        raise IoFailure(f"root {root} is not a readable directory")
    try:
        tree: dict[str, dict[str, list[str]]] = {}
        for group in _conforming_dirs(root):
            tree[group] = {}
            for patient in _conforming_dirs(root / group):
                tree[group][patient] = _conforming_dirs(root / group / patient)
        return tree
    except OSError as exc:
        raise IoFailure(f"listing {root}: {exc}") from exc
