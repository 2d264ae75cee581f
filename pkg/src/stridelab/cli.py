"""Command-line surface mirroring the library's one-liner operations.

Exit codes: 0 success, 1 usage error, 2 data error, 3 I/O error.  Every
failure prints one machine-parsable line ``error: <code>: <detail>`` to
stderr.  Output files are byte-identical to calling the underlying library
operation with the same parameters.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import GaitError, SchemaMismatch
from .features import (
    EventDetectConfig,
    detect_gait_events,
    discard_partial_contacts,
    joint_angles_from_motion,
    normalize_gait_cycle,
    spatiotemporal_params,
)
from .formats.c3d import grf_from_analog, parse_c3d
from .formats.canonical import (
    CanonicalKind,
    read_canonical_csv,
    write_canonical_csv,
)
from .formats.mat import matrix_to_table, parse_mat
from .formats.trc import parse_trc
from .model import MarkerSet, TimeSeriesTable, TrialRef
from .prep import FilterSpec, impute_chained, impute_linear, lowpass_filter, resample
from .store import TrialBundle, list_hierarchy, load_trial, save_trial
from .synth import GaitProfile, generate_trial

_TABLE_KINDS = (CanonicalKind.GRF, CanonicalKind.JOINT_ANGLES, CanonicalKind.MOTION)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors must exit 1, not argparse's 2
        raise _UsageError(message)


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _read_table_auto(path: str, separator: str = ",") -> TimeSeriesTable:
    """Read a canonical time-series CSV, sniffing the kind from its header."""
    text = _read_text(path)
    last: GaitError | None = None
    for kind in _TABLE_KINDS:
        try:
            return read_canonical_csv(text, kind, separator)
        except SchemaMismatch as exc:
            last = exc
    raise SchemaMismatch(f"{path}: header matches no canonical time-series kind ({last})")


def _write_out(args_out: str, default_name: str, text: str) -> Path:
    out = Path(args_out)
    if args_out.endswith(("/", "\\")) or out.is_dir():
        out.mkdir(parents=True, exist_ok=True)
        out = out / default_name
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    return out


def _cmd_convert(args) -> int:
    suffix = Path(args.infile).suffix.lower()
    kind = CanonicalKind(args.kind)
    if suffix == ".trc":
        if kind != CanonicalKind.MOTION:
            raise SchemaMismatch("TRC files convert to --kind motion")
        data = parse_trc(_read_text(args.infile))
    elif suffix == ".c3d":
        capture = parse_c3d(Path(args.infile).read_bytes())
        if kind == CanonicalKind.MOTION:
            data = capture.points
        elif kind == CanonicalKind.GRF:
            data = grf_from_analog(capture)
        else:
            raise SchemaMismatch("C3D files convert to --kind motion or grf")
    elif suffix == ".mat":
        matrices = dict(parse_mat(Path(args.infile).read_bytes()))
        if not matrices:
            raise SchemaMismatch(f"{args.infile} contains no numeric 2-D matrices")
        name = args.var or (next(iter(matrices)) if len(matrices) == 1 else None)
        if name is None:
            raise SchemaMismatch(
                f"multiple matrices {sorted(matrices)}; choose one with --var"
            )
        if name not in matrices:
            raise SchemaMismatch(f"no matrix named {name!r}; have {sorted(matrices)}")
        data = matrix_to_table(matrices[name], kind, args.rate)
    else:  # delimited text path
        separator = args.separator or ("\t" if suffix in (".txt", ".tsv") else ",")
        data = read_canonical_csv(_read_text(args.infile), kind, separator)
    out = _write_out(args.out, f"{kind.value}.csv", write_canonical_csv(data, kind))
    print(out)
    return 0


def _marker_set(overrides: list[str] | None) -> MarkerSet:
    mapping = dict(MarkerSet.default().mapping)
    for item in overrides or []:
        try:
            key, prefix = item.split("=", 1)
            role, side = key.split(":", 1)
        except ValueError:
            raise SchemaMismatch(f"--marker must be ROLE:SIDE=PREFIX, got {item!r}") from None
        mapping[(role.upper(), side.lower())] = prefix
    return MarkerSet(mapping)


def _cmd_extract_angles(args) -> int:
    motion = _read_table_auto(args.motion)
    angles = joint_angles_from_motion(motion, _marker_set(args.marker))
    out = _write_out(args.out, "joint_angles.csv",
                     write_canonical_csv(angles, CanonicalKind.JOINT_ANGLES))
    print(out)
    return 0


def _event_config(args) -> EventDetectConfig:
    return EventDetectConfig(
        threshold_n=args.threshold,
        min_contact_s=args.min_contact,
        min_flight_s=args.min_flight,
        partial_peak_fraction=args.peak_fraction,
        body_weight_n=args.body_weight,
    )


def _cmd_extract_events(args) -> int:
    grf = _read_table_auto(args.grf)
    cfg = _event_config(args)
    events = detect_gait_events(grf, cfg)
    if args.discard_partial:
        events = discard_partial_contacts(events, grf, cfg)
    out = _write_out(args.out, "events.csv",
                     write_canonical_csv(events, CanonicalKind.EVENTS))
    print(out)
    return 0


def _cmd_extract_spatio(args) -> int:
    motion = _read_table_auto(args.motion)
    events = read_canonical_csv(_read_text(args.events), CanonicalKind.EVENTS)
    row = spatiotemporal_params(motion, _marker_set(args.marker), events)
    out = _write_out(args.out, "spatiotemporal.csv",
                     write_canonical_csv(row, CanonicalKind.SPATIOTEMPORAL))
    print(out)
    return 0


def _rewrite_table(args, transform) -> int:
    table = _read_table_auto(args.infile)
    result = transform(table)
    for kind in _TABLE_KINDS:
        try:
            text = write_canonical_csv(result, kind)
            break
        except SchemaMismatch:
            continue
    else:
        raise SchemaMismatch("result table matches no canonical kind")
    out = _write_out(args.out, Path(args.infile).name, text)
    print(out)
    return 0


def _cmd_prep_filter(args) -> int:
    spec = FilterSpec(cutoff_hz=args.cutoff, order=args.order,
                      zero_phase=not args.one_pass)
    return _rewrite_table(args, lambda t: lowpass_filter(t, spec))


def _cmd_prep_impute(args) -> int:
    if args.method == "linear":
        return _rewrite_table(args, impute_linear)
    return _rewrite_table(
        args, lambda t: impute_chained(t, iterations=args.iterations, seed=args.seed)
    )


def _cmd_prep_resample(args) -> int:
    return _rewrite_table(args, lambda t: resample(t, args.rate))


def _cmd_normalize(args) -> int:
    series = _read_table_auto(args.series)
    events = read_canonical_csv(_read_text(args.events), CanonicalKind.EVENTS)
    curve = normalize_gait_cycle(
        series, args.channel, events, args.side, cycle_index=args.cycle,
        points=args.points,
    )
    percents = np.linspace(0.0, 100.0, args.points)
    lines = ["percent,value"]
    lines += [f"{repr(float(p))},{repr(float(v))}" for p, v in zip(percents, curve.values)]
    out = _write_out(args.out, f"{args.channel}_cycle{args.cycle}.csv",
                     "\n".join(lines) + "\n")
    print(out)
    return 0


def _cmd_store_add(args) -> int:
    ref = TrialRef.parse(args.ref)
    meta: dict = {}
    if args.meta:
        meta = json.loads(_read_text(args.meta))
    if args.body_weight is not None:
        meta["body_weight_n"] = args.body_weight
    if args.label:
        meta["label"] = args.label
    files = {}
    for kind, path in (
        (CanonicalKind.MOTION, args.motion),
        (CanonicalKind.GRF, args.grf),
        (CanonicalKind.JOINT_ANGLES, args.joint_angles),
        (CanonicalKind.EVENTS, args.events),
        (CanonicalKind.SPATIOTEMPORAL, args.spatio),
    ):
        if path:
            files[kind] = read_canonical_csv(_read_text(path), kind)
    bundle = TrialBundle(
        ref=ref,
        files=files,
        video=Path(args.video) if args.video else None,
        meta=meta,
    )
    save_trial(args.root, bundle)
    print(f"{args.root}/{ref}")
    return 0


def _cmd_store_list(args) -> int:
    tree = list_hierarchy(args.root)
    if args.json:
        print(json.dumps(tree, indent=2, sort_keys=True))
        return 0
    for group, patients in tree.items():
        print(group)
        for patient, trials in patients.items():
            print(f"  {patient}")
            for trial in trials:
                print(f"    {trial}")
    return 0


def _cmd_synth(args) -> int:
    step_l = args.step_length_l if args.step_length_l is not None else args.step_length
    step_r = args.step_length_r if args.step_length_r is not None else args.step_length
    profile = GaitProfile(
        step_length_l=step_l,
        step_length_r=step_r,
        cadence_spm=args.cadence,
        n_cycles=args.cycles,
        grf_rate_hz=args.grf_rate,
        motion_rate_hz=args.motion_rate,
        body_weight_n=args.body_weight,
        fx_offset_n=args.fx_offset,
        fz_offset_n=args.fz_offset,
        noise_std_n=args.noise_grf,
        seed=args.seed,
        half_landing=args.half_landing,
        blips_per_flight=args.blips,
    )
    trial = generate_trial(profile)
    row = trial.truth_with_partial or trial.truth
    files = {
        CanonicalKind.MOTION: trial.motion,
        CanonicalKind.GRF: trial.grf,
        CanonicalKind.JOINT_ANGLES: joint_angles_from_motion(trial.motion, trial.markers),
        CanonicalKind.EVENTS: trial.events,
        CanonicalKind.SPATIOTEMPORAL: row,
    }
    meta = {"body_weight_n": profile.body_weight_n, "label": "synthetic"}
    if args.store:
        ref = TrialRef.parse(args.ref)
        save_trial(args.store, TrialBundle(ref=ref, files=files, meta=meta))
        print(f"{args.store}/{ref}")
        return 0
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    from .store import KIND_FILENAMES, META_FILENAME

    for kind, obj in files.items():
        (out / KIND_FILENAMES[kind]).write_text(
            write_canonical_csv(obj, kind), encoding="utf-8"
        )
    (out / META_FILENAME).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                                     encoding="utf-8")
    print(out)
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    serve(args.root, port=args.port, cors_origin=args.cors_origin, host=args.host)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="stridelab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert capture files to canonical CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--kind", required=True,
                   choices=[k.value for k in CanonicalKind])
    p.add_argument("--var", help="matrix name for MAT inputs")
    p.add_argument("--rate", type=float, help="sample rate when the input has no time column")
    p.add_argument("--separator", help="field separator for delimited text inputs")
    p.set_defaults(func=_cmd_convert)

    extract = sub.add_parser("extract", help="derive features from canonical files")
    esub = extract.add_subparsers(dest="what", required=True)

    p = esub.add_parser("angles", help="sagittal joint angles from motion")
    p.add_argument("--motion", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--marker", action="append", help="override ROLE:SIDE=PREFIX")
    p.set_defaults(func=_cmd_extract_angles)

    p = esub.add_parser("events", help="gait events from ground reaction force")
    p.add_argument("--grf", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threshold", type=float, default=10.0)
    p.add_argument("--min-contact", dest="min_contact", type=float, default=0.1)
    p.add_argument("--min-flight", dest="min_flight", type=float, default=0.05)
    p.add_argument("--discard-partial", dest="discard_partial", action="store_true",
                   help="drop contacts whose peak force marks a half landing")
    p.add_argument("--body-weight", dest="body_weight", type=float)
    p.add_argument("--peak-fraction", dest="peak_fraction", type=float, default=0.6)
    p.set_defaults(func=_cmd_extract_events)

    p = esub.add_parser("spatio", help="spatiotemporal parameters from motion + events")
    p.add_argument("--motion", required=True)
    p.add_argument("--events", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--marker", action="append")
    p.set_defaults(func=_cmd_extract_spatio)

    prep = sub.add_parser("prep", help="filter, impute, or resample a table")
    psub = prep.add_subparsers(dest="what", required=True)

    p = psub.add_parser("filter", help="zero-phase Butterworth low-pass")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--cutoff", type=float, required=True)
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--one-pass", dest="one_pass", action="store_true",
                   help="forward-only filtering (phase lag)")
    p.set_defaults(func=_cmd_prep_filter)

    p = psub.add_parser("impute", help="fill missing values")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--method", choices=["linear", "chained"], default="linear")
    p.add_argument("--iterations", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_prep_impute)

    p = psub.add_parser("resample", help="linear resample onto a new rate")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--rate", type=float, required=True)
    p.set_defaults(func=_cmd_prep_resample)

    p = sub.add_parser("normalize", help="resample one channel over a gait cycle")
    p.add_argument("--series", required=True)
    p.add_argument("--events", required=True)
    p.add_argument("--channel", required=True)
    p.add_argument("--side", choices=["left", "right"], default="left")
    p.add_argument("--cycle", type=int, default=0)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_normalize)

    store = sub.add_parser("store", help="manage the hierarchical trial store")
    ssub = store.add_subparsers(dest="what", required=True)

    p = ssub.add_parser("add", help="save a trial bundle atomically")
    p.add_argument("--root", required=True)
    p.add_argument("--ref", required=True, help="group/patient/trial")
    p.add_argument("--motion")
    p.add_argument("--grf")
    p.add_argument("--joint-angles", dest="joint_angles")
    p.add_argument("--events")
    p.add_argument("--spatio")
    p.add_argument("--video")
    p.add_argument("--meta", help="JSON metadata file")
    p.add_argument("--body-weight", dest="body_weight", type=float)
    p.add_argument("--label")
    p.set_defaults(func=_cmd_store_add)

    p = ssub.add_parser("list", help="list groups, patients, and trials")
    p.add_argument("--root", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_store_list)

    p = sub.add_parser("synth", help="generate a synthetic trial with known truth")
    p.add_argument("--out", default="synthetic-trial")
    p.add_argument("--store", help="save into this store root instead of --out")
    p.add_argument("--ref", default="synthetic/p1/t1")
    p.add_argument("--step-length", dest="step_length", type=float, default=0.6)
    p.add_argument("--step-length-l", dest="step_length_l", type=float)
    p.add_argument("--step-length-r", dest="step_length_r", type=float)
    p.add_argument("--cadence", type=float, default=100.0)
    p.add_argument("--cycles", type=int, default=4)
    p.add_argument("--grf-rate", dest="grf_rate", type=float, default=600.0)
    p.add_argument("--motion-rate", dest="motion_rate", type=float, default=120.0)
    p.add_argument("--body-weight", dest="body_weight", type=float, default=800.0)
    p.add_argument("--fx-offset", dest="fx_offset", type=float, default=0.0)
    p.add_argument("--fz-offset", dest="fz_offset", type=float, default=0.0)
    p.add_argument("--noise-grf", dest="noise_grf", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--half-landing", dest="half_landing", action="store_true")
    p.add_argument("--blips", type=int, default=0)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("serve", help="run the analysis HTTP service")
    p.add_argument("--root", required=True)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--cors-origin", dest="cors_origin", default="*")
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=_cmd_serve)

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    """Dispatch one CLI invocation; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args) or 0
    except GaitError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error: io_failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: io_failure: {exc}", file=sys.stderr)
        return 3
    except json.JSONDecodeError as exc:
        print(f"error: corrupt_file: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: invalid_value: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))
