import io
import json
import re
from pathlib import Path

import numpy as np
import pytest
from scipy.io import savemat

from stridelab.cli import run
from stridelab.features import (
    EventDetectConfig,
    detect_gait_events,
    joint_angles_from_motion,
)
from stridelab.formats.c3d import RawCapture, write_c3d
from stridelab.formats.canonical import CanonicalKind, write_canonical_csv
from stridelab.formats.trc import write_trc
from stridelab.model import MarkerSet, TimeSeriesTable
from stridelab.prep import FilterSpec, lowpass_filter
from stridelab.synth import GaitProfile, generate_trial

ERROR_LINE = re.compile(r"^error: [a-z0-9_]+: .+$")


def last_error_line(capsys) -> str:
    err = capsys.readouterr().err.strip().split("\n")
    return err[-1]


@pytest.fixture()
def trial_files(tmp_path):
    trial = generate_trial(GaitProfile(n_cycles=3))
    paths = {}
    for kind, obj in (
        ("motion", trial.motion),
        ("grf", trial.grf),
        ("events", trial.events),
        ("spatiotemporal", trial.truth),
    ):
        p = tmp_path / f"{kind}.csv"
        p.write_text(write_canonical_csv(obj, kind))
        paths[kind] = p
    return trial, paths


class TestConvert:
    def test_trc_to_motion(self, tmp_path, trial_files):
        trial, _ = trial_files
        trc = tmp_path / "walk.trc"
        trc.write_text(write_trc(trial.motion))
        out_dir = tmp_path / "trial"
        code = run(["convert", "--in", str(trc), "--out", f"{out_dir}/", "--kind", "motion"])
        assert code == 0
        written = (out_dir / "motion.csv").read_text()
        assert written == write_canonical_csv(
            __import__("stridelab").parse_trc(trc.read_text()), "motion"
        )

    def test_c3d_to_motion(self, tmp_path, trial_files):
        trial, _ = trial_files
        analog = TimeSeriesTable(sample_rate=trial.motion.sample_rate, channels=(),
                                 values=np.zeros((trial.motion.n_samples, 0)))
        labels = tuple(n.rsplit("_", 1)[0] for n in trial.motion.names[::3])
        cap = RawCapture(trial.motion, analog, labels, ())
        path = tmp_path / "walk.c3d"
        path.write_bytes(write_c3d(cap))
        out = tmp_path / "m.csv"
        assert run(["convert", "--in", str(path), "--out", str(out), "--kind", "motion"]) == 0
        assert out.read_text().startswith("time,")

    def test_mat_to_grf(self, tmp_path, trial_files):
        trial, _ = trial_files
        times = trial.grf.times()[:, None]
        matrix = np.hstack([times, trial.grf.values])
        path = tmp_path / "forces.mat"
        buf = io.BytesIO()
        savemat(buf, {"grf": matrix}, format="5")
        path.write_bytes(buf.getvalue())
        out = tmp_path / "grf_out.csv"
        assert run(["convert", "--in", str(path), "--out", str(out), "--kind", "grf",
                    "--var", "grf"]) == 0
        text = out.read_text()
        assert text.splitlines()[0] == "time,fx_l,fy_l,fz_l,fx_r,fy_r,fz_r"

    def test_tab_separated_text(self, tmp_path, trial_files):
        trial, paths = trial_files
        tsv = tmp_path / "grf.txt"
        tsv.write_text(paths["grf"].read_text().replace(",", "\t"))
        out = tmp_path / "from_txt.csv"
        assert run(["convert", "--in", str(tsv), "--out", str(out), "--kind", "grf"]) == 0
        from stridelab.formats.canonical import read_canonical_csv
        from helpers import tables_equal

        got = read_canonical_csv(out.read_text(), "grf")
        want = read_canonical_csv(paths["grf"].read_text(), "grf")
        assert tables_equal(got, want, tol=1e-9)

    def test_missing_input_exits_3(self, tmp_path, capsys):
        code = run(["convert", "--in", str(tmp_path / "nope.trc"), "--out",
                    str(tmp_path / "o.csv"), "--kind", "motion"])
        assert code == 3
        assert ERROR_LINE.match(last_error_line(capsys))


class TestExtract:
    def test_events_match_library(self, tmp_path, trial_files, capsys):
        trial, paths = trial_files
        out = tmp_path / "events_out.csv"
        code = run(["extract", "events", "--grf", str(paths["grf"]), "--out", str(out),
                    "--threshold", "10", "--min-contact", "0.1"])
        assert code == 0
        cfg = EventDetectConfig(threshold_n=10.0, min_contact_s=0.1)
        from stridelab.formats.canonical import read_canonical_csv

        grf = read_canonical_csv(paths["grf"].read_text(), "grf")
        expected = write_canonical_csv(detect_gait_events(grf, cfg), "events")
        assert out.read_text() == expected

    def test_angles_match_library(self, tmp_path, trial_files):
        trial, paths = trial_files
        out = tmp_path / "angles.csv"
        assert run(["extract", "angles", "--motion", str(paths["motion"]),
                    "--out", str(out)]) == 0
        from stridelab.formats.canonical import read_canonical_csv

        motion = read_canonical_csv(paths["motion"].read_text(), "motion")
        expected = write_canonical_csv(
            joint_angles_from_motion(motion, MarkerSet.default()), "joint_angles"
        )
        assert out.read_text() == expected

    def test_spatio(self, tmp_path, trial_files):
        trial, paths = trial_files
        out = tmp_path / "sp.csv"
        assert run(["extract", "spatio", "--motion", str(paths["motion"]),
                    "--events", str(paths["events"]), "--out", str(out)]) == 0
        assert out.read_text().splitlines()[0].startswith("step_length_l,")


class TestPrep:
    def test_filter_matches_library(self, tmp_path, trial_files):
        trial, paths = trial_files
        out = tmp_path / "filtered.csv"
        assert run(["prep", "filter", "--in", str(paths["grf"]), "--out", str(out),
                    "--cutoff", "20", "--order", "4"]) == 0
        from stridelab.formats.canonical import read_canonical_csv

        grf = read_canonical_csv(paths["grf"].read_text(), "grf")
        expected = write_canonical_csv(
            lowpass_filter(grf, FilterSpec(cutoff_hz=20.0, order=4)), "grf"
        )
        assert out.read_text() == expected

    def test_cutoff_above_nyquist_exits_2(self, tmp_path, capsys):
        values = np.zeros((30, 6))
        from helpers import make_table
        from stridelab.formats.canonical import GRF_CHANNELS
        from stridelab.model import Unit

        grf = make_table(GRF_CHANNELS, values, rate=100.0, unit=Unit.NEWTONS)
        path = tmp_path / "grf.csv"
        path.write_text(write_canonical_csv(grf, "grf"))
        code = run(["prep", "filter", "--in", str(path), "--out",
                    str(tmp_path / "o.csv"), "--cutoff", "60"])
        assert code == 2
        line = last_error_line(capsys)
        assert line.startswith("error: cutoff_above_nyquist: ")

    def test_impute_and_resample(self, tmp_path, trial_files):
        trial, paths = trial_files
        out1 = tmp_path / "imputed.csv"
        assert run(["prep", "impute", "--in", str(paths["motion"]), "--out", str(out1),
                    "--method", "linear"]) == 0
        out2 = tmp_path / "resampled.csv"
        assert run(["prep", "resample", "--in", str(paths["grf"]), "--out", str(out2),
                    "--rate", "120"]) == 0
        assert out2.read_text().count("\n") < paths["grf"].read_text().count("\n")


class TestNormalize:
    def test_writes_percent_value_curve(self, tmp_path, trial_files):
        trial, paths = trial_files
        out = tmp_path / "curve.csv"
        assert run(["normalize", "--series", str(paths["grf"]), "--events",
                    str(paths["events"]), "--channel", "fz_l", "--side", "left",
                    "--cycle", "0", "--out", str(out)]) == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "percent,value"
        assert len(lines) == 102


class TestStoreCli:
    def test_add_and_list(self, tmp_path, trial_files, capsys):
        trial, paths = trial_files
        root = tmp_path / "root"
        code = run(["store", "add", "--root", str(root), "--ref", "healthy/p01/t1",
                    "--grf", str(paths["grf"]), "--events", str(paths["events"]),
                    "--body-weight", "800"])
        assert code == 0
        code = run(["store", "list", "--root", str(root), "--json"])
        assert code == 0
        out = capsys.readouterr().out
        tree = json.loads(out.split("\n", 1)[1] if not out.startswith("{") else out)
        assert tree == {"healthy": {"p01": ["t1"]}}

    def test_bad_ref_exits_2(self, tmp_path, capsys):
        code = run(["store", "add", "--root", str(tmp_path), "--ref", "Bad Group/p/t"])
        assert code == 2
        assert last_error_line(capsys).startswith("error: path_invalid: ")


class TestSynthCli:
    def test_writes_trial_directory(self, tmp_path):
        out = tmp_path / "gen"
        assert run(["synth", "--out", str(out), "--cycles", "3", "--seed", "4"]) == 0
        names = {p.name for p in out.iterdir()}
        assert names == {"motion.csv", "grf.csv", "joint_angles.csv", "events.csv",
                         "spatiotemporal.csv", "meta.json"}

    def test_into_store(self, tmp_path):
        root = tmp_path / "root"
        assert run(["synth", "--store", str(root), "--ref", "synthetic/p1/t1"]) == 0
        assert (root / "synthetic" / "p1" / "t1" / "grf.csv").exists()

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(["synth", "--out", str(a), "--seed", "5"]) == 0
        assert run(["synth", "--out", str(b), "--seed", "5"]) == 0
        assert (a / "grf.csv").read_bytes() == (b / "grf.csv").read_bytes()


class TestUsage:
    def test_unknown_subcommand_exits_1(self, capsys):
        assert run(["frobnicate"]) == 1
        assert last_error_line(capsys).startswith("error: usage: ")

    def test_missing_required_flag_exits_1(self, capsys):
        assert run(["convert", "--in", "x.trc"]) == 1

    def test_help_exits_0(self, capsys):
        assert run(["--help"]) == 0
        assert run(["extract", "--help"]) == 0

    def test_error_line_format_stable(self, tmp_path, capsys):
        cases = [
            ["convert", "--in", str(tmp_path / "no.trc"), "--out", "o", "--kind", "motion"],
            ["store", "add", "--root", str(tmp_path), "--ref", "BAD/p/t"],
        ]
        for argv in cases:
            assert run(argv) != 0
            assert ERROR_LINE.match(last_error_line(capsys))
