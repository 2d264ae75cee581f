import json

import numpy as np
import pytest

from stridelab.errors import (
    CorruptFile,
    IoFailure,
    NotFound,
    PathInvalid,
    ValidationFailed,
)
from stridelab.formats.canonical import CanonicalKind, GRF_CHANNELS
from stridelab.model import TrialRef, Unit
from stridelab.store import (
    TrialBundle,
    _TrialLock,
    list_hierarchy,
    load_trial,
    save_trial,
    trial_dir,
)
from stridelab.synth import GaitProfile, generate_trial

from helpers import make_table, tables_equal


def make_bundle(ref=None, video=None, meta=None) -> TrialBundle:
    trial = generate_trial(GaitProfile(n_cycles=2))
    row = trial.truth
    return TrialBundle(
        ref=ref or TrialRef("healthy", "p01", "t1"),
        files={
            CanonicalKind.MOTION: trial.motion,
            CanonicalKind.GRF: trial.grf,
            CanonicalKind.EVENTS: trial.events,
            CanonicalKind.SPATIOTEMPORAL: row,
        },
        video=video,
        meta=meta or {"body_weight_n": 800.0, "label": "walk"},
    )


class TestSaveLoad:
    def test_round_trip(self, tmp_path):
        bundle = make_bundle(video=b"\x00\x01video-bytes")
        save_trial(tmp_path, bundle)
        back = load_trial(tmp_path, bundle.ref)
        assert tables_equal(bundle.files[CanonicalKind.GRF],
                            back.files[CanonicalKind.GRF], tol=1e-9)
        assert tables_equal(bundle.files[CanonicalKind.MOTION],
                            back.files[CanonicalKind.MOTION], tol=1e-9)
        assert list(back.files[CanonicalKind.EVENTS]) == list(
            bundle.files[CanonicalKind.EVENTS])
        assert back.meta["body_weight_n"] == 800.0
        assert back.video is not None and back.video.read_bytes().startswith(b"\x00\x01")

    def test_overwrite_replaces_as_unit(self, tmp_path):
        bundle = make_bundle()
        save_trial(tmp_path, bundle)
        smaller = TrialBundle(
            ref=bundle.ref,
            files={CanonicalKind.GRF: bundle.files[CanonicalKind.GRF]},
            meta={"label": "second"},
        )
        save_trial(tmp_path, smaller)
        back = load_trial(tmp_path, bundle.ref)
        assert CanonicalKind.MOTION not in back.files  # old files are gone
        assert back.meta == {"label": "second"}

    def test_invalid_ref_component(self):
        with pytest.raises(PathInvalid):
            TrialRef("Stroke Patients", "p01", "t1")

    def test_validation_failure_writes_nothing(self, tmp_path):
        bad_table = make_table(["a", "b"], [[1.0, 2.0]], unit=Unit.NEWTONS)
        bundle = TrialBundle(
            ref=TrialRef("healthy", "p01", "t1"),
            files={CanonicalKind.GRF: bad_table},  # wrong grf schema
        )
        with pytest.raises(ValidationFailed):
            save_trial(tmp_path, bundle)
        assert not trial_dir(tmp_path, bundle.ref).exists()

    def test_failed_save_preserves_previous_state(self, tmp_path, monkeypatch):
        bundle = make_bundle()
        save_trial(tmp_path, bundle)
        bad = make_bundle(meta={"label": "next"})
        calls = {"n": 0}
        import stridelab.store as store_mod

        orig = store_mod.write_canonical_csv

        def exploding(obj, kind):
            calls["n"] += 1
            if calls["n"] > 5:  # past validation, inside the staging write
                raise RuntimeError("disk went away")
            return orig(obj, kind)

        monkeypatch.setattr(store_mod, "write_canonical_csv", exploding)
        with pytest.raises(RuntimeError):
            save_trial(tmp_path, bad)
        monkeypatch.undo()
        back = load_trial(tmp_path, bundle.ref)
        assert back.meta["label"] == "walk"
        leftovers = [p for p in trial_dir(tmp_path, bundle.ref).parent.iterdir()
                     if p.name.startswith(".tmp-")]
        assert leftovers == []

    def test_unknown_meta_keys_preserved(self, tmp_path):
        bundle = make_bundle(meta={"label": "walk", "lab_protocol": "A7"})
        save_trial(tmp_path, bundle)
        back = load_trial(tmp_path, bundle.ref)
        assert back.meta["lab_protocol"] == "A7"
        save_trial(tmp_path, back)  # rewrite keeps unknown keys
        again = load_trial(tmp_path, bundle.ref)
        assert again.meta["lab_protocol"] == "A7"

    def test_bad_meta_rejected(self, tmp_path):
        bundle = make_bundle(meta={"session_date": "not-a-date"})
        with pytest.raises(ValidationFailed):
            save_trial(tmp_path, bundle)


class TestLoadErrors:
    def test_not_found(self, tmp_path):
        with pytest.raises(NotFound):
            load_trial(tmp_path, TrialRef("healthy", "p01", "nope"))

    def test_missing_events_is_fine(self, tmp_path):
        bundle = make_bundle()
        save_trial(tmp_path, bundle)
        (trial_dir(tmp_path, bundle.ref) / "events.csv").unlink()
        back = load_trial(tmp_path, bundle.ref)
        assert CanonicalKind.EVENTS not in back.files

    def test_truncated_grf_named(self, tmp_path):
        bundle = make_bundle()
        save_trial(tmp_path, bundle)
        path = trial_dir(tmp_path, bundle.ref) / "grf.csv"
        path.write_text(path.read_text()[:40])
        with pytest.raises(CorruptFile, match="grf.csv"):
            load_trial(tmp_path, bundle.ref)

    def test_unrecognized_file_warns(self, tmp_path):
        bundle = make_bundle()
        save_trial(tmp_path, bundle)
        (trial_dir(tmp_path, bundle.ref) / "notes.txt").write_text("hello")
        with pytest.warns(UserWarning, match="notes.txt"):
            back = load_trial(tmp_path, bundle.ref)
        assert CanonicalKind.GRF in back.files


class TestHierarchy:
    def test_empty_root(self, tmp_path):
        assert list_hierarchy(tmp_path) == {}

    def test_sorted_levels(self, tmp_path):
        for ref in [
            TrialRef("stroke", "p02", "t1"),
            TrialRef("stroke", "p01", "t2"),
            TrialRef("stroke", "p01", "t1"),
            TrialRef("healthy", "p09", "t1"),
        ]:
            save_trial(tmp_path, make_bundle(ref=ref))
        tree = list_hierarchy(tmp_path)
        assert list(tree.keys()) == ["healthy", "stroke"]
        assert list(tree["stroke"].keys()) == ["p01", "p02"]
        assert tree["stroke"]["p01"] == ["t1", "t2"]

    def test_stray_file_ignored_with_warning(self, tmp_path):
        save_trial(tmp_path, make_bundle())
        (tmp_path / "README.txt").write_text("stray")
        with pytest.warns(UserWarning, match="stray"):
            tree = list_hierarchy(tmp_path)
        assert "README.txt" not in tree

    def test_nonconforming_directory_skipped(self, tmp_path):
        save_trial(tmp_path, make_bundle())
        (tmp_path / "Bad Group").mkdir()
        with pytest.warns(UserWarning, match="non-conforming"):
            tree = list_hierarchy(tmp_path)
        assert set(tree.keys()) == {"healthy"}

    def test_stable_across_calls(self, tmp_path):
        save_trial(tmp_path, make_bundle())
        assert list_hierarchy(tmp_path) == list_hierarchy(tmp_path)

    def test_missing_root(self, tmp_path):
        with pytest.raises(IoFailure):
            list_hierarchy(tmp_path / "nope")


class TestLock:
    def test_second_writer_times_out(self, tmp_path):
        d = tmp_path / "trial"
        d.mkdir()
        with _TrialLock(d):
            with pytest.raises(IoFailure):
                with _TrialLock(d, timeout_s=0.15):
                    pass

    def test_lock_released(self, tmp_path):
        d = tmp_path / "trial"
        d.mkdir()
        with _TrialLock(d):
            pass
        with _TrialLock(d, timeout_s=0.1):
            pass
