import math

import numpy as np
import pytest

from stridelab.errors import PathInvalid
from stridelab.model import (
    GaitEvents,
    MarkerSet,
    SpatiotemporalRow,
    TimeSeriesTable,
    TrialRef,
    Unit,
    validate_table,
)

from helpers import make_table


class TestValidateTable:
    def test_well_formed(self):
        t = make_table(["fz_l", "fz_r"], [[0.0, 1.0], [2.0, 3.0]], unit=Unit.NEWTONS)
        assert validate_table(t) == []

    def test_duplicate_channel_named(self):
        t = make_table(["fz_l", "fz_l"], [[0.0, 1.0]], unit=Unit.NEWTONS)
        violations = validate_table(t)
        assert len(violations) == 1
        assert "fz_l" in violations[0]

    def test_zero_sample_rate_named(self):
        t = make_table(["a"], [[1.0]], rate=0.0)
        violations = validate_table(t)
        assert any("sample_rate" in v for v in violations)

    def test_infinite_value_located(self):
        t = make_table(["a", "b"], [[1.0, 2.0], [math.inf, 3.0]])
        violations = validate_table(t)
        assert any("row 1" in v and "'a'" in v for v in violations)


class TestTimeReconstruction:
    @pytest.mark.parametrize("rate", [60.0, 100.0, 120.0, 599.940_006, 1000.5])
    def test_uniform_steps_within_ulp(self, rate):
        t = make_table(["a"], np.zeros((500, 1)), rate=rate, start=3.7)
        times = t.times()
        diffs = np.diff(times)
        ulp = 2 * np.spacing(np.abs(times).max())
        assert np.all(np.abs(diffs - 1.0 / rate) <= ulp)


class TestMissingSentinel:
    def test_never_equals_finite(self):
        sentinel = float("nan")
        for v in (0.0, -1.5, 1e300, 5e-324):
            assert not sentinel == v
        assert not sentinel == sentinel

    def test_values_are_immutable(self):
        t = make_table(["a"], [[1.0], [2.0]])
        with pytest.raises(ValueError):
            t.values[0, 0] = 9.0


class TestGaitEvents:
    def test_valid_sequence(self):
        ev = GaitEvents.from_rows([
            ("left", "touchdown", 0.1),
            ("right", "touchdown", 0.7),
            ("left", "toeoff", 0.8),
            ("left", "touchdown", 1.3),
            ("right", "toeoff", 1.4),
        ])
        assert ev.violations() == []

    def test_alternation_violation(self):
        ev = GaitEvents.from_rows([
            ("left", "touchdown", 0.1),
            ("left", "touchdown", 0.9),
        ])
        assert any("expected toeoff" in v for v in ev.violations())

    def test_starts_with_toeoff_flagged(self):
        ev = GaitEvents.from_rows([("right", "toeoff", 0.2)])
        assert any("expected touchdown" in v for v in ev.violations())

    def test_unsorted_flagged(self):
        ev = GaitEvents.from_rows([
            ("left", "touchdown", 1.0),
            ("right", "touchdown", 0.5),
        ])
        assert any("sorted" in v for v in ev.violations())

    def test_contacts_pairing(self):
        ev = GaitEvents.from_rows([
            ("left", "touchdown", 0.1),
            ("left", "toeoff", 0.8),
            ("left", "touchdown", 1.3),
        ])
        assert ev.contacts("left") == [(0.1, 0.8), (1.3, None)]
        assert ev.n_cycles("left") == 1
        assert ev.cycle_span("left", 0) == (0.1, 1.3)


class TestTrialRef:
    def test_valid(self):
        ref = TrialRef("stroke", "p01", "trial-2_a")
        assert str(ref) == "stroke/p01/trial-2_a"
        assert TrialRef.parse("stroke/p01/trial-2_a") == ref

    @pytest.mark.parametrize("bad", ["Stroke Patients", "UPPER", "-lead", "", "a/b"])
    def test_invalid_component(self, bad):
        with pytest.raises(PathInvalid):
            TrialRef(bad, "p01", "t1")

    def test_parse_needs_three_parts(self):
        with pytest.raises(PathInvalid):
            TrialRef.parse("stroke/p01")


class TestSpatiotemporalRow:
    def test_cadence_consistency(self):
        row = SpatiotemporalRow(gait_time=1.2, cadence=100.0)
        assert row.violations() == []
        row = SpatiotemporalRow(gait_time=1.2, cadence=99.0)
        assert any("cadence" in v for v in row.violations())

    def test_nonpositive_temporal_flagged(self):
        row = SpatiotemporalRow(stance_time_l=-0.1)
        assert any("stance_time_l" in v for v in row.violations())


class TestMarkerSet:
    def test_default_resolves_triplets(self):
        ms = MarkerSet.default()
        assert ms.channel("HEE", "left", "x") == "hee_l_x"
        assert ms.prefix("TOE", "right") == "toe_r"

    def test_unknown_role_rejected(self):
        with pytest.raises(KeyError):
            MarkerSet({("XXX", "left"): "x"})
