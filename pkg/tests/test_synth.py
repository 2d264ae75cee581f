import numpy as np
import pytest

from stridelab.features import EventDetectConfig, detect_gait_events, spatiotemporal_params
from stridelab.model import validate_table
from stridelab.synth import GaitProfile, generate_trial


def field_tolerances(profile: GaitProfile) -> dict:
    """Propagated 1-sample error bounds per parameter."""
    dt = 1.0 / profile.grf_rate_hz
    dtm = 1.0 / profile.motion_rate_hz
    T = profile.cycle_time_s
    stride = profile.stride_length_m
    swing = (1 - profile.stance_fraction) * T
    heel_speed = 1.5 * stride / swing  # smoothstep peak slope
    spatial = heel_speed * (dt + dtm)
    return {
        "step_length_l": spatial,
        "step_length_r": spatial,
        "stride_length": spatial,
        "step_width": 1e-9,
        "gait_speed": stride / T * (2.5 * dt / T) + spatial / T,
        "cadence": 120.0 / T * (2.5 * dt / T),
        "stance_time_l": 2.5 * dt,
        "stance_time_r": 2.5 * dt,
        "swing_time_l": 2.5 * dt,
        "swing_time_r": 2.5 * dt,
        "gait_time": 2.5 * dt,
        "double_support_time": 4.5 * dt,
    }


class TestGeneratorOutputs:
    def test_tables_are_valid(self):
        trial = generate_trial()
        assert validate_table(trial.motion) == []
        assert validate_table(trial.grf) == []
        assert trial.events.violations() == []
        assert trial.truth.violations() == []

    def test_detection_matches_truth_across_profiles(self):
        rng = np.random.default_rng(61)
        for _ in range(10):
            profile = GaitProfile(
                step_length_l=float(rng.uniform(0.4, 0.8)),
                step_length_r=float(rng.uniform(0.4, 0.8)),
                cadence_spm=float(rng.uniform(80, 130)),
                n_cycles=int(rng.integers(3, 6)),
            )
            trial = generate_trial(profile)
            detected = detect_gait_events(trial.grf)
            dt = 1.0 / profile.grf_rate_hz
            assert len(detected.events) == len(trial.events.events)
            for got, want in zip(detected.events, trial.events.events):
                assert (got.foot, got.kind) == (want.foot, want.kind)
                assert abs(got.time - want.time) <= dt + 1e-12

    def test_spatiotemporal_closure(self):
        rng = np.random.default_rng(62)
        for _ in range(6):
            step = float(rng.uniform(0.4, 0.8))
            speed = float(rng.uniform(0.5, 1.4))
            cadence = 120.0 * speed / (2 * step)
            profile = GaitProfile(step_length_l=step, step_length_r=step,
                                  cadence_spm=cadence)
            trial = generate_trial(profile)
            detected = detect_gait_events(trial.grf)
            row = spatiotemporal_params(trial.motion, trial.markers, detected)
            tol = field_tolerances(profile)
            for name, got in row.as_dict().items():
                want = getattr(trial.truth, name)
                assert abs(got - want) <= tol[name], (name, got, want, tol[name])

    def test_blips_are_debounced(self):
        profile = GaitProfile(blips_per_flight=1, n_cycles=4)
        trial = generate_trial(profile)
        fz = trial.grf.column("fz_l")
        # blips actually exist in the raw trace
        cfg = EventDetectConfig()
        detected = detect_gait_events(trial.grf, cfg)
        assert len(detected.events) == len(trial.events.events)
        for got, want in zip(detected.events, trial.events.events):
            assert abs(got.time - want.time) <= 1.0 / profile.grf_rate_hz + 1e-12

    def test_blips_present_in_raw_force(self):
        clean = generate_trial(GaitProfile(n_cycles=4))
        noisy = generate_trial(GaitProfile(n_cycles=4, blips_per_flight=1))
        assert not np.array_equal(clean.grf.values, noisy.grf.values)

    def test_force_offsets_shift_channels(self):
        base = generate_trial(GaitProfile())
        shifted = generate_trial(GaitProfile(fx_offset_n=-20.0, fz_offset_n=50.0))
        dx = shifted.grf.column("fx_l") - base.grf.column("fx_l")
        dz = shifted.grf.column("fz_l") - base.grf.column("fz_l")
        assert np.allclose(dx, -20.0, atol=1e-9)
        assert np.allclose(dz, 50.0, atol=1e-9)

    def test_half_landing_truths(self):
        trial = generate_trial(GaitProfile(half_landing=True, n_cycles=3))
        assert trial.truth_with_partial.step_length_l < 0
        assert trial.truth.step_length_l == pytest.approx(0.6)
        assert trial.truth.step_length_r == pytest.approx(0.6)
        # partial contact peaks below the 0.6 x body-weight cutoff
        fz = trial.grf.column("fz_l")
        times = trial.grf.times()
        first_td = trial.events.touchdowns("left")[0]
        first_to = trial.events.toeoffs("left")[0]
        mask = (times >= first_td) & (times <= first_to)
        peak = fz[mask].max()
        assert peak < 0.6 * trial.profile.body_weight_n

    def test_seed_reproducible(self):
        a = generate_trial(GaitProfile(noise_std_n=2.0, seed=7))
        b = generate_trial(GaitProfile(noise_std_n=2.0, seed=7))
        assert np.array_equal(a.grf.values, b.grf.values)

    def test_profile_validation(self):
        with pytest.raises(ValueError):
            GaitProfile(n_cycles=1)
        with pytest.raises(ValueError):
            GaitProfile(stance_fraction=0.4)
        with pytest.raises(ValueError):
            GaitProfile(half_landing=True, n_cycles=2)
