"""Synthetic gait generator with closed-form ground truth.

Produces motion + ground-reaction-force tables together with the exact
event times and spatiotemporal parameters implied by the kinematic model,
so detection and feature extraction can be checked against known answers.
Also exposed through the CLI as ``synth`` so fixtures are reproducible.

Model: cycle period T = 120/cadence; each foot is planted for
``stance_fraction * T`` and swings forward by one stride between plants
(smoothstep profile).  Left touchdowns at ``lead + k*T``, right offset by
T/2.  Vertical force during contact is ``bw * (0.15 + 0.85*sin(pi*u))``,
which clears the detection threshold at the first in-contact sample, and
anterior-posterior force is a braking/propulsion sine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .formats.canonical import GRF_CHANNELS
from .model import (
    LEFT,
    RIGHT,
    SIDES,
    TOEOFF,
    TOUCHDOWN,
    Channel,
    GaitEvent,
    GaitEvents,
    MarkerSet,
    SpatiotemporalRow,
    TimeSeriesTable,
    Unit,
)

FZ_BASE_FRACTION = 0.15  # of body weight at contact edges
BLIP_AMPLITUDE_N = 300.0


@dataclass(frozen=True)
class GaitProfile:
    """Generator configuration; asymmetric step lengths are allowed."""

    step_length_l: float = 0.6
    step_length_r: float = 0.6
    cadence_spm: float = 100.0
    n_cycles: int = 4  # number of left touchdowns
    grf_rate_hz: float = 600.0
    motion_rate_hz: float = 120.0
    stance_fraction: float = 0.62
    body_weight_n: float = 800.0
    step_width_m: float = 0.2
    fx_peak_fraction: float = 0.2
    fx_offset_n: float = 0.0
    fz_offset_n: float = 0.0
    noise_std_n: float = 0.0
    noise_std_m: float = 0.0
    seed: int = 0
    half_landing: bool = False
    half_landing_peak_fraction: float = 0.3
    half_landing_right_start_m: float = 2.0
    blips_per_flight: int = 0
    blip_duration_s: float = 0.03

    def __post_init__(self):
        if self.n_cycles < 2 + (1 if self.half_landing else 0):
            raise ValueError("need at least 2 clean left touchdowns")
        if not 0.5 < self.stance_fraction < 1.0:
            raise ValueError("stance_fraction must be in (0.5, 1) for double support")
        if self.step_length_l <= 0 or self.step_length_r <= 0:
            raise ValueError("step lengths must be positive")

    @property
    def cycle_time_s(self) -> float:
        return 120.0 / self.cadence_spm

    @property
    def stride_length_m(self) -> float:
        return self.step_length_l + self.step_length_r

    @property
    def gait_speed_mps(self) -> float:
        return self.stride_length_m / self.cycle_time_s


@dataclass(frozen=True)
class SyntheticTrial:
    profile: GaitProfile
    motion: TimeSeriesTable
    grf: TimeSeriesTable
    events: GaitEvents  # ground truth, includes any half-landing contact
    clean_events: GaitEvents  # half-landing contact removed
    truth: SpatiotemporalRow  # closed-form values over clean events
    truth_with_partial: SpatiotemporalRow | None
    markers: MarkerSet = field(default_factory=MarkerSet.default)


def _smoothstep(u: np.ndarray) -> np.ndarray:
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


def _plant_and_swing(
    times: np.ndarray,
    land_times: list[float],
    land_positions: list[float],
    initial: float,
    swing_s: float,
) -> np.ndarray:
    """Piecewise trajectory: plateau at each landing, smoothstep in between."""
    x = np.full_like(times, initial)
    prev = initial
    for t_land, pos in zip(land_times, land_positions):
        swing = (times >= t_land - swing_s) & (times < t_land)
        u = (times[swing] - (t_land - swing_s)) / swing_s
        x[swing] = prev + (pos - prev) * _smoothstep(u)
        x[times >= t_land] = pos
        prev = pos
    return x


def _swing_lift(times: np.ndarray, land_times: list[float], swing_s: float,
                lift: float) -> np.ndarray:
    z = np.zeros_like(times)
    for t_land in land_times:
        swing = (times >= t_land - swing_s) & (times < t_land)
        u = (times[swing] - (t_land - swing_s)) / swing_s
        z[swing] = lift * np.sin(np.pi * u)
    return z


def generate_trial(profile: GaitProfile | None = None) -> SyntheticTrial:
    p = profile or GaitProfile()
    rng = np.random.default_rng(p.seed)
    T = p.cycle_time_s
    S = p.stance_fraction * T
    swing = T - S
    lead = T
    left_tds = [lead + k * T for k in range(p.n_cycles)]
    right_tds = [lead + T / 2 + k * T for k in range(p.n_cycles)]
    end = right_tds[-1] + S + 0.25 * T

    stride = p.stride_length_m
    left_pos = [k * stride for k in range(p.n_cycles)]
    right_pos = [k * stride + p.step_length_r for k in range(p.n_cycles)]
    left_init = -stride
    right_init = p.half_landing_right_start_m if p.half_landing else -p.step_length_l

    # --- ground-truth events -------------------------------------------------
    events = []
    for foot, tds in ((LEFT, left_tds), (RIGHT, right_tds)):
        for td in tds:
            events.append(GaitEvent(foot, TOUCHDOWN, td))
            events.append(GaitEvent(foot, TOEOFF, td + S))
    events.sort(key=lambda e: (e.time, e.foot, e.kind))
    truth_events = GaitEvents(tuple(events))
    if p.half_landing:
        partial_times = {left_tds[0], left_tds[0] + S}
        clean_events = GaitEvents(
            tuple(e for e in events if not (e.foot == LEFT and e.time in partial_times))
        )
    else:
        clean_events = truth_events

    # --- ground-truth parameters ---------------------------------------------
    # Derived from the closed-form contact model directly (exact event times
    # and landing positions), independent of detection and interpolation.
    def heel_x_true(side: str, t: float) -> float:
        tds, pos, init = (
            (left_tds, left_pos, left_init) if side == LEFT else (right_tds, right_pos, right_init)
        )
        landed = [x for td, x in zip(tds, pos) if td <= t]
        return landed[-1] if landed else init

    def truth_row(ev: GaitEvents) -> SpatiotemporalRow:
        tds = {side: ev.touchdowns(side) for side in SIDES}
        spans = {side: [(td, td + S) for td in tds[side]] for side in SIDES}
        steps = {
            side: [
                heel_x_true(side, td) - heel_x_true(RIGHT if side == LEFT else LEFT, td)
                for td in tds[side]
            ]
            for side in SIDES
        }
        strides, speeds, gaits, ds = [], [], [], []
        for side in SIDES:
            other = RIGHT if side == LEFT else LEFT
            for td, nxt in zip(tds[side][:-1], tds[side][1:]):
                gait = nxt - td
                length = abs(heel_x_true(side, nxt) - heel_x_true(side, td))
                gaits.append(gait)
                strides.append(length)
                speeds.append(length / gait)
                overlap = 0.0
                for a0, a1 in spans[side]:
                    for b0, b1 in spans[other]:
                        lo, hi = max(a0, b0, td), min(a1, b1, nxt)
                        overlap += max(hi - lo, 0.0)
                ds.append(overlap)
        gait_time = float(np.mean(gaits))
        return SpatiotemporalRow(
            step_length_l=float(np.mean(steps[LEFT])),
            step_length_r=float(np.mean(steps[RIGHT])),
            stride_length=float(np.mean(strides)),
            step_width=p.step_width_m,
            gait_speed=float(np.mean(speeds)),
            cadence=120.0 / gait_time,
            stance_time_l=S,
            stance_time_r=S,
            swing_time_l=swing,
            swing_time_r=swing,
            gait_time=gait_time,
            double_support_time=float(np.mean(ds)),
        )

    truth = truth_row(clean_events)
    truth_with_partial = truth_row(truth_events) if p.half_landing else None

    # --- ground reaction forces ------------------------------------------------
    n_grf = int(round(end * p.grf_rate_hz)) + 1
    t_grf = np.arange(n_grf) / p.grf_rate_hz
    cols = {name: np.zeros(n_grf) for name in GRF_CHANNELS}
    for foot, tds in ((LEFT, left_tds), (RIGHT, right_tds)):
        s = foot[0]
        lateral = 1.0 if foot == LEFT else -1.0
        for k, td in enumerate(tds):
            scale = 1.0
            if p.half_landing and foot == LEFT and k == 0:
                scale = p.half_landing_peak_fraction
            mask = (t_grf >= td) & (t_grf < td + S)
            u = (t_grf[mask] - td) / S
            cols[f"fz_{s}"][mask] = scale * p.body_weight_n * (
                FZ_BASE_FRACTION + (1 - FZ_BASE_FRACTION) * np.sin(np.pi * u)
            )
            cols[f"fx_{s}"][mask] = -scale * p.fx_peak_fraction * p.body_weight_n * np.sin(
                2 * np.pi * u
            )
            cols[f"fy_{s}"][mask] = lateral * 0.05 * p.body_weight_n * np.sin(np.pi * u)
        # force blips mid-flight: should be debounced away by detection
        if p.blips_per_flight:
            flights = [(td + S, nxt) for td, nxt in zip(tds[:-1], tds[1:])]
            for f0, f1 in flights:
                if f1 - f0 < p.blip_duration_s + 0.16:
                    continue
                mid = (f0 + f1) / 2
                mask = (t_grf >= mid) & (t_grf < mid + p.blip_duration_s)
                cols[f"fz_{s}"][mask] = BLIP_AMPLITUDE_N
    cols["fx_l"] += p.fx_offset_n
    cols["fx_r"] += p.fx_offset_n
    cols["fz_l"] += p.fz_offset_n
    cols["fz_r"] += p.fz_offset_n
    grf_values = np.column_stack([cols[n] for n in GRF_CHANNELS])
    if p.noise_std_n:
        grf_values = grf_values + rng.normal(0, p.noise_std_n, grf_values.shape)
    grf = TimeSeriesTable(
        sample_rate=p.grf_rate_hz,
        channels=tuple(Channel(n, Unit.NEWTONS) for n in GRF_CHANNELS),
        values=grf_values,
    )

    # --- motion ------------------------------------------------------------------
    n_mo = int(round(end * p.motion_rate_hz)) + 1
    t_mo = np.arange(n_mo) / p.motion_rate_hz
    markers = MarkerSet.default()
    speed = stride / T
    pelvis_x = speed * (t_mo - lead)
    phase = 2 * np.pi * (t_mo - lead) / T
    channels: dict[str, np.ndarray] = {}
    for side, tds, pos, init in (
        (LEFT, left_tds, left_pos, left_init),
        (RIGHT, right_tds, right_pos, right_init),
    ):
        lat = p.step_width_m / 2 * (1.0 if side == LEFT else -1.0)
        heel_x = _plant_and_swing(t_mo, tds, pos, init, swing)
        heel_z = 0.02 + _swing_lift(t_mo, tds, swing, 0.06)
        hee = markers.prefix("HEE", side)
        toe = markers.prefix("TOE", side)
        ank = markers.prefix("ANK", side)
        kne = markers.prefix("KNE", side)
        hip = markers.prefix("HIP", side)
        sho = markers.prefix("SHO", side)
        channels[f"{hee}_x"] = heel_x
        channels[f"{hee}_y"] = np.full(n_mo, lat)
        channels[f"{hee}_z"] = heel_z
        channels[f"{toe}_x"] = heel_x + 0.22
        channels[f"{toe}_y"] = np.full(n_mo, lat)
        channels[f"{toe}_z"] = np.full(n_mo, 0.02)
        channels[f"{ank}_x"] = heel_x + 0.05
        channels[f"{ank}_y"] = np.full(n_mo, lat)
        channels[f"{ank}_z"] = heel_z + 0.06
        channels[f"{hip}_x"] = pelvis_x
        channels[f"{hip}_y"] = np.full(n_mo, lat * 0.9)
        channels[f"{hip}_z"] = 0.95 + 0.01 * np.sin(2 * phase)
        channels[f"{kne}_x"] = (channels[f"{hip}_x"] + channels[f"{ank}_x"]) / 2 + 0.03
        channels[f"{kne}_y"] = np.full(n_mo, lat * 0.95)
        channels[f"{kne}_z"] = (channels[f"{hip}_z"] + channels[f"{ank}_z"]) / 2
        channels[f"{sho}_x"] = pelvis_x + 0.03 + 0.01 * np.sin(phase)
        channels[f"{sho}_y"] = np.full(n_mo, lat * 0.9)
        channels[f"{sho}_z"] = channels[f"{hip}_z"] + 0.55
    names = sorted(channels)
    motion_values = np.column_stack([channels[n] for n in names])
    if p.noise_std_m:
        motion_values = motion_values + rng.normal(0, p.noise_std_m, motion_values.shape)
    motion = TimeSeriesTable(
        sample_rate=p.motion_rate_hz,
        channels=tuple(Channel(n, Unit.METERS) for n in names),
        values=motion_values,
    )
    return SyntheticTrial(
        profile=p,
        motion=motion,
        grf=grf,
        events=truth_events,
        clean_events=clean_events,
        truth=truth,
        truth_with_partial=truth_with_partial,
        markers=markers,
    )
