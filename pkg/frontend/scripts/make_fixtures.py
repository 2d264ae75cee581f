"""Regenerate frontend test fixtures from the real analysis service.

Builds the group-comparison scenario store (healthy at 1.0 m/s vs stroke at
0.6 m/s, plus one improved stroke patient walking fast) and captures the
service's JSON payloads, so frontend tests run against true wire shapes.

Run from the frontend directory:  python3 scripts/make_fixtures.py
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from stridelab.features import joint_angles_from_motion
from stridelab.formats.canonical import CanonicalKind
from stridelab.model import TrialRef
from stridelab.service import create_app
from stridelab.store import TrialBundle, save_trial
from stridelab.synth import GaitProfile, generate_trial

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

HEALTHY = [("healthy", f"h{i+1:02d}", "t1",
            GaitProfile(step_length_l=0.6, step_length_r=0.6, cadence_spm=100.0, seed=i))
           for i in range(5)]
SLOW_STROKE = [("stroke", f"s{i+1:02d}", "t1",
                GaitProfile(step_length_l=0.45, step_length_r=0.45, cadence_spm=80.0,
                            seed=10 + i))
               for i in range(4)]
# one patient already walking fast: the outliers the scenario brushes
FAST_STROKE = [("stroke", "s05", trial,
                GaitProfile(step_length_l=0.55, step_length_r=0.55, cadence_spm=120.0,
                            seed=20 + k))
               for k, trial in enumerate(["t1", "t2"])]

CHART_REQUESTS = [
    ("grf.fz", "left", "first"),
    ("grf.fx", "left", "first"),
    ("grf.fx", "right", "first"),
    ("joint_angles.shank", "left", "first"),
    ("joint_angles.foot", "left", "first"),
    ("joint_angles.foot", "right", "first"),
]


def build_store(root: Path) -> tuple[list[dict], list[dict]]:
    refs_a, refs_b = [], []
    for group, pid, trial_id, profile in HEALTHY + SLOW_STROKE + FAST_STROKE:
        trial = generate_trial(profile)
        save_trial(root, TrialBundle(
            ref=TrialRef(group, pid, trial_id),
            files={
                CanonicalKind.MOTION: trial.motion,
                CanonicalKind.GRF: trial.grf,
                CanonicalKind.JOINT_ANGLES: joint_angles_from_motion(trial.motion,
                                                                     trial.markers),
                CanonicalKind.EVENTS: trial.events,
                CanonicalKind.SPATIOTEMPORAL: trial.truth,
            },
            meta={"body_weight_n": profile.body_weight_n},
        ))
        ref = {"group": group, "patient_id": pid, "trial_id": trial_id}
        (refs_a if group == "healthy" else refs_b).append(ref)
    return refs_a, refs_b


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        refs_a, refs_b = build_store(root)
        client = TestClient(create_app(root))

        hierarchy = {}
        for group in client.get("/api/groups").json():
            hierarchy[group] = {}
            for pid in client.get(f"/api/groups/{group}/patients").json():
                hierarchy[group][pid] = client.get(
                    f"/api/groups/{group}/patients/{pid}/trials").json()
        (OUT / "hierarchy.json").write_text(json.dumps(hierarchy, indent=1))

        ensembles = {}
        for variable, side, cycle in CHART_REQUESTS:
            r = client.post("/api/ensemble", json={
                "trials_a": refs_a, "trials_b": refs_b,
                "variable": variable, "side": side, "cycle": cycle,
            })
            r.raise_for_status()
            ensembles[f"{variable}|{side}|{cycle}"] = r.json()
        (OUT / "ensembles.json").write_text(json.dumps(ensembles))

        r = client.post("/api/spatiotemporal",
                        json={"trials_a": refs_a, "trials_b": refs_b})
        r.raise_for_status()
        (OUT / "spatiotemporal.json").write_text(json.dumps(r.json(), indent=1))

        r = client.get("/api/window/healthy/h01/t1", params={"side": "left", "cycle": 0})
        r.raise_for_status()
        (OUT / "window.json").write_text(json.dumps(r.json()))

        (OUT / "selection.json").write_text(json.dumps(
            {"trials_a": refs_a, "trials_b": refs_b,
             "fast_refs": ["stroke/s05/t1", "stroke/s05/t2"]}, indent=1))
    print(f"fixtures written to {OUT}")


if __name__ == "__main__":
    main()
