"""Published leaderboard values and a synthetic end-to-end corpus.

``TABLE1_*`` and ``TABLE2`` hold per-column scores as published, keyed by
model id; the last element is the published overall.  ``build_corpus`` writes
a small deterministic input bundle that exercises every computed metric.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .ingest import write_raw_frames

COLUMNS = ("VQ", "IF", "PL", "Plan")

# (VQ, IF, PL, Plan, Overall); human columns on 1-5 scales, Overall is their sum.
TABLE1_HUMAN: dict[str, tuple[float, ...]] = {
    "Cogvideo": (3.29, 1.52, 1.73, 1.30, 7.84),
    "Cosmos-Predict1": (2.84, 2.60, 2.41, 2.49, 10.34),
    "Wan2.1": (3.49, 1.79, 2.30, 1.62, 9.21),
    "Cosmos-Predict2": (3.18, 2.33, 2.31, 2.27, 10.09),
    "WoW-DiT/cosmos1": (3.12, 2.86, 2.78, 2.84, 11.60),
    "WoW-DiT/wan": (4.09, 2.60, 3.16, 2.52, 12.37),
    "WoW-DiT/cosmos2": (3.76, 3.19, 3.03, 3.36, 13.34),
}

# Autonomous columns on 0-100; Overall is their unweighted mean.
TABLE1_AUTONOMOUS: dict[str, tuple[float, ...]] = {
    "Cogvideo": (38.52, 54.09, 63.30, 2.32, 39.56),
    "Cosmos-Predict1": (39.06, 61.46, 59.05, 7.47, 41.76),
    "Wan2.1": (40.23, 56.85, 59.66, 5.6, 40.59),
    "Cosmos-Predict2": (46.81, 56.80, 60.56, 6.67, 42.71),
    "WoW-DiT/cosmos1": (49.35, 69.68, 62.28, 2.89, 46.05),
    "WoW-DiT/wan": (55.38, 62.16, 63.75, 4.74, 46.51),
    "WoW-DiT/cosmos2": (54.12, 70.36, 66.18, 6.88, 49.39),
}

TABLE2: dict[str, tuple[float, ...]] = {
    "cosmos1+Agent": (35.43, 61.07, 53.78, 8.23, 39.63),
    "cosmos2+Agent": (49.7, 75.96, 64.66, 11.77, 50.53),
    "WoW+Agent/cosmos1": (59.39, 72.54, 69.71, 4.26, 51.47),
    "WoW+Agent/wan": (60.53, 50.83, 67.48, 6.75, 46.40),
    "WoW+Agent/cosmos2": (56.82, 76.16, 67.15, 7.76, 51.97),
}


def table_records(table: dict[str, tuple[float, ...]]) -> list[dict]:
    """Records for the identity group-score registry (one sample per model)."""
    return [
        {
            "model_id": model,
            "sample_id": "table",
            "measurements": dict(zip(("vq", "if", "pl", "plan"), row[:4])),
        }
        for model, row in table.items()
    ]


def write_table_bundle(directory: Path, table: dict[str, tuple[float, ...]]) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / "records.jsonl"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in table_records(table):
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return directory


def _dump(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True, indent=1) + "\n", encoding="utf-8")


def build_corpus(directory: Path, seed: int = 7, n_models: int = 3, n_samples: int = 4) -> Path:
    """Write a synthetic bundle; model k is perturbed more strongly than model k-1.

    Each sample has a reference clip (raw planar frames), two tracks, a
    plan DAG, and per model a perturbed clip, perturbed tracks, a plan with
    k errors, region embeddings with growing jitter, and judge scores.
    """
    rng = np.random.default_rng(seed)
    root = Path(directory)
    records = []
    actions = ["grasp(green block)", "lift(green block)", "place(green block, yellow block)",
               "release(green block)", "retract()"]
    for s in range(n_samples):
        sid = f"s{s:02d}"
        gt = root / "ground_truth" / sid
        h, w, t = 24, 24, 3
        ref_clip = rng.integers(0, 256, size=(t, h, w, 3), dtype=np.uint8)
        write_raw_frames(gt, ref_clip)
        base = np.cumsum(rng.normal(0, 4, size=(12, 2)), axis=0) + 100
        obj = base + rng.normal(0, 2, size=base.shape) + 20
        _dump(gt / "trajectories.json", {"tracks": [
            {"track_id": "ee", "entity": "end_effector", "points": base.round(3).tolist()},
            {"track_id": "obj", "entity": "object", "points": obj.round(3).tolist()},
        ]})
        nodes = [{"id": f"n{i}", "action": a} for i, a in enumerate(actions)]
        edges = [["n0", "n1"], ["n1", "n2"], ["n2", "n3"], ["n0", "n4"]]
        _dump(gt / "plan_dag.json", {"nodes": nodes, "edges": edges})

        for k in range(n_models):
            mid = f"model_{chr(ord('a') + k)}"
            d = root / "models" / mid / sid
            noise = rng.normal(0, 6 * k, size=ref_clip.shape) if k else np.zeros(ref_clip.shape)
            write_raw_frames(d, np.clip(ref_clip + noise, 0, 255).astype(np.uint8))
            m = 10 + 2 * k
            _dump(d / "trajectories.json", {"tracks": [
                {"track_id": "ee", "entity": "end_effector",
                 "points": (base[:: max(1, 12 // m)][:m] + rng.normal(0, 1 + 3 * k, size=(min(m, 12), 2))).round(3).tolist()},
                {"track_id": "obj", "entity": "object",
                 "points": (obj + rng.normal(0, 1 + 3 * k, size=obj.shape)).round(3).tolist()},
            ]})
            steps = list(actions)
            for _ in range(k):
                i = int(rng.integers(len(steps)))
                steps.pop(i)
            if k:
                steps.append("wave(hand)")
            _dump(d / "plan.json", {"steps": steps})
            dim = 8
            regions = []
            for region in ("arm", "object", "background"):
                v0 = rng.normal(size=dim) + 3
                frames = v0 + rng.normal(0, 0.05 + 0.3 * k, size=(5, dim))
                regions.append({"region": region, "frames": frames.round(5).tolist()})
            _dump(d / "embeddings.json", {"regions": regions})
            records.append({
                "model_id": mid,
                "sample_id": sid,
                "measurements": {
                    "fvd": round(float(300 + 400 * k + rng.normal(0, 30)), 3),
                    "sequence_match": int(np.clip(5 - k + rng.integers(-1, 1), 1, 5)),
                    "execution_quality": int(np.clip(4 - k + rng.integers(0, 2), 1, 5)),
                    "physics_object_interaction": int(np.clip(4 - k, 1, 5)),
                    "physics_temporal": None if s == 0 else int(np.clip(5 - k, 1, 5)),
                },
            })
    with open(root / "records.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return root
