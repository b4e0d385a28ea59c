"""Batch scoring and calibration runs over an input bundle."""

from __future__ import annotations

import datetime as _dt
import json
import logging
import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import consistency, ingest, plan, trajectory
from .aggregation import GroupScore, LeaderboardRow, group_score, leaderboard
from .calibration import CalibrationResult, CalibrationSample, calibrate_metric, frozen_document
from .errors import CalibrationError, InputFileError
from .normalization import clip, desirability, prescale
from .registry import EvaluationRecord, RegistryConfig, registry_hash, theta_hash, validate_record

log = logging.getLogger(__name__)

DEFAULT_WORKERS = 4


def compute_sample(sample: ingest.SampleInputs) -> dict[str, float]:
    """Natively computed metrics for one (model, sample) directory."""
    out: dict[str, float] = {}
    d, ref = sample.directory, sample.reference

    gen_traj = d / "trajectories.json"
    if gen_traj.is_file() and ref is not None and (ref / "trajectories.json").is_file():
        score, unmatched = trajectory.score_tracks(
            ingest.read_trajectories(gen_traj), ingest.read_trajectories(ref / "trajectories.json")
        )
        if unmatched:
            log.warning("%s/%s: unmatched track ids %s", sample.model_id, sample.sample_id, unmatched)
        if score is not None:
            out.update(score.as_metrics())

    if (d / "plan.json").is_file() and ref is not None and (ref / "plan_dag.json").is_file():
        gt = ingest.read_plan_dag(ref / "plan_dag.json")
        out.update(plan.score_plan(ingest.read_plan(d / "plan.json"), gt).as_metrics())

    if (d / "embeddings.json").is_file():
        out.update(consistency.consistency_metrics(ingest.read_embeddings(d / "embeddings.json")))

    clip_test = ingest.read_frames(d)
    clip_ref = ingest.read_frames(ref) if ref is not None else None
    if clip_test is not None and clip_ref is not None:
        try:
            out.update(consistency.video_frame_metrics(clip_ref, clip_test))
        except ValueError as exc:
            raise InputFileError(str(exc), file=str(d), key="frames") from None
    return out


def collect_records(
    bundle: ingest.InputBundle, workers: int = DEFAULT_WORKERS
) -> tuple[list[EvaluationRecord], list[str]]:
    """Merge computed and ingested measurements, one record per (model, sample).

    Computation runs on a bounded pool; results are collected in input order
    and the output is sorted by model then sample id.
    """
    warnings: list[str] = []
    merged: dict[tuple[str, str], dict[str, float]] = {}
    for rec in bundle.records:
        key = (rec.model_id, rec.sample_id)
        if key in merged:
            raise InputFileError(f"duplicate record for {key[0]}/{key[1]}", key=f"{key[0]}/{key[1]}")
        merged[key] = dict(rec.measurements)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        computed = list(pool.map(compute_sample, bundle.samples))
    for sample, values in zip(bundle.samples, computed):
        key = (sample.model_id, sample.sample_id)
        slot = merged.setdefault(key, {})
        for mid, v in values.items():
            if mid in slot:
                warnings.append(f"{key[0]}/{key[1]}: computed {mid} overrides ingested value")
            slot[mid] = v
    records = [EvaluationRecord(m, s, dict(sorted(v.items()))) for (m, s), v in sorted(merged.items())]
    return records, warnings


@dataclass
class ModelScores:
    model_id: str
    raw: dict[str, float]
    desirability: dict[str, float]
    sample_counts: dict[str, int]
    groups: list[GroupScore] = field(default_factory=list)


def model_raw_values(records: Sequence[EvaluationRecord], registry: RegistryConfig) -> dict[str, dict[str, tuple[float, int]]]:
    """Per model and metric: mean of anchor-clipped sample values, and sample count.

    Clipping before averaging keeps infinite PSNR (identical clips) finite;
    NaN values are dropped.
    """
    acc: dict[str, dict[str, list[float]]] = defaultdict(lambda: defaultdict(list))
    specs = {m.metric_id: m for m in registry.metrics}
    for rec in records:
        acc[rec.model_id]  # models with no registered metric still get a row
        for mid, v in rec.measurements.items():
            spec = specs.get(mid)
            if spec is None or math.isnan(v):
                continue
            acc[rec.model_id][mid].append(clip(v, spec.low, spec.high))
    return {
        model: {mid: (math.fsum(vs) / len(vs), len(vs)) for mid, vs in sorted(per.items())}
        for model, per in sorted(acc.items())
    }


def score_models(records: Sequence[EvaluationRecord], registry: RegistryConfig) -> list[ModelScores]:
    out = []
    for model, per in model_raw_values(records, registry).items():
        raw = {mid: v for mid, (v, _) in per.items()}
        des = {mid: desirability(x, registry.metric(mid), registry.epsilon).value for mid, x in raw.items()}
        groups = [group_score(des, g, model) for g in registry.groups]
        out.append(ModelScores(model, raw, des, {mid: n for mid, (_, n) in per.items()}, groups))
    return out


def build_leaderboard(models: Sequence[ModelScores], registry: RegistryConfig) -> list[LeaderboardRow]:
    scorable = {m.model_id: m.groups for m in models if any(g.available for g in m.groups)}
    return leaderboard(scorable, registry.weights, registry.aggregation_mode)


def run_metadata(registry: RegistryConfig, seed: int, folds: int) -> dict:
    return {
        "registry_sha256": registry_hash(registry),
        "theta_sha256": theta_hash(registry),
        "seed": seed,
        "folds": folds,
        "aggregation_mode": registry.aggregation_mode.value,
        "groups": [g.group_id for g in registry.groups],
    }


@dataclass
class ScoreRun:
    records: list[EvaluationRecord]
    models: list[ModelScores]
    rows: list[LeaderboardRow]
    meta: dict
    warnings: list[str]


def score_bundle(
    input_path: Path, registry: RegistryConfig, seed: int = 0, folds: int = 5, workers: int = DEFAULT_WORKERS
) -> ScoreRun:
    bundle = ingest.discover_bundle(Path(input_path))
    records, warnings = collect_records(bundle, workers)
    # computed metrics are trusted (infinite PSNR is a documented sentinel)
    for rec in bundle.records:
        warnings.extend(validate_record(rec, registry))
    if not records:
        warnings.append("no records found; leaderboard is empty")
    models = score_models(records, registry)
    rows = build_leaderboard(models, registry)
    for m in models:
        if not any(g.available for g in m.groups):
            warnings.append(f"model {m.model_id!r} has no registered metrics; left off the leaderboard")
    return ScoreRun(records, models, rows, run_metadata(registry, seed, folds), warnings)


def write_score_outputs(run: ScoreRun, out_dir: Path, fmt: str = "csv") -> list[Path]:
    """Write the record stream, model scores, leaderboard and run metadata.

    Only ``run_meta.json`` carries a timestamp; every other file is a pure
    function of the inputs.
    """
    from .report import write_leaderboard

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    meta_line = ingest.dumps_line({"_meta": run.meta})
    written = []

    path = out_dir / "scored_records.jsonl"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(meta_line + "\n")
        for rec in run.records:
            fh.write(
                ingest.dumps_line(
                    {
                        "model_id": rec.model_id,
                        "sample_id": rec.sample_id,
                        "measurements": {k: ingest.encode_value(v) for k, v in rec.measurements.items()},
                    }
                )
                + "\n"
            )
    written.append(path)

    path = out_dir / "model_scores.jsonl"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(meta_line + "\n")
        overall = {r.model_id: r for r in run.rows}
        for m in run.models:
            row = overall.get(m.model_id)
            fh.write(
                ingest.dumps_line(
                    {
                        "model_id": m.model_id,
                        "raw": m.raw,
                        "desirability": m.desirability,
                        "sample_counts": m.sample_counts,
                        "groups": {g.group_id: {"value": g.value, "n": g.available_count} for g in m.groups},
                        "overall": row.overall if row else None,
                        "effective_weights": row.effective_weights if row else {},
                    }
                )
                + "\n"
            )
    written.append(path)

    written.append(write_leaderboard(run.rows, run.meta, out_dir, fmt))

    path = out_dir / "run_meta.json"
    meta = dict(run.meta, warnings=run.warnings, format=fmt)
    meta["created_at"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    written.append(path)
    return written


def calibration_samples(
    records: Sequence[EvaluationRecord],
    ratings: Sequence[tuple[str, str, str, float]],
    registry: RegistryConfig,
) -> dict[str, list[CalibrationSample]]:
    """Pair ratings with pre-scaled measurements by (model, sample, metric)."""
    index = {(r.model_id, r.sample_id): r for r in records}
    known = set(registry.metric_ids)
    out: dict[str, list[CalibrationSample]] = {}
    for model, sample, metric, rating in sorted(ratings):
        if metric not in known:
            continue
        out.setdefault(metric, [])
        rec = index.get((model, sample))
        value = rec.get(metric) if rec is not None else None
        if value is None or math.isnan(value):
            continue
        out[metric].append(CalibrationSample(prescale(value, registry.metric(metric)), rating))
    return out


def calibrate_registry(
    records: Sequence[EvaluationRecord],
    ratings: Sequence[tuple[str, str, str, float]],
    registry: RegistryConfig,
    seed: int = 0,
    folds: int = 5,
) -> tuple[list[CalibrationResult], str]:
    """Calibrate every rated metric with its registered family.

    Raises :class:`CalibrationError` naming each metric with too few pairs.
    """
    paired = calibration_samples(records, ratings, registry)
    if not paired:
        raise CalibrationError("no ratings refer to registered metrics")
    short = sorted(m for m, s in paired.items() if len(s) < 2 * folds)
    if short:
        detail = ", ".join(f"{m} ({len(paired[m])} pairs)" for m in short)
        raise CalibrationError(f"insufficient samples for {folds}-fold calibration: {detail}")
    results = [
        calibrate_metric(
            paired[mid], registry.metric(mid).family, k=folds, seed=seed, metric_id=mid, epsilon=registry.epsilon
        )
        for mid in sorted(paired)
    ]
    return results, frozen_document(results, seed, folds)
