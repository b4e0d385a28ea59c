"""Readers and writers for the on-disk formats.

Input bundle layout accepted by ``wowbench score --input DIR``::

    DIR/records.jsonl                         externally computed raw metrics (optional)
    DIR/ground_truth/<sample>/trajectories.json
    DIR/ground_truth/<sample>/plan_dag.json
    DIR/ground_truth/<sample>/frames/*.png    or frames.raw + frames.json
    DIR/models/<model>/<sample>/trajectories.json
    DIR/models/<model>/<sample>/plan.json
    DIR/models/<model>/<sample>/embeddings.json
    DIR/models/<model>/<sample>/frames/...

Every file is optional; a sample contributes whichever metrics its files allow.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Iterator, Optional

import numpy as np

from .consistency import RegionEmbeddingSequence
from .errors import InputFileError, PlanGraphError
from .plan import PlanDAG, PredictedPlan
from .registry import EvaluationRecord
from .trajectory import Trajectory

_NONFINITE = {"inf": math.inf, "+inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def _read_json(path: Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputFileError("file not found", file=str(path)) from None
    except json.JSONDecodeError as exc:
        raise InputFileError(f"invalid JSON: {exc}", file=str(path), key=f"line {exc.lineno}") from None


def encode_value(x: float):
    """JSON-safe float: non-finite values become the strings 'inf', '-inf', 'nan'."""
    if math.isfinite(x):
        return x
    if math.isnan(x):
        return "nan"
    return "inf" if x > 0 else "-inf"


def decode_value(v: Any, file: str = "", key: str = "") -> Optional[float]:
    if v is None:
        return None
    if isinstance(v, str):
        if v.lower() in _NONFINITE:
            return _NONFINITE[v.lower()]
        raise InputFileError(f"expected a number, got {v!r}", file=file, key=key)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InputFileError(f"expected a number, got {v!r}", file=file, key=key)
    return float(v)


def dumps_line(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def read_jsonl(path: Path) -> Iterator[tuple[int, dict]]:
    try:
        fh = open(path, encoding="utf-8")
    except FileNotFoundError:
        raise InputFileError("file not found", file=str(path)) from None
    with fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputFileError(f"invalid JSON: {exc.msg}", file=str(path), key=f"line {lineno}") from None
            if not isinstance(obj, dict):
                raise InputFileError("each line must be a JSON object", file=str(path), key=f"line {lineno}")
            yield lineno, obj


def read_records(path: Path) -> list[EvaluationRecord]:
    """Read raw-measurement records; a leading ``{"_meta": ...}`` line is skipped."""
    out = []
    for lineno, obj in read_jsonl(path):
        if "_meta" in obj:
            continue
        for k in ("model_id", "sample_id"):
            if k not in obj:
                raise InputFileError(f"missing {k}", file=str(path), key=f"line {lineno}")
        meas = obj.get("measurements", {})
        if not isinstance(meas, dict):
            raise InputFileError("measurements must be an object", file=str(path), key=f"line {lineno}")
        values = {
            str(mid): decode_value(v, str(path), f"line {lineno}.measurements.{mid}") for mid, v in meas.items()
        }
        out.append(EvaluationRecord(str(obj["model_id"]), str(obj["sample_id"]), values))
    return out


def read_ratings(path: Path) -> list[tuple[str, str, str, float]]:
    """Human ratings as ``(model_id, sample_id, metric_id, rating)``."""
    out = []
    for lineno, obj in read_jsonl(path):
        try:
            rating = decode_value(obj["rating"], str(path), f"line {lineno}.rating")
            out.append((str(obj["model_id"]), str(obj["sample_id"]), str(obj["metric_id"]), rating))
        except KeyError as exc:
            raise InputFileError(f"missing {exc.args[0]}", file=str(path), key=f"line {lineno}") from None
    return out


def read_trajectories(path: Path) -> list[Trajectory]:
    doc = _read_json(path)
    tracks = doc.get("tracks") if isinstance(doc, dict) else None
    if not isinstance(tracks, list):
        raise InputFileError("expected an object with a 'tracks' list", file=str(path), key="tracks")
    out = []
    for i, t in enumerate(tracks):
        try:
            out.append(Trajectory(str(t["track_id"]), t.get("entity", "object"), np.asarray(t["points"], dtype=float)))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputFileError(f"bad track: {exc}", file=str(path), key=f"tracks[{i}]") from None
    return out


def read_plan_dag(path: Path) -> PlanDAG:
    doc = _read_json(path)
    try:
        return PlanDAG.from_dict(doc)
    except PlanGraphError as exc:
        key = "edges" if exc.cycle is not None else None
        raise InputFileError(str(exc), file=str(path), key=key) from None
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputFileError(f"bad plan DAG: {exc}", file=str(path)) from None


def read_plan(path: Path) -> PredictedPlan:
    doc = _read_json(path)
    steps = doc.get("steps") if isinstance(doc, dict) else None
    if not isinstance(steps, list):
        raise InputFileError("expected an object with a 'steps' list", file=str(path), key="steps")
    try:
        return PredictedPlan([str(s) for s in steps])
    except ValueError as exc:
        raise InputFileError(str(exc), file=str(path), key="steps") from None


def read_embeddings(path: Path) -> list[RegionEmbeddingSequence]:
    doc = _read_json(path)
    regions = doc.get("regions") if isinstance(doc, dict) else None
    if not isinstance(regions, list):
        raise InputFileError("expected an object with a 'regions' list", file=str(path), key="regions")
    out = []
    for i, r in enumerate(regions):
        try:
            out.append(RegionEmbeddingSequence(r["region"], np.asarray(r["frames"], dtype=np.float64)))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputFileError(f"bad region: {exc}", file=str(path), key=f"regions[{i}]") from None
    return out


def read_frames(directory: Path) -> Optional[np.ndarray]:
    """Load a clip as a ``(frames, h, w, c)`` uint8 array, or ``None`` if absent.

    Accepts ``frames/*.png`` (sorted by name) or ``frames.raw`` with a
    ``frames.json`` sidecar ``{"width", "height", "frames", "channels"}``;
    the raw dump is planar, i.e. each frame stores its channels as whole planes.
    """
    png_dir = directory / "frames"
    raw = directory / "frames.raw"
    if png_dir.is_dir():
        from PIL import Image

        files = sorted(png_dir.glob("*.png"))
        if not files:
            return None
        arrays = []
        for f in files:
            try:
                with Image.open(f) as im:
                    arrays.append(np.asarray(im.convert("RGB"), dtype=np.uint8))
            except OSError as exc:
                raise InputFileError(f"unreadable image: {exc}", file=str(f)) from None
        if len({a.shape for a in arrays}) != 1:
            raise InputFileError("frames differ in size", file=str(png_dir))
        return np.stack(arrays)
    if raw.is_file():
        header_path = directory / "frames.json"
        header = _read_json(header_path)
        try:
            w, h, n = int(header["width"]), int(header["height"]), int(header["frames"])
            c = int(header.get("channels", 3))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputFileError(f"bad frame header: {exc}", file=str(header_path)) from None
        data = np.fromfile(raw, dtype=np.uint8)
        if data.size != n * c * h * w:
            raise InputFileError(
                f"expected {n * c * h * w} bytes, found {data.size}", file=str(raw)
            )
        return data.reshape(n, c, h, w).transpose(0, 2, 3, 1)
    return None


def write_raw_frames(directory: Path, clip: np.ndarray) -> None:
    """Inverse of the raw branch of :func:`read_frames`."""
    directory.mkdir(parents=True, exist_ok=True)
    n, h, w, c = clip.shape
    np.ascontiguousarray(clip.transpose(0, 3, 1, 2), dtype=np.uint8).tofile(directory / "frames.raw")
    (directory / "frames.json").write_text(
        json.dumps({"width": w, "height": h, "frames": n, "channels": c}, sort_keys=True) + "\n", "utf-8"
    )


@dataclass
class SampleInputs:
    model_id: str
    sample_id: str
    directory: Optional[Path] = None
    reference: Optional[Path] = None


@dataclass
class InputBundle:
    records: list[EvaluationRecord] = field(default_factory=list)
    samples: list[SampleInputs] = field(default_factory=list)


def discover_bundle(path: Path) -> InputBundle:
    """Collect ingested records and per-sample computation inputs."""
    path = Path(path)
    if path.is_file():
        return InputBundle(records=read_records(path))
    if not path.is_dir():
        raise InputFileError("input path does not exist", file=str(path))
    bundle = InputBundle()
    if (path / "records.jsonl").is_file():
        bundle.records = read_records(path / "records.jsonl")
    models = path / "models"
    gt_root = path / "ground_truth"
    if models.is_dir():
        for mdir in sorted(p for p in models.iterdir() if p.is_dir()):
            for sdir in sorted(p for p in mdir.iterdir() if p.is_dir()):
                ref = gt_root / sdir.name
                bundle.samples.append(
                    SampleInputs(mdir.name, sdir.name, sdir, ref if ref.is_dir() else None)
                )
    return bundle


def iter_sorted(records: Iterable[EvaluationRecord]) -> list[EvaluationRecord]:
    return sorted(records, key=lambda r: (r.model_id, r.sample_id))
