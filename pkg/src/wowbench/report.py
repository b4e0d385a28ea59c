"""Leaderboard rendering (Markdown, CSV, JSON lines) and plot-data series."""

from __future__ import annotations

import csv
import io
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Optional, Sequence

from . import ingest
from .aggregation import LeaderboardRow
from .errors import InputFileError

FORMATS = ("csv", "markdown", "json-lines")
_EXT = {"csv": "csv", "markdown": "md", "json-lines": "jsonl"}
_META_COLUMNS = ("registry_sha256", "theta_sha256", "seed", "folds")


def fmt2(x: Optional[float]) -> str:
    """Two decimals, half-up on the shortest decimal repr (49.385 -> 49.39)."""
    if x is None:
        return "-"
    return str(Decimal(repr(float(x))).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _group_ids(rows: Sequence[LeaderboardRow], meta: dict) -> list[str]:
    if meta.get("groups"):
        return list(meta["groups"])
    seen: list[str] = []
    for r in rows:
        seen.extend(g for g in r.groups if g not in seen)
    return seen


def render_markdown(rows: Sequence[LeaderboardRow], meta: dict) -> str:
    """Markdown table; the best value in each numeric column is bold."""
    groups = _group_ids(rows, meta)
    best = {}
    for g in groups:
        vals = [r.groups.get(g) for r in rows if r.groups.get(g) is not None]
        best[g] = max(vals) if vals else None
    best_overall = max((r.overall for r in rows), default=None)

    def cell(v, b):
        s = fmt2(v)
        return f"**{s}**" if v is not None and b is not None and v == b else s

    lines = [
        "| Rank | Model | " + " | ".join(groups) + " | Overall |",
        "|---:|:---|" + "---:|" * len(groups) + "---:|",
    ]
    for r in rows:
        cells = [cell(r.groups.get(g), best[g]) for g in groups]
        lines.append(f"| {r.rank} | {r.model_id} | " + " | ".join(cells) + f" | {cell(r.overall, best_overall)} |")
    lines.append("")
    lines.append(
        f"<!-- mode={meta.get('aggregation_mode')} "
        + " ".join(f"{k}={meta.get(k)}" for k in _META_COLUMNS)
        + " -->"
    )
    return "\n".join(lines) + "\n"


def render_csv(rows: Sequence[LeaderboardRow], meta: dict) -> str:
    groups = _group_ids(rows, meta)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rank", "model_id", *groups, *(f"n_{g}" for g in groups), "overall", *_META_COLUMNS])
    for r in rows:
        w.writerow(
            [
                r.rank,
                r.model_id,
                *("" if r.groups.get(g) is None else repr(r.groups[g]) for g in groups),
                *(r.counts.get(g, 0) for g in groups),
                repr(r.overall),
                *(meta.get(k) for k in _META_COLUMNS),
            ]
        )
    return buf.getvalue()


def render_jsonl(rows: Sequence[LeaderboardRow], meta: dict) -> str:
    lines = [ingest.dumps_line({"_meta": meta})]
    for r in rows:
        lines.append(
            ingest.dumps_line(
                {
                    "rank": r.rank,
                    "model_id": r.model_id,
                    "overall": r.overall,
                    "groups": r.groups,
                    "counts": r.counts,
                    "effective_weights": r.effective_weights,
                }
            )
        )
    return "\n".join(lines) + "\n"


_RENDER = {"csv": render_csv, "markdown": render_markdown, "json-lines": render_jsonl}


def write_leaderboard(rows: Sequence[LeaderboardRow], meta: dict, out_dir: Path, fmt: str) -> Path:
    if fmt not in _RENDER:
        raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
    path = Path(out_dir) / f"leaderboard.{_EXT[fmt]}"
    path.write_text(_RENDER[fmt](rows, meta), encoding="utf-8", newline="\n")
    return path


def load_scored(input_dir: Path) -> tuple[list[LeaderboardRow], dict, list[dict]]:
    """Rebuild leaderboard rows and metadata from ``model_scores.jsonl``."""
    path = Path(input_dir) / "model_scores.jsonl"
    meta: dict = {}
    rows = []
    models = []
    for _, obj in ingest.read_jsonl(path):
        if "_meta" in obj:
            meta = obj["_meta"]
            continue
        models.append(obj)
        if obj.get("overall") is None:
            continue
        rows.append(
            LeaderboardRow(
                rank=0,
                model_id=obj["model_id"],
                overall=obj["overall"],
                groups={g: v["value"] for g, v in obj["groups"].items()},
                counts={g: v["n"] for g, v in obj["groups"].items()},
                effective_weights=obj.get("effective_weights", {}),
            )
        )
    rows.sort(key=lambda r: (-r.overall, r.model_id))
    for i, r in enumerate(rows, 1):
        r.rank = i
    return rows, meta, models


def group_series(rows: Sequence[LeaderboardRow], meta: dict) -> str:
    """Long-form bar-chart data: one line per (model, group)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model_id", "group_id", "value", "n"])
    for r in rows:
        for g in _group_ids(rows, meta):
            v = r.groups.get(g)
            w.writerow([r.model_id, g, "" if v is None else repr(v), r.counts.get(g, 0)])
    return buf.getvalue()


def metric_distribution(records_path: Path) -> str:
    """Per-sample raw values, one line per (metric, model, sample)."""
    lines = []
    for rec in ingest.read_records(records_path):
        for mid, v in rec.measurements.items():
            lines.append((mid, rec.model_id, rec.sample_id, v))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["metric_id", "model_id", "sample_id", "value"])
    for mid, model, sample, v in sorted(lines, key=lambda t: t[:3]):
        w.writerow([mid, model, sample, ingest.encode_value(v)])
    return buf.getvalue()


def cmd_report(input_dir: Path, out_dir: Path, fmt: str = "markdown") -> list[Path]:
    input_dir, out_dir = Path(input_dir), Path(out_dir)
    if not (input_dir / "model_scores.jsonl").is_file():
        raise InputFileError("scored outputs not found (run `score` first)", file=str(input_dir / "model_scores.jsonl"))
    rows, meta, _ = load_scored(input_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [write_leaderboard(rows, meta, out_dir, f) for f in dict.fromkeys(("markdown", "csv", fmt))]
    series = out_dir / "group_series.csv"
    series.write_text(group_series(rows, meta), encoding="utf-8", newline="\n")
    written.append(series)
    records = input_dir / "scored_records.jsonl"
    if records.is_file():
        dist = out_dir / "metric_distribution.csv"
        dist.write_text(metric_distribution(records), encoding="utf-8", newline="\n")
        written.append(dist)
    return written
