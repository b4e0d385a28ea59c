"""Command-line entry point: ``wowbench {score,calibrate,traj,plan,consistency,report}``.

Exit codes: 0 success, 1 input error, 2 internal error.  Errors are written
to stderr as a single JSON object ``{"error", "file", "key"}``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import consistency, ingest, pipeline, plan, report, trajectory
from .errors import CalibrationError, InputFileError, RegistryError
from .registry import default_registry_text, load_registry

log = logging.getLogger("wowbench")

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2


def _load_registry(args) -> "pipeline.RegistryConfig":
    reg_path = args.registry
    try:
        text = Path(reg_path).read_text("utf-8") if reg_path else default_registry_text()
    except OSError as exc:
        raise InputFileError(f"cannot read registry: {exc.strerror}", file=str(reg_path)) from None
    frozen = None
    if getattr(args, "frozen", None):
        try:
            frozen = Path(args.frozen).read_text("utf-8")
        except OSError as exc:
            raise InputFileError(f"cannot read frozen parameters: {exc.strerror}", file=str(args.frozen)) from None
    try:
        return load_registry(text, frozen)
    except RegistryError as exc:
        raise InputFileError(str(exc), file=str(reg_path or "<default registry>"), key=exc.key) from None


def _emit(payload: dict, args) -> None:
    text = json.dumps(payload, sort_keys=True, indent=None if args.format == "json-lines" else 2)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def cmd_score(args) -> int:
    registry = _load_registry(args)
    run = pipeline.score_bundle(Path(args.input), registry, args.seed, args.folds, args.workers)
    for w in run.warnings:
        log.warning(w)
    for path in pipeline.write_score_outputs(run, Path(args.out), args.format):
        log.info("wrote %s", path)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    registry = _load_registry(args)
    src = Path(args.input)
    if src.is_dir():
        for name in ("scored_records.jsonl", "records.jsonl"):
            if (src / name).is_file():
                src = src / name
                break
        else:
            raise InputFileError("no scored_records.jsonl or records.jsonl in directory", file=str(src))
    records = ingest.read_records(src)
    ratings = ingest.read_ratings(Path(args.ratings))
    try:
        _, text = pipeline.calibrate_registry(records, ratings, registry, args.seed, args.folds)
    except CalibrationError as exc:
        raise InputFileError(str(exc), file=str(args.ratings)) from None
    out = Path(args.out)
    if out.is_dir() or not out.suffix:
        out = out / "frozen_params.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8", newline="\n")
    log.info("wrote %s", out)
    return EXIT_OK


def cmd_traj(args) -> int:
    gen = {t.track_id: t for t in ingest.read_trajectories(Path(args.input))}
    ref = {t.track_id: t for t in ingest.read_trajectories(Path(args.reference))}
    tracks = {}
    for tid in sorted(set(gen) & set(ref)):
        s = trajectory.score_trajectory(gen[tid], ref[tid])
        tracks[tid] = s.as_metrics(prefix="")
    combined, unmatched = trajectory.score_tracks(list(gen.values()), list(ref.values()))
    _emit(
        {
            "tracks": tracks,
            "mean": combined.as_metrics(prefix="") if combined else None,
            "unmatched": unmatched,
        },
        args,
    )
    return EXIT_OK


def cmd_plan(args) -> int:
    gt = ingest.read_plan_dag(Path(args.reference))
    pred = ingest.read_plan(Path(args.input))
    matching = plan.match_steps(pred, gt)
    score = plan.score_plan(pred, gt)
    _emit({"scores": score.as_metrics(), "matching": {str(k): v for k, v in matching.items()}}, args)
    return EXIT_OK


def cmd_consistency(args) -> int:
    seqs = ingest.read_embeddings(Path(args.input))
    _emit(consistency.consistency_metrics(seqs), args)
    return EXIT_OK


def cmd_report(args) -> int:
    for path in report.cmd_report(Path(args.input), Path(args.out), args.format):
        log.info("wrote %s", path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--registry", type=Path, default=None, help="registry YAML (default: bundled registry)")
    shared.add_argument("--frozen", type=Path, default=None, help="frozen-parameter JSON to merge into the registry")
    shared.add_argument("--input", type=Path, required=True)
    shared.add_argument("--out", type=Path, default=None)
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--folds", type=int, default=5)
    shared.add_argument("--format", choices=report.FORMATS, default="csv")
    shared.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="wowbench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", parents=[shared], help="score an input bundle and write a leaderboard")
    p.add_argument("--workers", type=int, default=pipeline.DEFAULT_WORKERS)
    p.set_defaults(func=cmd_score, needs_out=True)

    p = sub.add_parser("calibrate", parents=[shared], help="select and freeze mapping parameters")
    p.add_argument("--ratings", type=Path, required=True, help="human ratings JSONL")
    p.set_defaults(func=cmd_calibrate, needs_out=True)

    p = sub.add_parser("traj", parents=[shared], help="trajectory distances for one generated/reference pair")
    p.add_argument("--reference", type=Path, required=True)
    p.set_defaults(func=cmd_traj, needs_out=False)

    p = sub.add_parser("plan", parents=[shared], help="plan scores for one predicted plan against a DAG")
    p.add_argument("--reference", type=Path, required=True)
    p.set_defaults(func=cmd_plan, needs_out=False)

    p = sub.add_parser("consistency", parents=[shared], help="regional consistency for one embedding file")
    p.set_defaults(func=cmd_consistency, needs_out=False)

    p = sub.add_parser("report", parents=[shared], help="render tables and plot series from score outputs")
    p.set_defaults(func=cmd_report, needs_out=True)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if args.needs_out and args.out is None:
        parser.error(f"{args.command}: --out is required")
    try:
        return args.func(args)
    except InputFileError as exc:
        print(json.dumps(exc.report(), sort_keys=True), file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(json.dumps({"error": f"internal: {exc!r}", "file": None, "key": None}, sort_keys=True), file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
