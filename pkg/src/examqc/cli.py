"""Command-line driver.

Subcommands mirror the pipeline stages: synth/ingest put data in the
store, stats/train-scorer/score/run/eval advance it, serve exposes the
HTTP surface. Failures exit nonzero with a single diagnostic line.
All randomness is controlled by the --seed flags.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .data.models import CleaningRules, DataError
from .data.synth import SynthSpec
from .learners import LearnerError
from .pipeline import PipelineError
from .scorer import DEFAULT_EPOCH_GRID, ExternalScoreError, ScorerError
from .store import Store, StoreError, resolve_root
from . import workflows

KNOWN_ERRORS = (DataError, StoreError, PipelineError, ScorerError,
                ExternalScoreError, LearnerError, ValueError, OSError)


def _epoch_grid(text: str) -> tuple[int, ...]:
    try:
        grid = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"epoch grid must be comma-separated integers, got {text!r}")
    if not grid:
        raise argparse.ArgumentTypeError("epoch grid is empty")
    return grid


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="examqc",
        description="Exam comment triage and item quality control")
    parser.add_argument("--store", default=None,
                        help="store directory (default: $EXAMQC_STORE or "
                        "./examqc-store)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--items", type=int, default=50)
    p.add_argument("--persons", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--comment-rate", type=float, default=SynthSpec.comment_rate)
    p.add_argument("--relevant-rate", type=float, default=SynthSpec.relevant_rate)
    p.add_argument("--bait-rate", type=float, default=SynthSpec.bait_rate)
    p.add_argument("--false-alarm-rate", type=float,
                   default=SynthSpec.false_alarm_rate)

    p = sub.add_parser("ingest", help="load, clean, and store exam data")
    p.add_argument("--responses", required=True, type=Path)
    p.add_argument("--comments", required=True, type=Path)
    p.add_argument("--items", required=True, type=Path)
    p.add_argument("--candidates", required=True, type=Path)
    p.add_argument("--min-total-time", type=float, default=0.0,
                   help="drop candidates below this total seconds")
    p.add_argument("--min-items-answered", type=int, default=0)
    p.add_argument("--exclude-candidate", action="append", default=[],
                   help="candidate id to exclude (repeatable)")

    p = sub.add_parser("stats", help="compute item statistics and flags")
    p.add_argument("--drift-threshold", type=float, default=0.5)

    p = sub.add_parser("train-scorer",
                       help="train the text scorer on labeled comments")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epoch-grid", type=_epoch_grid,
                   default=DEFAULT_EPOCH_GRID, metavar="N,N,...",
                   help="candidate epoch counts; validation F1 picks one "
                   "(default %(default)s). Small corpora with few "
                   "positives usually need a few hundred epochs or more "
                   "to move off the majority class.")

    p = sub.add_parser("score", help="score every comment")
    p.add_argument("--import", dest="import_path", type=Path, default=None,
                   help="CSV of externally produced probabilities "
                   "(comment_id,probability) used instead of the "
                   "trained scorer")

    p = sub.add_parser("run", help="run one model variant")
    p.add_argument("--variant", required=True,
                   choices=["M1", "M2", "M3", "M4", "M5"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", choices=["default", "small"],
                   default="default", help="hyperparameter grid preset")

    p = sub.add_parser("eval", help="emit evaluation reports over all runs")
    p.add_argument("--bins", type=int, default=20)

    p = sub.add_parser("serve", help="start the review service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    store = Store(resolve_root(args.store))
    try:
        return _dispatch(args, store)
    except KNOWN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args, store: Store) -> int:
    if args.command == "synth":
        spec = SynthSpec(n_items=args.items, n_persons=args.persons,
                         comment_rate=args.comment_rate,
                         relevant_rate=args.relevant_rate,
                         bait_rate=args.bait_rate,
                         false_alarm_rate=args.false_alarm_rate)
        ds = workflows.synth_workflow(store, spec, args.seed)
        print(f"store {store.root}: {len(ds.items)} items, "
              f"{len(ds.candidates)} candidates, "
              f"{len(ds.responses)} responses, "
              f"{len(ds.comments)} comments")
        return 0

    if args.command == "ingest":
        rules = CleaningRules(
            min_total_time_sec=args.min_total_time,
            min_items_answered=args.min_items_answered,
            excluded_candidate_ids=tuple(args.exclude_candidate))
        ds = workflows.ingest_workflow(
            store, args.responses, args.comments, args.items,
            args.candidates, rules)
        kept = len(ds.included_candidate_ids())
        print(f"ingested {len(ds.candidates)} candidates "
              f"({kept} kept after cleaning), {len(ds.comments)} comments")
        return 0

    if args.command == "stats":
        out = workflows.stats_workflow(
            store, drift_threshold=args.drift_threshold)
        calib = out["calibration"]
        n_flagged = sum(1 for v in out["flags"].values() if v)
        state = "converged" if calib.converged else "did NOT converge"
        print(f"stats for {len(out['stats'])} items (calibration {state} "
              f"in {calib.iterations} iterations); "
              f"{n_flagged} items flagged")
        return 0

    if args.command == "train-scorer":
        model = workflows.train_scorer_workflow(
            store, seed=args.seed, epoch_grid=args.epoch_grid)
        md = model.metadata
        print(f"scorer trained: epochs={md['epochs']} "
              f"val_f1={md['val_f1']:.4f} test_f1={md['test_f1']:.4f}")
        return 0

    if args.command == "score":
        scores = workflows.score_workflow(
            store, import_path=args.import_path)
        source = "imported" if args.import_path else "scored"
        print(f"{source} {len(scores)} comments -> {store.scores_path}")
        return 0

    if args.command == "run":
        run_id = workflows.run_workflow(
            store, args.variant, args.seed, grid_preset=args.grid)
        manifest = store.run_manifest(run_id)
        print(f"run {run_id}: {manifest['n_flagged_comments']} comments "
              f"flagged, {len(manifest['flagged_items'])} items")
        return 0

    if args.command == "eval":
        out_dir = workflows.eval_workflow(store, bins=args.bins)
        print(f"reports written to {out_dir}")
        return 0

    if args.command == "serve":
        import uvicorn

        from .service import create_app

        app = create_app(store)
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
        return 0

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
