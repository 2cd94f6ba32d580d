"""End-to-end stage orchestration over a Store.

Each function is one CLI subcommand's body and is also what the service
calls during retrains, so batch and live paths cannot drift apart. Every
stage reads its inputs from the store and writes its outputs back, which
keeps stages restartable and the prerequisites explicit.
"""
from __future__ import annotations

from pathlib import Path
from typing import Optional

from .data.models import CleaningRules, Dataset
from .data.synth import SynthSpec, generate_synthetic
from .evaluation import confusion, emit_reports, probability_histogram
from .learners import model_to_json
from .pipeline import (DEFAULT_FOREST_GRID, DEFAULT_GBT_GRID,
                       SMALL_FOREST_GRID, SMALL_GBT_GRID, VARIANTS,
                       PipelineError, aggregate_item_flags,
                       assemble_features, flagged_comments_rows,
                       run_variant, test_confusion)
from .psychometrics import (DEFAULT_DRIFT_THRESHOLD, FlagRuleConfig,
                            compute_item_statistics, read_item_stats_csv,
                            statistical_flags, write_flags_csv,
                            write_item_stats_csv, write_option_stats_csv)
from .scorer import (DEFAULT_EPOCH_GRID, ScorerModel, SplitSpec,
                     export_scores, import_external_scores,
                     score_comments, train_reference_scorer)
from .store import Store, StoreError

GRID_PRESETS = {
    "default": {"gbt": DEFAULT_GBT_GRID, "forest": DEFAULT_FOREST_GRID},
    "small": {"gbt": SMALL_GBT_GRID, "forest": SMALL_FOREST_GRID},
}


def synth_workflow(store: Store, spec: SynthSpec, seed: int) -> Dataset:
    ds, truth = generate_synthetic(spec, seed)
    store.save_data(ds)
    store.save_ground_truth(truth.to_json())
    return ds


def ingest_workflow(store: Store, responses: Path, comments: Path,
                    items: Path, candidates: Path,
                    rules: CleaningRules) -> Dataset:
    from .data.cleaning import apply_cleaning
    from .data.io import load_dataset

    ds = load_dataset(responses, comments, items, candidates)
    ds = apply_cleaning(ds, rules)
    store.save_data(ds, rules=rules)
    return ds


def stats_workflow(store: Store,
                   drift_threshold: float = DEFAULT_DRIFT_THRESHOLD,
                   flag_config: Optional[FlagRuleConfig] = None) -> dict:
    ds = store.load_data()
    stats, calib = compute_item_statistics(
        ds, drift_threshold=drift_threshold)
    flags = statistical_flags(
        stats, flag_config if flag_config is not None
        else FlagRuleConfig(drift_threshold=drift_threshold))
    store.stats_dir.mkdir(parents=True, exist_ok=True)
    write_item_stats_csv(stats, store.stats_dir / "item_stats.csv")
    write_option_stats_csv(stats, store.stats_dir / "option_stats.csv")
    write_flags_csv(flags, store.stats_dir / "flags.csv")
    return {"stats": stats, "calibration": calib, "flags": flags}


def train_scorer_workflow(store: Store, seed: int = 0,
                          epoch_grid=DEFAULT_EPOCH_GRID) -> ScorerModel:
    ds = store.load_data()
    labeled = [c for c in ds.comments.values() if c.label is not None]
    model = train_reference_scorer(
        labeled, split=SplitSpec(seed=seed), epoch_grid=tuple(epoch_grid))
    store.scorer_dir.mkdir(parents=True, exist_ok=True)
    model.save(store.scorer_model_path)
    return model


def score_workflow(store: Store,
                   import_path: Optional[Path] = None) -> dict[str, float]:
    ds = store.load_data()
    if import_path is not None:
        scores = import_external_scores(Path(import_path), ds)
    else:
        if not store.scorer_model_path.exists():
            raise StoreError(
                "no trained scorer in store (run train-scorer first, or "
                "pass --import)")
        model = ScorerModel.load(store.scorer_model_path)
        scores = score_comments(model, ds)
    store.scorer_dir.mkdir(parents=True, exist_ok=True)
    export_scores(scores, store.scores_path)
    return scores


def _load_scores(store: Store, ds: Dataset) -> dict[str, float]:
    if not store.scores_path.exists():
        raise StoreError(
            "no comment scores in store (run score before run)")
    return import_external_scores(store.scores_path, ds)


def _load_stats(store: Store) -> dict:
    path = store.stats_dir / "item_stats.csv"
    if not path.exists():
        raise StoreError(
            "no item statistics in store (run stats before this variant)")
    return read_item_stats_csv(path)


def true_item_set(ds: Dataset) -> set[str]:
    """Items carrying at least one label-1 comment: the review-meeting
    baseline the overlap table compares against."""
    return {c.item_id for c in ds.comments.values() if c.label == 1}


def run_workflow(store: Store, variant: str, seed: int,
                 grid_preset: str = "default",
                 min_item_flag_count: int = 1) -> str:
    if variant not in VARIANTS:
        raise PipelineError(f"unknown variant {variant!r}")
    if grid_preset not in GRID_PRESETS:
        raise PipelineError(f"unknown grid preset {grid_preset!r}")
    ds = store.load_data()
    scores = _load_scores(store, ds)
    kind, columns = VARIANTS[variant]
    stats = _load_stats(store) if len(columns) > 2 else {}
    features = assemble_features(ds, stats, scores, variant)
    grid = GRID_PRESETS[grid_preset][kind] if kind else None
    data_hash = store.data_hash()
    result = run_variant(variant, features, seed, grid=grid,
                         data_hash=data_hash)

    item_flags = aggregate_item_flags(result.flagged_comment_ids, ds,
                                      min_count=min_item_flag_count)
    full_counts = result.full_confusion(ds)
    manifest = {
        "variant": variant,
        "seed": seed,
        "grid_preset": grid_preset if kind else None,
        "status": "complete",
        "data_hash": data_hash,
        "label_epoch": store.label_epoch(),
        "n_comments": len(result.comment_ids),
        "n_flagged_comments": len(result.flagged_comment_ids),
        "flagged_items": sorted(item_flags),
        "provenance": result.provenance,
        "full_confusion": {"tp": full_counts.tp, "fp": full_counts.fp,
                           "fn": full_counts.fn, "tn": full_counts.tn},
    }
    if kind is not None:
        t = test_confusion(result, ds)
        manifest["test_confusion"] = {"tp": t.tp, "fp": t.fp, "fn": t.fn,
                                      "tn": t.tn}
        manifest["best_params"] = result.best_params
        manifest["cv_mean_f1"] = result.cv.best_mean_f1

    run_id = store.run_id(variant, seed, data_hash)
    store.write_run(
        run_id, manifest, flagged_comments_rows(result, ds),
        cv_rows=result.cv.table if result.cv is not None else None,
        model_json=model_to_json(result.model)
        if result.model is not None else None)

    labeled = {cid for cid, c in ds.comments.items()
               if c.label is not None}
    flagged = set(result.flagged_comment_ids)
    false_pos = {cid for cid in flagged
                 if cid in labeled and ds.comments[cid].label == 0}
    hist = probability_histogram(
        scores, {(variant, "flagged"): flagged,
                 (variant, "false_positive"): false_pos})
    emit_reports(store.run_dir(run_id) / "reports",
                 {variant: full_counts}, {variant: item_flags},
                 true_item_set(ds), len(ds.items),
                 histogram_rows=hist, manifest=manifest)
    return run_id


def eval_workflow(store: Store, bins: int = 20) -> Path:
    ds = store.load_data()
    counts_by_model = {}
    item_flags_by_model = {}
    subsets = {}
    run_ids = {}
    truth = {cid: c.label for cid, c in ds.comments.items()
             if c.label is not None}
    for variant in VARIANTS:
        run_id = store.latest_run_for_variant(variant)
        if run_id is None:
            continue
        run_ids[variant] = run_id
        rows = store.read_flagged_comments(run_id)
        flagged = {r["comment_id"] for r in rows if r["flagged"]}
        pred = {cid: int(cid in flagged) for cid in truth}
        counts_by_model[variant] = confusion(pred, truth)
        item_flags_by_model[variant] = aggregate_item_flags(flagged, ds)
        subsets[(variant, "flagged")] = flagged
        subsets[(variant, "false_positive")] = {
            cid for cid in flagged if truth.get(cid) == 0}
    if not counts_by_model:
        raise StoreError("no completed runs to evaluate (run run first)")
    scores = _load_scores(store, ds)
    hist = probability_histogram(scores, subsets, bins=bins)
    manifest = {
        "runs": run_ids,
        "data_hash": store.data_hash(),
        "label_epoch": store.label_epoch(),
        "n_items": len(ds.items),
        "n_comments": len(ds.comments),
        "n_labeled": len(truth),
    }
    emit_reports(store.reports_dir, counts_by_model, item_flags_by_model,
                 true_item_set(ds), len(ds.items), histogram_rows=hist,
                 manifest=manifest)
    return store.reports_dir
