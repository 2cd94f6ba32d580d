"""Feature assembly and the five comment-triage model variants.

M1 thresholds the text-scorer probability directly. M2/M3 train a learner
on {scorer probability, comment count}; M4/M5 widen the matrix with the
item's psychometric profile and the commenting candidate's exam score.
Even variants boost, odd ones bag. All randomness flows from one seed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .data.models import Dataset
from .evaluation import ConfusionCounts, confusion
from .learners import (GridSearchResult, GridSearchSpec, fit_learner,
                       grid_search_cv)
from .psychometrics import ItemStatistics

FEATURES_SMALL = ("bert_prob", "comment_n")
FEATURES_FULL = ("bert_prob", "comment_n", "b", "p", "r", "mean_time", "n",
                 "drift_flag", "item_type", "exam_score")

# variant -> (learner kind, feature columns); M1 never trains
VARIANTS = {
    "M1": (None, ("bert_prob",)),
    "M2": ("gbt", FEATURES_SMALL),
    "M3": ("forest", FEATURES_SMALL),
    "M4": ("gbt", FEATURES_FULL),
    "M5": ("forest", FEATURES_FULL),
}

DEFAULT_FOREST_GRID = {
    "n_trees": [100, 300],
    "mtry": ["sqrt", "all", "third"],
    "max_depth": [None, 8],
}
DEFAULT_GBT_GRID = {
    "n_rounds": [100, 300],
    "eta": [0.1, 0.3],
    "max_depth": [3, 5],
}

# small preset for smoke runs and determinism checks; same shape, a
# fraction of the fit cost
SMALL_FOREST_GRID = {"n_trees": [25], "mtry": ["sqrt", "all"],
                     "max_depth": [8]}
SMALL_GBT_GRID = {"n_rounds": [25, 50], "eta": [0.3], "max_depth": [3]}


class PipelineError(ValueError):
    pass


@dataclass
class FeatureMatrix:
    comment_ids: list[str]          # lexicographic
    columns: tuple[str, ...]
    x: np.ndarray                   # float64, NaN = absent
    labels: np.ndarray              # int64, -1 = unlabeled
    item_ids: list[str]

    @property
    def labeled_mask(self) -> np.ndarray:
        return self.labels >= 0


@dataclass
class RunResult:
    variant: str
    comment_ids: list[str]
    probabilities: np.ndarray       # full-set, aligned with comment_ids
    flagged_comment_ids: list[str]  # sorted
    in_train: np.ndarray            # bool mask aligned with comment_ids
    test_comment_ids: list[str]
    model: object = None
    cv: Optional[GridSearchResult] = None
    best_params: Optional[dict] = None
    provenance: dict = field(default_factory=dict)

    def probability_map(self) -> dict[str, float]:
        return dict(zip(self.comment_ids, map(float, self.probabilities)))

    def full_confusion(self, dataset: Dataset) -> ConfusionCounts:
        """Confusion over every labeled comment in the full-set
        predictions; training rows included, as marked by in_train."""
        truth = {cid: c.label for cid, c in dataset.comments.items()
                 if c.label is not None}
        flagged = set(self.flagged_comment_ids)
        pred = {cid: int(cid in flagged) for cid in truth}
        return confusion(pred, truth)


def _item_feature(stat: Optional[ItemStatistics], name: str) -> float:
    if stat is None:
        return float("nan")
    if name == "n":
        return float(stat.n)
    if name == "drift_flag":
        # not linkable (no bank value, or too few linkable items) stays
        # absent rather than defaulting to "no drift"
        if stat.drift_magnitude is None:
            return float("nan")
        return float(stat.drift_flag)
    value = getattr(stat, name)
    return float("nan") if value is None else float(value)


def assemble_features(dataset: Dataset,
                      stats: dict[str, ItemStatistics],
                      scores: dict[str, float],
                      variant: str) -> FeatureMatrix:
    if variant not in VARIANTS:
        raise PipelineError(f"unknown variant {variant!r}")
    _, columns = VARIANTS[variant]
    comment_ids = sorted(dataset.comments)
    counts = dataset.comment_counts_by_item()
    x = np.empty((len(comment_ids), len(columns)))
    labels = np.empty(len(comment_ids), dtype=np.int64)
    item_ids = []
    for i, cid in enumerate(comment_ids):
        c = dataset.comments[cid]
        if cid not in scores:
            raise PipelineError(f"no scorer probability for comment {cid}")
        item = dataset.items[c.item_id]
        stat = stats.get(c.item_id)
        for j, name in enumerate(columns):
            if name == "bert_prob":
                x[i, j] = scores[cid]
            elif name == "comment_n":
                x[i, j] = counts[c.item_id]
            elif name == "item_type":
                x[i, j] = 0.0 if item.item_type == "operational" else 1.0
            elif name == "exam_score":
                x[i, j] = dataset.candidates[c.candidate_id].exam_score
            else:
                x[i, j] = _item_feature(stat, name)
        labels[i] = c.label if c.label is not None else -1
        item_ids.append(c.item_id)
    return FeatureMatrix(comment_ids=comment_ids, columns=tuple(columns),
                         x=x, labels=labels, item_ids=item_ids)


def stratified_train_test(labels: np.ndarray, train_frac: float,
                          seed: int) -> np.ndarray:
    """Boolean in-train mask over labeled rows (unlabeled rows stay out).

    Per class: seeded shuffle, then a largest-remainder allocation of the
    train/test sizes so the class ratio carries into both parts.
    """
    in_train = np.zeros(labels.size, dtype=bool)
    for label in (0, 1):
        rows = np.flatnonzero(labels == label)
        if rows.size == 0:
            continue
        rng = np.random.default_rng(np.random.SeedSequence([seed, label]))
        perm = rng.permutation(rows)
        exact = (train_frac * rows.size, (1.0 - train_frac) * rows.size)
        base = [int(e) for e in exact]
        rem = rows.size - sum(base)
        order = sorted(range(2), key=lambda k: (-(exact[k] - base[k]), k))
        for k in order[:rem]:
            base[k] += 1
        in_train[perm[:base[0]]] = True
    return in_train


def run_variant(variant: str, features: FeatureMatrix, seed: int,
                grid: Optional[dict] = None, k_folds: int = 5,
                threshold: float = 0.5,
                data_hash: str = "") -> RunResult:
    kind, columns = VARIANTS[variant]
    if features.columns != columns:
        raise PipelineError(
            f"feature matrix built for columns {features.columns}, "
            f"variant {variant} needs {columns}")
    n = len(features.comment_ids)

    if kind is None:
        probs = features.x[:, 0].copy()
        flagged = [cid for cid, p in zip(features.comment_ids, probs)
                   if p > threshold]
        return RunResult(
            variant=variant, comment_ids=list(features.comment_ids),
            probabilities=probs, flagged_comment_ids=sorted(flagged),
            in_train=np.zeros(n, dtype=bool), test_comment_ids=[],
            provenance={"seed": seed, "threshold": threshold,
                        "data_hash": data_hash})

    labeled = features.labeled_mask
    y_all = features.labels
    classes = np.unique(y_all[labeled])
    if classes.size < 2:
        raise PipelineError(
            f"variant {variant} needs labeled comments of both classes")
    if grid is None:
        grid = DEFAULT_GBT_GRID if kind == "gbt" else DEFAULT_FOREST_GRID

    in_train = stratified_train_test(
        np.where(labeled, y_all, -1), 0.8, seed)
    x_train = features.x[in_train]
    y_train = y_all[in_train]
    cv = grid_search_cv(kind, x_train, y_train,
                        GridSearchSpec(grid=dict(grid), k=k_folds,
                                       seed=seed))
    model = fit_learner(kind, x_train, y_train, cv.best_params, seed)

    probs = model.predict_proba(features.x)
    pred = model.predict(features.x)
    flagged = [cid for cid, f in zip(features.comment_ids, pred) if f == 1]
    test_mask = labeled & ~in_train
    return RunResult(
        variant=variant, comment_ids=list(features.comment_ids),
        probabilities=probs, flagged_comment_ids=sorted(flagged),
        in_train=in_train,
        test_comment_ids=[cid for cid, t in
                          zip(features.comment_ids, test_mask) if t],
        model=model, cv=cv, best_params=cv.best_params,
        provenance={"seed": seed, "grid": {k: list(v)
                                           for k, v in grid.items()},
                    "best_params": cv.best_params,
                    "cv_mean_f1": cv.best_mean_f1,
                    "data_hash": data_hash})


def test_confusion(result: RunResult, dataset: Dataset) -> ConfusionCounts:
    """Held-out confusion for a trained variant (empty for M1)."""
    truth = {}
    for cid in result.test_comment_ids:
        label = dataset.comments[cid].label
        if label is None:
            raise PipelineError(f"test comment {cid} lost its label")
        truth[cid] = label
    flagged = set(result.flagged_comment_ids)
    pred = {cid: int(cid in flagged) for cid in truth}
    return confusion(pred, truth)


def aggregate_item_flags(flagged_comment_ids, dataset: Dataset,
                         min_count: int = 1) -> set[str]:
    if min_count < 1:
        raise PipelineError("min_count must be >= 1")
    per_item: dict[str, int] = {}
    for cid in flagged_comment_ids:
        item_id = dataset.comments[cid].item_id
        per_item[item_id] = per_item.get(item_id, 0) + 1
    return {item_id for item_id, c in per_item.items() if c >= min_count}


def compare_item_flags(ml_items: set[str], true_items: set[str],
                       total_item_count: int) -> dict:
    from .evaluation import round_half_up
    overlap = len(ml_items & true_items)
    return {
        "overlap_n": overlap,
        "overlap_pct": round_half_up(100.0 * overlap / len(true_items), 1)
        if true_items else None,
        "total_n": len(ml_items),
        "total_pct": round_half_up(
            100.0 * len(ml_items) / total_item_count, 1)
        if total_item_count else None,
    }


def flagged_comments_rows(result: RunResult,
                          dataset: Dataset) -> list[tuple]:
    """Rows for flagged_comments.csv: every comment, flagged or not."""
    flagged = set(result.flagged_comment_ids)
    rows = []
    for i, cid in enumerate(result.comment_ids):
        rows.append((cid, dataset.comments[cid].item_id,
                     float(result.probabilities[i]),
                     int(cid in flagged), int(result.in_train[i])))
    return rows
