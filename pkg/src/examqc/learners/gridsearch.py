"""Stratified k-fold grid search selecting on positive-class F1.

Grid points are enumerated as the cartesian product of the value lists in
the grid mapping's insertion order, rightmost key varying fastest; ties on
mean F1 keep the earliest point. Every (point, fold) fit gets its own
deterministic seed, so results do not depend on evaluation order.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .forest import ForestModel, fit_forest
from .gbt import GbtModel, fit_gbt
from .tree import LearnerError


@dataclass(frozen=True)
class GridSearchSpec:
    grid: dict
    k: int = 5
    seed: int = 0
    fixed: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.grid:
            raise LearnerError("grid must be non-empty")
        if self.k < 2:
            raise LearnerError("k must be >= 2")
        for name, values in self.grid.items():
            if not isinstance(values, (list, tuple)) or not values:
                raise LearnerError(f"grid entry {name!r} needs a non-empty "
                                   "value list")

    def points(self) -> list[dict]:
        names = list(self.grid)
        combos = itertools.product(*(self.grid[n] for n in names))
        return [dict(zip(names, c)) for c in combos]


@dataclass
class CvRow:
    grid_index: int
    fold: int
    tp: int
    fp: int
    fn: int
    tn: int
    f1: float


@dataclass
class GridSearchResult:
    best_params: dict
    best_index: int
    best_mean_f1: float
    mean_f1: list[float]
    table: list[CvRow]


def stratified_kfold(y: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Fold id per row; each class dealt round-robin after a seeded shuffle."""
    y = np.asarray(y)
    fold = np.full(y.size, -1, dtype=np.int64)
    for label in np.unique(y):
        idx = np.flatnonzero(y == label)
        rng = np.random.default_rng(
            np.random.SeedSequence([seed, int(label)]))
        perm = rng.permutation(idx)
        fold[perm] = np.arange(perm.size) % k
    return fold


def _f1(tp: int, fp: int, fn: int) -> float:
    denom = 2 * tp + fp + fn
    return 2.0 * tp / denom if denom else 0.0


def fit_learner(kind: str, x: np.ndarray, y: np.ndarray, params: dict,
                seed: int):
    if kind == "forest":
        return fit_forest(x, y, seed=seed, **params)
    if kind == "gbt":
        return fit_gbt(x, y, **params)
    raise LearnerError(f"unknown learner kind {kind!r}")


def grid_search_cv(kind: str, x: np.ndarray, y: np.ndarray,
                   spec: GridSearchSpec) -> GridSearchResult:
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if np.unique(y).size < 2:
        raise LearnerError("grid search needs both classes present")
    folds = stratified_kfold(y, spec.k, spec.seed)
    points = spec.points()
    table: list[CvRow] = []
    mean_f1: list[float] = []
    for gi, point in enumerate(points):
        scores = []
        for fi in range(spec.k):
            val = folds == fi
            trn = ~val
            if np.unique(y[trn]).size < 2 or np.unique(y[val]).size < 2:
                warnings.warn(
                    f"fold {fi} lost a class; scoring grid point {gi} "
                    "as 0 for this fold", stacklevel=2)
                table.append(CvRow(gi, fi, 0, 0, 0, 0, 0.0))
                scores.append(0.0)
                continue
            fit_seed = int(np.random.SeedSequence(
                [spec.seed, gi, fi]).generate_state(1, np.uint64)[0])
            model = fit_learner(kind, x[trn], y[trn],
                                {**point, **spec.fixed}, fit_seed)
            pred = model.predict(x[val])
            yv = y[val]
            tp = int(np.sum((pred == 1) & (yv == 1)))
            fp = int(np.sum((pred == 1) & (yv == 0)))
            fn = int(np.sum((pred == 0) & (yv == 1)))
            tn = int(np.sum((pred == 0) & (yv == 0)))
            f1 = _f1(tp, fp, fn)
            table.append(CvRow(gi, fi, tp, fp, fn, tn, f1))
            scores.append(f1)
        mean_f1.append(sum(scores) / len(scores))
    best_index = 0
    for gi in range(1, len(points)):
        if mean_f1[gi] > mean_f1[best_index]:
            best_index = gi
    return GridSearchResult(
        best_params=points[best_index], best_index=best_index,
        best_mean_f1=mean_f1[best_index], mean_f1=mean_f1, table=table)
