"""Bagged Gini trees with per-split feature subsampling.

Each tree's randomness comes from its own SeedSequence([seed, tree_index])
so the forest is reproducible under any thread count: threads only decide
who builds which tree, never what the tree looks like.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .tree import (FeatureSampler, LearnerError, TreeModel, TreeParams,
                   _check_xy, fit_tree)

MtrySpec = Union[int, str]


def resolve_mtry(mtry: MtrySpec, n_features: int) -> int:
    if isinstance(mtry, str):
        if mtry == "sqrt":
            return max(1, int(math.isqrt(n_features)))
        if mtry == "third":
            return max(1, n_features // 3)
        if mtry == "all":
            return n_features
        raise LearnerError(f"unknown mtry spec {mtry!r}")
    if not 1 <= mtry <= n_features:
        raise LearnerError(
            f"mtry {mtry} out of range for {n_features} features")
    return int(mtry)


@dataclass
class ForestModel:
    trees: list[TreeModel]
    n_features: int
    params: dict = field(default_factory=dict)

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        """Fraction of trees voting positive (leaf fraction >= 0.5)."""
        x = np.ascontiguousarray(x, dtype=np.float64)
        votes = np.zeros(x.shape[0])
        for tree in self.trees:
            votes += tree.decide(x) >= 0.5
        return votes / len(self.trees)

    def predict(self, x: np.ndarray) -> np.ndarray:
        return (self.predict_proba(x) >= 0.5).astype(np.int64)


def _tree_seeds(seed: int, t: int) -> tuple[np.random.Generator, int]:
    boot_ss, samp_ss = np.random.SeedSequence([seed, t]).spawn(2)
    sampler_seed = int(samp_ss.generate_state(1, np.uint64)[0])
    return np.random.default_rng(boot_ss), sampler_seed


def fit_forest(x: np.ndarray, y: np.ndarray, n_trees: int = 100,
               mtry: MtrySpec = "sqrt", max_depth: Optional[int] = None,
               min_leaf: int = 1, seed: int = 0, n_jobs: int = 1,
               bootstrap: bool = True) -> ForestModel:
    x, y = _check_xy(x, y)
    if n_trees < 1:
        raise LearnerError("n_trees must be >= 1")
    n, p = x.shape
    m = resolve_mtry(mtry, p)
    params = TreeParams(max_depth=max_depth, min_leaf=min_leaf)

    def build(t: int) -> TreeModel:
        rng, sampler_seed = _tree_seeds(seed, t)
        rows = rng.integers(0, n, n) if bootstrap \
            else np.arange(n, dtype=np.int64)
        sampler = FeatureSampler(p, m, sampler_seed) if m < p else None
        return fit_tree(x, y, params, row_idx=rows, sampler=sampler)

    if n_jobs == 1:
        trees = [build(t) for t in range(n_trees)]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            trees = list(pool.map(build, range(n_trees)))
    return ForestModel(
        trees=trees, n_features=p,
        params={"n_trees": n_trees, "mtry": mtry, "max_depth": max_depth,
                "min_leaf": min_leaf, "seed": seed,
                "bootstrap": bootstrap})
