"""CART-style trees on dense float matrices with NaN as missing.

One builder serves both criteria: Gini trees carry leaf class
probabilities, boosting trees carry leaf weights supplied by the caller
through the leaf_value hook. Nodes are stored as parallel arrays in
depth-first preorder (root first, left subtree before right), which fixes
node numbering for serialization and cross-backend comparison.

Splits: value < threshold goes left; NaN goes to the node's stored default
direction, learned from training gain.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._kernels import get_kernel

LEAF = -1


class LearnerError(ValueError):
    pass


@dataclass
class TreeModel:
    feature: np.ndarray       # int32, LEAF for leaves
    threshold: np.ndarray     # float64
    missing_left: np.ndarray  # int8
    left: np.ndarray          # int32
    right: np.ndarray         # int32
    value: np.ndarray         # float64 leaf payload (prob or weight)
    n_features: int

    @property
    def n_nodes(self) -> int:
        return self.feature.size

    @property
    def max_depth_reached(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=np.int32)
        out = 0
        for k in range(self.n_nodes):
            if self.feature[k] != LEAF:
                depth[self.left[k]] = depth[k] + 1
                depth[self.right[k]] = depth[k] + 1
            else:
                out = max(out, int(depth[k]))
        return out

    def decide(self, x: np.ndarray) -> np.ndarray:
        """Leaf value per row, vectorized level-by-level."""
        if x.ndim != 2 or x.shape[1] != self.n_features:
            raise LearnerError(
                f"expected {self.n_features} features, got "
                f"{x.shape[1] if x.ndim == 2 else 'non-matrix'}")
        cur = np.zeros(x.shape[0], dtype=np.int32)
        while True:
            feats = self.feature[cur]
            active = feats != LEAF
            if not active.any():
                break
            rows = np.flatnonzero(active)
            f = feats[rows]
            xv = x[rows, f]
            thr = self.threshold[cur[rows]]
            ml = self.missing_left[cur[rows]].astype(bool)
            go_left = np.where(np.isnan(xv), ml, xv < thr)
            cur[rows] = np.where(go_left, self.left[cur[rows]],
                                 self.right[cur[rows]])
        return self.value[cur]


@dataclass(frozen=True)
class TreeParams:
    max_depth: Optional[int] = None
    min_leaf: int = 1
    criterion: str = "gini"

    def __post_init__(self) -> None:
        if self.max_depth is not None and self.max_depth < 0:
            raise LearnerError("max_depth must be None or >= 0")
        if self.min_leaf < 1:
            raise LearnerError("min_leaf must be >= 1")
        if self.criterion != "gini":
            raise LearnerError(f"unknown criterion {self.criterion!r}")


# splitmix64: tiny counter-based generator for per-split feature sampling,
# reimplemented here so model reproduction does not depend on numpy's
# generator internals
_SM_GAMMA = 0x9E3779B97F4A7C15
_SM_M1 = 0xBF58476D1CE4E5B9
_SM_M2 = 0x94D049BB133111EB
_M64 = (1 << 64) - 1


def splitmix64(state: int) -> tuple[int, int]:
    state = (state + _SM_GAMMA) & _M64
    z = state
    z = ((z ^ (z >> 30)) * _SM_M1) & _M64
    z = ((z ^ (z >> 27)) * _SM_M2) & _M64
    z ^= z >> 31
    return state, z


class FeatureSampler:
    """Draws a sorted mtry-subset per split via partial Fisher-Yates."""

    def __init__(self, n_features: int, mtry: int, seed: int) -> None:
        self.n = n_features
        self.mtry = mtry
        self.state = seed & _M64

    def draw(self) -> np.ndarray:
        if self.mtry >= self.n:
            return np.arange(self.n, dtype=np.int64)
        arr = list(range(self.n))
        for i in range(self.mtry):
            self.state, z = splitmix64(self.state)
            j = i + z % (self.n - i)
            arr[i], arr[j] = arr[j], arr[i]
        return np.array(sorted(arr[:self.mtry]), dtype=np.int64)


class _Builder:
    def __init__(self, x: np.ndarray, params: TreeParams,
                 find_split: Callable, leaf_value: Callable,
                 sampler: Optional[FeatureSampler]) -> None:
        self.x = x
        self.params = params
        self.find_split = find_split
        self.leaf_value = leaf_value
        self.sampler = sampler
        self.all_feats = np.arange(x.shape[1], dtype=np.int64)
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.missing_left: list[int] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def _new_node(self) -> int:
        k = len(self.feature)
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.missing_left.append(1)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(0.0)
        return k

    def build(self, idx: np.ndarray) -> TreeModel:
        # preorder ids: pop order is root, then the whole left subtree
        root = self._new_node()
        stack = [(root, idx, 0)]
        while stack:
            node, rows, depth = stack.pop()
            split = None
            if (self.params.max_depth is None
                    or depth < self.params.max_depth) \
                    and rows.size >= 2 * self.params.min_leaf:
                feats = self.sampler.draw() if self.sampler is not None \
                    else self.all_feats
                split = self.find_split(self.x, rows, feats)
            if split is None or split.gain <= 0.0:
                self.value[node] = self.leaf_value(rows)
                continue
            vals = self.x[rows, split.feature]
            go_left = np.where(np.isnan(vals), split.missing_left,
                               vals < split.threshold).astype(bool)
            left_rows = rows[go_left]
            right_rows = rows[~go_left]
            self.feature[node] = split.feature
            self.threshold[node] = split.threshold
            self.missing_left[node] = int(split.missing_left)
            lk = self._new_node()
            rk = self._new_node()
            self.left[node] = lk
            self.right[node] = rk
            # push right first so the left child is processed (and
            # numbered) before anything in the right subtree
            stack.append((rk, right_rows, depth + 1))
            stack.append((lk, left_rows, depth + 1))
        return TreeModel(
            feature=np.array(self.feature, dtype=np.int32),
            threshold=np.array(self.threshold),
            missing_left=np.array(self.missing_left, dtype=np.int8),
            left=np.array(self.left, dtype=np.int32),
            right=np.array(self.right, dtype=np.int32),
            value=np.array(self.value),
            n_features=self.x.shape[1],
        )


def _check_xy(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise LearnerError("X must be a non-empty 2-D matrix")
    y = np.asarray(y)
    if y.shape != (x.shape[0],):
        raise LearnerError("y length must match X rows")
    if not np.isin(y, (0, 1)).all():
        raise LearnerError("y must be binary 0/1")
    return x, y.astype(np.int64)


def fit_tree(x: np.ndarray, y: np.ndarray,
             params: TreeParams = TreeParams(),
             row_idx: Optional[np.ndarray] = None,
             sampler: Optional[FeatureSampler] = None) -> TreeModel:
    """Greedy Gini classification tree; leaf value = positive fraction."""
    x, y = _check_xy(x, y)
    kernel = get_kernel()
    idx = np.arange(x.shape[0], dtype=np.int64) if row_idx is None \
        else np.asarray(row_idx, dtype=np.int64)

    def find(xm, rows, feats):
        return kernel.best_split_gini(xm, rows, y, feats, params.min_leaf)

    def leaf(rows):
        return float(y[rows].sum()) / rows.size

    return _Builder(x, params, find, leaf, sampler).build(idx)


def build_regression_tree(x: np.ndarray, g: np.ndarray, h: np.ndarray,
                          max_depth: Optional[int], lam: float, gamma: float,
                          min_child_weight: float) -> TreeModel:
    """One boosting round's tree: leaves carry -G/(H+lam)."""
    kernel = get_kernel()
    params = TreeParams(max_depth=max_depth, min_leaf=1)
    idx = np.arange(x.shape[0], dtype=np.int64)

    def find(xm, rows, feats):
        return kernel.best_split_gbt(xm, rows, g, h, feats, lam, gamma,
                                     min_child_weight)

    def leaf(rows):
        gs = float(np.cumsum(g[rows])[-1]) if rows.size else 0.0
        hs = float(np.cumsum(h[rows])[-1]) if rows.size else 0.0
        return -gs / (hs + lam)

    return _Builder(x, params, find, leaf, None).build(idx)
