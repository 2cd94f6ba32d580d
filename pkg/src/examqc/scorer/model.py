"""Trainable reference scorer: logistic regression over hashed n-grams.

Full-batch gradient descent. With L2-normalized rows the logistic loss is
smooth with constant under 1/lr, so the training loss is strictly
non-increasing at the default learning rate; the loss trace is kept on the
model for inspection. The epoch grid is searched by training once to the
largest count and snapshotting at each grid point, which for full-batch
descent is identical to training each count from scratch (no randomness is
consumed between epochs).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np
from scipy import sparse

from ..data.models import CommentRecord, Dataset
from .features import D, featurize

DEFAULT_EPOCH_GRID = (5, 10, 20, 40)
DEFAULT_LR = 0.5
DEFAULT_L2 = 1e-4


class ScorerError(ValueError):
    pass


@dataclass(frozen=True)
class SplitSpec:
    train: float = 0.80
    validation: float = 0.10
    test: float = 0.10
    seed: int = 0

    def __post_init__(self) -> None:
        total = self.train + self.validation + self.test
        if abs(total - 1.0) > 1e-9:
            raise ScorerError("split fractions must sum to 1")


@dataclass
class ScorerModel:
    weights: dict[int, float]       # sparse over the hashed feature space
    bias: float
    dim: int = D
    hash_name: str = "fnv1a64"
    metadata: dict = field(default_factory=dict)
    loss_trace: list[float] = field(default_factory=list)

    def score_text(self, text: str) -> float:
        x = featurize(text)
        margin = self.bias + sum(self.weights.get(k, 0.0) * v
                                 for k, v in x.items())
        return 1.0 / (1.0 + np.exp(-margin))

    def save(self, path: Path) -> None:
        idx = sorted(self.weights)
        rec = {
            "format": "examqc-scorer-v1",
            "dim": self.dim,
            "hash": self.hash_name,
            "bias": self.bias,
            "weight_index": idx,
            "weight_value": [self.weights[k] for k in idx],
            "metadata": self.metadata,
        }
        Path(path).write_text(json.dumps(rec, sort_keys=True) + "\n",
                              encoding="utf-8")

    @classmethod
    def load(cls, path: Path) -> "ScorerModel":
        rec = json.loads(Path(path).read_text(encoding="utf-8"))
        if rec.get("format") != "examqc-scorer-v1":
            raise ScorerError(f"{path}: not a scorer model file")
        return cls(
            weights=dict(zip(rec["weight_index"],
                             map(float, rec["weight_value"]))),
            bias=float(rec["bias"]),
            dim=int(rec["dim"]),
            hash_name=rec["hash"],
            metadata=rec["metadata"],
        )


def stratified_split(ids_by_class: dict[int, list[str]],
                     spec: SplitSpec) -> tuple[list[str], list[str], list[str]]:
    """Largest-remainder allocation per class into train/val/test.

    Each class is shuffled with its own seeded stream. When a class is large
    enough to reach every part, empty parts are topped up from the largest
    one so both classes appear everywhere it is feasible.
    """
    parts: tuple[list[str], list[str], list[str]] = ([], [], [])
    fractions = (spec.train, spec.validation, spec.test)
    for label in sorted(ids_by_class):
        ids = sorted(ids_by_class[label])
        rng = np.random.default_rng(np.random.SeedSequence([spec.seed, label]))
        rng.shuffle(ids)
        n = len(ids)
        exact = [f * n for f in fractions]
        alloc = [int(e) for e in exact]
        # hand out the remainder by largest fractional part, ties in
        # part order (train, validation, test)
        order = sorted(range(3), key=lambda k: (-(exact[k] - alloc[k]), k))
        for k in order[: n - sum(alloc)]:
            alloc[k] += 1
        if n >= 3:
            for k in range(3):
                if alloc[k] == 0:
                    donor = max(range(3), key=lambda j: alloc[j])
                    alloc[donor] -= 1
                    alloc[k] += 1
        pos = 0
        for k in range(3):
            parts[k].extend(ids[pos:pos + alloc[k]])
            pos += alloc[k]
    return parts


def _design(comments: list[CommentRecord]) -> sparse.csr_matrix:
    rows, cols, vals = [], [], []
    for r, c in enumerate(comments):
        for k, v in featurize(c.text).items():
            rows.append(r)
            cols.append(k)
            vals.append(v)
    return sparse.csr_matrix((vals, (rows, cols)),
                             shape=(len(comments), D))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-z))


def _log_loss(z: np.ndarray, y: np.ndarray, w: np.ndarray,
              l2: float) -> float:
    ce = float(np.mean(np.logaddexp(0.0, z) - y * z))
    return ce + 0.5 * l2 * float(np.dot(w, w))


def _f1_at_half(p: np.ndarray, y: np.ndarray) -> float:
    pred = p >= 0.5
    tp = int(np.sum(pred & (y == 1)))
    fp = int(np.sum(pred & (y == 0)))
    fn = int(np.sum(~pred & (y == 1)))
    if tp == 0:
        return 0.0
    prec = tp / (tp + fp)
    rec = tp / (tp + fn)
    return 2 * prec * rec / (prec + rec)


def gradient_descent(x: sparse.csr_matrix, y: np.ndarray,
                     snapshot_epochs: list[int],
                     lr: float = DEFAULT_LR, l2: float = DEFAULT_L2,
                     ) -> tuple[dict[int, tuple[np.ndarray, float]], list[float]]:
    """Full-batch descent from zero init; no randomness, so training to the
    largest epoch count while snapshotting at the rest is the same thing as
    separate runs per grid point. Returns snapshots and the loss trace
    (one entry per epoch plus the final state)."""
    w = np.zeros(x.shape[1])
    bias = 0.0
    n = x.shape[0]
    trace: list[float] = []
    snapshots: dict[int, tuple[np.ndarray, float]] = {}
    for epoch in range(1, max(snapshot_epochs) + 1):
        z = x @ w + bias
        trace.append(_log_loss(z, y, w, l2))
        resid = (_sigmoid(z) - y) / n
        w = w - lr * (x.T @ resid + l2 * w)
        bias -= lr * float(resid.sum())
        if epoch in snapshot_epochs:
            snapshots[epoch] = (w.copy(), bias)
    trace.append(_log_loss(x @ w + bias, y, w, l2))
    return snapshots, trace


def logistic_grad(x: sparse.csr_matrix, y: np.ndarray, w: np.ndarray,
                  bias: float, l2: float = DEFAULT_L2,
                  ) -> tuple[np.ndarray, float]:
    """Analytic gradient of the regularized mean logistic loss."""
    p = _sigmoid(x @ w + bias)
    resid = (p - y) / x.shape[0]
    return x.T @ resid + l2 * w, float(resid.sum())


def logistic_loss(x: sparse.csr_matrix, y: np.ndarray, w: np.ndarray,
                  bias: float, l2: float = DEFAULT_L2) -> float:
    return _log_loss(x @ w + bias, y, w, l2)


def train_reference_scorer(
    comments: Iterable[CommentRecord],
    split: SplitSpec = SplitSpec(),
    epoch_grid: tuple[int, ...] = DEFAULT_EPOCH_GRID,
    lr: float = DEFAULT_LR,
    l2: float = DEFAULT_L2,
) -> ScorerModel:
    labeled = [c for c in comments if c.label is not None]
    by_class: dict[int, list[str]] = {0: [], 1: []}
    by_id = {c.comment_id: c for c in labeled}
    for c in labeled:
        by_class[c.label].append(c.comment_id)
    if min(len(by_class[0]), len(by_class[1])) < 2:
        raise ScorerError("need at least 2 labeled comments per class")
    if not epoch_grid:
        raise ScorerError("epoch grid must be non-empty")

    train_ids, val_ids, test_ids = stratified_split(by_class, split)
    tr = [by_id[i] for i in sorted(train_ids)]
    va = [by_id[i] for i in sorted(val_ids)]
    te = [by_id[i] for i in sorted(test_ids)]

    x_tr = _design(tr)
    y_tr = np.array([c.label for c in tr], dtype=float)
    x_va = _design(va)
    y_va = np.array([c.label for c in va], dtype=float)

    grid = sorted(set(epoch_grid))
    snapshots, trace = gradient_descent(x_tr, y_tr, grid, lr=lr, l2=l2)

    best_epoch, best_f1 = None, -1.0
    for epoch in grid:
        ws, bs = snapshots[epoch]
        f1 = _f1_at_half(_sigmoid(x_va @ ws + bs), y_va)
        if f1 > best_f1:
            best_epoch, best_f1 = epoch, f1
    ws, bs = snapshots[best_epoch]

    x_te = _design(te)
    y_te = np.array([c.label for c in te], dtype=float)
    test_f1 = _f1_at_half(_sigmoid(x_te @ ws + bs), y_te) if len(te) else None

    nz = np.flatnonzero(ws)
    model = ScorerModel(
        weights={int(k): float(ws[k]) for k in nz},
        bias=float(bs),
        metadata={
            "epochs": best_epoch,
            "val_f1": best_f1,
            "test_f1": test_f1,
            "seed": split.seed,
            "lr": lr,
            "l2": l2,
            "epoch_grid": list(grid),
            "n_train": len(tr),
            "n_validation": len(va),
            "n_test": len(te),
        },
        loss_trace=trace,
    )
    return model


def score_comments(model: ScorerModel, dataset: Dataset,
                   comment_ids: Optional[Iterable[str]] = None,
                   ) -> dict[str, float]:
    """Probability per comment over the whole dataset (or the given ids)."""
    ids = list(comment_ids) if comment_ids is not None \
        else sorted(dataset.comments)
    out = {}
    for cid in ids:
        if cid not in dataset.comments:
            raise ScorerError(f"unknown comment_id {cid!r}")
        out[cid] = float(model.score_text(dataset.comments[cid].text))
    return out
