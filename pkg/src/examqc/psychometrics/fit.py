"""Residual-based item fit statistics.

For response x with expected value E = logistic(theta - b) and variance
W = E(1 - E), the standardized residual is z = (x - E) / sqrt(W).  Outfit is
the unweighted mean of z^2 over an item's responses; infit weights by W,
i.e. sum((x - E)^2) / sum(W).  Both have expectation near 1 for data that
fit the model.
"""
from __future__ import annotations

import math

from ..data.models import Dataset
from .rasch import CalibrationResult


def fit_statistics(dataset: Dataset,
                   calib: CalibrationResult) -> dict[str, tuple[float, float]]:
    """Return item_id -> (infit, outfit) for every item with at least one
    included response from a candidate holding a theta estimate."""
    acc: dict[str, list[float]] = {}
    for ev in dataset.included_responses():
        th = calib.theta.get(ev.candidate_id)
        b = calib.b.get(ev.item_id)
        if th is None or b is None:
            continue
        e = 1.0 / (1.0 + math.exp(-(th - b)))
        w = e * (1.0 - e)
        acc.setdefault(ev.item_id, []).append((float(ev.correct), e, w))

    out: dict[str, tuple[float, float]] = {}
    for iid, rows in acc.items():
        sq = [(x - e) ** 2 for x, e, _ in rows]
        ws = [w for _, _, w in rows]
        outfit = sum(s / w for s, w in zip(sq, ws)) / len(rows)
        infit = sum(sq) / sum(ws)
        out[iid] = (infit, outfit)
    return out
