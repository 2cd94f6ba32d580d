"""Item parameter drift against banked difficulties.

Fresh estimates live on an arbitrary scale origin, so they are first linked
to the bank by the mean-difference constant c = mean(b_hat) - mean(b_bank)
over items having both values.  The drift magnitude is |b_hat - c - b_bank|
and an item is flagged when it exceeds the threshold.
"""
from __future__ import annotations

import warnings
from typing import Optional

from ..data.models import Dataset

DEFAULT_DRIFT_THRESHOLD = 0.5


def drift_check(dataset: Dataset, b_hat: dict[str, float],
                threshold: float = DEFAULT_DRIFT_THRESHOLD,
                ) -> dict[str, tuple[Optional[float], int]]:
    """Return item_id -> (drift_magnitude, drift_flag).

    Items without a bank value or without a fresh estimate get (None, 0).
    Fewer than two linkable items makes the linking constant meaningless;
    the check is skipped with a warning and everything reports (None, 0).
    """
    linkable = [iid for iid, item in dataset.items.items()
                if item.bank_difficulty is not None and iid in b_hat]
    out: dict[str, tuple[Optional[float], int]] = {
        iid: (None, 0) for iid in dataset.items
    }
    if len(linkable) < 2:
        warnings.warn("drift check skipped: fewer than 2 items link the "
                      "fresh calibration to the bank", stacklevel=2)
        return out
    c = (sum(b_hat[iid] for iid in linkable)
         - sum(dataset.items[iid].bank_difficulty for iid in linkable)) / len(linkable)
    for iid in linkable:
        mag = abs(b_hat[iid] - c - dataset.items[iid].bank_difficulty)
        out[iid] = (mag, 1 if mag > threshold else 0)
    return out
