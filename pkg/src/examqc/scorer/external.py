"""Adapter for probabilities computed outside the package.

Real transformer scores can replace the reference scorer: the pipeline only
ever consumes a comment_id -> probability map, so fidelity is preserved by
construction as long as the file covers every comment.
"""
from __future__ import annotations

import csv
from pathlib import Path

from ..data.models import Dataset

EPS = 1e-6


class ExternalScoreError(ValueError):
    pass


def export_scores(scores: dict[str, float], path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("comment_id,probability\n")
        for cid in sorted(scores):
            fh.write(f"{cid},{repr(scores[cid])}\n")


def import_external_scores(path: Path, dataset: Dataset) -> dict[str, float]:
    """Read comment_id,probability rows; clamp into (EPS, 1-EPS)."""
    out: dict[str, float] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or \
                set(reader.fieldnames) < {"comment_id", "probability"}:
            raise ExternalScoreError(f"{path}: header must name "
                                     "comment_id and probability")
        for lineno, row in enumerate(reader, start=2):
            cid = row["comment_id"]
            try:
                p = float(row["probability"])
            except (TypeError, ValueError):
                raise ExternalScoreError(
                    f"{path}:{lineno}: bad probability "
                    f"{row['probability']!r}") from None
            if not 0.0 <= p <= 1.0:
                raise ExternalScoreError(
                    f"{path}:{lineno}: probability {p} outside [0,1] "
                    f"for {cid!r}")
            if cid in out:
                raise ExternalScoreError(f"{path}:{lineno}: duplicate "
                                         f"comment_id {cid!r}")
            out[cid] = min(max(p, EPS), 1.0 - EPS)
    missing = sorted(set(dataset.comments) - set(out))
    if missing:
        raise ExternalScoreError(
            f"{path}: scores missing for {len(missing)} comments, "
            f"first {missing[0]!r}")
    return {cid: out[cid] for cid in sorted(dataset.comments)}
