"""Candidate-level data cleaning.

Rules are evaluated against the raw response table, so cleaning is
idempotent: re-applying the same rules to an already-cleaned dataset
changes nothing. Comments from excluded candidates stay in the comment
table (they are still scored and reviewed) but carry a flag.
"""
from __future__ import annotations

from .models import CleaningRules, Dataset


def apply_cleaning(ds: Dataset, rules: CleaningRules) -> Dataset:
    """Return a new dataset with candidates failing any rule marked
    included=False. An empty survivor set is legal here; statistics
    operations error on it later."""
    out = ds.copy()
    total_time: dict[str, float] = {cid: 0.0 for cid in out.candidates}
    answered: dict[str, int] = {cid: 0 for cid in out.candidates}
    for r in out.responses:
        total_time[r.candidate_id] += r.response_time_sec
        answered[r.candidate_id] += 1

    excluded_ids = set(rules.excluded_candidate_ids)
    for cid, cand in out.candidates.items():
        ok = (total_time[cid] >= rules.min_total_time_sec
              and answered[cid] >= rules.min_items_answered
              and cid not in excluded_ids)
        cand.included = ok

    included = out.included_candidate_ids()
    for c in out.comments.values():
        c.from_excluded_candidate = c.candidate_id not in included
    return out
