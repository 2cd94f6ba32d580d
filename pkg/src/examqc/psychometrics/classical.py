"""Classical item analysis: difficulty, discrimination, option statistics.

Discrimination is the point-biserial correlation between the item score and
the rest score (candidate's total correct over all administered items minus
this item), so an item never correlates with itself.  Correlations use the
population-moment Pearson formula and are reported as None whenever either
variable has zero variance.
"""
from __future__ import annotations

import math
from typing import Optional

from ..data.models import Dataset
from .stats_types import ItemStatistics, OptionStat


def _pearson(x: list[float], y: list[float]) -> Optional[float]:
    n = len(x)
    if n < 2:
        return None
    mx = sum(x) / n
    my = sum(y) / n
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    if sxx == 0.0 or syy == 0.0:
        return None
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    return sxy / math.sqrt(sxx * syy)


def classical_item_stats(dataset: Dataset) -> dict[str, ItemStatistics]:
    """Compute p, r, mean_time, n and option-level stats for every item.

    Items with no included responses get an entry with n=0 and absent values.
    """
    included = dataset.included_responses()

    # candidate total correct over all their administered items
    totals: dict[str, int] = {}
    for ev in included:
        totals[ev.candidate_id] = totals.get(ev.candidate_id, 0) + ev.correct

    per_item: dict[str, list] = {iid: [] for iid in dataset.items}
    for ev in included:
        per_item[ev.item_id].append(ev)

    out: dict[str, ItemStatistics] = {}
    for iid, item in dataset.items.items():
        evs = per_item[iid]
        st = ItemStatistics(item_id=iid, n=len(evs))
        if not evs:
            st.option_stats = [
                OptionStat(option_id=o, prop=0.0, option_r=None,
                           is_key=(o == item.key_option))
                for o in item.option_ids
            ]
            out[iid] = st
            continue
        xs = [float(ev.correct) for ev in evs]
        rest = [float(totals[ev.candidate_id] - ev.correct) for ev in evs]
        st.p = sum(xs) / len(xs)
        st.r = _pearson(xs, rest)
        st.mean_time = sum(ev.response_time_sec for ev in evs) / len(evs)
        st.option_stats = []
        for o in item.option_ids:
            sel = [1.0 if ev.selected_option == o else 0.0 for ev in evs]
            st.option_stats.append(OptionStat(
                option_id=o,
                prop=sum(sel) / len(sel),
                option_r=_pearson(sel, rest),
                is_key=(o == item.key_option),
            ))
        out[iid] = st
    return out
