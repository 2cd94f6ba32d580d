"""Reference split-search kernels in vectorized numpy.

The compiled extension implements the same two entry points with identical
arithmetic: prefix sums accumulate in the same sorted order (stable sort on
value, original position breaking ties) and gains are evaluated with the
same expression shape, so both backends pick bit-identical splits.

Candidate thresholds sit at midpoints of consecutive distinct values.  A
midpoint that rounds back onto the lower value (adjacent floats) is
skipped: it would send both values the same way and duplicate a candidate.
Missing values (NaN) are routed wholesale to whichever side gains more,
ties to the left.
"""
from __future__ import annotations

from typing import NamedTuple, Optional

import numpy as np

NAME = "pure"


class Split(NamedTuple):
    feature: int
    threshold: float
    missing_left: bool
    gain: float


def best_split_gini(x: np.ndarray, idx: np.ndarray, y: np.ndarray,
                    feats: np.ndarray, min_leaf: int) -> Optional[Split]:
    """Best Gini split at a node.

    The comparison score is pos*neg/n summed over parent minus children,
    which is the weighted impurity decrease times n/2: same argmax, exact
    integer numerators.
    """
    y_node = y[idx]
    n_t = idx.size
    pos_t = int(y_node.sum())
    neg_t = n_t - pos_t
    if pos_t == 0 or neg_t == 0:
        return None
    parent = (pos_t * neg_t) / n_t

    best: Optional[Split] = None
    for j in feats:
        vals = x[idx, j]
        miss = np.isnan(vals)
        pres = ~miss
        n_m = int(miss.sum())
        n_p = n_t - n_m
        if n_p < 2:
            continue
        v = vals[pres]
        yp = y_node[pres]
        order = np.argsort(v, kind="stable")
        v = v[order]
        yp = yp[order]
        pos_m = int(y_node[miss].sum())

        cut = np.flatnonzero(v[:-1] < v[1:])
        if cut.size == 0:
            continue
        thr = (v[cut] + v[cut + 1]) / 2.0
        ok = thr > v[cut]
        cut, thr = cut[ok], thr[ok]
        if cut.size == 0:
            continue

        pos_cum = np.cumsum(yp, dtype=np.int64)
        pos_le = pos_cum[cut]
        n_le = cut + 1

        # missing routed left
        pl = pos_le + pos_m
        nl = n_le + n_m
        pr = pos_t - pl
        nr = n_t - nl
        gain_l = (parent - (pl * (nl - pl)) / nl) - (pr * (nr - pr)) / nr
        bad = (nl < min_leaf) | (nr < min_leaf)
        gain_l = np.where(bad, -np.inf, gain_l)

        # missing routed right
        pl2 = pos_le
        nl2 = n_le
        pr2 = pos_t - pl2
        nr2 = n_t - nl2
        gain_r = (parent - (pl2 * (nl2 - pl2)) / nl2) \
            - (pr2 * (nr2 - pr2)) / nr2
        bad2 = (nl2 < min_leaf) | (nr2 < min_leaf)
        gain_r = np.where(bad2, -np.inf, gain_r)

        to_left = gain_l >= gain_r
        gain = np.where(to_left, gain_l, gain_r)
        k = int(np.argmax(gain))
        g = float(gain[k])
        if not np.isfinite(g):
            continue
        if best is None or g > best.gain:
            best = Split(int(j), float(thr[k]), bool(to_left[k]), g)
    return best


def best_split_gbt(x: np.ndarray, idx: np.ndarray, g: np.ndarray,
                   h: np.ndarray, feats: np.ndarray, lam: float,
                   gamma: float, min_child_weight: float) -> Optional[Split]:
    """Best second-order split at a node: gain is the standard
    0.5*(GL^2/(HL+lam) + GR^2/(HR+lam) - GT^2/(HT+lam)) - gamma."""
    g_node = g[idx]
    h_node = h[idx]
    # sequential totals so the compiled twin matches bit for bit
    g_t = float(np.cumsum(g_node)[-1]) if idx.size else 0.0
    h_t = float(np.cumsum(h_node)[-1]) if idx.size else 0.0
    parent = (g_t * g_t) / (h_t + lam)

    best: Optional[Split] = None
    for j in feats:
        vals = x[idx, j]
        miss = np.isnan(vals)
        pres = ~miss
        n_p = int(pres.sum())
        if n_p < 2:
            continue
        v = vals[pres]
        gp = g_node[pres]
        hp = h_node[pres]
        order = np.argsort(v, kind="stable")
        v = v[order]
        gp = gp[order]
        hp = hp[order]
        g_m = float(np.cumsum(g_node[miss])[-1]) if n_p < idx.size else 0.0
        h_m = float(np.cumsum(h_node[miss])[-1]) if n_p < idx.size else 0.0

        cut = np.flatnonzero(v[:-1] < v[1:])
        if cut.size == 0:
            continue
        thr = (v[cut] + v[cut + 1]) / 2.0
        ok = thr > v[cut]
        cut, thr = cut[ok], thr[ok]
        if cut.size == 0:
            continue

        g_cum = np.cumsum(gp)
        h_cum = np.cumsum(hp)
        g_le = g_cum[cut]
        h_le = h_cum[cut]

        gl = g_le + g_m
        hl = h_le + h_m
        gr = g_t - gl
        hr = h_t - hl
        gain_l = 0.5 * ((gl * gl) / (hl + lam) + (gr * gr) / (hr + lam)
                        - parent) - gamma
        bad = (hl < min_child_weight) | (hr < min_child_weight)
        gain_l = np.where(bad, -np.inf, gain_l)

        gl2 = g_le
        hl2 = h_le
        gr2 = g_t - gl2
        hr2 = h_t - hl2
        gain_r = 0.5 * ((gl2 * gl2) / (hl2 + lam) + (gr2 * gr2) / (hr2 + lam)
                        - parent) - gamma
        bad2 = (hl2 < min_child_weight) | (hr2 < min_child_weight)
        gain_r = np.where(bad2, -np.inf, gain_r)

        to_left = gain_l >= gain_r
        gain = np.where(to_left, gain_l, gain_r)
        k = int(np.argmax(gain))
        gn = float(gain[k])
        if not np.isfinite(gn):
            continue
        if best is None or gn > best.gain:
            best = Split(int(j), float(thr[k]), bool(to_left[k]), gn)
    return best
