"""Confusion counts, the six evaluation metrics, and report rendering.

Every ratio with a zero denominator is reported as None (rendered as an em
dash in text tables) instead of NaN, so degenerate runs stay visible.
Rounding for table cells is decimal half-up, which is what the reference
tables use; repr-based Decimal construction avoids binary-float surprises
like 0.125 rounding down.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Optional


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be nonnegative")

    @property
    def population(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricSet:
    accuracy: Optional[float]
    fpr: Optional[float]
    fnr: Optional[float]
    precision: Optional[float]
    recall: Optional[float]
    f1: Optional[float]
    actual_predictive_rate: Optional[float]


def _ratio(num: int, den: int) -> Optional[float]:
    return None if den == 0 else num / den


def confusion(predicted: dict[str, int], truth: dict[str, int]) -> ConfusionCounts:
    """2x2 counts over the keys of `predicted`; every key needs a label."""
    tp = fp = fn = tn = 0
    for cid, pred in predicted.items():
        if cid not in truth or truth[cid] is None:
            raise ValueError(f"no label for evaluated comment {cid!r}")
        t = truth[cid]
        if pred == 1 and t == 1:
            tp += 1
        elif pred == 1:
            fp += 1
        elif t == 1:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)


def metrics(counts: ConfusionCounts,
            population: Optional[int] = None) -> MetricSet:
    pop = counts.population if population is None else population
    if pop != counts.population:
        raise ValueError("population must equal tp+fp+fn+tn")
    c = counts
    precision = _ratio(c.tp, c.tp + c.fp)
    recall = _ratio(c.tp, c.tp + c.fn)
    if precision is None or recall is None or precision + recall == 0:
        f1 = None
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return MetricSet(
        accuracy=_ratio(c.tp + c.tn, pop),
        fpr=_ratio(c.fp, c.fp + c.tn),
        fnr=_ratio(c.fn, c.fn + c.tp),
        precision=precision,
        recall=recall,
        f1=f1,
        actual_predictive_rate=_ratio(c.tp + c.fp, pop),
    )


def round_half_up(x: float, places: int) -> float:
    q = Decimal(1).scaleb(-places)
    return float(Decimal(repr(x)).quantize(q, rounding=ROUND_HALF_UP))


def _fmt(x: Optional[float], places: int) -> str:
    if x is None:
        return "—"
    return f"{round_half_up(x, places):.{places}f}"


def _aligned(headers: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[k]) for r in rows)) if rows else len(h)
              for k, h in enumerate(headers)]
    def line(cells):
        return "  ".join(c.rjust(w) if k else c.ljust(w)
                         for k, (c, w) in enumerate(zip(cells, widths)))
    out = [line(headers), line(["-" * w for w in widths])]
    out.extend(line(r) for r in rows)
    return "\n".join(out) + "\n"


def table3(counts_by_model: dict[str, ConfusionCounts]) -> dict:
    return {m: {"fp": c.fp, "fn": c.fn, "fp_plus_tp": c.fp + c.tp}
            for m, c in counts_by_model.items()}


def table4(counts_by_model: dict[str, ConfusionCounts]) -> dict:
    out = {}
    for m, c in counts_by_model.items():
        ms = metrics(c)
        out[m] = {
            "precision": None if ms.precision is None
            else round_half_up(ms.precision, 2),
            "recall": None if ms.recall is None
            else round_half_up(ms.recall, 2),
            "f1": None if ms.f1 is None else round_half_up(ms.f1, 2),
        }
    return out


def item_overlap_table(flagged_items_by_model: dict[str, set[str]],
                       true_items: set[str],
                       total_items: int) -> dict:
    """Table-5 shape: per model, overlap with the true defect set and the
    flagged share of the whole pool, both as N and a 1-dp percentage."""
    out = {}
    for m, flagged in flagged_items_by_model.items():
        overlap = len(flagged & true_items)
        out[m] = {
            "overlap_n": overlap,
            "overlap_pct": round_half_up(100.0 * overlap / len(true_items), 1)
            if true_items else None,
            "total_n": len(flagged),
            "total_pct": round_half_up(100.0 * len(flagged) / total_items, 1)
            if total_items else None,
        }
    return out


def render_table3(t3: dict) -> str:
    rows = [[m, str(v["fp"]), str(v["fn"]), str(v["fp_plus_tp"])]
            for m, v in t3.items()]
    return _aligned(["model", "FP", "FN", "FP+TP"], rows)


def render_table4(t4: dict) -> str:
    rows = [[m, _fmt(v["precision"], 2), _fmt(v["recall"], 2),
             _fmt(v["f1"], 2)] for m, v in t4.items()]
    return _aligned(["model", "precision", "recall", "F1"], rows)


def render_table5(t5: dict) -> str:
    rows = []
    for m, v in t5.items():
        rows.append([
            m,
            f"{v['overlap_n']} ({_fmt(v['overlap_pct'], 1)}%)",
            f"{v['total_n']} ({_fmt(v['total_pct'], 1)}%)",
        ])
    return _aligned(["model", "overlap N (%)", "total N (%)"], rows)


def probability_histogram(scores: dict[str, float],
                          subsets: dict[tuple[str, str], set[str]],
                          bins: int = 20) -> list[tuple[str, str, float, float, int]]:
    """Uniform-bin histogram rows (model, subset, bin_low, bin_high, count).

    Bins partition [0,1]; every bin is closed-open except the last, which is
    right-closed so a probability of exactly 1.0 is counted.
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    edges = [k / bins for k in range(bins + 1)]
    rows = []
    for (model, subset), ids in sorted(subsets.items()):
        counts = [0] * bins
        for cid in ids:
            p = scores[cid]
            k = min(int(p * bins), bins - 1)
            counts[k] += 1
        for k in range(bins):
            rows.append((model, subset, edges[k], edges[k + 1], counts[k]))
    return rows


def write_histogram_csv(rows, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("model,subset,bin_low,bin_high,count\n")
        for model, subset, lo, hi, n in rows:
            fh.write(f"{model},{subset},{repr(lo)},{repr(hi)},{n}\n")


def emit_reports(out_dir: Path,
                 counts_by_model: dict[str, ConfusionCounts],
                 flagged_items_by_model: dict[str, set[str]],
                 true_items: set[str],
                 total_items: int,
                 histogram_rows=None,
                 manifest: Optional[dict] = None) -> None:
    """Write the three tables (JSON + text), optional histogram CSV, and
    the manifest into out_dir."""
    if not counts_by_model:
        raise ValueError("at least one model run is required")
    out_dir.mkdir(parents=True, exist_ok=True)
    t3 = table3(counts_by_model)
    t4 = table4(counts_by_model)
    t5 = item_overlap_table(flagged_items_by_model, true_items, total_items)
    for name, data, render in (("table3", t3, render_table3),
                               ("table4", t4, render_table4),
                               ("table5", t5, render_table5)):
        (out_dir / f"{name}.json").write_text(
            json.dumps(data, sort_keys=True, indent=1) + "\n",
            encoding="utf-8")
        (out_dir / f"{name}.txt").write_text(render(data), encoding="utf-8")
    if histogram_rows is not None:
        write_histogram_csv(histogram_rows, out_dir / "fig_prob_hist.csv")
    if manifest is not None:
        (out_dir / "manifest.json").write_text(
            json.dumps(manifest, sort_keys=True, indent=1) + "\n",
            encoding="utf-8")
