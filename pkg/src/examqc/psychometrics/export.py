"""Full item-statistics pass plus CSV export.

compute_item_statistics stitches the individual analyses together: classical
stats first, then calibration, fit, and drift, merged into one
ItemStatistics per item.  CSV cells for absent values are empty; floats are
written with repr so files are byte-stable across runs.
"""
from __future__ import annotations

import csv
from pathlib import Path
from typing import Optional

from ..data.models import Dataset
from .classical import classical_item_stats
from .drift import DEFAULT_DRIFT_THRESHOLD, drift_check
from .fit import fit_statistics
from .flags import FlagRuleConfig, statistical_flags
from .rasch import CalibrationResult, calibrate
from .stats_types import ItemStatistics


def compute_item_statistics(
    dataset: Dataset,
    drift_threshold: float = DEFAULT_DRIFT_THRESHOLD,
    tol: float = 1e-4,
    max_iter: int = 50,
) -> tuple[dict[str, ItemStatistics], CalibrationResult]:
    stats = classical_item_stats(dataset)
    calib = calibrate(dataset, tol=tol, max_iter=max_iter)
    fits = fit_statistics(dataset, calib)
    drifts = drift_check(dataset, calib.b, threshold=drift_threshold)
    for iid, st in stats.items():
        st.b = calib.b.get(iid)
        if iid in fits:
            st.infit, st.outfit = fits[iid]
        st.drift_magnitude, st.drift_flag = drifts[iid]
    return stats, calib


def _cell(v: Optional[float]) -> str:
    return "" if v is None else repr(v)


def write_item_stats_csv(stats: dict[str, ItemStatistics], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["item_id", "b", "p", "r", "mean_time", "n",
                    "infit", "outfit", "drift_magnitude", "drift_flag"])
        for iid in sorted(stats):
            st = stats[iid]
            w.writerow([iid, _cell(st.b), _cell(st.p), _cell(st.r),
                        _cell(st.mean_time), st.n, _cell(st.infit),
                        _cell(st.outfit), _cell(st.drift_magnitude),
                        st.drift_flag])


def read_item_stats_csv(path: Path) -> dict[str, ItemStatistics]:
    """Inverse of write_item_stats_csv, minus option stats (those live in
    their own file and the feature join never needs them)."""

    def opt(cell: str) -> Optional[float]:
        return None if cell == "" else float(cell)

    out: dict[str, ItemStatistics] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out[row["item_id"]] = ItemStatistics(
                item_id=row["item_id"], b=opt(row["b"]), p=opt(row["p"]),
                r=opt(row["r"]), mean_time=opt(row["mean_time"]),
                n=int(row["n"]), infit=opt(row["infit"]),
                outfit=opt(row["outfit"]),
                drift_magnitude=opt(row["drift_magnitude"]),
                drift_flag=int(row["drift_flag"]))
    return out


def write_option_stats_csv(stats: dict[str, ItemStatistics],
                           path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["item_id", "option_id", "prop", "option_r", "is_key"])
        for iid in sorted(stats):
            for o in stats[iid].option_stats:
                w.writerow([iid, o.option_id, repr(o.prop),
                            _cell(o.option_r), int(o.is_key)])


def write_flags_csv(flags: dict[str, list[str]], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["item_id", "flags"])
        for iid in sorted(flags):
            w.writerow([iid, "|".join(flags[iid])])
