"""File-backed store tying the pipeline stages together.

Layout under one root directory (EXAMQC_STORE or --store):

    data/            items.csv, candidates.csv, responses.csv,
                     comments.jsonl, cleaning.json
    ground_truth.json   synthetic runs only
    stats/           item_stats.csv, option_stats.csv, flags.csv
    scorer/          model.json, scores.csv
    labels.jsonl     append-only label event log
    runs/<run_id>/   model.json, flagged_comments.csv, cv_table.csv,
                     manifest.json, reports/
    reports/         cross-variant evaluation bundle

Cleaning rules are stored beside the data and re-applied on every load:
exclusion flags live on records only in memory, never in the CSV files.

Run ids are content-addressed (variant, seed, data hash, label-log length)
so reruns land on the same directory and timestamps never enter outputs.
"""
from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .data.cleaning import apply_cleaning
from .data.io import load_dataset, save_dataset
from .data.models import CleaningRules, Dataset

ENV_VAR = "EXAMQC_STORE"
DEFAULT_ROOT = "examqc-store"


class StoreError(RuntimeError):
    pass


def resolve_root(arg: Optional[str] = None) -> Path:
    if arg:
        return Path(arg)
    env = os.environ.get(ENV_VAR)
    return Path(env) if env else Path(DEFAULT_ROOT)


def dataset_hash(ds: Dataset) -> str:
    """sha256 over the canonical CSV serialization, so equal datasets hash
    equal regardless of in-memory construction order."""
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        paths = save_dataset(ds, Path(tmp))
        digest = hashlib.sha256()
        for name in sorted(paths):
            digest.update(name.encode())
            digest.update(paths[name].read_bytes())
    return digest.hexdigest()


@dataclass
class Store:
    root: Path

    def __post_init__(self) -> None:
        self.root = Path(self.root)

    # --- paths -----------------------------------------------------------

    @property
    def data_dir(self) -> Path:
        return self.root / "data"

    @property
    def stats_dir(self) -> Path:
        return self.root / "stats"

    @property
    def scorer_dir(self) -> Path:
        return self.root / "scorer"

    @property
    def labels_path(self) -> Path:
        return self.root / "labels.jsonl"

    @property
    def runs_dir(self) -> Path:
        return self.root / "runs"

    @property
    def reports_dir(self) -> Path:
        return self.root / "reports"

    @property
    def scores_path(self) -> Path:
        return self.scorer_dir / "scores.csv"

    @property
    def scorer_model_path(self) -> Path:
        return self.scorer_dir / "model.json"

    # --- dataset ---------------------------------------------------------

    def save_data(self, ds: Dataset,
                  rules: Optional[CleaningRules] = None) -> None:
        self.data_dir.mkdir(parents=True, exist_ok=True)
        save_dataset(ds, self.data_dir)
        if rules is not None:
            (self.data_dir / "cleaning.json").write_text(
                json.dumps({
                    "min_total_time_sec": rules.min_total_time_sec,
                    "min_items_answered": rules.min_items_answered,
                    "excluded_candidate_ids":
                        list(rules.excluded_candidate_ids),
                }, sort_keys=True, indent=1) + "\n", encoding="utf-8")

    def has_data(self) -> bool:
        return (self.data_dir / "responses.csv").exists()

    def cleaning_rules(self) -> Optional[CleaningRules]:
        p = self.data_dir / "cleaning.json"
        if not p.exists():
            return None
        raw = json.loads(p.read_text(encoding="utf-8"))
        return CleaningRules(
            min_total_time_sec=float(raw["min_total_time_sec"]),
            min_items_answered=int(raw["min_items_answered"]),
            excluded_candidate_ids=tuple(raw["excluded_candidate_ids"]))

    def load_data(self, apply_labels: bool = True) -> Dataset:
        if not self.has_data():
            raise StoreError(
                f"no dataset in store {self.root} (run ingest or synth "
                "first)")
        d = self.data_dir
        ds = load_dataset(d / "responses.csv", d / "comments.jsonl",
                          d / "items.csv", d / "candidates.csv")
        rules = self.cleaning_rules()
        if rules is not None:
            ds = apply_cleaning(ds, rules)
        if apply_labels:
            for cid, label in self.label_view().items():
                if cid in ds.comments:
                    ds.comments[cid].label = label
        return ds

    def save_ground_truth(self, text: str) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "ground_truth.json").write_text(text, encoding="utf-8")

    def load_ground_truth(self) -> Optional[str]:
        p = self.root / "ground_truth.json"
        return p.read_text(encoding="utf-8") if p.exists() else None

    def data_hash(self) -> str:
        return dataset_hash(self.load_data(apply_labels=False))

    # --- label log -------------------------------------------------------

    def append_label(self, comment_id: str, label: int, reviewer: str,
                     timestamp: str) -> None:
        if label not in (0, 1):
            raise StoreError(f"label must be 0 or 1, got {label!r}")
        self.root.mkdir(parents=True, exist_ok=True)
        event = {"comment_id": comment_id, "label": label,
                 "reviewer": reviewer, "timestamp": timestamp}
        with self.labels_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")

    def label_events(self) -> list[dict]:
        if not self.labels_path.exists():
            return []
        events = []
        with self.labels_path.open(encoding="utf-8") as fh:
            for i, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    events.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise StoreError(
                        f"{self.labels_path}:{i}: bad label event") from exc
        return events

    def label_view(self) -> dict[str, int]:
        view: dict[str, int] = {}
        for event in self.label_events():
            view[event["comment_id"]] = int(event["label"])
        return view

    def label_epoch(self) -> int:
        return len(self.label_events())

    # --- runs ------------------------------------------------------------

    def run_id(self, variant: str, seed: int, data_hash: str) -> str:
        return f"{variant}-s{seed}-{data_hash[:8]}-L{self.label_epoch()}"

    def run_dir(self, run_id: str) -> Path:
        return self.runs_dir / run_id

    def list_runs(self) -> list[str]:
        if not self.runs_dir.exists():
            return []
        return sorted(p.name for p in self.runs_dir.iterdir()
                      if p.is_dir())

    def run_manifest(self, run_id: str) -> dict:
        p = self.run_dir(run_id) / "manifest.json"
        if not p.exists():
            raise StoreError(f"unknown run {run_id!r}")
        return json.loads(p.read_text(encoding="utf-8"))

    def write_run(self, run_id: str, manifest: dict,
                  flagged_rows: list[tuple],
                  cv_rows: Optional[list] = None,
                  model_json: Optional[str] = None) -> Path:
        rd = self.run_dir(run_id)
        rd.mkdir(parents=True, exist_ok=True)
        with (rd / "flagged_comments.csv").open(
                "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["comment_id", "item_id", "probability", "flagged",
                        "in_train"])
            for cid, item_id, prob, flagged, in_train in flagged_rows:
                w.writerow([cid, item_id, repr(prob), flagged, in_train])
        if cv_rows is not None:
            with (rd / "cv_table.csv").open(
                    "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh)
                w.writerow(["grid_point", "fold", "tp", "fp", "fn", "tn",
                            "f1"])
                for r in cv_rows:
                    w.writerow([r.grid_index, r.fold, r.tp, r.fp, r.fn,
                                r.tn, repr(r.f1)])
        if model_json is not None:
            (rd / "model.json").write_text(model_json + "\n",
                                           encoding="utf-8")
        (rd / "manifest.json").write_text(
            json.dumps(manifest, sort_keys=True, indent=1) + "\n",
            encoding="utf-8")
        return rd

    def read_flagged_comments(self, run_id: str) -> list[dict]:
        p = self.run_dir(run_id) / "flagged_comments.csv"
        if not p.exists():
            raise StoreError(f"run {run_id!r} has no flagged_comments.csv")
        with p.open(newline="", encoding="utf-8") as fh:
            return [
                {"comment_id": row["comment_id"],
                 "item_id": row["item_id"],
                 "probability": float(row["probability"]),
                 "flagged": int(row["flagged"]),
                 "in_train": int(row["in_train"])}
                for row in csv.DictReader(fh)
            ]

    def latest_run_for_variant(self, variant: str) -> Optional[str]:
        candidates = [
            r for r in self.list_runs()
            if r.startswith(f"{variant}-")
            and (self.run_dir(r) / "manifest.json").exists()
        ]
        if not candidates:
            return None
        # highest label epoch wins; run ids carry no timestamps
        def epoch(run_id: str) -> int:
            tail = run_id.rsplit("-L", 1)
            return int(tail[1]) if len(tail) == 2 and tail[1].isdigit() \
                else -1
        return max(candidates, key=lambda r: (epoch(r), r))
