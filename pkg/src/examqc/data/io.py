"""File ingestion and export.

Formats (UTF-8, CSV with header row, RFC 4180 quoting):
  items.csv       item_id,form_id,item_type,key_option,option_ids,bank_difficulty
                  (option_ids is |-separated; bank_difficulty may be empty)
  responses.csv   candidate_id,item_id,form_id,selected_option,response_time_sec
  candidates.csv  candidate_id,form_id
  comments.jsonl  {"comment_id","candidate_id","item_id","text",
                   "label"(0|1, optional), "reviewer_note"(optional)}
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

from .models import (
    OMITTED,
    CandidateRecord,
    CommentRecord,
    DataError,
    Dataset,
    ItemRecord,
    ResponseEvent,
)

ITEMS_HEADER = ["item_id", "form_id", "item_type", "key_option", "option_ids",
                "bank_difficulty"]
RESPONSES_HEADER = ["candidate_id", "item_id", "form_id", "selected_option",
                    "response_time_sec"]
CANDIDATES_HEADER = ["candidate_id", "form_id"]


def _check_header(path, got, want):
    if got != want:
        raise DataError(f"{path}: expected header {','.join(want)}, got {got}")


def _rows(path: Path, header: list[str]):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        _check_header(path, first, header)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} fields, "
                                f"got {len(row)}")
            yield lineno, row


def load_dataset(responses_path, comments_path, items_path,
                 candidates_path) -> Dataset:
    """Load and cross-validate the four input files.

    Raises DataError (with file/line locations) on malformed rows, broken
    references, or duplicate keys. Candidate scores are recomputed from the
    response table, never ingested.
    """
    ds = Dataset()

    for lineno, row in _rows(Path(items_path), ITEMS_HEADER):
        item_id, form_id, item_type, key, options, bank = row
        try:
            rec = ItemRecord(
                item_id=item_id,
                form_id=form_id,
                item_type=item_type,
                key_option=key,
                option_ids=tuple(o for o in options.split("|") if o),
                bank_difficulty=float(bank) if bank != "" else None,
            )
        except (DataError, ValueError) as exc:
            raise DataError(f"{items_path}:{lineno}: {exc}") from None
        if rec.item_id in ds.items:
            raise DataError(f"{items_path}:{lineno}: duplicate item_id {item_id!r}")
        ds.items[rec.item_id] = rec

    for lineno, row in _rows(Path(candidates_path), CANDIDATES_HEADER):
        cid, form_id = row
        if cid in ds.candidates:
            raise DataError(f"{candidates_path}:{lineno}: duplicate candidate {cid!r}")
        ds.candidates[cid] = CandidateRecord(candidate_id=cid, form_id=form_id)

    for lineno, row in _rows(Path(responses_path), RESPONSES_HEADER):
        cid, item_id, _form, selected, t = row
        item = ds.items.get(item_id)
        if item is None:
            raise DataError(f"{responses_path}:{lineno}: unknown item_id {item_id!r}")
        try:
            ds.responses.append(ResponseEvent(
                candidate_id=cid,
                item_id=item_id,
                selected_option=selected,
                correct=1 if selected == item.key_option else 0,
                response_time_sec=float(t),
            ))
        except (DataError, ValueError) as exc:
            raise DataError(f"{responses_path}:{lineno}: {exc}") from None

    with open(comments_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{comments_path}:{lineno}: bad JSON ({exc})") from None
            try:
                rec = CommentRecord(
                    comment_id=str(obj["comment_id"]),
                    candidate_id=str(obj["candidate_id"]),
                    item_id=str(obj["item_id"]),
                    text=str(obj["text"]),
                    label=obj.get("label"),
                    reviewer_note=obj.get("reviewer_note"),
                )
            except KeyError as exc:
                raise DataError(f"{comments_path}:{lineno}: missing field {exc}") from None
            except DataError as exc:
                raise DataError(f"{comments_path}:{lineno}: {exc}") from None
            if rec.comment_id in ds.comments:
                raise DataError(
                    f"{comments_path}:{lineno}: duplicate comment_id {rec.comment_id!r}")
            ds.comments[rec.comment_id] = rec

    ds.validate()
    ds.recompute_scores()
    return ds


def save_dataset(ds: Dataset, out_dir) -> dict[str, Path]:
    """Write the four canonical files; inverse of load_dataset."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "items": out / "items.csv",
        "responses": out / "responses.csv",
        "candidates": out / "candidates.csv",
        "comments": out / "comments.jsonl",
    }

    with open(paths["items"], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(ITEMS_HEADER)
        for it in ds.items.values():
            w.writerow([
                it.item_id, it.form_id, it.item_type, it.key_option,
                "|".join(it.option_ids),
                "" if it.bank_difficulty is None else repr(it.bank_difficulty),
            ])

    with open(paths["responses"], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(RESPONSES_HEADER)
        for r in ds.responses:
            form = ds.candidates[r.candidate_id].form_id
            w.writerow([r.candidate_id, r.item_id, form, r.selected_option,
                        repr(r.response_time_sec)])

    with open(paths["candidates"], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(CANDIDATES_HEADER)
        for c in ds.candidates.values():
            w.writerow([c.candidate_id, c.form_id])

    with open(paths["comments"], "w", encoding="utf-8") as fh:
        for c in ds.comments.values():
            obj = {"comment_id": c.comment_id, "candidate_id": c.candidate_id,
                   "item_id": c.item_id, "text": c.text}
            if c.label is not None:
                obj["label"] = c.label
            if c.reviewer_note is not None:
                obj["reviewer_note"] = c.reviewer_note
            fh.write(json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n")

    return paths
