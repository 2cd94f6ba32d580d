"""Core record types for the exam QC pipeline.

Everything downstream (item statistics, the comment scorer, the model
variants) reads from a single `Dataset` built here. Records are plain
dataclasses with strict validation at construction/load time; after a
dataset is assembled it is treated as read-only.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

OMITTED = "omitted"

ITEM_TYPES = ("operational", "pretest")


class DataError(ValueError):
    """Malformed or inconsistent input data (message carries the location)."""


@dataclass(frozen=True)
class ItemRecord:
    item_id: str
    form_id: str
    item_type: str  # "operational" | "pretest"
    key_option: str
    option_ids: tuple[str, ...]
    bank_difficulty: Optional[float] = None  # logits, prior bank value

    def __post_init__(self):
        if self.item_type not in ITEM_TYPES:
            raise DataError(f"item {self.item_id}: bad item_type {self.item_type!r}")
        if not self.option_ids:
            raise DataError(f"item {self.item_id}: empty option list")
        if len(set(self.option_ids)) != len(self.option_ids):
            raise DataError(f"item {self.item_id}: duplicate option ids")
        if self.key_option not in self.option_ids:
            raise DataError(
                f"item {self.item_id}: key {self.key_option!r} not in options")


@dataclass(frozen=True)
class ResponseEvent:
    candidate_id: str
    item_id: str
    selected_option: str  # an option id, or OMITTED
    correct: int  # 1 iff selected_option == the item's key_option
    response_time_sec: float

    def __post_init__(self):
        if self.response_time_sec < 0:
            raise DataError(
                f"response {self.candidate_id}/{self.item_id}: negative time")
        if self.correct not in (0, 1):
            raise DataError(
                f"response {self.candidate_id}/{self.item_id}: correct must be 0/1")


@dataclass
class CandidateRecord:
    candidate_id: str
    form_id: str
    raw_score: int = 0  # correct operational responses
    exam_score: float = 0.0  # raw_score / administered operational items
    theta: Optional[float] = None  # filled by calibration
    included: bool = True  # post-cleaning


@dataclass
class CommentRecord:
    comment_id: str
    candidate_id: str
    item_id: str
    text: str
    label: Optional[int] = None  # 1 relevant, 0 not relevant, None unlabeled
    reviewer_note: Optional[str] = None
    from_excluded_candidate: bool = False  # set by cleaning, not serialized

    def __post_init__(self):
        if not self.text.strip():
            raise DataError(f"comment {self.comment_id}: empty text")
        if self.label not in (None, 0, 1):
            raise DataError(f"comment {self.comment_id}: label must be 0/1")


@dataclass(frozen=True)
class CleaningRules:
    """Threshold rules for dropping candidates before any statistics run.

    The operational forensics process these stand in for is site-specific,
    so everything is configurable and the defaults exclude nobody.
    """
    min_total_time_sec: float = 0.0
    min_items_answered: int = 0
    excluded_candidate_ids: tuple[str, ...] = ()

    def __post_init__(self):
        if self.min_total_time_sec < 0 or self.min_items_answered < 0:
            raise DataError("cleaning thresholds must be nonnegative")


@dataclass
class Dataset:
    """Cross-linked exam data: items, candidates, responses, comments.

    `items`/`candidates`/`comments` are keyed by id and preserve input
    order; `responses` keeps file order. `validate()` enforces referential
    integrity and must hold after every load.
    """
    items: dict[str, ItemRecord] = field(default_factory=dict)
    candidates: dict[str, CandidateRecord] = field(default_factory=dict)
    responses: list[ResponseEvent] = field(default_factory=list)
    comments: dict[str, CommentRecord] = field(default_factory=dict)

    def validate(self) -> None:
        seen_pairs = set()
        for i, r in enumerate(self.responses):
            if r.item_id not in self.items:
                raise DataError(f"response #{i}: unknown item_id {r.item_id!r}")
            if r.candidate_id not in self.candidates:
                raise DataError(
                    f"response #{i}: unknown candidate_id {r.candidate_id!r}")
            item = self.items[r.item_id]
            if r.selected_option != OMITTED and r.selected_option not in item.option_ids:
                raise DataError(
                    f"response #{i}: option {r.selected_option!r} not on item {r.item_id}")
            expected = 1 if r.selected_option == item.key_option else 0
            if r.correct != expected:
                raise DataError(
                    f"response #{i}: correct={r.correct} inconsistent with key")
            pair = (r.candidate_id, r.item_id)
            if pair in seen_pairs:
                raise DataError(f"response #{i}: duplicate (candidate,item) {pair}")
            seen_pairs.add(pair)
        for c in self.comments.values():
            if c.item_id not in self.items:
                raise DataError(f"comment {c.comment_id}: unknown item_id {c.item_id!r}")
            if c.candidate_id not in self.candidates:
                raise DataError(
                    f"comment {c.comment_id}: unknown candidate_id {c.candidate_id!r}")

    def recompute_scores(self) -> None:
        """Fill raw/exam scores from the response table (scores are never
        ingested; the response data is the authority)."""
        raw: dict[str, int] = {cid: 0 for cid in self.candidates}
        administered: dict[str, int] = {cid: 0 for cid in self.candidates}
        for r in self.responses:
            if self.items[r.item_id].item_type == "operational":
                administered[r.candidate_id] += 1
                raw[r.candidate_id] += r.correct
        for cid, cand in self.candidates.items():
            cand.raw_score = raw[cid]
            n_op = administered[cid]
            cand.exam_score = raw[cid] / n_op if n_op else 0.0

    # --- convenience views -------------------------------------------------

    def included_candidate_ids(self) -> set[str]:
        return {cid for cid, c in self.candidates.items() if c.included}

    def included_responses(self) -> list[ResponseEvent]:
        inc = self.included_candidate_ids()
        return [r for r in self.responses if r.candidate_id in inc]

    def comment_counts_by_item(self) -> dict[str, int]:
        """comment.n: every comment in the table counts, including ones from
        cleaned-out candidates (exclusion only affects item statistics)."""
        counts = {iid: 0 for iid in self.items}
        for c in self.comments.values():
            counts[c.item_id] += 1
        return counts

    def copy(self) -> "Dataset":
        return Dataset(
            items=dict(self.items),
            candidates={cid: replace(c) for cid, c in self.candidates.items()},
            responses=list(self.responses),
            comments={k: replace(c) for k, c in self.comments.items()},
        )
