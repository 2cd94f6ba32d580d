"""Synthetic exam generator with planted ground truth.

Real person-by-item exam data with reviewer labels is proprietary, so the
test bed is simulated: abilities and difficulties drawn from known
distributions, responses from the one-parameter logistic model, and a
comment stream with known labels. Defects are planted on purpose so every
downstream detector has something to find:

  * drift items      administered difficulty sits `drift_shift` logits
                     above the banked value
  * a miskeyed item  examinees who know the content pick an option that is
                     not the recorded key
  * a noise item     correctness is a coin flip, independent of ability
  * speeders         a slice of candidates answering in seconds at random

Relevant (label-1) comments use a distinct defect vocabulary and land
preferentially on defect items, so both the text scorer and the
psychometric features carry real signal. A small "bait" pool shares
surface vocabulary with the relevant pool but is labeled 0 — the noise a
reviewer would discard. When `false_alarm_rate` is nonzero, some clean
items additionally receive comments drawn from the relevant wording pool
yet labeled 0: defect claims the review board rejected. No text model can
separate those, which is what keeps a human review queue in business.

Everything is deterministic given the seed: independent RNG streams per
subsystem, fixed iteration order.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from math import exp, log

import numpy as np

from .models import (
    OMITTED,
    CandidateRecord,
    CommentRecord,
    DataError,
    Dataset,
    ItemRecord,
    ResponseEvent,
)

OPTION_IDS = ("A", "B", "C", "D")


@dataclass(frozen=True)
class SynthSpec:
    n_items: int = 50
    n_persons: int = 1000
    b_range: tuple[float, float] = (-2.0, 2.0)
    theta_mean: float = 0.0
    theta_sd: float = 1.0
    pretest_fraction: float = 0.2
    comment_rate: float = 0.08       # per response
    relevant_rate: float = 0.05      # fraction of comments that are label-1
    bait_rate: float = 0.02          # negative-sounding label-0 comments
    false_alarm_rate: float = 0.0    # defect claims on clean items, label 0
    defect_share: float = 0.75       # share of relevant comments on defect items
    speeder_fraction: float = 0.05
    n_drift_items: int = 3
    n_miskeyed_items: int = 1
    n_noise_items: int = 1
    drift_shift: float = 0.8         # logits above bank
    omit_rate: float = 0.0


@dataclass
class GroundTruth:
    """What the generator knows and the pipeline is supposed to recover."""
    true_b: dict[str, float] = field(default_factory=dict)
    true_theta: dict[str, float] = field(default_factory=dict)
    speeders: list[str] = field(default_factory=list)
    drift_items: list[str] = field(default_factory=list)
    miskeyed_items: list[str] = field(default_factory=list)
    noise_items: list[str] = field(default_factory=list)
    relevant_comments: list[str] = field(default_factory=list)
    bait_comments: list[str] = field(default_factory=list)
    false_alarm_comments: list[str] = field(default_factory=list)
    speeder_time_threshold: float = 0.0
    drift_shift: float = 0.0

    @property
    def defect_items(self) -> list[str]:
        return self.drift_items + self.miskeyed_items + self.noise_items

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "GroundTruth":
        return cls(**json.loads(text))


# Pool of clearly actionable defect reports; these become label 1.
RELEVANT_TEMPLATES = [
    "There are two correct answers here, option {a} and option {b} both work.",
    "Option {a} is also correct, the marked key must be wrong.",
    "Typo in option {a}, the value it shows cannot be right.",
    "The exhibit referenced in the stem never loaded, impossible to answer.",
    "None of the listed options is actually correct.",
    "The stem contradicts option {a}, please check this item.",
    "Options {a} and {b} say exactly the same thing, duplicated choice.",
    "The scenario quotes the wrong version number, which changes the key.",
    "This looks miskeyed, {a} should be the right answer instead of {b}.",
    "Broken formatting in the code sample, a whole line is missing.",
]

# Negative sentiment without an actionable defect; reviewers discard these,
# so they are label 0 even though they share surface vocabulary above.
BAIT_TEMPLATES = [
    "Not sure I picked the correct answer on this one.",
    "Could not decide between two options, tough call.",
    "Ran out of time before reading every option properly.",
    "I guessed the answer here, no idea if it was right.",
    "Way too hard for me, my answer was a pure guess.",
    "Hopefully that was the correct option, felt ambiguous.",
]

GENERIC_TEMPLATES = [
    "Good question.",
    "Fair item.",
    "No complaints.",
    "This one was easy.",
    "Interesting scenario.",
    "Straightforward.",
    "Nice coverage of the topic.",
    "Liked this one.",
    "Clear wording.",
    "Reasonable difficulty.",
    "Fine.",
    "Standard material.",
    "Covered in the study guide.",
    "Quick one.",
    "Makes sense.",
    "Good practical example.",
]


def _logistic(x):
    return 1.0 / (1.0 + np.exp(-x))


def generate_synthetic(spec: SynthSpec, seed: int) -> tuple[Dataset, GroundTruth]:
    """Build a fully labeled dataset plus its ground truth. Deterministic:
    equal (spec, seed) gives structurally equal datasets."""
    if spec.n_items < 1 or spec.n_persons < 1:
        raise DataError("degenerate spec: need at least one item and one person")

    streams = [np.random.default_rng(np.random.SeedSequence([seed, k]))
               for k in range(7)]
    rng_items, rng_persons, rng_resp, rng_time, rng_cmt, rng_text, rng_fa = streams

    n_items, n_persons = spec.n_items, spec.n_persons
    width_i = max(3, len(str(n_items)))
    width_p = max(4, len(str(n_persons)))
    item_ids = [f"I{k + 1:0{width_i}d}" for k in range(n_items)]
    person_ids = [f"P{k + 1:0{width_p}d}" for k in range(n_persons)]

    lo, hi = spec.b_range
    true_b = rng_items.uniform(lo, hi, n_items) if hi > lo else np.full(n_items, lo)
    keys = rng_items.integers(0, len(OPTION_IDS), n_items)
    n_pretest = int(round(spec.pretest_fraction * n_items))
    n_pretest = min(n_pretest, n_items - 1)
    operational = list(range(n_items - n_pretest))

    # plant defects on operational items only (drift needs a bank value)
    n_defect = min(spec.n_drift_items + spec.n_miskeyed_items + spec.n_noise_items,
                   len(operational))
    defect_pick = rng_items.choice(len(operational), size=n_defect, replace=False)
    defect_idx = [operational[j] for j in defect_pick]
    drift_idx = defect_idx[:spec.n_drift_items]
    miskey_idx = defect_idx[spec.n_drift_items:
                            spec.n_drift_items + spec.n_miskeyed_items]
    noise_idx = defect_idx[spec.n_drift_items + spec.n_miskeyed_items:]

    bank_noise = rng_items.normal(0.0, 0.03, n_items)
    # the miskeyed item: examinee behavior targets true_opt, records score
    # against the (different) published key
    true_opt = {}
    for k in miskey_idx:
        others = [o for o in range(len(OPTION_IDS)) if o != keys[k]]
        true_opt[k] = others[rng_items.integers(0, len(others))]

    ds = Dataset()
    for k, iid in enumerate(item_ids):
        is_op = k < n_items - n_pretest
        bank = None
        if is_op:
            bank = float(true_b[k] + bank_noise[k])
            if k in drift_idx:
                bank = float(true_b[k] - spec.drift_shift + bank_noise[k])
        ds.items[iid] = ItemRecord(
            item_id=iid, form_id="F1",
            item_type="operational" if is_op else "pretest",
            key_option=OPTION_IDS[keys[k]],
            option_ids=OPTION_IDS,
            bank_difficulty=bank,
        )

    theta = rng_persons.normal(spec.theta_mean, spec.theta_sd, n_persons)
    n_speeders = int(round(spec.speeder_fraction * n_persons))
    speeder_pick = set(rng_persons.choice(n_persons, size=n_speeders,
                                          replace=False).tolist()) if n_speeders else set()
    for v, pid in enumerate(person_ids):
        ds.candidates[pid] = CandidateRecord(candidate_id=pid, form_id="F1")

    # --- responses ---------------------------------------------------------
    p_mat = _logistic(theta[:, None] - true_b[None, :])
    u_correct = rng_resp.random((n_persons, n_items))
    pick_wrong = rng_resp.integers(0, len(OPTION_IDS) - 1, (n_persons, n_items))
    u_omit = rng_resp.random((n_persons, n_items))
    pick_any = rng_resp.integers(0, len(OPTION_IDS), (n_persons, n_items))

    z_time = rng_time.normal(0.0, 1.0, (n_persons, n_items))
    noise_set, miskey_set = set(noise_idx), set(miskey_idx)

    for v, pid in enumerate(person_ids):
        speeder = v in speeder_pick
        mu, sigma = (log(2.0), 0.3) if speeder else (log(45.0), 0.4)
        for k, iid in enumerate(item_ids):
            t = exp(mu + sigma * z_time[v, k])
            if speeder:
                sel = pick_any[v, k]
            elif k in noise_set:
                knows = u_correct[v, k] < 0.5
                sel = keys[k] if knows else _wrong_of(keys[k], pick_wrong[v, k])
            elif k in miskey_set:
                knows = u_correct[v, k] < p_mat[v, k]
                sel = true_opt[k] if knows else _wrong_of(true_opt[k], pick_wrong[v, k])
            else:
                knows = u_correct[v, k] < p_mat[v, k]
                sel = keys[k] if knows else _wrong_of(keys[k], pick_wrong[v, k])
            if spec.omit_rate > 0 and u_omit[v, k] < spec.omit_rate:
                selected = OMITTED
            else:
                selected = OPTION_IDS[sel]
            ds.responses.append(ResponseEvent(
                candidate_id=pid, item_id=iid, selected_option=selected,
                correct=1 if selected == OPTION_IDS[keys[k]] else 0,
                response_time_sec=round(t, 3),
            ))

    # --- comments ----------------------------------------------------------
    defect_set = set(defect_idx)
    f_def = len(defect_set) / n_items if n_items else 0.0
    r_def = min(0.9, spec.relevant_rate * spec.defect_share / f_def) if f_def else 0.0
    r_clean = (spec.relevant_rate * (1.0 - spec.defect_share) / (1.0 - f_def)
               if f_def < 1.0 else 0.0)
    w_bait = spec.bait_rate / (1.0 - f_def) if f_def < 1.0 else 0.0
    w_fa = spec.false_alarm_rate / (1.0 - f_def) if f_def < 1.0 else 0.0

    gt = GroundTruth(
        true_b={iid: float(true_b[k]) for k, iid in enumerate(item_ids)},
        true_theta={pid: float(theta[v]) for v, pid in enumerate(person_ids)},
        speeders=sorted(person_ids[v] for v in speeder_pick),
        drift_items=[item_ids[k] for k in drift_idx],
        miskeyed_items=[item_ids[k] for k in miskey_idx],
        noise_items=[item_ids[k] for k in noise_idx],
        speeder_time_threshold=10.0 * n_items,
        drift_shift=spec.drift_shift,
    )

    seq = 0
    for v, pid in enumerate(person_ids):
        for k, iid in enumerate(item_ids):
            if rng_cmt.random() >= spec.comment_rate:
                continue
            seq += 1
            cid = f"C{seq:06d}"
            u = rng_cmt.random()
            on_defect = k in defect_set
            p_rel = r_def if on_defect else r_clean
            if u < p_rel:
                text = _fill(RELEVANT_TEMPLATES, rng_text)
                label = 1
                gt.relevant_comments.append(cid)
            elif not on_defect and u < p_rel + w_bait:
                text = _fill(BAIT_TEMPLATES, rng_text)
                label = 0
                gt.bait_comments.append(cid)
            elif (spec.false_alarm_rate > 0 and not on_defect
                    and u < p_rel + w_bait + w_fa):
                # A defect claim that review found baseless: relevant wording,
                # clean item, label 0. Text alone cannot separate these.
                text = _fill(RELEVANT_TEMPLATES, rng_fa)
                label = 0
                gt.false_alarm_comments.append(cid)
            else:
                text = _fill(GENERIC_TEMPLATES, rng_text)
                label = 0
            ds.comments[cid] = CommentRecord(
                comment_id=cid, candidate_id=pid, item_id=iid,
                text=text, label=label,
            )

    ds.validate()
    ds.recompute_scores()
    return ds, gt


def _wrong_of(key: int, j: int) -> int:
    """j-th option among the ones that are not `key` (j in 0..n_options-2)."""
    return j if j < key else j + 1


def _fill(pool: list[str], rng: np.random.Generator) -> str:
    text = pool[rng.integers(0, len(pool))]
    if "{a}" in text or "{b}" in text:
        a, b = rng.choice(len(OPTION_IDS), size=2, replace=False)
        text = text.format(a=OPTION_IDS[a], b=OPTION_IDS[b])
    return text
