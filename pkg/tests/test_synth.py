"""Generator contracts: determinism, model fidelity, planted structure."""
import filecmp

import numpy as np
import pytest

from examqc.data import (DataError, GroundTruth, SynthSpec, generate_synthetic,
                         save_dataset)

CLEAN = SynthSpec(speeder_fraction=0.0, n_drift_items=0,
                  n_miskeyed_items=0, n_noise_items=0)


def test_same_seed_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir(), b.mkdir()
    spec = SynthSpec(n_items=12, n_persons=60)
    save_dataset(generate_synthetic(spec, seed=13)[0], a)
    save_dataset(generate_synthetic(spec, seed=13)[0], b)
    for name in ("items.csv", "responses.csv", "candidates.csv",
                 "comments.jsonl"):
        assert filecmp.cmp(a / name, b / name, shallow=False), name


def test_different_seed_differs():
    spec = SynthSpec(n_items=12, n_persons=60)
    d1, _ = generate_synthetic(spec, seed=1)
    d2, _ = generate_synthetic(spec, seed=2)
    assert d1.responses != d2.responses


def test_degenerate_spec_rejected():
    with pytest.raises(DataError):
        generate_synthetic(SynthSpec(n_items=0), seed=1)
    with pytest.raises(DataError):
        generate_synthetic(SynthSpec(n_persons=0), seed=1)


def test_theta_equals_b_gives_half():
    spec = SynthSpec(n_items=10, n_persons=800, b_range=(0.0, 0.0),
                     theta_sd=0.0, speeder_fraction=0.0, n_drift_items=0,
                     n_miskeyed_items=0, n_noise_items=0)
    ds, _ = generate_synthetic(spec, seed=5)
    bound = 3 * (0.25 / spec.n_persons) ** 0.5
    per_item: dict[str, list[int]] = {}
    for ev in ds.responses:
        per_item.setdefault(ev.item_id, []).append(ev.correct)
    for iid, xs in per_item.items():
        assert abs(sum(xs) / len(xs) - 0.5) <= bound, iid


def test_empirical_p_matches_theta_average():
    ds, gt = generate_synthetic(CLEAN, seed=11)
    th = np.array([gt.true_theta[c] for c in sorted(gt.true_theta)])
    per_item: dict[str, list[int]] = {}
    for ev in ds.responses:
        per_item.setdefault(ev.item_id, []).append(ev.correct)
    for iid, xs in per_item.items():
        analytic = float(np.mean(1.0 / (1.0 + np.exp(-(th - gt.true_b[iid])))))
        assert abs(sum(xs) / len(xs) - analytic) <= 0.03, iid


def test_planted_structure_counts():
    spec = SynthSpec()
    ds, gt = generate_synthetic(spec, seed=7)
    assert len(gt.drift_items) == spec.n_drift_items
    assert len(gt.miskeyed_items) == spec.n_miskeyed_items
    assert len(gt.noise_items) == spec.n_noise_items
    assert len(gt.speeders) == round(spec.speeder_fraction * spec.n_persons)
    assert set(gt.defect_items) <= set(ds.items)
    # defects are planted on operational items only
    for iid in gt.defect_items:
        assert ds.items[iid].item_type == "operational"
    n_pretest = sum(1 for it in ds.items.values()
                    if it.item_type == "pretest")
    assert n_pretest == round(spec.pretest_fraction * spec.n_items)


def test_labels_partition_comments():
    ds, gt = generate_synthetic(SynthSpec(), seed=7)
    rel = set(gt.relevant_comments)
    bait = set(gt.bait_comments)
    assert rel.isdisjoint(bait)
    for mid, c in ds.comments.items():
        assert c.label == (1 if mid in rel else 0)
    assert all(ds.comments[m].label == 1 for m in rel)
    # planted-relevant rate is approximate but must be in the ballpark
    frac = len(rel) / len(ds.comments)
    assert 0.02 <= frac <= 0.10


def test_relevant_comments_prefer_defect_items():
    ds, gt = generate_synthetic(SynthSpec(), seed=7)
    defects = set(gt.defect_items)
    on_defect = sum(1 for m in gt.relevant_comments
                    if ds.comments[m].item_id in defects)
    assert on_defect / len(gt.relevant_comments) >= 0.5


def test_ground_truth_json_round_trip():
    _, gt = generate_synthetic(SynthSpec(n_items=6, n_persons=30), seed=3)
    gt2 = GroundTruth.from_json(gt.to_json())
    assert gt2 == gt


def test_bank_values_present_on_operational_items():
    ds, gt = generate_synthetic(SynthSpec(), seed=7)
    for iid, item in ds.items.items():
        if item.item_type == "operational":
            assert item.bank_difficulty is not None
    # drift items banked well below their administered difficulty
    for iid in gt.drift_items:
        gap = gt.true_b[iid] - ds.items[iid].bank_difficulty
        assert gap == pytest.approx(gt.drift_shift, abs=0.15)
