"""Joint maximum-likelihood calibration: oracles, gradients, edge cases."""
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from examqc.data import SynthSpec, generate_synthetic
from examqc.psychometrics import (CalibrationError, calibrate,
                                  calibrate_matrix, rasch_loglik, rasch_score)

CLEAN = SynthSpec(speeder_fraction=0.0, n_drift_items=0,
                  n_miskeyed_items=0, n_noise_items=0)


def full_matrix(n_p, n_i, rng):
    """Random complete 0/1 matrix with no extreme rows or columns."""
    while True:
        x = (rng.random((n_p, n_i)) < rng.uniform(0.3, 0.7)).astype(float)
        rs, cs = x.sum(1), x.sum(0)
        if (0 < rs).all() and (rs < n_i).all() and (0 < cs).all() \
                and (cs < n_p).all():
            return x


def names(n, prefix):
    return [f"{prefix}{k:03d}" for k in range(n)]


def test_identical_columns_get_equal_b():
    rng = np.random.default_rng(0)
    x = full_matrix(30, 4, rng)
    x[:, 3] = x[:, 2]
    res = calibrate_matrix(x, np.ones_like(x, bool), names(30, "P"),
                           names(4, "I"), tol=1e-6)
    assert abs(res.b["I002"] - res.b["I003"]) < 1e-4


def test_item_permutation_permutes_b():
    rng = np.random.default_rng(1)
    x = full_matrix(40, 6, rng)
    ids = names(6, "I")
    res = calibrate_matrix(x, np.ones_like(x, bool), names(40, "P"), ids)
    perm = [3, 0, 5, 1, 4, 2]
    res2 = calibrate_matrix(x[:, perm], np.ones_like(x, bool),
                            names(40, "P"), [ids[j] for j in perm])
    for iid in ids:
        assert res2.b[iid] == pytest.approx(res.b[iid], abs=1e-9)


def test_recovery_and_grid_cross_check():
    t0 = time.time()
    ds, gt = generate_synthetic(CLEAN, seed=3)
    res = calibrate(ds)
    assert res.converged
    ids = sorted(res.b)
    bh = np.array([res.b[i] for i in ids])
    bt = np.array([gt.true_b[i] for i in ids])
    assert float(np.corrcoef(bh, bt)[0, 1]) >= 0.98
    assert float(np.sqrt(np.mean((bh - (bt - bt.mean())) ** 2))) <= 0.15

    # profile-likelihood grid search at 0.01-logit steps on five items
    pid = sorted(res.theta)
    th = np.array([res.theta[p] for p in pid])
    pindex = {p: k for k, p in enumerate(pid)}
    cols = {i: (np.zeros(len(pid)), np.zeros(len(pid), bool)) for i in ids[:5]}
    for ev in ds.included_responses():
        if ev.item_id in cols:
            x, m = cols[ev.item_id]
            k = pindex[ev.candidate_id]
            x[k], m[k] = ev.correct, True
    for iid in ids[:5]:
        x, m = cols[iid]
        grid = np.arange(res.b[iid] - 2.0, res.b[iid] + 2.0, 0.01)
        eta = th[m][None, :] - grid[:, None]
        ll = (x[m][None, :] * eta - np.logaddexp(0.0, eta)).sum(axis=1)
        best = float(grid[int(np.argmax(ll))])
        assert abs(best - res.b[iid]) <= 0.05, iid
    assert time.time() - t0 < 10.0


def test_score_function_matches_finite_differences():
    rng = np.random.default_rng(4)
    x = full_matrix(12, 6, rng)
    mask = np.ones_like(x, bool)
    theta = rng.normal(0, 1, 12)
    b = rng.normal(0, 1, 6)
    g_th, g_b = rasch_score(theta, b, x, mask)
    h = 1e-5
    for k in range(12):
        e = np.zeros(12)
        e[k] = h
        fd = (rasch_loglik(theta + e, b, x, mask)
              - rasch_loglik(theta - e, b, x, mask)) / (2 * h)
        assert abs(fd - g_th[k]) <= 1e-4 * max(1.0, abs(fd))
    for k in range(6):
        e = np.zeros(6)
        e[k] = h
        fd = (rasch_loglik(theta, b + e, x, mask)
              - rasch_loglik(theta, b - e, x, mask)) / (2 * h)
        assert abs(fd - g_b[k]) <= 1e-4 * max(1.0, abs(fd))


def test_loglik_trace_monotone_and_centered():
    ds, _ = generate_synthetic(CLEAN, seed=5)
    res = calibrate(ds)
    ll = res.ll_trace
    for a, b_ in zip(ll, ll[1:]):
        assert b_ >= a - 1e-7 * max(1.0, abs(a))
    assert abs(sum(res.b.values())) <= 1e-8
    assert res.log_likelihood == ll[-1]


def test_extreme_person_and_item_boundary_assignment():
    rng = np.random.default_rng(6)
    x = full_matrix(25, 5, rng)
    x[0, :] = 1.0            # perfect person
    x[:, 0] = 0.0            # impossible item (nobody right)
    res = calibrate_matrix(x, np.ones_like(x, bool), names(25, "P"),
                           names(5, "I"))
    assert "P000" in res.extreme_persons
    assert "I000" in res.extreme_items
    core_thetas = [v for p, v in res.theta.items()
                   if p not in res.extreme_persons]
    assert res.theta["P000"] > max(core_thetas)
    core_bs = [v for i, v in res.b.items() if i != "I000"]
    assert res.b["I000"] > max(core_bs)
    # centering applies to the estimable core, not boundary-assigned items
    core_sum = sum(v for i, v in res.b.items() if i != "I000")
    assert abs(core_sum) <= 1e-8


def test_all_extreme_raises():
    x = np.ones((4, 3))
    with pytest.raises(CalibrationError):
        calibrate_matrix(x, np.ones_like(x, bool), names(4, "P"),
                         names(3, "I"))


def test_non_convergence_reported_not_raised():
    ds, _ = generate_synthetic(SynthSpec(n_items=10, n_persons=80,
                                         speeder_fraction=0.0), seed=8)
    res = calibrate(ds, tol=1e-12, max_iter=1)
    assert not res.converged
    assert res.iterations == 1
    assert res.b and res.theta


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_random_matrices_monotone_ll_and_centering(seed):
    rng = np.random.default_rng(seed)
    n_p = int(rng.integers(6, 15))
    n_i = int(rng.integers(3, 7))
    x = full_matrix(n_p, n_i, rng)
    res = calibrate_matrix(x, np.ones_like(x, bool), names(n_p, "P"),
                           names(n_i, "I"))
    for a, b_ in zip(res.ll_trace, res.ll_trace[1:]):
        assert b_ >= a - 1e-7 * max(1.0, abs(a))
    assert abs(sum(res.b.values())) <= 1e-8
    g_th, g_b = rasch_score(
        np.array([res.theta[p] for p in names(n_p, "P")]),
        np.array([res.b[i] for i in names(n_i, "I")]),
        x, np.ones_like(x, bool))
    if res.converged:
        # at an interior JMLE solution the score is nearly zero
        assert float(np.max(np.abs(g_th))) < 0.01
