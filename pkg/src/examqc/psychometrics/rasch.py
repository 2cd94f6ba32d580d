"""One-parameter logistic calibration by joint maximum likelihood.

Persons and items are updated in alternating Newton-Raphson blocks.  Each
block step is clamped and then backtracked (step halving) until that block's
log-likelihood does not decrease, which makes the outer-iteration likelihood
trace monotone by construction.  After every outer iteration the item
difficulties are centered to mean zero; the same shift is applied to the
person parameters so the likelihood is unchanged.

Perfect and zero scores carry no finite maximum, so extreme persons and
items are removed from estimation (repeatedly, since removals can create new
extremes) and afterwards assigned parameters by the half-score boundary
adjustment: the score is pulled in by 0.5 and the one-dimensional likelihood
is maximized against the final estimates of everything else.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class CalibrationError(ValueError):
    pass


@dataclass
class CalibrationResult:
    b: dict[str, float]
    theta: dict[str, float]
    converged: bool
    iterations: int
    log_likelihood: float
    extreme_items: list[str] = field(default_factory=list)
    extreme_persons: list[str] = field(default_factory=list)
    ll_trace: list[float] = field(default_factory=list)


def _loglik(theta: np.ndarray, b: np.ndarray, x: np.ndarray,
            mask: np.ndarray) -> float:
    eta = theta[:, None] - b[None, :]
    terms = x * eta - np.logaddexp(0.0, eta)
    return float(np.sum(terms, where=mask))


def rasch_score(theta: np.ndarray, b: np.ndarray, x: np.ndarray,
                mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradient of the joint log-likelihood (d/dtheta, d/db)."""
    eta = theta[:, None] - b[None, :]
    p = 1.0 / (1.0 + np.exp(-eta))
    resid = np.where(mask, x - p, 0.0)
    return resid.sum(axis=1), -resid.sum(axis=0)


def rasch_loglik(theta: np.ndarray, b: np.ndarray, x: np.ndarray,
                 mask: np.ndarray) -> float:
    return _loglik(theta, b, x, mask)


def _block_update(params: np.ndarray, ll_parts, grad_info,
                  max_halvings: int = 12) -> np.ndarray:
    """Newton step on each coordinate of a separable block, clamped to
    |step| <= 1 and halved per coordinate until its part of the likelihood
    does not decrease."""
    g, h = grad_info(params)
    with np.errstate(divide="ignore", invalid="ignore"):
        step = np.where(h > 0.0, g / h, 0.0)
    step = np.clip(step, -1.0, 1.0)
    base = ll_parts(params)
    cur = params + step
    for _ in range(max_halvings):
        bad = ll_parts(cur) < base
        if not np.any(bad):
            return cur
        step = np.where(bad, step * 0.5, step)
        cur = np.where(bad, params + step, cur)
    bad = ll_parts(cur) < base
    return np.where(bad, params, cur)


def _solve_boundary(score_adj: float, other: np.ndarray, lo: float = -12.0,
                    hi: float = 12.0) -> float:
    """Solve sum_i logistic(t - other_i) = score_adj for t by bisection.
    The left side is strictly increasing in t, so bisection is safe."""
    def f(t: float) -> float:
        return float(np.sum(1.0 / (1.0 + np.exp(-(t - other))))) - score_adj

    a, fa = lo, f(lo)
    c, fc = hi, f(hi)
    if fa > 0.0:
        return lo
    if fc < 0.0:
        return hi
    for _ in range(100):
        m = 0.5 * (a + c)
        fm = f(m)
        if fm <= 0.0:
            a = m
        else:
            c = m
    return 0.5 * (a + c)


def calibrate(dataset, tol: float = 1e-4, max_iter: int = 50) -> CalibrationResult:
    """Joint maximum-likelihood calibration of the whole response matrix.

    Raises CalibrationError when nothing is estimable; non-convergence within
    max_iter is reported through converged=False, not an exception.
    """
    person_ids = sorted(dataset.included_candidate_ids())
    item_ids = sorted(dataset.items)
    p_index = {pid: i for i, pid in enumerate(person_ids)}
    i_index = {iid: j for j, iid in enumerate(item_ids)}

    n_p, n_i = len(person_ids), len(item_ids)
    x = np.zeros((n_p, n_i))
    mask = np.zeros((n_p, n_i), dtype=bool)
    for ev in dataset.included_responses():
        v, j = p_index[ev.candidate_id], i_index[ev.item_id]
        x[v, j] = float(ev.correct)
        mask[v, j] = True

    return calibrate_matrix(x, mask, person_ids, item_ids,
                            tol=tol, max_iter=max_iter)


def calibrate_matrix(x: np.ndarray, mask: np.ndarray,
                     person_ids: list[str], item_ids: list[str],
                     tol: float = 1e-4,
                     max_iter: int = 50) -> CalibrationResult:
    n_p, n_i = x.shape
    keep_p = mask.any(axis=1)
    keep_i = mask.any(axis=0)

    # repeatedly drop perfect/zero scores; removing one can extremify another
    est_p = keep_p.copy()
    est_i = keep_i.copy()
    while True:
        sub = mask & est_p[:, None] & est_i[None, :]
        r_v = np.sum(x, axis=1, where=sub)
        m_v = sub.sum(axis=1)
        s_i = np.sum(x, axis=0, where=sub)
        n_i_adm = sub.sum(axis=0)
        new_p = est_p & (m_v > 0) & (r_v > 0) & (r_v < m_v)
        new_i = est_i & (n_i_adm > 0) & (s_i > 0) & (s_i < n_i_adm)
        if np.array_equal(new_p, est_p) and np.array_equal(new_i, est_i):
            break
        est_p, est_i = new_p, new_i

    if not est_p.any() or not est_i.any():
        raise CalibrationError("no estimable parameters: every person or "
                               "item has a perfect or zero score")

    pi = np.flatnonzero(est_p)
    ii = np.flatnonzero(est_i)
    xs = x[np.ix_(pi, ii)]
    ms = mask[np.ix_(pi, ii)]
    r_v = np.sum(xs, axis=1, where=ms)
    m_v = ms.sum(axis=1)
    s_i = np.sum(xs, axis=0, where=ms)
    n_adm = ms.sum(axis=0)

    theta = np.log(r_v / (m_v - r_v))
    b = np.log((n_adm - s_i) / s_i)
    b -= b.mean()

    def person_ll_parts(th: np.ndarray) -> np.ndarray:
        eta = th[:, None] - b[None, :]
        return np.sum(xs * eta - np.logaddexp(0.0, eta), axis=1, where=ms)

    def person_grad_info(th: np.ndarray):
        eta = th[:, None] - b[None, :]
        p = 1.0 / (1.0 + np.exp(-eta))
        g = np.sum(xs - p, axis=1, where=ms)
        h = np.sum(p * (1.0 - p), axis=1, where=ms)
        return g, h

    def item_ll_parts(bb: np.ndarray) -> np.ndarray:
        eta = theta[:, None] - bb[None, :]
        return np.sum(xs * eta - np.logaddexp(0.0, eta), axis=0, where=ms)

    def item_grad_info(bb: np.ndarray):
        eta = theta[:, None] - bb[None, :]
        p = 1.0 / (1.0 + np.exp(-eta))
        g = np.sum(p - xs, axis=0, where=ms)
        h = np.sum(p * (1.0 - p), axis=0, where=ms)
        return g, h

    ll_trace = [_loglik(theta, b, xs, ms)]
    converged = False
    iterations = 0
    for it in range(1, max_iter + 1):
        theta_old, b_old = theta.copy(), b.copy()
        theta = _block_update(theta, person_ll_parts, person_grad_info)
        b = _block_update(b, item_ll_parts, item_grad_info)
        shift = b.mean()
        b -= shift
        theta -= shift
        ll_trace.append(_loglik(theta, b, xs, ms))
        iterations = it
        delta = max(np.max(np.abs(theta - theta_old)),
                    np.max(np.abs(b - b_old)))
        if delta < tol:
            converged = True
            break

    b_map = {item_ids[j]: float(b[k]) for k, j in enumerate(ii)}
    theta_map = {person_ids[v]: float(theta[k]) for k, v in enumerate(pi)}

    # boundary adjustment for extreme items, against the core person estimates
    extreme_items = []
    for j in np.flatnonzero(keep_i & ~est_i):
        adm = mask[pi, j]
        if not adm.any():
            continue
        th_adm = theta[adm]
        s = float(np.sum(x[pi, j], where=adm))
        s_adj = min(max(s, 0.5), th_adm.size - 0.5)
        b_map[item_ids[j]] = _neg_boundary(s_adj, th_adm)
        extreme_items.append(item_ids[j])

    # boundary adjustment for extreme persons, against every item that now
    # has a difficulty (core plus boundary-assigned)
    extreme_persons = []
    for v in np.flatnonzero(keep_p & ~est_p):
        cols = [j for j in np.flatnonzero(mask[v]) if item_ids[j] in b_map]
        if not cols:
            continue
        bs = np.array([b_map[item_ids[j]] for j in cols])
        r = float(sum(x[v, j] for j in cols))
        r_adj = min(max(r, 0.5), len(cols) - 0.5)
        theta_map[person_ids[v]] = _solve_boundary(r_adj, bs)
        extreme_persons.append(person_ids[v])

    return CalibrationResult(
        b=b_map,
        theta=theta_map,
        converged=converged,
        iterations=iterations,
        log_likelihood=ll_trace[-1],
        extreme_items=sorted(extreme_items),
        extreme_persons=sorted(extreme_persons),
        ll_trace=ll_trace,
    )


def _neg_boundary(score_adj: float, thetas: np.ndarray) -> float:
    """Item-side boundary solve: find b with sum_v logistic(theta_v - b)
    equal to score_adj.  Expected score is decreasing in b; substitute
    u = -b to reuse the increasing-function bisection."""
    u = _solve_boundary(score_adj, -thetas)
    return -u
