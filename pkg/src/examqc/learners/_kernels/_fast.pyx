# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the numpy split kernels.

Every accumulation runs in the same order as the reference: values sort by
(value, original position), prefix sums advance left to right, and the
gain expressions keep the exact operation shapes, so both backends return
bit-identical splits.
"""
from libc.math cimport isnan, isfinite, INFINITY
from libc.stdlib cimport free, malloc, qsort

from .pure import Split

NAME = "fast"

ctypedef long long i64

cdef struct VP:
    double v
    i64 pos

cdef int _cmp_vp(const void* pa, const void* pb) noexcept nogil:
    cdef const VP* a = <const VP*>pa
    cdef const VP* b = <const VP*>pb
    if a.v < b.v:
        return -1
    if a.v > b.v:
        return 1
    if a.pos < b.pos:
        return -1
    if a.pos > b.pos:
        return 1
    return 0


def best_split_gini(double[:, ::1] x, i64[::1] idx, i64[::1] y,
                    i64[::1] feats, i64 min_leaf):
    cdef i64 n_t = idx.shape[0]
    cdef i64 i, pos_t = 0
    for i in range(n_t):
        pos_t += y[idx[i]]
    cdef i64 neg_t = n_t - pos_t
    if pos_t == 0 or neg_t == 0:
        return None
    cdef double parent = <double>(pos_t * neg_t) / <double>n_t

    cdef VP* vp = <VP*>malloc(n_t * sizeof(VP))
    cdef i64* y_pres = <i64*>malloc(n_t * sizeof(i64))
    if vp == NULL or y_pres == NULL:
        free(vp)
        free(y_pres)
        raise MemoryError()

    cdef bint have_best = False
    cdef i64 best_feat = 0
    cdef double best_thr = 0.0, best_gain = 0.0
    cdef bint best_ml = False

    cdef i64 fj, j, n_p, n_m, pos_m, k, pos_cum, pos_le, n_le
    cdef i64 pl, nl, pr, nr, pl2, nl2, pr2, nr2
    cdef double val, vk, vk1, thr, gain_l, gain_r, gain
    cdef double feat_gain, feat_thr
    cdef bint to_left, feat_ml

    try:
        for fj in range(feats.shape[0]):
            j = feats[fj]
            n_p = 0
            pos_m = 0
            n_m = 0
            for i in range(n_t):
                val = x[idx[i], j]
                if isnan(val):
                    pos_m += y[idx[i]]
                    n_m += 1
                else:
                    vp[n_p].v = val
                    vp[n_p].pos = n_p
                    y_pres[n_p] = y[idx[i]]
                    n_p += 1
            if n_p < 2:
                continue
            qsort(vp, n_p, sizeof(VP), _cmp_vp)

            feat_gain = -INFINITY
            feat_thr = 0.0
            feat_ml = False
            pos_cum = 0
            for k in range(n_p - 1):
                pos_cum += y_pres[vp[k].pos]
                vk = vp[k].v
                vk1 = vp[k + 1].v
                if not vk < vk1:
                    continue
                thr = (vk + vk1) / 2.0
                if not thr > vk:
                    continue
                pos_le = pos_cum
                n_le = k + 1

                pl = pos_le + pos_m
                nl = n_le + n_m
                pr = pos_t - pl
                nr = n_t - nl
                if nl < min_leaf or nr < min_leaf:
                    gain_l = -INFINITY
                else:
                    gain_l = (parent - <double>(pl * (nl - pl)) / <double>nl) \
                        - <double>(pr * (nr - pr)) / <double>nr

                pl2 = pos_le
                nl2 = n_le
                pr2 = pos_t - pl2
                nr2 = n_t - nl2
                if nl2 < min_leaf or nr2 < min_leaf:
                    gain_r = -INFINITY
                else:
                    gain_r = (parent
                              - <double>(pl2 * (nl2 - pl2)) / <double>nl2) \
                        - <double>(pr2 * (nr2 - pr2)) / <double>nr2

                to_left = gain_l >= gain_r
                gain = gain_l if to_left else gain_r
                if gain > feat_gain:
                    feat_gain = gain
                    feat_thr = thr
                    feat_ml = to_left
            if not isfinite(feat_gain):
                continue
            if (not have_best) or feat_gain > best_gain:
                have_best = True
                best_feat = j
                best_thr = feat_thr
                best_ml = feat_ml
                best_gain = feat_gain
    finally:
        free(vp)
        free(y_pres)

    if not have_best:
        return None
    return Split(int(best_feat), float(best_thr), bool(best_ml),
                 float(best_gain))


def best_split_gbt(double[:, ::1] x, i64[::1] idx, double[::1] g,
                   double[::1] h, i64[::1] feats, double lam,
                   double gamma, double min_child_weight):
    cdef i64 n_t = idx.shape[0]
    cdef i64 i
    cdef double g_t = 0.0, h_t = 0.0
    for i in range(n_t):
        g_t += g[idx[i]]
        h_t += h[idx[i]]
    cdef double parent = (g_t * g_t) / (h_t + lam)

    cdef VP* vp = <VP*>malloc(n_t * sizeof(VP))
    cdef double* g_pres = <double*>malloc(n_t * sizeof(double))
    cdef double* h_pres = <double*>malloc(n_t * sizeof(double))
    if vp == NULL or g_pres == NULL or h_pres == NULL:
        free(vp)
        free(g_pres)
        free(h_pres)
        raise MemoryError()

    cdef bint have_best = False
    cdef i64 best_feat = 0
    cdef double best_thr = 0.0, best_gain = 0.0
    cdef bint best_ml = False

    cdef i64 fj, j, n_p, k
    cdef double val, vk, vk1, thr, g_m, h_m, g_run, h_run, g_le, h_le
    cdef double gl, hl, gr, hr, gl2, hl2, gr2, hr2
    cdef double gain_l, gain_r, gain, feat_gain, feat_thr
    cdef bint to_left, feat_ml

    try:
        for fj in range(feats.shape[0]):
            j = feats[fj]
            n_p = 0
            g_m = 0.0
            h_m = 0.0
            for i in range(n_t):
                val = x[idx[i], j]
                if isnan(val):
                    g_m += g[idx[i]]
                    h_m += h[idx[i]]
                else:
                    vp[n_p].v = val
                    vp[n_p].pos = n_p
                    g_pres[n_p] = g[idx[i]]
                    h_pres[n_p] = h[idx[i]]
                    n_p += 1
            if n_p < 2:
                continue
            qsort(vp, n_p, sizeof(VP), _cmp_vp)

            feat_gain = -INFINITY
            feat_thr = 0.0
            feat_ml = False
            g_run = 0.0
            h_run = 0.0
            for k in range(n_p - 1):
                g_run += g_pres[vp[k].pos]
                h_run += h_pres[vp[k].pos]
                vk = vp[k].v
                vk1 = vp[k + 1].v
                if not vk < vk1:
                    continue
                thr = (vk + vk1) / 2.0
                if not thr > vk:
                    continue
                g_le = g_run
                h_le = h_run

                gl = g_le + g_m
                hl = h_le + h_m
                gr = g_t - gl
                hr = h_t - hl
                if hl < min_child_weight or hr < min_child_weight:
                    gain_l = -INFINITY
                else:
                    gain_l = 0.5 * ((gl * gl) / (hl + lam)
                                    + (gr * gr) / (hr + lam) - parent) - gamma

                gl2 = g_le
                hl2 = h_le
                gr2 = g_t - gl2
                hr2 = h_t - hl2
                if hl2 < min_child_weight or hr2 < min_child_weight:
                    gain_r = -INFINITY
                else:
                    gain_r = 0.5 * ((gl2 * gl2) / (hl2 + lam)
                                    + (gr2 * gr2) / (hr2 + lam)
                                    - parent) - gamma

                to_left = gain_l >= gain_r
                gain = gain_l if to_left else gain_r
                if gain > feat_gain:
                    feat_gain = gain
                    feat_thr = thr
                    feat_ml = to_left
            if not isfinite(feat_gain):
                continue
            if (not have_best) or feat_gain > best_gain:
                have_best = True
                best_feat = j
                best_thr = feat_thr
                best_ml = feat_ml
                best_gain = feat_gain
    finally:
        free(vp)
        free(g_pres)
        free(h_pres)

    if not have_best:
        return None
    return Split(int(best_feat), float(best_thr), bool(best_ml),
                 float(best_gain))
