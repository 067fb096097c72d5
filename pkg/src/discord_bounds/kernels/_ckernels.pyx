# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled two-qubit kernels.

Mirrors ``_pykernels`` function for function and algorithm for algorithm:
closed-form conditional Bloch vectors off the 4×4 correlation matrix, a
hemisphere grid scan with Nelder-Mead refinement, and a multi-start
Nelder-Mead over POVM parameters with the closure constraint eliminated.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, acos, atan2, cos, fabs, log2, sin, sqrt

cnp.import_array()

DEF MAX_DIM = 12          # NM search dimension cap (POVM: 3*(k-1) <= 9)
DEF MAX_ELEMS = 4
DEF PROB_FLOOR = 1e-14

OBJ_ENTROPY = 0
OBJ_CONCURRENCE = 1
OBJ_TANGLE = 2
OBJ_NEG_MUTUAL_INFO = 3


cdef struct Ctx:
    double x[3]
    double y[3]
    double t[3][3]        # t[a][b] = <sigma_a sigma_b>
    double delta
    double cp[3]
    double cm[3]
    int objective
    int k


cdef void _load_ctx(Ctx* ctx, double[:, ::1] r) nogil:
    cdef int a, b
    for a in range(3):
        ctx.x[a] = r[a + 1, 0]
        ctx.y[a] = r[0, a + 1]
        ctx.cp[a] = r[a + 1, 0]
        ctx.cm[a] = r[a + 1, 3]
        for b in range(3):
            ctx.t[a][b] = r[a + 1, b + 1]
    ctx.delta = r[0, 3]


cdef inline double _h2(double p) nogil:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * log2(p) - (1.0 - p) * log2(1.0 - p)


cdef double _cond_entropy_dir(Ctx* ctx, double theta, double phi) nogil:
    cdef double m0, m1, m2, mx, p, w, acc, v, total, sign
    cdef int b, s
    m0 = sin(theta) * cos(phi)
    m1 = sin(theta) * sin(phi)
    m2 = cos(theta)
    mx = m0 * ctx.x[0] + m1 * ctx.x[1] + m2 * ctx.x[2]
    total = 0.0
    for s in range(2):
        sign = 1.0 if s == 0 else -1.0
        p = (1.0 + sign * mx) / 2.0
        if p <= PROB_FLOOR:
            continue
        acc = 0.0
        for b in range(3):
            w = (ctx.y[b] + sign * (m0 * ctx.t[0][b] + m1 * ctx.t[1][b]
                                    + m2 * ctx.t[2][b])) / 2.0
            acc += w * w
        v = sqrt(acc) / p
        if v > 1.0:
            v = 1.0
        total += p * _h2((1.0 + v) / 2.0)
    return total


cdef double _povm_cost_elems(Ctx* ctx, double[4][4] elems, int n_elems) nogil:
    cdef double total, e0, p, w, acc, v, p1, p2, pi, q1, q2
    cdef int i, b
    if ctx.objective == 3:
        q1 = (1.0 + ctx.delta) / 2.0
        q2 = (1.0 - ctx.delta) / 2.0
        total = 0.0
        for i in range(n_elems):
            e0 = elems[i][0]
            p1 = (e0 * (1.0 + ctx.delta)
                  + elems[i][1] * (ctx.cp[0] + ctx.cm[0])
                  + elems[i][2] * (ctx.cp[1] + ctx.cm[1])
                  + elems[i][3] * (ctx.cp[2] + ctx.cm[2])) / 2.0
            p2 = (e0 * (1.0 - ctx.delta)
                  + elems[i][1] * (ctx.cp[0] - ctx.cm[0])
                  + elems[i][2] * (ctx.cp[1] - ctx.cm[1])
                  + elems[i][3] * (ctx.cp[2] - ctx.cm[2])) / 2.0
            if p1 < 0.0:
                p1 = 0.0
            if p2 < 0.0:
                p2 = 0.0
            pi = p1 + p2
            if pi <= PROB_FLOOR:
                continue
            if p1 > 0.0:
                total += p1 * log2(p1 / (pi * q1))
            if p2 > 0.0:
                total += p2 * log2(p2 / (pi * q2))
        return -total
    total = 0.0
    for i in range(n_elems):
        e0 = elems[i][0]
        p = e0 + (elems[i][1] * ctx.x[0] + elems[i][2] * ctx.x[1]
                  + elems[i][3] * ctx.x[2])
        if p <= PROB_FLOOR:
            continue
        acc = 0.0
        for b in range(3):
            w = e0 * ctx.y[b] + (elems[i][1] * ctx.t[0][b]
                                 + elems[i][2] * ctx.t[1][b]
                                 + elems[i][3] * ctx.t[2][b])
            acc += w * w
        v = sqrt(acc) / p
        if v > 1.0:
            v = 1.0
        if ctx.objective == 0:
            total += p * _h2((1.0 + v) / 2.0)
        elif ctx.objective == 1:
            acc = 1.0 - v * v
            total += p * sqrt(acc if acc > 0.0 else 0.0)
        else:
            total += p * (1.0 - v * v)
    return total


cdef int _expand_params(double* params, int k, double[4][4] elems) nogil:
    """Rank-1 elements plus identity completion; returns 0 when infeasible."""
    cdef double acc0 = 0.0
    cdef double acc1 = 0.0, acc2 = 0.0, acc3 = 0.0
    cdef double w, theta, phi, half, st
    cdef int i
    for i in range(k - 1):
        w = params[3 * i]
        if w < 0.0:
            return 0
        theta = params[3 * i + 1]
        phi = params[3 * i + 2]
        half = w / 2.0
        st = sin(theta)
        elems[i][0] = half
        elems[i][1] = half * st * cos(phi)
        elems[i][2] = half * st * sin(phi)
        elems[i][3] = half * cos(theta)
        acc0 += elems[i][0]
        acc1 += elems[i][1]
        acc2 += elems[i][2]
        acc3 += elems[i][3]
    elems[k - 1][0] = 1.0 - acc0
    elems[k - 1][1] = -acc1
    elems[k - 1][2] = -acc2
    elems[k - 1][3] = -acc3
    if elems[k - 1][0] < -1e-14:
        return 0
    if elems[k - 1][0] + 1e-14 < sqrt(acc1 * acc1 + acc2 * acc2 + acc3 * acc3):
        return 0
    return 1


cdef double _eval(Ctx* ctx, int mode, double* params) nogil:
    cdef double[4][4] elems
    if mode == 0:
        return _cond_entropy_dir(ctx, params[0], params[1])
    if not _expand_params(params, ctx.k, elems):
        return INFINITY
    return _povm_cost_elems(ctx, elems, ctx.k)


cdef int _nelder_mead(Ctx* ctx, int mode, double* x0, double* steps, int n,
                      double xatol, double fatol, int maxeval,
                      double* xbest, double* fbest, int* nevals_out) nogil:
    """Same algorithm as kernels._neldermead.nelder_mead; returns converged."""
    cdef double simplex[MAX_DIM + 1][MAX_DIM]
    cdef double fvals[MAX_DIM + 1]
    cdef double centroid[MAX_DIM]
    cdef double xr[MAX_DIM]
    cdef double xc[MAX_DIM]
    cdef double fr, fe, fc, spread_x, spread_f, d, key
    cdef double keyrow[MAX_DIM]
    cdef int i, j, pos, nevals, converged

    for j in range(n):
        simplex[0][j] = x0[j]
    for i in range(1, n + 1):
        for j in range(n):
            simplex[i][j] = x0[j]
        simplex[i][i - 1] += steps[i - 1]
    for i in range(n + 1):
        fvals[i] = _eval(ctx, mode, simplex[i])
    nevals = n + 1
    converged = 0

    while True:
        # stable insertion sort ascending in f
        for i in range(1, n + 1):
            key = fvals[i]
            for j in range(n):
                keyrow[j] = simplex[i][j]
            pos = i - 1
            while pos >= 0 and fvals[pos] > key:
                fvals[pos + 1] = fvals[pos]
                for j in range(n):
                    simplex[pos + 1][j] = simplex[pos][j]
                pos -= 1
            fvals[pos + 1] = key
            for j in range(n):
                simplex[pos + 1][j] = keyrow[j]

        spread_x = 0.0
        for i in range(1, n + 1):
            for j in range(n):
                d = fabs(simplex[i][j] - simplex[0][j])
                if d > spread_x:
                    spread_x = d
        spread_f = fvals[n] - fvals[0]
        if spread_x <= xatol and spread_f <= fatol:
            converged = 1
            break
        if nevals >= maxeval:
            break

        for j in range(n):
            centroid[j] = 0.0
            for i in range(n):
                centroid[j] += simplex[i][j]
            centroid[j] /= n
        for j in range(n):
            xr[j] = centroid[j] + (centroid[j] - simplex[n][j])
        fr = _eval(ctx, mode, xr)
        nevals += 1
        if fr < fvals[0]:
            for j in range(n):
                xc[j] = centroid[j] + 2.0 * (centroid[j] - simplex[n][j])
            fe = _eval(ctx, mode, xc)
            nevals += 1
            if fe < fr:
                for j in range(n):
                    simplex[n][j] = xc[j]
                fvals[n] = fe
            else:
                for j in range(n):
                    simplex[n][j] = xr[j]
                fvals[n] = fr
        elif fr < fvals[n - 1]:
            for j in range(n):
                simplex[n][j] = xr[j]
            fvals[n] = fr
        else:
            if fr < fvals[n]:
                for j in range(n):
                    xc[j] = centroid[j] + 0.5 * (xr[j] - centroid[j])
            else:
                for j in range(n):
                    xc[j] = centroid[j] + 0.5 * (simplex[n][j] - centroid[j])
            fc = _eval(ctx, mode, xc)
            nevals += 1
            if fc < fr and fc < fvals[n]:
                for j in range(n):
                    simplex[n][j] = xc[j]
                fvals[n] = fc
            else:
                for i in range(1, n + 1):
                    for j in range(n):
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j]
                                                               - simplex[0][j])
                    fvals[i] = _eval(ctx, mode, simplex[i])
                nevals += n

    for j in range(n):
        xbest[j] = simplex[0][j]
    fbest[0] = fvals[0]
    nevals_out[0] = nevals
    return converged


def cond_entropy_proj_2q(double[:, ::1] r, double[:, ::1] dirs):
    """Measurement entropy per direction; matches the numpy implementation."""
    cdef Ctx ctx
    _load_ctx(&ctx, r)
    cdef Py_ssize_t n = dirs.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double theta, phi
    for i in range(n):
        theta = acos(min(max(dirs[i, 2], -1.0), 1.0))
        phi = atan2(dirs[i, 1], dirs[i, 0])
        out[i] = _cond_entropy_dir(&ctx, theta, phi)
    return out


def min_proj_2q(double[:, ::1] r, int n_theta, int n_phi, int n_refine,
                double xatol, int maxeval):
    """Grid scan over the hemisphere plus refinement of the best cells."""
    cdef Ctx ctx
    _load_ctx(&ctx, r)
    cdef int i, j, idx, pos, q, nev, conv, nevals = 0
    cdef double theta, phi, val
    cdef double d_theta = (np.pi / 2.0) / n_theta
    cdef double d_phi = (2.0 * np.pi) / n_phi
    cdef double top_val[64]
    cdef double top_theta[64]
    cdef double top_phi[64]
    cdef int n_top = 0
    if n_refine > 64:
        n_refine = 64

    for i in range(n_theta):
        theta = (i + 0.5) * d_theta
        for j in range(n_phi):
            phi = (j + 0.5) * d_phi
            val = _cond_entropy_dir(&ctx, theta, phi)
            nevals += 1
            if n_top < n_refine:
                pos = n_top
                while pos > 0 and top_val[pos - 1] > val:
                    top_val[pos] = top_val[pos - 1]
                    top_theta[pos] = top_theta[pos - 1]
                    top_phi[pos] = top_phi[pos - 1]
                    pos -= 1
                top_val[pos] = val
                top_theta[pos] = theta
                top_phi[pos] = phi
                n_top += 1
            elif val < top_val[n_refine - 1]:
                pos = n_refine - 1
                while pos > 0 and top_val[pos - 1] > val:
                    top_val[pos] = top_val[pos - 1]
                    top_theta[pos] = top_theta[pos - 1]
                    top_phi[pos] = top_phi[pos - 1]
                    pos -= 1
                top_val[pos] = val
                top_theta[pos] = theta
                top_phi[pos] = phi

    cdef double best_val = top_val[0]
    cdef double best_theta = top_theta[0]
    cdef double best_phi = top_phi[0]
    cdef int best_conv = 1
    cdef double x0[2]
    cdef double steps[2]
    cdef double xmin[2]
    cdef double fmin
    steps[0] = 0.5 * d_theta
    steps[1] = 0.5 * d_phi
    for q in range(n_top):
        x0[0] = top_theta[q]
        x0[1] = top_phi[q]
        conv = _nelder_mead(&ctx, 0, x0, steps, 2, xatol, 1e-12, maxeval,
                            xmin, &fmin, &nev)
        nevals += nev
        if fmin < best_val:
            best_val = fmin
            best_theta = xmin[0]
            best_phi = xmin[1]
            best_conv = conv
    m = np.array([sin(best_theta) * cos(best_phi),
                  sin(best_theta) * sin(best_phi),
                  cos(best_theta)])
    return best_val, m, nevals, bool(best_conv)


def povm_cost_2q(double[:, ::1] r, double[:, ::1] elems, int objective):
    """POVM objective for explicit elements (rows e0, ex, ey, ez)."""
    cdef Ctx ctx
    _load_ctx(&ctx, r)
    ctx.objective = objective
    cdef double[4][4] buf
    cdef int i, j
    cdef int n = elems.shape[0]
    if n > MAX_ELEMS:
        raise ValueError("at most 4 POVM elements are supported")
    for i in range(n):
        for j in range(4):
            buf[i][j] = elems[i, j]
    return _povm_cost_elems(&ctx, buf, n)


def min_povm_2q(double[:, ::1] r, int k, int objective, double[:, ::1] starts,
                double[::1] steps, double xatol, double fatol, int maxeval):
    """Multi-start Nelder-Mead over k-outcome POVM parameters."""
    cdef Ctx ctx
    _load_ctx(&ctx, r)
    ctx.objective = objective
    ctx.k = k
    cdef int n = 3 * (k - 1)
    if n > MAX_DIM:
        raise ValueError("at most 4 outcomes are supported")
    cdef double x0[MAX_DIM]
    cdef double stp[MAX_DIM]
    cdef double xmin[MAX_DIM]
    cdef double best_x[MAX_DIM]
    cdef double fmin, best_val = INFINITY
    cdef int i, j, nev, conv, best_conv = 0, nevals = 0
    for j in range(n):
        stp[j] = steps[j]
    for i in range(starts.shape[0]):
        for j in range(n):
            x0[j] = starts[i, j]
        conv = _nelder_mead(&ctx, 1, x0, stp, n, xatol, fatol, maxeval,
                            xmin, &fmin, &nev)
        nevals += nev
        if fmin < best_val:
            best_val = fmin
            best_conv = conv
            for j in range(n):
                best_x[j] = xmin[j]
    params = np.empty(n)
    for j in range(n):
        params[j] = best_x[j]
    return best_val, params, nevals, bool(best_conv)
