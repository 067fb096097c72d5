"""Minimal Nelder-Mead direct search.

This is the exact algorithm the compiled kernels implement in C, kept here in
Python both as the fallback path and for the generic (qudit) objectives where
evaluations dominate and Python overhead does not matter. Standard
coefficients: reflection 1, expansion 2, contraction 0.5, shrink 0.5.
Infeasible points may return +inf; the search only requires a feasible start.
"""

from __future__ import annotations

import numpy as np


def nelder_mead(fn, x0, steps, xatol: float, fatol: float, maxeval: int):
    """Minimize fn from x0 with initial per-coordinate simplex steps.

    Returns (x_best, f_best, nevals, converged). Convergence means the
    simplex collapsed below xatol in coordinates and fatol in values.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    simplex = [x0.copy()]
    for j in range(n):
        v = x0.copy()
        v[j] += steps[j]
        simplex.append(v)
    fvals = [fn(v) for v in simplex]
    nevals = n + 1
    converged = False

    while True:
        order = sorted(range(n + 1), key=fvals.__getitem__)
        simplex = [simplex[i] for i in order]
        fvals = [fvals[i] for i in order]
        spread_x = max(np.abs(simplex[i] - simplex[0]).max() for i in range(1, n + 1))
        spread_f = fvals[-1] - fvals[0]
        if spread_x <= xatol and spread_f <= fatol:
            converged = True
            break
        if nevals >= maxeval:
            break

        centroid = np.mean(simplex[:n], axis=0)
        worst = simplex[n]
        xr = centroid + (centroid - worst)
        fr = fn(xr)
        nevals += 1
        if fr < fvals[0]:
            xe = centroid + 2.0 * (centroid - worst)
            fe = fn(xe)
            nevals += 1
            if fe < fr:
                simplex[n], fvals[n] = xe, fe
            else:
                simplex[n], fvals[n] = xr, fr
        elif fr < fvals[n - 1]:
            simplex[n], fvals[n] = xr, fr
        else:
            if fr < fvals[n]:
                xc = centroid + 0.5 * (xr - centroid)
            else:
                xc = centroid + 0.5 * (worst - centroid)
            fc = fn(xc)
            nevals += 1
            if fc < min(fr, fvals[n]):
                simplex[n], fvals[n] = xc, fc
            else:
                for i in range(1, n + 1):
                    simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0])
                    fvals[i] = fn(simplex[i])
                nevals += n

    return simplex[0], fvals[0], nevals, converged
