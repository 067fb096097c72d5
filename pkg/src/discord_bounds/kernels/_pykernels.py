"""Pure-numpy implementation of the hot two-qubit kernels.

Everything here works off the 4×4 correlation matrix R of a two-qubit state
(R[mu, nu] = <sigma_mu ⊗ sigma_nu>), for which the conditional states of B
given a qubit-A measurement have closed-form Bloch vectors, so no
eigendecompositions are needed inside the search loops.

The compiled backend (_ckernels) implements the same functions with the same
algorithms; either may be selected at import in ``kernels/__init__``.
"""

from __future__ import annotations

import math

import numpy as np

from ._neldermead import nelder_mead

# objective codes shared with the compiled backend
OBJ_ENTROPY = 0
OBJ_CONCURRENCE = 1
OBJ_TANGLE = 2
OBJ_NEG_MUTUAL_INFO = 3

PROB_FLOOR = 1e-14


def _h2(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def _h2_vec(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, 0.0, 1.0)
    out = np.zeros_like(p)
    inner = (p > 0.0) & (p < 1.0)
    q = p[inner]
    out[inner] = -q * np.log2(q) - (1.0 - q) * np.log2(1.0 - q)
    return out


def cond_entropy_proj_2q(r: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    """Measurement entropy Σ_± p_± S(ρ_B|±) for each direction, vectorized.

    ``dirs`` is (n, 3) of unit Bloch vectors; the value excludes the constant
    S(ρ_A) - S(ρ) offset of the conditional discord.
    """
    x = r[1:, 0]
    y = r[0, 1:]
    t = r[1:, 1:]
    dirs = np.asarray(dirs, dtype=float)
    mx = dirs @ x
    tm = dirs @ t  # rows are T^T m
    out = np.zeros(dirs.shape[0])
    for sign in (1.0, -1.0):
        p = (1.0 + sign * mx) / 2.0
        w = (y[None, :] + sign * tm) / 2.0
        wn = np.linalg.norm(w, axis=1)
        ok = p > PROB_FLOOR
        v = np.zeros_like(p)
        v[ok] = np.minimum(wn[ok] / p[ok], 1.0)
        s = _h2_vec((1.0 + v) / 2.0)
        out[ok] += p[ok] * s[ok]
    return out


def _cond_entropy_dir(x, y, t, theta: float, phi: float) -> float:
    st = math.sin(theta)
    m0 = st * math.cos(phi)
    m1 = st * math.sin(phi)
    m2 = math.cos(theta)
    mx = m0 * x[0] + m1 * x[1] + m2 * x[2]
    total = 0.0
    for sign in (1.0, -1.0):
        p = (1.0 + sign * mx) / 2.0
        if p <= PROB_FLOOR:
            continue
        acc = 0.0
        for b in range(3):
            w = (y[b] + sign * (m0 * t[0, b] + m1 * t[1, b] + m2 * t[2, b])) / 2.0
            acc += w * w
        v = min(math.sqrt(acc) / p, 1.0)
        total += p * _h2((1.0 + v) / 2.0)
    return total


def min_proj_2q(r, n_theta: int, n_phi: int, n_refine: int, xatol: float,
                maxeval: int):
    """Hemisphere grid scan plus Nelder-Mead refinement of the best cells.

    Returns (value, m, nevals, converged) where value is the minimal
    measurement entropy and m the minimizing unit vector.
    """
    thetas = (np.arange(n_theta) + 0.5) * (np.pi / 2.0) / n_theta
    phis = (np.arange(n_phi) + 0.5) * (2.0 * np.pi) / n_phi
    tg, pg = np.meshgrid(thetas, phis, indexing="ij")
    tg, pg = tg.ravel(), pg.ravel()
    st = np.sin(tg)
    dirs = np.stack([st * np.cos(pg), st * np.sin(pg), np.cos(tg)], axis=1)
    vals = cond_entropy_proj_2q(r, dirs)
    nevals = vals.size

    x = r[1:, 0].copy()
    y = r[0, 1:].copy()
    t = r[1:, 1:].copy()

    def objective(p):
        return _cond_entropy_dir(x, y, t, p[0], p[1])

    top = np.argsort(vals, kind="stable")[:n_refine]
    d_theta = (np.pi / 2.0) / n_theta
    d_phi = (2.0 * np.pi) / n_phi
    best_val = float(vals[top[0]])
    best_tp = (float(tg[top[0]]), float(pg[top[0]]))
    best_conv = True
    for idx in top:
        xmin, fmin, nev, conv = nelder_mead(
            objective,
            np.array([tg[idx], pg[idx]]),
            np.array([0.5 * d_theta, 0.5 * d_phi]),
            xatol=xatol,
            fatol=1e-12,
            maxeval=maxeval,
        )
        nevals += nev
        if fmin < best_val:
            best_val = float(fmin)
            best_tp = (float(xmin[0]), float(xmin[1]))
            best_conv = conv
    theta, phi = best_tp
    m = np.array(
        [math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi),
         math.cos(theta)]
    )
    return best_val, m, nevals, best_conv


def povm_elements_from_params(params, k: int):
    """Expand search parameters into POVM elements (rows e0, ex, ey, ez).

    The first k-1 elements are rank-1, w (1 + n·σ)/2; the last is the
    completion of the identity. Returns None when the proposal is infeasible
    (negative weight or completion not PSD).
    """
    params = np.asarray(params, dtype=float)
    elems = np.zeros((k, 4))
    acc = np.zeros(4)
    for i in range(k - 1):
        w, theta, phi = params[3 * i: 3 * i + 3]
        if w < 0.0:
            return None
        st = math.sin(theta)
        elems[i] = (
            w / 2.0,
            w / 2.0 * st * math.cos(phi),
            w / 2.0 * st * math.sin(phi),
            w / 2.0 * math.cos(theta),
        )
        acc += elems[i]
    e0 = 1.0 - acc[0]
    evec = -acc[1:]
    if e0 < -1e-14 or e0 + 1e-14 < np.linalg.norm(evec):
        return None
    elems[k - 1, 0] = e0
    elems[k - 1, 1:] = evec
    return elems


def povm_cost_2q(r, elems, objective: int) -> float:
    """POVM objective Σ_i p_i f(ρ_B|i) (or -I for the channel objective)."""
    x = r[1:, 0]
    y = r[0, 1:]
    t = r[1:, 1:]
    if objective == OBJ_NEG_MUTUAL_INFO:
        return _neg_mutual_info(r, elems)
    total = 0.0
    for e in elems:
        e0, evec = e[0], e[1:]
        p = e0 + evec @ x
        if p <= PROB_FLOOR:
            continue
        w = e0 * y + t.T @ evec
        v = min(math.sqrt(float(w @ w)) / p, 1.0)
        if objective == OBJ_ENTROPY:
            total += p * _h2((1.0 + v) / 2.0)
        elif objective == OBJ_CONCURRENCE:
            total += p * math.sqrt(max(0.0, 1.0 - v * v))
        elif objective == OBJ_TANGLE:
            total += p * (1.0 - v * v)
        else:
            raise ValueError(f"unknown objective code {objective}")
    return total


def _neg_mutual_info(r, elems) -> float:
    """Negated mutual information between POVM outcomes and the register bit.

    r is the correlation matrix of a signal-register state, so the joint
    distribution is p(i, k) = [e0 (1 ± δ) + e·(c+ ± c-)]/2.
    """
    delta = r[0, 3]
    cp = r[1:, 0]
    cm = r[1:, 3]
    q1 = (1.0 + delta) / 2.0
    q2 = (1.0 - delta) / 2.0
    info = 0.0
    for e in elems:
        e0, evec = e[0], e[1:]
        p1 = max((e0 * (1.0 + delta) + evec @ (cp + cm)) / 2.0, 0.0)
        p2 = max((e0 * (1.0 - delta) + evec @ (cp - cm)) / 2.0, 0.0)
        pi = p1 + p2
        if pi <= PROB_FLOOR:
            continue
        if p1 > 0.0:
            info += p1 * math.log2(p1 / (pi * q1))
        if p2 > 0.0:
            info += p2 * math.log2(p2 / (pi * q2))
    return -info


def min_povm_2q(r, k: int, objective: int, starts, steps, xatol: float,
                fatol: float, maxeval: int):
    """Multi-start Nelder-Mead over k-outcome POVM parameters.

    ``starts`` is (n_starts, 3(k-1)); infeasible proposals cost +inf.
    Returns (value, params, nevals, converged) of the best start.
    """
    r = np.asarray(r, dtype=float)

    def objective_fn(params):
        elems = povm_elements_from_params(params, k)
        if elems is None:
            return math.inf
        return povm_cost_2q(r, elems, objective)

    best_val = math.inf
    best_params = None
    best_conv = False
    nevals = 0
    for x0 in np.asarray(starts, dtype=float):
        xmin, fmin, nev, conv = nelder_mead(
            objective_fn, x0, steps, xatol=xatol, fatol=fatol, maxeval=maxeval
        )
        nevals += nev
        if fmin < best_val:
            best_val = float(fmin)
            best_params = np.asarray(xmin, dtype=float)
            best_conv = conv
    return best_val, best_params, nevals, best_conv
