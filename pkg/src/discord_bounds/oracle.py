"""Independent brute-force references for the bound pipeline.

Discord is minimized over projective measurements (dense hemisphere grid plus
direct-search refinement) and over rank-1 POVMs with up to four outcomes
(multi-start direct search with the closure constraints eliminated).
Entanglement quantities of the purification's BC marginal are minimized over
the same POVM parameterization through the steering correspondence: a rank-1
POVM outcome i on the qubit leaves B in the pure-ensemble member marginal, so
no BC operator is ever materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .bounds import binary_entropy, conditional_discord
from .correlation import MeasurementDirection, r_matrix
from .errors import DimensionTooLarge, InvalidPovm, WrongDimension
from .kernels import nelder_mead, povm_elements_from_params
from .qstate import (
    SIGMA,
    DensityMatrix,
    partial_trace,
    purity,
    qubit_from_bloch,
    von_neumann_entropy,
)

GRID_THETA = 60
GRID_PHI = 120
N_REFINE = 8
REFINE_XATOL = 1e-6
REFINE_MAXEVAL = 600
POVM_STARTS = 16
POVM_MAXEVAL = 4000
POVM_XATOL = 1e-6
POVM_FATOL = 1e-9

_OBJ_CODE = {
    "EF": kernels.OBJ_ENTROPY,
    "CONCURRENCE": kernels.OBJ_CONCURRENCE,
    "TANGLE": kernels.OBJ_TANGLE,
}


@dataclass(frozen=True)
class Povm:
    """A finite POVM on the qubit; elements are 2×2 PSD matrices summing to 1."""

    elements: tuple

    @classmethod
    def from_parameter_elements(cls, elems: np.ndarray) -> "Povm":
        mats = []
        for e0, ex, ey, ez in elems:
            mats.append(e0 * SIGMA[0] + ex * SIGMA[1] + ey * SIGMA[2] + ez * SIGMA[3])
        return cls(elements=tuple(mats))


@dataclass(frozen=True)
class OracleResult:
    value: float
    argmin: object
    evaluations: int
    converged: bool


def _direction(theta: float, phi: float) -> np.ndarray:
    st = math.sin(theta)
    return np.array([st * math.cos(phi), st * math.sin(phi), math.cos(theta)])


def _grid_directions(n_theta: int, n_phi: int):
    thetas = (np.arange(n_theta) + 0.5) * (np.pi / 2.0) / n_theta
    phis = (np.arange(n_phi) + 0.5) * (2.0 * np.pi) / n_phi
    tg, pg = np.meshgrid(thetas, phis, indexing="ij")
    tg, pg = tg.ravel(), pg.ravel()
    st = np.sin(tg)
    dirs = np.stack([st * np.cos(pg), st * np.sin(pg), np.cos(tg)], axis=1)
    return tg, pg, dirs


def _pauli_marginals(rho: DensityMatrix) -> np.ndarray:
    blocks = rho.entries.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    return np.stack([np.einsum("ac,cbad->bd", s, blocks) for s in SIGMA])


def _entropies_from_unnormalized(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Probabilities and entropies of a stack of unnormalized conditionals."""
    w = np.linalg.eigvalsh(mats)
    w = np.clip(w, 0.0, None)
    p = w.sum(axis=-1)
    out = np.zeros(p.shape)
    ok = p > 1e-14
    wn = w[ok] / p[ok][..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(wn > 0.0, np.log2(np.where(wn > 0.0, wn, 1.0)), 0.0)
    out[ok] = -(wn * logs).sum(axis=-1)
    return p, out


def _measurement_entropy_generic(rho: DensityMatrix, dirs: np.ndarray,
                                 chunk: int = 512) -> np.ndarray:
    """Σ_± p_± S(ρ_B|±) for qudit B, batched over directions."""
    b = _pauli_marginals(rho)
    out = np.empty(dirs.shape[0])
    for lo in range(0, dirs.shape[0], chunk):
        sl = dirs[lo: lo + chunk]
        c = np.tensordot(sl, b[1:], axes=(1, 0))
        vals = np.zeros(sl.shape[0])
        for sign in (1.0, -1.0):
            p, s = _entropies_from_unnormalized((b[0][None] + sign * c) / 2.0)
            vals += p * s
        out[lo: lo + chunk] = vals
    return out


def _min_proj_generic(rho: DensityMatrix):
    tg, pg, dirs = _grid_directions(GRID_THETA, GRID_PHI)
    vals = _measurement_entropy_generic(rho, dirs)
    nevals = vals.size
    d_theta = (np.pi / 2.0) / GRID_THETA
    d_phi = (2.0 * np.pi) / GRID_PHI

    def objective(p):
        return float(_measurement_entropy_generic(rho, _direction(p[0], p[1])[None])[0])

    top = np.argsort(vals, kind="stable")[:N_REFINE]
    best_val = float(vals[top[0]])
    best_tp = (float(tg[top[0]]), float(pg[top[0]]))
    best_conv = True
    for idx in top:
        xmin, fmin, nev, conv = nelder_mead(
            objective,
            np.array([tg[idx], pg[idx]]),
            np.array([0.5 * d_theta, 0.5 * d_phi]),
            xatol=REFINE_XATOL,
            fatol=1e-12,
            maxeval=REFINE_MAXEVAL,
        )
        nevals += nev
        if fmin < best_val:
            best_val, best_tp, best_conv = float(fmin), (xmin[0], xmin[1]), conv
    return best_val, _direction(*best_tp), nevals, best_conv


def minimize_projective(rho: DensityMatrix) -> OracleResult:
    """Minimize the conditional discord over projective qubit measurements.

    Deterministic: a 60×120 hemisphere grid followed by Nelder-Mead
    refinement of the best 8 cells down to 1e-6 in the angles. The returned
    value re-evaluates the winner through :func:`conditional_discord`.
    """
    if rho.dim_a != 2:
        raise WrongDimension("measurements are performed on the qubit side A")
    if rho.dim_b == 2:
        _, m, nevals, conv = kernels.min_proj_2q(
            r_matrix(rho), GRID_THETA, GRID_PHI, N_REFINE, REFINE_XATOL, REFINE_MAXEVAL
        )
    else:
        _, m, nevals, conv = _min_proj_generic(rho)
    value = conditional_discord(rho, m)
    return OracleResult(
        value=value, argmin=MeasurementDirection(m=m), evaluations=nevals, converged=conv
    )


def _povm_starts(k: int, n_starts: int, seed: int, seed_theta_phi, tag: int):
    """Deterministic start parameters: one near-projective, the rest random."""
    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=(seed, k, tag)))
    )
    starts = np.empty((n_starts, 3 * (k - 1)))
    theta0, phi0 = seed_theta_phi
    first = [1.0, theta0, phi0]
    for _ in range(k - 2):
        first += [0.0, rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)]
    starts[0] = first
    for row in range(1, n_starts):
        while True:
            params = []
            for _ in range(k - 1):
                params += [
                    (2.0 / k) * rng.uniform(0.6, 1.4),
                    math.acos(rng.uniform(-1.0, 1.0)),
                    rng.uniform(0.0, 2.0 * np.pi),
                ]
            params = np.array(params)
            for _ in range(40):
                if povm_elements_from_params(params, k) is not None:
                    break
                params[::3] *= 0.8
            if povm_elements_from_params(params, k) is not None:
                starts[row] = params
                break
    return starts


def _min_povm_generic(rho: DensityMatrix, k: int, member_cost, starts,
                      steps, maxeval: int):
    """Direct search over POVM parameters with a generic per-member cost."""
    blocks = rho.entries.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)

    def objective_fn(params):
        elems = povm_elements_from_params(params, k)
        if elems is None:
            return math.inf
        total = 0.0
        for e0, ex, ey, ez in elems:
            e = e0 * SIGMA[0] + ex * SIGMA[1] + ey * SIGMA[2] + ez * SIGMA[3]
            cond = np.einsum("ac,cbad->bd", e, blocks)
            w = np.linalg.eigvalsh(cond)
            p = float(w.sum())
            if p < 1e-14:
                continue
            total += p * member_cost(np.clip(w, 0.0, None) / p)
        return total

    best_val, best_params, best_conv, nevals = math.inf, None, False, 0
    for x0 in starts:
        xmin, fmin, nev, conv = nelder_mead(
            objective_fn, x0, steps, xatol=POVM_XATOL, fatol=POVM_FATOL, maxeval=maxeval
        )
        nevals += nev
        if fmin < best_val:
            best_val, best_params, best_conv = float(fmin), xmin, conv
    return best_val, best_params, nevals, best_conv


def _search_povm(rho: DensityMatrix, outcome_counts, objective_code, seed: int,
                 n_starts: int, seed_direction, member_cost=None, tag: int = 0):
    """Shared multi-start POVM search over the given outcome counts."""
    r = r_matrix(rho) if rho.dim_b == 2 else None
    theta0 = math.acos(min(max(seed_direction[2], -1.0), 1.0))
    phi0 = math.atan2(seed_direction[1], seed_direction[0]) % (2.0 * math.pi)
    best = (math.inf, None, None, False)
    nevals = 0
    for k in outcome_counts:
        starts = _povm_starts(k, n_starts, seed, (theta0, phi0), tag)
        steps = np.tile([0.15, 0.4, 0.4], k - 1)
        if r is not None:
            val, params, nev, conv = kernels.min_povm_2q(
                r, k, objective_code, starts, steps, POVM_XATOL, POVM_FATOL, POVM_MAXEVAL
            )
        else:
            val, params, nev, conv = _min_povm_generic(
                rho, k, member_cost, starts, steps, POVM_MAXEVAL
            )
        nevals += nev
        if val < best[0]:
            best = (val, params, k, conv)
    value, params, k, conv = best
    elems = povm_elements_from_params(params, k)
    return Povm.from_parameter_elements(elems), nevals, conv


def minimize_povm(rho: DensityMatrix, n_outcomes: int = 4, seed: int = 0) -> OracleResult:
    """Minimize the conditional discord over rank-1 POVMs.

    Searches 2 up to ``n_outcomes`` outcomes (extremal qubit POVMs have at
    most four rank-1 elements). One start per outcome count sits exactly on
    the projective minimizer, so the result never exceeds the projective
    oracle; the remaining starts are seeded random configurations.
    """
    if n_outcomes not in (2, 3, 4):
        raise ValueError(f"n_outcomes must be 2, 3, or 4, got {n_outcomes}")
    proj = minimize_projective(rho)
    povm, nevals, conv = _search_povm(
        rho,
        range(2, n_outcomes + 1),
        kernels.OBJ_ENTROPY,
        seed,
        POVM_STARTS,
        proj.argmin.m,
        member_cost=lambda w: float(-(w[w > 0] * np.log2(w[w > 0])).sum()),
        tag=1,
    )
    value = conditional_discord(rho, povm)
    if value > proj.value:
        # the projective minimizer is itself a valid 2-outcome POVM; falling
        # back keeps value and argmin consistent (floor rarely triggers, the
        # search is seeded at this point)
        m = proj.argmin.m
        ms = m[0] * SIGMA[1] + m[1] * SIGMA[2] + m[2] * SIGMA[3]
        povm = Povm(elements=((SIGMA[0] + ms) / 2.0, (SIGMA[0] - ms) / 2.0))
        value = conditional_discord(rho, povm)
    return OracleResult(
        value=value,
        argmin=povm,
        evaluations=nevals + proj.evaluations,
        converged=conv,
    )


def ensemble_objective(rho: DensityMatrix, povm: Povm, objective: str) -> float:
    """Σ_i p_i f(ρ_B|i) for the pure-ensemble member costs.

    f is the entropy (EF), sqrt(2(1 - Tr ρ²)) (CONCURRENCE; the squared sum is
    returned), or 2(1 - Tr ρ²) (TANGLE).
    """
    if objective not in _OBJ_CODE:
        raise ValueError(f"objective must be one of {sorted(_OBJ_CODE)}, got {objective}")
    blocks = rho.entries.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    total = 0.0
    for e in povm.elements:
        cond = np.einsum("ac,cbad->bd", np.asarray(e, dtype=complex), blocks)
        w = np.linalg.eigvalsh(cond)
        p = float(w.sum())
        if p < 1e-14:
            continue
        w = np.clip(w, 0.0, None) / p
        pur = float((w * w).sum())
        if objective == "EF":
            wnz = w[w > 0]
            total += p * float(-(wnz * np.log2(wnz)).sum())
        elif objective == "CONCURRENCE":
            total += p * math.sqrt(max(0.0, 2.0 * (1.0 - pur)))
        else:
            total += p * 2.0 * (1.0 - pur)
    return total * total if objective == "CONCURRENCE" else total


def ensemble_oracle(rho: DensityMatrix, objective: str, seed: int = 0) -> OracleResult:
    """Minimize EF / concurrence / tangle of the purification's BC marginal.

    Pure-state ensembles of ρ_BC correspond to rank-1 POVMs on the qubit, and
    the member B-marginals are the conditional states of B, so the search
    space is the same POVM parameterization as :func:`minimize_povm`.
    """
    if objective not in _OBJ_CODE:
        raise ValueError(f"objective must be one of {sorted(_OBJ_CODE)}, got {objective}")
    if rho.dim_b > 8:
        raise DimensionTooLarge(f"ensemble oracle supports dim_b <= 8, got {rho.dim_b}")
    code = _OBJ_CODE[objective]

    # independent 2-outcome projective scan of the ensemble cost for seeding
    _, _, dirs = _grid_directions(24, 48)
    if rho.dim_b == 2:
        r = r_matrix(rho)
        params = np.concatenate([np.ones((dirs.shape[0], 1)),
                                 np.arccos(np.clip(dirs[:, 2:], -1, 1)),
                                 np.arctan2(dirs[:, 1:2], dirs[:, 0:1])], axis=1)
        vals = np.array([
            kernels.povm_cost_2q(r, povm_elements_from_params(p, 2), code)
            for p in params
        ])
    else:
        b = _pauli_marginals(rho)
        c = np.tensordot(dirs, b[1:], axes=(1, 0))
        vals = np.zeros(dirs.shape[0])
        for sign in (1.0, -1.0):
            w = np.linalg.eigvalsh((b[0][None] + sign * c) / 2.0)
            w = np.clip(w, 0.0, None)
            p = w.sum(axis=-1)
            wn = w / np.where(p > 1e-14, p, 1.0)[:, None]
            pur = (wn * wn).sum(axis=-1)
            if objective == "EF":
                logs = np.where(wn > 0.0, np.log2(np.where(wn > 0.0, wn, 1.0)), 0.0)
                member = -(wn * logs).sum(axis=-1)
            elif objective == "CONCURRENCE":
                member = np.sqrt(np.clip(2.0 * (1.0 - pur), 0.0, None))
            else:
                member = 2.0 * (1.0 - pur)
            vals += p * member
    seed_dir = dirs[int(np.argmin(vals))]

    member_costs = {
        "EF": lambda w: float(-(w[w > 0] * np.log2(w[w > 0])).sum()),
        "CONCURRENCE": lambda w: math.sqrt(max(0.0, 2.0 * (1.0 - float((w * w).sum())))),
        "TANGLE": lambda w: 2.0 * (1.0 - float((w * w).sum())),
    }
    povm, nevals, conv = _search_povm(
        rho, (2, 3, 4), code, seed, POVM_STARTS, seed_dir,
        member_cost=member_costs[objective], tag=2,
    )
    value = ensemble_objective(rho, povm, objective)
    return OracleResult(
        value=value, argmin=povm, evaluations=nevals + vals.size, converged=conv
    )


def wootters_concurrence(rho: DensityMatrix) -> float:
    """Spectral two-qubit concurrence max(0, λ1 - λ2 - λ3 - λ4)."""
    if rho.dim_b != 2 or rho.dim_a != 2:
        raise WrongDimension("concurrence is defined here for two-qubit states")
    yy = np.kron(SIGMA[2], SIGMA[2])
    m = rho.entries @ yy @ rho.entries.conj() @ yy
    w = np.sort(np.linalg.eigvals(m).real)[::-1]
    lam = np.sqrt(np.clip(w, 0.0, None))
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def channel_mutual_information(p1: float, a, b, povm: Povm) -> float:
    """Mutual information of the joint distribution p_k Tr(E_i ρ_k)."""
    rhos = [qubit_from_bloch(a), qubit_from_bloch(b)]
    priors = [p1, 1.0 - p1]
    joint = np.array([
        [max(pk * float(np.einsum("ij,ji->", np.asarray(e), rk).real), 0.0)
         for pk, rk in zip(priors, rhos)]
        for e in povm.elements
    ])
    pi = joint.sum(axis=1)
    info = 0.0
    for i in range(joint.shape[0]):
        for kk in range(2):
            if joint[i, kk] > 0.0 and pi[i] > 0.0:
                info += joint[i, kk] * math.log2(joint[i, kk] / (pi[i] * priors[kk]))
    return info


def _channel_r_matrix(p1: float, a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p2 = 1.0 - p1
    r = np.zeros((4, 4))
    r[0, 0] = 1.0
    r[0, 3] = p1 - p2
    r[1:, 0] = p1 * a + p2 * b
    r[1:, 3] = p1 * a - p2 * b
    return r


def accessible_info_oracle(p1: float, a, b, seed: int = 0) -> OracleResult:
    """Maximize the channel mutual information over rank-1 POVMs (2-3 outcomes)."""
    r = _channel_r_matrix(p1, a, b)
    # projective scan seeds the search (covers the Helstrom measurement)
    _, _, dirs = _grid_directions(24, 48)
    vals = np.array([
        kernels.povm_cost_2q(
            r,
            povm_elements_from_params(
                [1.0, math.acos(min(max(d[2], -1), 1)), math.atan2(d[1], d[0])], 2
            ),
            kernels.OBJ_NEG_MUTUAL_INFO,
        )
        for d in dirs
    ])
    seed_dir = dirs[int(np.argmin(vals))]

    best = (math.inf, None, None, False)
    nevals = int(vals.size)
    theta0 = math.acos(min(max(seed_dir[2], -1.0), 1.0))
    phi0 = math.atan2(seed_dir[1], seed_dir[0]) % (2.0 * math.pi)
    for k in (2, 3):
        starts = _povm_starts(k, POVM_STARTS, seed, (theta0, phi0), tag=3)
        steps = np.tile([0.15, 0.4, 0.4], k - 1)
        val, params, nev, conv = kernels.min_povm_2q(
            r, k, kernels.OBJ_NEG_MUTUAL_INFO, starts, steps,
            POVM_XATOL, POVM_FATOL, POVM_MAXEVAL,
        )
        nevals += nev
        if val < best[0]:
            best = (val, params, k, conv)
    _, params, k, conv = best
    povm = Povm.from_parameter_elements(povm_elements_from_params(params, k))
    value = channel_mutual_information(p1, a, b, povm)
    return OracleResult(value=value, argmin=povm, evaluations=nevals, converged=conv)


def validate_povm(povm: Povm) -> None:
    total = sum(np.asarray(e, dtype=complex) for e in povm.elements)
    if np.abs(total - np.eye(2)).max() > 1e-9:
        raise InvalidPovm("POVM elements do not sum to the identity")
    for i, e in enumerate(povm.elements):
        if np.linalg.eigvalsh(np.asarray(e, dtype=complex)).min() < -1e-9:
            raise InvalidPovm(f"POVM element {i} is not PSD")
