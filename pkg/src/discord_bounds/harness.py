"""Experiment runners: random-state scans, family samplers, and the selftest.

The scan over random states is an embarrassingly parallel map with per-state
seeding seed XOR index, so the ensemble does not depend on scheduling; the
DISCORD_BOUNDS_THREADS environment variable caps the process count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import bounds as bounds_mod
from .bounds import (
    DqcParams,
    accessible_info_bounds,
    compute_bounds,
    dqc1_bounds,
    discord_upper_weak,
    h,
    x_state_discord,
)
from .correlation import (
    ETA,
    filtered_state,
    lorentz_spectrum,
    q_matrix,
    q_matrix_swap_reference,
    r_matrix,
    t1_direction,
    t_matrix,
)
from .errors import CoincidenceFailed, ConditionViolated, DiscordBoundsError, NotPositive
from .oracle import accessible_info_oracle, ensemble_oracle, minimize_povm, minimize_projective
from .qstate import (
    DensityMatrix,
    XStateParams,
    apply_filter,
    bloch_vector,
    make_bell_diagonal,
    make_dqc1,
    make_x_state,
    partial_trace,
    purity,
    random_state,
    random_traceless_unitary,
    random_unitary,
    validate_state,
    von_neumann_entropy,
)

CSV_HEADER = "# discord-bounds v1"
GAP_WINDOW = 0.01
SANDWICH_TOL = 1e-7


@dataclass(frozen=True)
class ReportRow:
    state_id: int
    lower: float
    upper: float
    oracle_projective: float
    oracle_povm: float | None
    gap_lo: float
    gap_hi: float
    coincide: bool


@dataclass(frozen=True)
class ExperimentReport:
    rows: list
    n: int
    fraction_within_0_01: float
    max_abs_gap: float
    violations: int


def _figure1_row(args) -> ReportRow:
    index, seed, rank, include_povm, weak = args
    rho = random_state(2, rank, seed ^ index)
    bd = compute_bounds(rho)
    upper = discord_upper_weak(rho) if weak else bd.upper
    orc = minimize_projective(rho).value
    povm_val = minimize_povm(rho, 4).value if include_povm else None
    lower_clamped = max(0.0, bd.lower)
    return ReportRow(
        state_id=index,
        lower=bd.lower,
        upper=upper,
        oracle_projective=orc,
        oracle_povm=povm_val,
        gap_lo=orc - lower_clamped,
        gap_hi=upper - orc,
        coincide=bd.coincide,
    )


def thread_count() -> int:
    raw = os.environ.get("DISCORD_BOUNDS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_figure1(n: int, rank: int, seed: int, include_povm: bool = False,
                weak_upper: bool = True) -> ExperimentReport:
    """Bounds vs projective oracle on n seeded random rank-r two-qubit states.

    The plotted upper bound is the weak form by default. Gap statistics use
    the lower bound clamped at zero (a negative lower bound is vacuous).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    jobs = [(i, seed, rank, include_povm, weak_upper) for i in range(n)]
    workers = thread_count()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_figure1_row, jobs, chunksize=64))
    else:
        rows = [_figure1_row(j) for j in jobs]
    within = sum(
        1 for r in rows if abs(r.gap_lo) <= GAP_WINDOW and abs(r.gap_hi) <= GAP_WINDOW
    )
    violations = sum(
        1 for r in rows if r.gap_lo < -SANDWICH_TOL or r.gap_hi < -SANDWICH_TOL
    )
    max_gap = max(max(abs(r.gap_lo), abs(r.gap_hi)) for r in rows)
    return ExperimentReport(
        rows=rows,
        n=n,
        fraction_within_0_01=within / n,
        max_abs_gap=max_gap,
        violations=violations,
    )


def write_csv(report: ExperimentReport, path) -> None:
    """Byte-stable CSV: repr floats, fixed column order, version header."""
    lines = [CSV_HEADER,
             "state_id,lower,upper,oracle_projective,oracle_povm,gap_lo,gap_hi,coincide"]
    for r in report.rows:
        povm = repr(r.oracle_povm) if r.oracle_povm is not None else ""
        lines.append(
            f"{r.state_id},{r.lower!r},{r.upper!r},{r.oracle_projective!r},"
            f"{povm},{r.gap_lo!r},{r.gap_hi!r},{int(r.coincide)}"
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# family samplers (used by the selftest and the acceptance suite)

def sample_bell_diagonal(rng: np.random.Generator) -> DensityMatrix:
    while True:
        c = rng.uniform(-1.0, 1.0, size=3)
        try:
            return make_bell_diagonal(*c)
        except NotPositive:
            continue


def sample_x_params(rng: np.random.Generator, condition: bool = True,
                    zero_x: bool = False) -> XStateParams:
    """Random valid X-state parameters, by default restricted to the validity
    condition of the closed form (PSD is always enforced)."""
    while True:
        diag = rng.dirichlet(np.ones(4))
        u, v = rng.uniform(-1.0, 1.0, size=2)
        if zero_x:
            # zero qubit marginal: r00 + r11 = r22 + r33 = 1/2
            top, bot = rng.uniform(0.0, 1.0, size=2)
            diag = np.array([top, 1.0 - top, bot, 1.0 - bot]) / 2.0
        r00, r11, r22, r33 = diag
        r03 = u * math.sqrt(r00 * r33)
        r12 = v * math.sqrt(r11 * r22)
        params = XStateParams(
            x=r00 + r11 - r22 - r33,
            y=r00 - r11 + r22 - r33,
            s1=2.0 * (r03 + r12),
            s2=2.0 * (r12 - r03),
            s3=r00 - r11 - r22 + r33,
        )
        try:
            make_x_state(params)
        except NotPositive:
            continue
        if condition and not bounds_mod.x_state_condition(params):
            continue
        return params


def sample_hermitian_filter(rng: np.random.Generator) -> np.ndarray:
    """Invertible Hermitian 2×2 filter, normalized to largest eigenvalue 1."""
    v = random_unitary(2, rng)
    g = rng.uniform(0.25, 1.0)
    return (v * np.array([1.0, g])) @ v.conj().T


def sample_filtered_coincident(rng: np.random.Generator) -> DensityMatrix:
    """Local filtering of a coincident X-state with maximally mixed marginal."""
    params = sample_x_params(rng, coincident=True, zero_x=True)
    return apply_filter(make_x_state(params), sample_hermitian_filter(rng))


def sample_coincident_channel(rng: np.random.Generator):
    """Random binary channel on the coincidence manifold p1²(1-a²) = p2²(1-b²)."""
    while True:
        p1 = rng.uniform(0.1, 0.5)
        p2 = 1.0 - p1
        a = rng.uniform(-1.0, 1.0, size=3)
        a *= rng.uniform(0.1, 0.95) / np.linalg.norm(a)
        b_sq = 1.0 - (p1 / p2) ** 2 * (1.0 - float(a @ a))
        if b_sq < 0.0:
            continue
        b_dir = rng.uniform(-1.0, 1.0, size=3)
        b_dir /= np.linalg.norm(b_dir)
        return p1, a, math.sqrt(b_sq) * b_dir


def random_local_unitary_pair(rng: np.random.Generator, dim_b: int):
    return random_unitary(2, rng), random_unitary(dim_b, rng)


def conjugate_local(rho: DensityMatrix, va: np.ndarray, vb: np.ndarray) -> DensityMatrix:
    u = np.kron(va, vb)
    return validate_state(u @ rho.entries @ u.conj().T, dim_b=rho.dim_b)


# ---------------------------------------------------------------------------
# selftest

def _check_construction_equivalence(rng, n):
    worst = 0.0
    for _ in range(n):
        d = int(rng.integers(2, 5))
        rho = random_state(d, 2 * d, rng)
        worst = max(worst, np.abs(q_matrix(rho) - q_matrix_swap_reference(rho)).max())
    return worst <= 1e-12, f"max |closed form - swap| = {worst:.2e}"


def _check_r_eta_r(rng, n):
    worst = 0.0
    for _ in range(n):
        rho = random_state(2, 4, rng)
        r = r_matrix(rho)
        worst = max(worst, np.abs(q_matrix(rho) - r @ ETA @ r.T).max())
    return worst <= 1e-12, f"max |Q - R eta R^T| = {worst:.2e}"


def _check_ttt(rng, n):
    worst = 0.0
    for _ in range(n):
        til = filtered_state(random_state(2, 4, rng))
        t = t_matrix(til)
        worst = max(worst, np.abs(t @ t.T - (-q_matrix(til)[1:, 1:])).max())
    return worst <= 1e-10, f"max |T T^T - Q3x3| = {worst:.2e}"


def _check_filter_covariance(rng, n):
    worst = 0.0
    for _ in range(n):
        rho = random_state(2, 4, rng)
        x = bloch_vector(partial_trace(rho, "A"))
        qa = lorentz_spectrum(q_matrix(rho))[1]
        qb = lorentz_spectrum(q_matrix(filtered_state(rho)))[1]
        worst = max(worst, abs((1.0 - float(x @ x)) * qb - qa))
    return worst <= 1e-9, f"max |(1-x²) q2(filtered) - q2| = {worst:.2e}"


def _check_lu_invariance(rng, n):
    worst = 0.0
    for _ in range(n):
        rho = random_state(2, 4, rng)
        spec = lorentz_spectrum(q_matrix(rho))
        rho2 = conjugate_local(rho, *random_local_unitary_pair(rng, 2))
        worst = max(worst, np.abs(spec - lorentz_spectrum(q_matrix(rho2))).max())
    return worst <= 1e-9, f"max spectrum drift under local unitaries = {worst:.2e}"


def _check_entropy_coincidence(rng, n):
    worst = -np.inf
    for _ in range(n):
        d = int(rng.integers(1, 4))
        rho = random_state(d, int(rng.integers(1, 2 * d + 1)), rng)
        gap = bounds_mod.co(2.0 * purity(rho) - 1.0) - von_neumann_entropy(rho)
        worst = max(worst, gap)
    return worst <= 1e-10, f"max co(2Trρ²-1) - S(ρ) = {worst:.2e}"


def _check_sandwich(rng, n):
    bad = 0
    for _ in range(n):
        rho = random_state(2, int(rng.integers(1, 5)), rng)
        bd = compute_bounds(rho)
        proj = minimize_projective(rho).value
        povm = minimize_povm(rho, 4).value
        if not (max(0.0, bd.lower) - SANDWICH_TOL <= povm
                <= proj + SANDWICH_TOL <= bd.upper + 2 * SANDWICH_TOL):
            bad += 1
    return bad == 0, f"{bad}/{n} sandwich violations"


def _check_coincidence_families(rng, n):
    worst = 0.0
    for _ in range(n):
        for rho in (
            sample_bell_diagonal(rng),
            random_state(2, 2, rng),
            make_x_state(sample_x_params(rng)),
            sample_filtered_coincident(rng),
        ):
            bd = compute_bounds(rho)
            if not bd.coincide:
                return False, "a coincidence-family state reported coincide=False"
            worst = max(worst, abs(bd.upper - bd.lower))
    return worst <= 1e-7, f"max |upper - lower| = {worst:.2e}"


def _check_lemma_equalities(rng, n):
    worst = 0.0
    for _ in range(n):
        rho = random_state(2, 4, rng)
        x = bloch_vector(partial_trace(rho, "A"))
        x_sq = float(x @ x)
        q2 = lorentz_spectrum(q_matrix(rho))[1]
        l_value = 2.0 * purity(partial_trace(rho, "B")) - 1.0 + q2
        t1 = t1_direction(filtered_state(rho), x).t1
        conc = ensemble_oracle(rho, "CONCURRENCE").value
        tang = ensemble_oracle(rho, "TANGLE").value
        ef = ensemble_oracle(rho, "EF").value
        kw = minimize_povm(rho, 4).value + von_neumann_entropy(rho) - von_neumann_entropy(
            partial_trace(rho, "A"))
        tau_formula = 2.0 * (1.0 - purity(partial_trace(rho, "B"))) - (1.0 - x_sq) * t1
        worst = max(
            worst,
            abs(conc - (1.0 - l_value)),
            abs(tang - tau_formula),
            abs(ef - kw),
        )
    return worst <= 1e-3, f"max lemma-equality deviation = {worst:.2e}"


def _check_dqc1(rng, n):
    worst = 0.0
    for _ in range(n):
        d = int(rng.choice([8, 16]))
        u = random_traceless_unitary(d, rng)
        alpha = float(rng.uniform(0.3, 1.0))
        p = DqcParams.from_unitary(u, alpha)
        lo_f, up_f = dqc1_bounds(p)
        bd = compute_bounds(make_dqc1(u, alpha))
        beta_hat = d * bd.t1 / (2.0 * alpha * alpha)
        up_hat = h(alpha * alpha * beta_hat) - h(alpha * alpha)
        worst = max(worst, abs(lo_f - bd.lower), abs(up_f - up_hat))
        if bd.upper > up_f + 1e-9:
            return False, "pipeline upper exceeded the closed-form upper"
    return worst <= 1e-8, f"max formula-vs-pipeline deviation = {worst:.2e}"


def _check_channels(rng, n):
    worst = 0.0
    for _ in range(n):
        p1, a, b = sample_coincident_channel(rng)
        cb = accessible_info_bounds(p1, a, b)
        orc = accessible_info_oracle(p1, a, b).value
        worst = max(worst, abs(cb.upper - cb.lower), abs(orc - cb.upper))
    return worst <= 1e-3, f"max coincident-channel deviation = {worst:.2e}"


def run_selftest(quick: bool = False):
    """Run the invariant suite at reduced counts; returns (name, ok, detail)."""
    small, large = (6, 30) if quick else (20, 120)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(20260810)))
    checks = [
        ("construction-equivalence", _check_construction_equivalence, small),
        ("two-qubit-R-eta-RT", _check_r_eta_r, small),
        ("TTt-equals-Q3x3", _check_ttt, small),
        ("filter-covariance", _check_filter_covariance, small),
        ("local-unitary-invariance", _check_lu_invariance, max(small // 2, 3)),
        ("entropy-coincidence", _check_entropy_coincidence, large),
        ("oracle-sandwich", _check_sandwich, max(small // 2, 3)),
        ("coincidence-families", _check_coincidence_families, max(small // 3, 2)),
        ("lemma-equalities", _check_lemma_equalities, max(small // 4, 2)),
        ("dqc1-closed-forms", _check_dqc1, max(small // 3, 2)),
        ("channel-coincidence", _check_channels, max(small // 3, 2)),
    ]
    results = []
    for name, fn, count in checks:
        try:
            ok, detail = fn(rng, count)
        except DiscordBoundsError as exc:
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append((name, ok, detail))
    return results
