import math

import numpy as np
import pytest

from discord_bounds.bounds import (
    DqcParams,
    accessible_info_bounds,
    binary_entropy,
    co,
    compute_bounds,
    conditional_discord,
    discord_lower,
    discord_upper,
    discord_upper_weak,
    dqc1_bounds,
    h,
    x_state_discord,
    x_state_entropy,
)
from discord_bounds.errors import (
    CoincidenceFailed,
    ConditionViolated,
    DomainError,
    InvalidPovm,
    RegimeError,
    SingularMarginal,
)
from discord_bounds.qstate import (
    SIGMA,
    XStateParams,
    apply_filter,
    make_bell_diagonal,
    make_binary_channel,
    make_x_state,
    make_dqc1,
    partial_trace,
    random_state,
    random_traceless_unitary,
    random_unitary,
    validate_state,
    von_neumann_entropy,
)

H_HALF = 0.6008760366928562  # direct evaluation of h at z = 1/2


def test_h_values():
    assert h(0.0) == pytest.approx(1.0, abs=1e-15)
    assert h(1.0) == 0.0
    assert h(0.5) == pytest.approx(H_HALF, abs=1e-15)
    assert abs(h(0.5) - 0.6) < 5e-3  # the rounded headline value
    with pytest.raises(DomainError):
        h(1.1)
    with pytest.raises(DomainError):
        h(-0.1)


def test_co_values():
    assert co(0.0) == pytest.approx(1.0, abs=1e-15)
    assert co(-0.5) == pytest.approx(2.0, abs=1e-15)
    assert co(1.0) == 0.0
    # continuity at the branch point
    assert co(1e-12) == pytest.approx(co(-1e-12), abs=1e-9)
    with pytest.raises(DomainError):
        co(-1.0)


def test_co_composite_monotone_convex():
    # z -> co(1 - z^2) is nondecreasing and midpoint-convex on [0, 1]
    z = np.linspace(0.0, 1.0, 1000)
    f = np.array([co(1.0 - v * v) for v in z])
    diffs = np.diff(f)
    assert diffs.min() >= -1e-12
    mid = np.array([co(1.0 - ((a + b) / 2) ** 2) for a, b in zip(z[:-2], z[2:])])
    assert ((f[:-2] + f[2:]) / 2 - mid).min() >= -1e-12


def test_conditional_discord_product_state():
    rho = validate_state(np.kron(np.diag([0.7, 0.3]), np.diag([0.6, 0.4])), dim_b=2)
    for m in ([0, 0, 1.0], [1.0, 0, 0]):
        assert conditional_discord(rho, np.array(m)) == pytest.approx(0, abs=1e-12)


def test_conditional_discord_bell_state():
    rho = make_bell_diagonal(1, -1, 1)
    for m in ([0, 0, 1.0], [0, 1.0, 0], [np.sqrt(0.5), 0, np.sqrt(0.5)]):
        assert conditional_discord(rho, np.array(m)) == pytest.approx(1, abs=1e-10)


def test_conditional_discord_classical_state():
    rho = make_x_state(XStateParams(0, 0, 1, 0, 0))  # (I + s1 s1)/4
    assert conditional_discord(rho, np.array([1.0, 0, 0])) == pytest.approx(0, abs=1e-10)
    assert conditional_discord(rho, np.array([0, 0, 1.0])) == pytest.approx(1, abs=1e-10)


def test_conditional_discord_povm_input():
    rho = random_state(2, 4, seed=0)
    m = np.array([0.0, 0.0, 1.0])
    proj = [(SIGMA[0] + SIGMA[3]) / 2, (SIGMA[0] - SIGMA[3]) / 2]
    assert conditional_discord(rho, proj) == pytest.approx(
        conditional_discord(rho, m), abs=1e-12
    )
    with pytest.raises(InvalidPovm):
        conditional_discord(rho, [np.eye(2), np.eye(2)])
    with pytest.raises(InvalidPovm):
        conditional_discord(rho, np.array([0.0, 0.0, 2.0]))


def test_discord_lower_examples():
    assert discord_lower(make_bell_diagonal(1, -1, 1)) == pytest.approx(1, abs=1e-10)
    product = validate_state(np.kron(np.eye(2) / 2, np.diag([0.8, 0.2])), dim_b=2)
    assert discord_lower(product) <= 1e-10
    assert discord_lower(validate_state(np.eye(4) / 4, dim_b=2)) <= 1e-10


def test_discord_upper_coincides_for_bell_diagonal():
    rho = make_bell_diagonal(0.6, -0.4, 0.2)
    assert discord_upper(rho) == pytest.approx(discord_lower(rho), abs=1e-10)


def test_discord_upper_rank2_coincides():
    for seed in (3, 17, 99):
        rho = random_state(2, 2, seed)
        assert discord_upper(rho) == pytest.approx(discord_lower(rho), abs=1e-7)


def test_discord_upper_weak_dominates():
    for seed in range(15):
        rho = random_state(2, 1 + seed % 4, seed)
        assert discord_upper_weak(rho) >= discord_upper(rho) - 1e-9


def test_discord_upper_weak_bell():
    assert discord_upper_weak(make_bell_diagonal(1, -1, 1)) == pytest.approx(1, abs=1e-10)


def test_compute_bounds_fields():
    rho = make_bell_diagonal(0.6, -0.4, 0.2)
    bd = compute_bounds(rho)
    assert bd.coincide
    assert bd.upper == pytest.approx(bd.lower, abs=1e-10)
    assert bd.q2 == pytest.approx(0.36, abs=1e-12)
    assert bd.t1 == pytest.approx(0.36, abs=1e-12)
    assert bd.l_value == pytest.approx(0.36, abs=1e-12)
    assert bd.entropy_a == pytest.approx(1, abs=1e-12)
    assert bd.lower_clamped == bd.lower


def test_compute_bounds_ordering_and_lu_invariance():
    rng = np.random.default_rng(5)
    for seed in range(10):
        rho = random_state(2, 1 + seed % 4, seed + 50)
        bd = compute_bounds(rho)
        assert bd.lower <= bd.upper + 1e-9
        assert bd.upper >= -1e-9
        u = np.kron(random_unitary(2, rng), random_unitary(2, rng))
        rotated = validate_state(u @ rho.entries @ u.conj().T, dim_b=2)
        bd2 = compute_bounds(rotated)
        assert bd2.lower == pytest.approx(bd.lower, abs=1e-8)
        assert bd2.upper == pytest.approx(bd.upper, abs=1e-8)


def test_compute_bounds_singular_marginal():
    rho = validate_state(np.kron(np.diag([1.0, 0.0]), np.eye(2) / 2), dim_b=2)
    with pytest.raises(SingularMarginal):
        compute_bounds(rho)


def test_filtered_family_coincides():
    rng = np.random.default_rng(12)
    rho = make_x_state(XStateParams(0.0, 0.2, 0.4, 0.2, 0.3))
    v = random_unitary(2, rng)
    f = (v * np.array([1.0, 0.35])) @ v.conj().T
    bd = compute_bounds(apply_filter(rho, f))
    assert bd.coincide
    assert bd.upper == pytest.approx(bd.lower, abs=1e-8)


def test_x_state_discord_classical():
    assert x_state_discord(XStateParams(0, 0, 1, 0, 0)) == pytest.approx(0, abs=1e-12)


def test_x_state_discord_bell():
    assert x_state_discord(XStateParams(0, 0, 1, -1, 1)) == pytest.approx(1, abs=1e-12)


def test_x_state_discord_matches_pipeline():
    p = XStateParams(0.15, -0.1, 0.45, 0.2, 0.3)
    value = x_state_discord(p)
    bd = compute_bounds(make_x_state(p))
    assert value == pytest.approx(bd.lower, abs=1e-8)
    assert value == pytest.approx(bd.upper, abs=1e-8)


def test_x_state_entropy_matches_spectrum():
    for p in (
        XStateParams(0.15, -0.1, 0.45, 0.2, 0.3),
        XStateParams(0.0, 0.0, 1.0, 0.0, 0.0),
        XStateParams(-0.2, 0.3, 0.3, -0.25, 0.4),
    ):
        assert x_state_entropy(p) == pytest.approx(
            von_neumann_entropy(make_x_state(p)), abs=1e-12
        )


def test_x_state_condition_violated():
    # s1 = s2 = 0 with distinct block products violates the validity condition
    with pytest.raises(ConditionViolated):
        x_state_discord(XStateParams(0.0, 0.0, 0.0, 0.0, 0.5))


def test_dqc1_bounds_closed_form():
    p = DqcParams(d=16, alpha=0.0, u1=0.0, beta=0.8)
    assert dqc1_bounds(p) == (0.0, 0.0)
    p = DqcParams(d=16, alpha=1.0, u1=0.0, beta=1.0)
    lo, up = dqc1_bounds(p)
    assert lo == 0.0 and up == 0.0
    p = DqcParams(d=16, alpha=1.0, u1=0.0, beta=0.5)
    lo, up = dqc1_bounds(p)
    assert up == pytest.approx(0.6008760366928562, abs=1e-15)
    assert lo == pytest.approx(math.log2(4 / 3), abs=1e-15)
    assert abs(up - 0.6014) < 1e-3


def test_dqc1_regime_errors():
    with pytest.raises(RegimeError):
        dqc1_bounds(DqcParams(d=16, alpha=0.5, u1=0.5, beta=0.8))
    with pytest.raises(RegimeError):
        dqc1_bounds(DqcParams(d=2, alpha=0.5, u1=0.0, beta=0.8))


def test_dqc1_upper_holds_for_all_unitaries():
    rng = np.random.default_rng(8)
    for seed in range(4):
        u = random_unitary(8, rng)
        alpha = float(rng.uniform(0.2, 1.0))
        params = DqcParams.from_unitary(u, alpha)
        up = h(alpha * alpha * params.beta) - h(alpha * alpha)
        bd = compute_bounds(make_dqc1(u, alpha))
        assert bd.upper <= up + 1e-9


def test_dqc1_traceless_pipeline_equalities():
    u = random_traceless_unitary(16, seed=4)
    alpha = 0.85
    params = DqcParams.from_unitary(u, alpha)
    lo, up = dqc1_bounds(params)
    bd = compute_bounds(make_dqc1(u, alpha))
    assert lo == pytest.approx(bd.lower, abs=1e-10)
    beta_hat = 16 * bd.t1 / (2 * alpha * alpha)
    assert beta_hat == pytest.approx(params.beta, abs=1e-10)
    # measurement-chain closed form for the pipeline upper at u1 = 0
    phases = np.angle(np.linalg.eigvals(u))
    ca = bd.direction.m[0] * np.cos(phases) + bd.direction.m[1] * np.sin(phases)
    chain = np.mean([h(alpha ** 2 * c ** 2) for c in ca]) - h(alpha ** 2)
    assert bd.upper == pytest.approx(chain, abs=1e-10)
    assert bd.upper <= up + 1e-12


def test_accessible_info_orthogonal_pure():
    cb = accessible_info_bounds(0.5, [0, 0, 1], [0, 0, -1])
    assert cb.upper == pytest.approx(1, abs=1e-12)
    assert cb.lower == pytest.approx(1, abs=1e-12)
    assert cb.coincide
    assert cb.holevo_chi == pytest.approx(1, abs=1e-12)


def test_accessible_info_identical_signals():
    a = [0.3, 0.1, -0.2]
    cb = accessible_info_bounds(0.5, a, a)
    assert cb.upper == pytest.approx(0, abs=1e-9)
    assert cb.lower == pytest.approx(0, abs=1e-9)


def test_accessible_info_pure_angle():
    theta = np.pi / 2
    cb = accessible_info_bounds(0.5, [0, 0, 1], [np.sin(theta), 0, np.cos(theta)])
    analytic = 1 - binary_entropy((1 + math.sin(theta / 2)) / 2)
    assert analytic == pytest.approx(0.39912396330714384, abs=1e-15)
    assert cb.upper == pytest.approx(analytic, abs=1e-9)
    assert cb.lower == pytest.approx(analytic, abs=1e-9)
    assert cb.coincide
    assert cb.lambda_minus == pytest.approx(math.sin(theta / 2) ** 2, abs=1e-12)


def test_accessible_info_invariants():
    rng = np.random.default_rng(3)
    for _ in range(10):
        p1 = float(rng.uniform(0.15, 0.85))
        a = rng.uniform(-1, 1, 3)
        a *= rng.uniform(0, 0.95) / np.linalg.norm(a)
        b = rng.uniform(-1, 1, 3)
        b *= rng.uniform(0, 0.95) / np.linalg.norm(b)
        cb = accessible_info_bounds(p1, a, b)
        assert -1e-9 <= cb.lower <= cb.upper + 1e-9
        assert cb.upper <= cb.holevo_chi + 1e-9
        assert cb.upper <= 1 + 1e-9


def test_coincidence_failed_surfaces():
    # states passing the printed condition but failing the numerical check
    # would raise; across random samples none should (regression guard)
    rng = np.random.default_rng(0)
    raised = 0
    for _ in range(50):
        diag = rng.dirichlet(np.ones(4))
        u, v = rng.uniform(-1, 1, 2)
        r03 = u * math.sqrt(diag[0] * diag[3])
        r12 = v * math.sqrt(diag[1] * diag[2])
        p = XStateParams(
            x=diag[0] + diag[1] - diag[2] - diag[3],
            y=diag[0] - diag[1] + diag[2] - diag[3],
            s1=2 * (r03 + r12),
            s2=2 * (r12 - r03),
            s3=diag[0] - diag[1] - diag[2] + diag[3],
        )
        try:
            x_state_discord(p)
        except ConditionViolated:
            pass
        except CoincidenceFailed:
            raised += 1
    assert raised == 0
