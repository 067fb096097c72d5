"""Lower and upper bounds on the quantum discord of qubit-qudit states.

The lower bound is co(L) + S(ρ_A) - S(ρ) with L = 2 Tr ρ_B² - 1 + q2(ρ); the
upper bound is the conditional discord of the measurement direction derived
from the filtered state. For two-qubit states the two coincide whenever
q2 = t1 of the filtered state, which covers Bell-diagonal states, rank-2
states, X-states inside their validity condition, and local filterings of
coincident states with a maximally mixed qubit marginal. Closed forms for the
one-clean-qubit circuit family and for binary-channel accessible information
are provided alongside the generic pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qstate
from .correlation import (
    MeasurementDirection,
    filtered_state,
    lorentz_spectrum,
    q_matrix,
    t1_direction,
)
from .errors import (
    CoincidenceFailed,
    ConditionViolated,
    DomainError,
    InvalidPovm,
    RegimeError,
    WrongDimension,
)
from .qstate import (
    SIGMA,
    DensityMatrix,
    XStateParams,
    bloch_vector,
    make_binary_channel,
    make_x_state,
    partial_trace,
    purity,
    von_neumann_entropy,
)

COINCIDENCE_RTOL = 1e-7


def binary_entropy(p: float) -> float:
    """H2(p) in bits with the 0 log 0 = 0 convention."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def h(z: float) -> float:
    """Entropy of a qubit with squared Bloch length z: H2((1 + sqrt(z))/2)."""
    if not -1e-12 <= z <= 1.0 + 1e-12:
        raise DomainError(f"h expects z in [0, 1], got {z}")
    z = min(max(z, 0.0), 1.0)
    return binary_entropy((1.0 + math.sqrt(z)) / 2.0)


def co(z: float) -> float:
    """Piecewise entropy floor: h(z) for z >= 0, log2(2/(1+z)) for z <= 0.

    Continuous at 0 with value 1; diverges as z -> -1.
    """
    if z <= -1.0:
        raise DomainError(f"co expects z > -1, got {z}")
    if z >= 0.0:
        return h(z)
    return math.log2(2.0 / (1.0 + z))


def _resolve_elements(meas) -> list[np.ndarray]:
    """Accept a MeasurementDirection, a Bloch 3-vector, or POVM elements."""
    if isinstance(meas, MeasurementDirection):
        meas = meas.m
    arr = np.asarray(meas, dtype=np.complex128) if not hasattr(meas, "elements") else None
    if arr is not None and arr.shape == (3,):
        m = arr.real.astype(float)
        norm = np.linalg.norm(m)
        if abs(norm - 1.0) > 1e-9:
            raise InvalidPovm(f"measurement direction must be a unit vector, |m| = {norm}")
        m = m / norm
        ms = m[0] * SIGMA[1] + m[1] * SIGMA[2] + m[2] * SIGMA[3]
        return [(SIGMA[0] + ms) / 2.0, (SIGMA[0] - ms) / 2.0]
    elements = meas.elements if hasattr(meas, "elements") else meas
    elements = [np.asarray(e, dtype=np.complex128) for e in elements]
    total = sum(elements)
    if np.abs(total - np.eye(2)).max() > 1e-9:
        raise InvalidPovm(
            f"POVM elements must sum to the identity, max deviation "
            f"{np.abs(total - np.eye(2)).max():.3e}"
        )
    for i, e in enumerate(elements):
        w = np.linalg.eigvalsh(e)
        if w.min() < -1e-9:
            raise InvalidPovm(f"POVM element {i} has eigenvalue {w.min():.3e} < 0")
    return elements


def conditional_discord(rho: DensityMatrix, meas) -> float:
    """Σ_i p_i S(ρ_B|i) + S(ρ_A) - S(ρ) for one fixed measurement on A.

    ``meas`` is a unit Bloch vector (projective case) or a POVM; outcomes
    with probability below 1e-14 contribute zero.
    """
    elements = _resolve_elements(meas)
    da, db = rho.dim_a, rho.dim_b
    blocks = rho.entries.reshape(da, db, da, db)
    total = 0.0
    for e in elements:
        cond = np.einsum("ac,cbad->bd", e, blocks)
        w = np.linalg.eigvalsh(cond)
        p = float(w.sum())
        if p < 1e-14:
            continue
        w = np.clip(w, 0.0, None)
        w = w[w > 0.0] / w.sum()
        total += p * float(-(w * np.log2(w)).sum())
    s_a = von_neumann_entropy(partial_trace(rho, "A"))
    return total + s_a - von_neumann_entropy(rho)


def discord_lower(rho: DensityMatrix) -> float:
    """co(L) + S(ρ_A) - S(ρ). May be negative, in which case it is vacuous;
    the raw value is returned unclamped."""
    q2 = lorentz_spectrum(q_matrix(rho))[1]
    l_value = 2.0 * purity(partial_trace(rho, "B")) - 1.0 + q2
    s_a = von_neumann_entropy(partial_trace(rho, "A"))
    return co(l_value) + s_a - von_neumann_entropy(rho)


def discord_upper(rho: DensityMatrix) -> float:
    """Conditional discord of the direction derived from the filtered state."""
    x = bloch_vector(partial_trace(rho, "A"))
    md = t1_direction(filtered_state(rho), x)
    return conditional_discord(rho, md)


def discord_upper_weak(rho: DensityMatrix) -> float:
    """Two-qubit relaxation h(1 - τ) + S(ρ_A) - S(ρ).

    τ = 2(1 - Tr ρ_B²) - (1 - x²) t1(filtered) is the tangle of the
    purification's BC marginal; this is never below :func:`discord_upper`.
    """
    if rho.dim_b != 2 or rho.dim_a != 2:
        raise WrongDimension("weak upper bound is defined for two-qubit states")
    x = bloch_vector(partial_trace(rho, "A"))
    md = t1_direction(filtered_state(rho), x)
    x_sq = float(x @ x)
    tau = 2.0 * (1.0 - purity(partial_trace(rho, "B"))) - (1.0 - x_sq) * md.t1
    tau = min(max(tau, 0.0), 1.0)
    s_a = von_neumann_entropy(partial_trace(rho, "A"))
    return h(1.0 - tau) + s_a - von_neumann_entropy(rho)


@dataclass(frozen=True)
class DiscordBounds:
    """Bounds plus the intermediate quantities they are built from.

    ``q2`` and ``t1`` refer to the filtered state; ``l_value`` is
    2 Tr ρ_B² - 1 + q2(ρ) of the unfiltered state. ``coincide`` is evaluated
    for two-qubit states only and implies upper - lower <= 1e-7.
    """

    lower: float
    upper: float
    coincide: bool
    direction: MeasurementDirection
    l_value: float
    q2: float
    t1: float
    entropy_a: float
    entropy_b: float
    entropy_ab: float
    x: np.ndarray

    @property
    def lower_clamped(self) -> float:
        return max(0.0, self.lower)


def compute_bounds(rho: DensityMatrix) -> DiscordBounds:
    """Full bound pipeline for one state."""
    rho_a = partial_trace(rho, "A")
    rho_b = partial_trace(rho, "B")
    s_a = von_neumann_entropy(rho_a)
    s_b = von_neumann_entropy(rho_b)
    s_ab = von_neumann_entropy(rho)
    x = bloch_vector(rho_a)

    tilde = filtered_state(rho)
    q2_tilde = float(lorentz_spectrum(q_matrix(tilde))[1])
    md = t1_direction(tilde, x)
    upper = conditional_discord(rho, md)

    q2 = float(lorentz_spectrum(q_matrix(rho))[1])
    l_value = 2.0 * purity(rho_b) - 1.0 + q2
    lower = co(l_value) + s_a - s_ab

    coincide = False
    if rho.dim_b == 2 and rho.dim_a == 2:
        coincide = abs(q2_tilde - md.t1) <= COINCIDENCE_RTOL * max(1.0, md.t1)
    return DiscordBounds(
        lower=lower,
        upper=upper,
        coincide=coincide,
        direction=md,
        l_value=l_value,
        q2=q2_tilde,
        t1=md.t1,
        entropy_a=s_a,
        entropy_b=s_b,
        entropy_ab=s_ab,
        x=x,
    )


def x_state_entropy(p: XStateParams) -> float:
    """Spectral entropy of the X-state in closed form.

    The spectrum splits into outer/inner 2×2 blocks with weights (1 ± s3)/2
    and internal Bloch lengths ((x ± y)² + (s1 ∓ s2)²) / (1 ± s3)².
    """
    total = binary_entropy((1.0 + p.s3) / 2.0)
    for sign in (1.0, -1.0):
        weight = (1.0 + sign * p.s3) / 2.0
        if weight <= 1e-15:
            continue
        num = (p.x + sign * p.y) ** 2 + (p.s1 - sign * p.s2) ** 2
        total += weight * h(min(num / (2.0 * weight) ** 2, 1.0))
    return total


def x_state_condition(p: XStateParams) -> bool:
    """Validity condition of the X-state closed form:
    |sqrt(ρ00 ρ33) - sqrt(ρ11 ρ22)| <= |ρ03| + |ρ12|."""
    e = make_x_state(p).entries.real
    gap = abs(math.sqrt(e[0, 0] * e[3, 3]) - math.sqrt(e[1, 1] * e[2, 2]))
    return gap <= abs(e[0, 3]) + abs(e[1, 2]) + 1e-12


def x_state_discord(p: XStateParams) -> float:
    """Closed-form discord of an X-state inside its validity condition.

    Requires |sqrt(ρ00 ρ33) - sqrt(ρ11 ρ22)| <= |ρ03| + |ρ12| and verifies
    q2 = t1 of the filtered state numerically before trusting the formula.
    The optimal observable is sigma1 if s1² >= s2² and sigma2 otherwise.
    """
    rho = make_x_state(p)
    if not x_state_condition(p):
        e = rho.entries.real
        gap = abs(math.sqrt(e[0, 0] * e[3, 3]) - math.sqrt(e[1, 1] * e[2, 2]))
        raise ConditionViolated(
            f"|sqrt(r00 r33) - sqrt(r11 r22)| = {gap:.3e} exceeds "
            f"|r03| + |r12| = {abs(e[0, 3]) + abs(e[1, 2]):.3e}"
        )
    tilde = filtered_state(rho)
    q2 = float(lorentz_spectrum(q_matrix(tilde))[1])
    t1 = t1_direction(tilde, bloch_vector(partial_trace(rho, "A"))).t1
    if abs(q2 - t1) > 1e-7:
        raise CoincidenceFailed(f"|q2 - t1| = {abs(q2 - t1):.3e} > 1e-7")
    s_max = max(p.s1 * p.s1, p.s2 * p.s2)
    return h(p.y * p.y + s_max) + h(p.x * p.x) - x_state_entropy(p)


@dataclass(frozen=True)
class DqcParams:
    """Parameters of the one-clean-qubit family: dimension d, mixing alpha,
    u1 = |Tr U|/d, beta = (d + |Tr U²|)/(2d), and the phase of Tr U²."""

    d: int
    alpha: float
    u1: float
    beta: float
    phase: float = 0.0

    @classmethod
    def from_unitary(cls, u, alpha: float) -> "DqcParams":
        u = qstate.validate_unitary(u)
        d = u.shape[0]
        tr2 = complex(np.trace(u @ u))
        phase = 0.5 * math.atan2(tr2.imag, tr2.real) if abs(tr2) > 1e-12 else 0.0
        return cls(
            d=d,
            alpha=float(alpha),
            u1=abs(complex(np.trace(u))) / d,
            beta=(d + abs(tr2)) / (2.0 * d),
            phase=phase,
        )


def dqc1_bounds(p: DqcParams) -> tuple[float, float]:
    """Closed-form bounds for the one-clean-qubit output state.

    The upper bound h(α²β) - h(α²) holds for every unitary; the lower bound
    log2(2/(1 + α²β)) - h(α²) is derived in the traceless regime and is only
    returned for u1 <= 1e-9 with d >= 4 (or trivially for α = 0).
    """
    a2 = p.alpha * p.alpha
    upper = h(a2 * p.beta) - h(a2)
    if p.alpha <= 1e-12:
        return 0.0, upper
    if p.u1 > 1e-9:
        raise RegimeError(
            f"lower bound requires u1 <= 1e-9 (got {p.u1:.3e}); use the "
            f"generic pipeline for states with Tr U != 0"
        )
    if p.d < 4:
        raise RegimeError(f"lower bound requires d >= 4, got d = {p.d}")
    lower = math.log2(2.0 / (1.0 + a2 * p.beta)) - h(a2)
    return lower, upper


@dataclass(frozen=True)
class ChannelBounds:
    """Accessible-information bounds for a binary qubit channel."""

    holevo_chi: float
    upper: float
    lower: float
    coincide: bool
    optimal_direction: np.ndarray
    lambda_plus: float
    lambda_minus: float
    delta: float
    c_plus: np.ndarray
    c_minus: np.ndarray


def accessible_info_bounds(p1: float, a, b) -> ChannelBounds:
    """Bounds on the accessible information of the channel {p_k, ρ_k}.

    Upper: S(ρ_B) - co(L) with L from the generic correlation pipeline,
    capped at the Holevo bound χ (the cap only binds when the underlying
    discord lower bound is vacuous). Lower: χ - D_A(ρ | m) for the projective
    measurement along c_- = p1 a - p2 b, which is the mutual information that
    measurement extracts. The bounds coincide when p1²(1-a²) = p2²(1-b²).
    """
    rho = make_binary_channel(p1, a, b)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p2 = 1.0 - p1
    delta = p1 - p2
    c_plus = p1 * a + p2 * b
    c_minus = p1 * a - p2 * b
    a2, b2 = float(a @ a), float(b @ b)
    root = math.sqrt(max(0.0, (1.0 - a2) * (1.0 - b2)))
    lam_p = (1.0 - float(a @ b) + root) / 2.0
    lam_m = (1.0 - float(a @ b) - root) / 2.0

    q2 = float(lorentz_spectrum(q_matrix(rho))[1])
    l_value = 2.0 * purity(partial_trace(rho, "B")) - 1.0 + q2
    chi = (
        von_neumann_entropy(partial_trace(rho, "A"))
        - p1 * h(a2)
        - p2 * h(b2)
    )
    upper = min(von_neumann_entropy(partial_trace(rho, "B")) - co(l_value), chi)

    norm = np.linalg.norm(c_minus)
    m = c_minus / norm if norm > 1e-14 else np.array([0.0, 0.0, 1.0])
    lower = chi - conditional_discord(rho, m)
    return ChannelBounds(
        holevo_chi=chi,
        upper=upper,
        lower=lower,
        coincide=abs(p1 * p1 * (1.0 - a2) - p2 * p2 * (1.0 - b2)) <= 1e-9,
        optimal_direction=m,
        lambda_plus=lam_p,
        lambda_minus=lam_m,
        delta=delta,
        c_plus=c_plus,
        c_minus=c_minus,
    )
