"""Correlation machinery for qubit-qudit states.

The central object is the real symmetric 4×4 matrix Q of a state ρ, defined
as the Pauli coefficient matrix of the positive two-qubit operator
2 Tr_{B1B2}[(1 - V) ρ ⊗ ρ] with V the qudit swap. Its pseudo-eigenvalues
q1 ≥ q2 ≥ q3 ≥ q4 solve det(Q - q η) = 0 with η = diag(1, -1, -1, -1) and are
invariant under local filtering on the qubit, which is what makes the discord
bounds computable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ComplexSpectrum, DimensionTooLarge, SingularMarginal, WrongDimension
from .qstate import SIGMA, DensityMatrix, bloch_vector, partial_trace, validate_state

ETA = np.diag([1.0, -1.0, -1.0, -1.0])

MARGINAL_EIG_FLOOR = 1e-10
IMAG_TOL = 1e-8


@dataclass(frozen=True)
class MeasurementDirection:
    """A projective qubit measurement along the unit Bloch vector m.

    When produced by :func:`t1_direction`, t1 is the largest eigenvalue of the
    3×3 block of -Q(filtered state) and e its eigenvector; oracle results leave
    those fields as None.
    """

    m: np.ndarray
    t1: float | None = None
    e: np.ndarray | None = None


def _pauli_marginals(rho: DensityMatrix) -> list[np.ndarray]:
    """B_mu = Tr_A[(sigma_mu ⊗ I) ρ] for mu = 0..3 (each Hermitian, d×d)."""
    da, db = rho.dim_a, rho.dim_b
    blocks = rho.entries.reshape(da, db, da, db)
    # Tr_A[(M ⊗ I) ρ] = Σ_{a,c} M_{ac} ρ^{(c,a)} with ρ^{(c,a)} the qubit blocks
    return [np.einsum("ac,cbad->bd", s, blocks) for s in SIGMA]


def filtered_state(rho: DensityMatrix) -> DensityMatrix:
    """Filtered state (2 ρ_A)^{-1/2} ρ (2 ρ_A)^{-1/2}; its A-marginal is I/2."""
    rho_a = partial_trace(rho, "A").entries
    w, v = np.linalg.eigh(rho_a)
    if w.min() < MARGINAL_EIG_FLOOR:
        raise SingularMarginal(w.min())
    inv_sqrt = (v / np.sqrt(2.0 * w)) @ v.conj().T
    m = np.kron(inv_sqrt, np.eye(rho.dim_b))
    return validate_state(m @ rho.entries @ m, dim_b=rho.dim_b)


def q_matrix(rho: DensityMatrix) -> np.ndarray:
    """Q_{mu,nu} = 2 [Tr B_mu Tr B_nu - Tr(B_mu B_nu)], real symmetric 4×4.

    Closed form of the swap construction, O(d^3) instead of O(d^6); the
    literal construction is kept as :func:`q_matrix_swap_reference`.
    """
    b = _pauli_marginals(rho)
    traces = np.array([bm.trace() for bm in b])
    # Tr(B_mu B_nu) = vdot(B_nu, B_mu) since the marginals are Hermitian
    overlaps = np.array([[np.vdot(bn, bm) for bn in b] for bm in b])
    q = 2.0 * (np.outer(traces, traces) - overlaps)
    return np.ascontiguousarray(q.real)


def q_matrix_swap_reference(rho: DensityMatrix) -> np.ndarray:
    """Literal swap construction of Q, used as a cross-check oracle.

    Builds the d²×d² swap operator explicitly and contracts it against ρ ⊗ ρ
    without materializing the (2d)²-dimensional product matrix.
    """
    d = rho.dim_b
    if d > 64:
        raise DimensionTooLarge(f"swap reference builds a d²×d² swap; d = {d} > 64")
    swap = np.zeros((d, d, d, d))
    for i in range(d):
        for j in range(d):
            swap[i, j, j, i] = 1.0  # V |i j> = |j i>
    blocks = rho.entries.reshape(2, d, 2, d)
    # O = 2 Tr_{B1B2}[(1 - V) ρ ⊗ ρ] as a 4×4 operator on the two qubit copies
    rho_a = np.einsum("abcb->ac", blocks)
    term1 = np.kron(rho_a, rho_a)
    term2 = np.einsum("pqrs,arbp,csdq->acbd", swap, blocks, blocks,
                      optimize=True).reshape(4, 4)
    op = 2.0 * (term1 - term2)
    pauli2 = [np.kron(sm, sn) for sm in SIGMA for sn in SIGMA]
    q = np.array([np.einsum("ij,ji->", p, op) for p in pauli2]).reshape(4, 4)
    return np.ascontiguousarray(q.real)


def q_operator(q: np.ndarray) -> np.ndarray:
    """Reconstruct the two-qubit operator (1/4) Σ Q_{mu,nu} sigma_mu ⊗ sigma_nu."""
    op = np.zeros((4, 4), dtype=np.complex128)
    for mu in range(4):
        for nu in range(4):
            op += q[mu, nu] * np.kron(SIGMA[mu], SIGMA[nu])
    return op / 4.0


def r_matrix(rho: DensityMatrix) -> np.ndarray:
    """4×4 correlation matrix R_{mu,nu} = <sigma_mu ⊗ sigma_nu> of a two-qubit state."""
    if rho.dim_b != 2 or rho.dim_a != 2:
        raise WrongDimension(f"R is defined for two-qubit states, got dims "
                             f"({rho.dim_a}, {rho.dim_b})")
    pauli2 = np.array([np.kron(sm, sn) for sm in SIGMA for sn in SIGMA])
    r = np.einsum("kij,ji->k", pauli2, rho.entries).real
    return np.ascontiguousarray(r.reshape(4, 4))


def t_matrix(rho: DensityMatrix) -> np.ndarray:
    """3×3 correlation block T_{ab} = <sigma_a ⊗ sigma_b>, a, b = 1..3."""
    return np.ascontiguousarray(r_matrix(rho)[1:, 1:])


def lorentz_spectrum(q: np.ndarray) -> np.ndarray:
    """The four solutions of det(Q - q η) = 0, sorted descending.

    Computed as the eigenvalues of η Q (η² = 1). The spectrum is real for
    valid inputs; imaginary parts above 1e-8 raise ComplexSpectrum.
    """
    q = np.asarray(q, dtype=float)
    if q.shape != (4, 4):
        raise WrongDimension(f"Q must be 4x4, got {q.shape}")
    w = np.linalg.eigvals(ETA @ q)
    max_imag = float(np.abs(w.imag).max())
    if max_imag > IMAG_TOL:
        raise ComplexSpectrum(f"max |Im q| = {max_imag:.3e} > {IMAG_TOL}")
    return np.sort(w.real)[::-1]


def t1_direction(rho_tilde: DensityMatrix, x: np.ndarray) -> MeasurementDirection:
    """Measurement direction derived from the filtered state.

    t1 is the largest eigenvalue of the 3×3 matrix obtained from -Q(filtered)
    by deleting the first row and column, e its eigenvector, and m the unit
    vector along sqrt(1-x²) e_perp + e_par relative to the Bloch vector x of
    the unfiltered qubit marginal (m = e when x = 0).
    """
    x = np.asarray(x, dtype=float)
    q3 = -q_matrix(rho_tilde)[1:, 1:]
    w, v = np.linalg.eigh(q3)
    t1 = float(w[-1])
    e = v[:, -1].copy()
    # deterministic sign: largest-magnitude component positive
    pivot = int(np.argmax(np.abs(e)))
    if e[pivot] < 0:
        e = -e
    x_len_sq = float(x @ x)
    if x_len_sq < 1e-24:  # x below 1e-12: measurement along e itself
        m = e.copy()
    else:
        e_par = x * (x @ e) / x_len_sq
        e_perp = e - e_par
        m = np.sqrt(max(0.0, 1.0 - x_len_sq)) * e_perp + e_par
        norm = np.linalg.norm(m)
        m = e.copy() if norm < 1e-15 else m / norm
    return MeasurementDirection(m=m, t1=max(t1, 0.0), e=e)
