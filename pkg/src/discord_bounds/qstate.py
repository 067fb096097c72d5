"""Construction, validation, and elementary functionals of qubit-qudit states.

Basis ordering is fixed as |a> ⊗ |b> with the qubit index a slowest, so the
matrix of a (2, d) state consists of four d×d blocks indexed by the qubit.
All entropies are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidAlpha,
    InvalidBlochLength,
    InvalidProbability,
    InvalidRank,
    NotHermitian,
    NotPositive,
    NotUnitTrace,
    NotUnitary,
    SingularFilter,
    WrongDimension,
)

HERMITICITY_TOL = 1e-9
TRACE_TOL = 1e-9
PSD_TOL = 1e-9
# eigenvalues in [-PSD_TOL, 0] are treated as numerical noise and clamped to 0
EIG_CLAMP = 1e-9

SIGMA = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=np.complex128,
)


@dataclass(frozen=True)
class DensityMatrix:
    """A validated bipartite density matrix with dimensions (dim_a, dim_b).

    dim_a is 2 for every state this package constructs; marginals returned by
    :func:`partial_trace` use dim_a = 1 or dim_b = 1 for the kept subsystem.
    """

    entries: np.ndarray
    dim_a: int
    dim_b: int

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    def __repr__(self) -> str:  # keep reprs short; matrices can be large
        return f"DensityMatrix(dim_a={self.dim_a}, dim_b={self.dim_b})"


@dataclass(frozen=True)
class XStateParams:
    """Correlation parameters of the real canonical X-state.

    x = <sigma3 ⊗ sigma0>, y = <sigma0 ⊗ sigma3>, s_a = <sigma_a ⊗ sigma_a>.
    """

    x: float
    y: float
    s1: float
    s2: float
    s3: float


def _rng(seed) -> np.random.Generator:
    """Counter-based generator (Philox) keyed by an integer seed."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


def validate_state(entries, dim_b: int, dim_a: int = 2) -> DensityMatrix:
    """Check hermiticity, unit trace, and positivity, and wrap the matrix.

    Raises NotHermitian / NotUnitTrace / NotPositive naming the magnitude of
    the violation.
    """
    arr = np.array(entries, dtype=np.complex128)
    n = dim_a * dim_b
    if arr.shape != (n, n):
        raise WrongDimension(
            f"expected a {n}x{n} matrix for dims ({dim_a}, {dim_b}), got {arr.shape}"
        )
    herm_dev = np.abs(arr - arr.conj().T).max()
    if herm_dev > HERMITICITY_TOL:
        raise NotHermitian(f"max |M - M^dag| = {herm_dev:.3e} > {HERMITICITY_TOL}")
    trace_dev = abs(arr.trace() - 1.0)
    if trace_dev > TRACE_TOL:
        raise NotUnitTrace(f"|Tr - 1| = {trace_dev:.3e} > {TRACE_TOL}")
    min_eig = float(np.linalg.eigvalsh(arr).min())
    if min_eig < -PSD_TOL:
        raise NotPositive(f"min eigenvalue = {min_eig:.3e} < -{PSD_TOL}")
    arr.flags.writeable = False
    return DensityMatrix(entries=arr, dim_a=dim_a, dim_b=dim_b)


def partial_trace(rho: DensityMatrix, keep: str) -> DensityMatrix:
    """Reduced density matrix of subsystem ``keep`` ("A" or "B")."""
    da, db = rho.dim_a, rho.dim_b
    blocks = rho.entries.reshape(da, db, da, db)
    keep = keep.upper()
    if keep == "A":
        return validate_state(np.einsum("abcb->ac", blocks), dim_b=1, dim_a=da)
    if keep == "B":
        return validate_state(np.einsum("abad->bd", blocks), dim_b=db, dim_a=1)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def _eigvals_clamped(matrix: np.ndarray) -> np.ndarray:
    w = np.linalg.eigvalsh(matrix)
    if w.min() < -PSD_TOL:
        raise NotPositive(f"min eigenvalue = {w.min():.3e} < -{PSD_TOL}")
    return np.clip(w, 0.0, None)


def von_neumann_entropy(rho) -> float:
    """S = -sum λ log2 λ in bits, with 0 log 0 = 0.

    Accepts a DensityMatrix or any PSD matrix; eigenvalues in [-1e-9, 0] are
    clamped to zero before the logarithm.
    """
    matrix = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    w = _eigvals_clamped(matrix)
    w = w[w > 0.0]
    return float(-(w * np.log2(w)).sum()) if w.size else 0.0


def purity(rho) -> float:
    """Tr ρ² (real by hermiticity)."""
    matrix = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return float(np.vdot(matrix, matrix).real)


def bloch_vector(rho_a) -> np.ndarray:
    """Bloch 3-vector x_a = Tr(sigma_a ρ) of a qubit state."""
    matrix = rho_a.entries if isinstance(rho_a, DensityMatrix) else np.asarray(rho_a)
    if matrix.shape != (2, 2):
        raise WrongDimension(f"expected a 2x2 qubit state, got {matrix.shape}")
    return np.einsum("aij,ji->a", SIGMA[1:], matrix).real


def random_state(dim_b: int, rank: int, seed) -> DensityMatrix:
    """Seeded Ginibre-induced random state: ρ = G G† / Tr(G G†).

    G is a 2·dim_b × rank matrix of independent standard complex Gaussians,
    so ρ has the requested rank almost surely. Deterministic in the seed.
    """
    n = 2 * dim_b
    if not 1 <= rank <= n:
        raise InvalidRank(f"rank must be in [1, {n}], got {rank}")
    rng = _rng(seed)
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    m = g @ g.conj().T
    return validate_state(m / m.trace().real, dim_b=dim_b)


def bell_diagonal_eigenvalues(c1: float, c2: float, c3: float) -> np.ndarray:
    """Eigenvalues (1 ± c1 ± c2 ± c3)/4 over the odd-minus-sign patterns."""
    signs = [(1, -1, 1), (-1, 1, 1), (1, 1, -1), (-1, -1, -1)]
    return np.array([(1 + a * c1 + b * c2 + c * c3) / 4 for a, b, c in signs])


def make_bell_diagonal(c1: float, c2: float, c3: float) -> DensityMatrix:
    """State (1/4) Σ_μ c_μ sigma_μ ⊗ sigma_μ with c_0 = 1."""
    if bell_diagonal_eigenvalues(c1, c2, c3).min() < -1e-12:
        raise NotPositive(f"correlation triple {(c1, c2, c3)} is outside the tetrahedron")
    m = np.eye(4, dtype=np.complex128)
    for c, s in zip((c1, c2, c3), SIGMA[1:]):
        m += c * np.kron(s, s)
    return validate_state(m / 4, dim_b=2)


def make_x_state(p: XStateParams) -> DensityMatrix:
    """Real canonical X-state from its five correlation parameters."""
    x, y, s1, s2, s3 = p.x, p.y, p.s1, p.s2, p.s3
    m = np.zeros((4, 4), dtype=np.complex128)
    m[0, 0] = (1 + x + y + s3) / 4
    m[1, 1] = (1 + x - y - s3) / 4
    m[2, 2] = (1 - x + y - s3) / 4
    m[3, 3] = (1 - x - y + s3) / 4
    m[0, 3] = m[3, 0] = (s1 - s2) / 4
    m[1, 2] = m[2, 1] = (s1 + s2) / 4
    return validate_state(m, dim_b=2)


def x_state_params(rho: DensityMatrix) -> XStateParams:
    """Read the five X-state correlation expectations back off a two-qubit state."""
    if rho.dim_b != 2 or rho.dim_a != 2:
        raise WrongDimension("X-state parameters are defined for two-qubit states")

    def expect(i, j):
        return float(np.einsum("ij,ji->", np.kron(SIGMA[i], SIGMA[j]), rho.entries).real)

    return XStateParams(
        x=expect(3, 0), y=expect(0, 3), s1=expect(1, 1), s2=expect(2, 2), s3=expect(3, 3)
    )


def validate_unitary(u) -> np.ndarray:
    arr = np.array(u, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise WrongDimension(f"unitary must be square, got {arr.shape}")
    dev = np.abs(arr @ arr.conj().T - np.eye(arr.shape[0])).max()
    if dev > 1e-9:
        raise NotUnitary(f"max |U U^dag - 1| = {dev:.3e} > 1e-9")
    return arr


def make_dqc1(u, alpha: float) -> DensityMatrix:
    """One-clean-qubit circuit output (1/2d) [[I, αU†], [αU, I]]."""
    if not 0.0 <= alpha <= 1.0:
        raise InvalidAlpha(f"alpha must be in [0, 1], got {alpha}")
    u = validate_unitary(u)
    d = u.shape[0]
    m = np.empty((2 * d, 2 * d), dtype=np.complex128)
    m[:d, :d] = np.eye(d)
    m[d:, d:] = np.eye(d)
    m[:d, d:] = alpha * u.conj().T
    m[d:, :d] = alpha * u
    return validate_state(m / (2 * d), dim_b=d)


def qubit_from_bloch(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return (SIGMA[0] + r[0] * SIGMA[1] + r[1] * SIGMA[2] + r[2] * SIGMA[3]) / 2


def make_binary_channel(p1: float, a, b) -> DensityMatrix:
    """Signal-register state p1 ρ_a ⊗ |1><1| + p2 ρ_b ⊗ |2><2|.

    Subsystem A is the signal qubit with Bloch vectors a, b; subsystem B is
    the 2-dimensional classical register, so D_B = 0 structurally.
    """
    if not 0.0 < p1 < 1.0:
        raise InvalidProbability(f"p1 must be in (0, 1), got {p1}")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    for name, r in (("a", a), ("b", b)):
        if np.linalg.norm(r) > 1 + 1e-9:
            raise InvalidBlochLength(f"|{name}| = {np.linalg.norm(r):.6f} > 1")
    reg = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
    m = p1 * np.kron(qubit_from_bloch(a), reg[0]) + (1 - p1) * np.kron(
        qubit_from_bloch(b), reg[1]
    )
    return validate_state(m, dim_b=2)


def apply_filter(rho: DensityMatrix, f) -> DensityMatrix:
    """Normalized local filter (F ⊗ I) ρ (F† ⊗ I) / Tr on the qubit side."""
    f = np.asarray(f, dtype=np.complex128)
    if f.shape != (2, 2):
        raise WrongDimension(f"filter must be 2x2, got {f.shape}")
    if abs(np.linalg.det(f)) <= 1e-12:
        raise SingularFilter(f"|det F| = {abs(np.linalg.det(f)):.3e} <= 1e-12")
    fa = np.kron(f, np.eye(rho.dim_b))
    m = fa @ rho.entries @ fa.conj().T
    return validate_state(m / m.trace().real, dim_b=rho.dim_b, dim_a=rho.dim_a)


def purify(rho: DensityMatrix) -> np.ndarray:
    """Purification |ψ> in A ⊗ B ⊗ C with dim C = dim(AB).

    Eigenvalues are sorted descending, so a pure input returns its eigenvector
    paired with the first C basis vector.
    """
    w, v = np.linalg.eigh(rho.entries)
    w, v = w[::-1], v[:, ::-1]
    if w.min() < -PSD_TOL:
        raise NotPositive(f"min eigenvalue = {w.min():.3e} < -{PSD_TOL}")
    w = np.clip(w, 0.0, None)
    psi = (v * np.sqrt(w)).reshape(-1)  # column i carries sqrt(λ_i) ψ_i
    return psi / np.linalg.norm(psi)


def random_unitary(dim: int, seed) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix with phase fix."""
    rng = _rng(seed)
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases.conj()


def random_traceless_unitary(dim: int, seed) -> np.ndarray:
    """Random unitary with Tr U = 0, built by pairing eigenphases φ and φ + π."""
    if dim % 2:
        raise WrongDimension(f"traceless construction needs even dimension, got {dim}")
    rng = _rng(seed)
    phases = rng.uniform(0.0, 2 * np.pi, size=dim // 2)
    eigs = np.exp(1j * np.concatenate([phases, phases + np.pi]))
    v = random_unitary(dim, rng)
    return (v * eigs) @ v.conj().T
