import numpy as np
import pytest

from discord_bounds.correlation import (
    ETA,
    MeasurementDirection,
    filtered_state,
    lorentz_spectrum,
    q_matrix,
    q_matrix_swap_reference,
    q_operator,
    r_matrix,
    t1_direction,
    t_matrix,
)
from discord_bounds.errors import ComplexSpectrum, SingularMarginal, WrongDimension
from discord_bounds.qstate import (
    SIGMA,
    XStateParams,
    apply_filter,
    bloch_vector,
    make_bell_diagonal,
    make_binary_channel,
    make_x_state,
    partial_trace,
    random_state,
    random_unitary,
    validate_state,
)


def local_rotate(rho, va, vb):
    u = np.kron(va, vb)
    return validate_state(u @ rho.entries @ u.conj().T, dim_b=rho.dim_b)


def test_q_matrix_bell_diagonal():
    q = q_matrix(make_bell_diagonal(0.6, -0.4, 0.2))
    assert np.allclose(q, np.diag([1, -0.36, -0.16, -0.04]), atol=1e-12)


def test_q_matrix_product_rank_one():
    rho_a = (SIGMA[0] + 0.3 * SIGMA[1] - 0.2 * SIGMA[3]) / 2
    rho_b = np.diag([0.6, 0.3, 0.1])
    rho = validate_state(np.kron(rho_a, rho_b), dim_b=3)
    r = np.array([1.0, 0.3, 0.0, -0.2])
    expected = 2 * (1 - np.trace(rho_b @ rho_b).real) * np.outer(r, r)
    assert np.abs(q_matrix(rho) - expected).max() < 1e-12
    assert np.linalg.matrix_rank(q_matrix(rho), tol=1e-10) == 1


def test_q_matrix_maximally_mixed():
    for d in (2, 3, 5):
        rho = validate_state(np.eye(2 * d) / (2 * d), dim_b=d)
        assert np.allclose(q_matrix(rho), np.diag([2 * (1 - 1 / d), 0, 0, 0]), atol=1e-12)


@pytest.mark.parametrize("dim_b", [2, 3, 4])
def test_swap_reference_equivalence(dim_b):
    for seed in range(5):
        rho = random_state(dim_b, 2 * dim_b, seed)
        assert np.abs(q_matrix(rho) - q_matrix_swap_reference(rho)).max() < 1e-12


def test_q_operator_is_psd():
    for seed in range(10):
        rho = random_state(2, 4, seed)
        op = q_operator(q_matrix(rho))
        assert np.linalg.eigvalsh(op).min() > -1e-9


def test_r_matrix_layouts():
    assert np.allclose(r_matrix(validate_state(np.eye(4) / 4, dim_b=2)),
                       np.diag([1.0, 0, 0, 0]), atol=1e-14)
    r = r_matrix(make_bell_diagonal(0.5, -0.3, 0.1))
    assert np.allclose(r, np.diag([1, 0.5, -0.3, 0.1]), atol=1e-12)
    with pytest.raises(WrongDimension):
        r_matrix(random_state(3, 2, seed=0))


def test_r_matrix_binary_channel_layout():
    p1, a, b = 0.3, np.array([0.2, 0.1, -0.4]), np.array([-0.1, 0.5, 0.2])
    r = r_matrix(make_binary_channel(p1, a, b))
    assert r[0, 0] == pytest.approx(1, abs=1e-12)
    assert r[0, 3] == pytest.approx(2 * p1 - 1, abs=1e-12)
    assert np.allclose(r[1:, 0], p1 * a + 0.7 * b, atol=1e-12)
    assert np.allclose(r[1:, 3], p1 * a - 0.7 * b, atol=1e-12)
    assert np.abs(r[0, 1:3]).max() < 1e-12
    assert np.abs(r[1:, 1:3]).max() < 1e-12


def test_two_qubit_q_equals_r_eta_rt():
    for seed in range(20):
        rho = random_state(2, 1 + seed % 4, seed)
        r = r_matrix(rho)
        assert np.abs(q_matrix(rho) - r @ ETA @ r.T).max() < 1e-12


def test_filtered_state_properties():
    for seed in range(10):
        rho = random_state(2, 3, seed)
        til = filtered_state(rho)
        assert np.allclose(partial_trace(til, "A").entries, np.eye(2) / 2, atol=1e-10)
        assert til.entries.trace().real == pytest.approx(1, abs=1e-10)


def test_filtered_state_fixed_points():
    rho = make_bell_diagonal(0.5, -0.3, 0.1)
    assert np.abs(filtered_state(rho).entries - rho.entries).max() < 1e-12


def test_filtered_state_filter_invariance():
    # filtering a state with maximally mixed marginal does not change its
    # filtered image
    rng = np.random.default_rng(0)
    rho = make_x_state(XStateParams(0.0, 0.2, 0.4, 0.2, 0.3))
    v = random_unitary(2, rng)
    f = (v * np.array([1.0, 0.4])) @ v.conj().T
    rho_f = apply_filter(rho, f)
    assert np.abs(filtered_state(rho_f).entries - filtered_state(rho).entries).max() < 1e-10


def test_filtered_state_singular_marginal():
    rho = validate_state(np.kron(np.diag([1.0, 0.0]), np.eye(2) / 2), dim_b=2)
    with pytest.raises(SingularMarginal):
        filtered_state(rho)


def test_lorentz_spectrum_bell_diagonal():
    spec = lorentz_spectrum(q_matrix(make_bell_diagonal(0.6, -0.4, 0.2)))
    assert np.allclose(spec, [1.0, 0.36, 0.16, 0.04], atol=1e-12)


def test_lorentz_spectrum_x_state():
    p = XStateParams(0.15, -0.1, 0.45, 0.2, 0.3)
    rho = make_x_state(p)
    e = rho.entries.real
    outer = 2 * (np.sqrt(e[0, 0] * e[3, 3]) + np.sqrt(e[1, 1] * e[2, 2]))
    inner = 2 * (np.sqrt(e[0, 0] * e[3, 3]) - np.sqrt(e[1, 1] * e[2, 2]))
    expected = np.sort([p.s1 ** 2, p.s2 ** 2, outer ** 2, inner ** 2])[::-1]
    assert np.allclose(lorentz_spectrum(q_matrix(rho)), expected, atol=1e-10)


def test_lorentz_spectrum_binary_channel():
    p1 = 0.35
    a = np.array([0.3, -0.2, 0.4])
    b = np.array([-0.5, 0.1, 0.2])
    rho = make_binary_channel(p1, a, b)
    delta = 2 * p1 - 1
    root = np.sqrt((1 - a @ a) * (1 - b @ b))
    lam = [(1 - a @ b + s * root) / 2 for s in (1, -1)]
    expected = np.sort([0, 0, (1 - delta ** 2) * lam[0], (1 - delta ** 2) * lam[1]])[::-1]
    assert np.allclose(lorentz_spectrum(q_matrix(rho)), expected, atol=1e-10)


def test_lorentz_spectrum_complex_rejection():
    # symmetric matrix whose eta-product has eigenvalues ±i/2: not a valid Q
    q = np.zeros((4, 4))
    q[0, 1] = q[1, 0] = 0.5
    with pytest.raises(ComplexSpectrum):
        lorentz_spectrum(q)


def test_t_matrix_forms():
    assert np.allclose(t_matrix(make_bell_diagonal(0.5, -0.3, 0.1)),
                       np.diag([0.5, -0.3, 0.1]), atol=1e-12)
    p = XStateParams(0.2, -0.1, 0.4, 0.15, 0.25)
    rho = make_x_state(p)
    til = filtered_state(rho)
    sq = np.sqrt(1 - p.x ** 2)
    expected = np.diag([p.s1 / sq, p.s2 / sq, (p.s3 - p.x * p.y) / (1 - p.x ** 2)])
    assert np.allclose(t_matrix(til), expected, atol=1e-10)


def test_t_matrix_channel_rank_one():
    rho = make_binary_channel(0.4, [0.1, 0.2, 0.3], [-0.2, 0.4, 0.1])
    til = filtered_state(rho)
    assert np.linalg.matrix_rank(t_matrix(til), tol=1e-10) == 1


def test_ttt_equals_q3x3():
    for seed in range(20):
        til = filtered_state(random_state(2, 1 + seed % 4, seed))
        t = t_matrix(til)
        assert np.abs(t @ t.T - (-q_matrix(til)[1:, 1:])).max() < 1e-10


def test_t1_direction_bell_diagonal():
    rho = make_bell_diagonal(0.6, -0.4, 0.2)
    md = t1_direction(rho, np.zeros(3))
    assert md.t1 == pytest.approx(0.36, abs=1e-12)
    assert np.allclose(np.abs(md.m), [1, 0, 0], atol=1e-12)
    assert np.allclose(md.m, md.e, atol=1e-14)


def test_t1_direction_x_state_axes():
    p = XStateParams(0.2, -0.1, 0.5, 0.2, 0.1)
    rho = make_x_state(p)
    md = t1_direction(filtered_state(rho), bloch_vector(partial_trace(rho, "A")))
    assert np.allclose(np.abs(md.m), [1, 0, 0], atol=1e-10)  # s1 dominant
    p = XStateParams(0.2, -0.1, 0.2, 0.5, 0.1)
    rho = make_x_state(p)
    md = t1_direction(filtered_state(rho), bloch_vector(partial_trace(rho, "A")))
    assert np.allclose(np.abs(md.m), [0, 1, 0], atol=1e-10)  # s2 dominant


def test_t1_direction_coincident_channel_direction():
    # on the coincidence manifold, the derived direction lies along c_-
    p1, p2 = 0.25, 0.75
    a = np.array([0.3, -0.2, 0.5])
    b_sq = 1 - (p1 / p2) ** 2 * (1 - a @ a)
    b = np.sqrt(b_sq) * np.array([0.6, 0.64, -0.48]) / np.linalg.norm([0.6, 0.64, -0.48])
    rho = make_binary_channel(p1, a, b)
    md = t1_direction(filtered_state(rho), bloch_vector(partial_trace(rho, "A")))
    c_minus = p1 * a - p2 * b
    c_minus /= np.linalg.norm(c_minus)
    assert abs(abs(md.m @ c_minus) - 1) < 1e-9


def test_t1_degenerate_tiebreak_is_deterministic():
    rho = make_bell_diagonal(-0.5, -0.5, -0.5)
    md1 = t1_direction(rho, np.zeros(3))
    md2 = t1_direction(rho, np.zeros(3))
    assert np.array_equal(md1.m, md2.m)
    assert abs(np.linalg.norm(md1.m) - 1) < 1e-12
    assert md1.t1 == pytest.approx(0.25, abs=1e-12)


def test_local_unitary_invariance_of_spectrum():
    rng = np.random.default_rng(11)
    for seed in range(10):
        rho = random_state(3, 6, seed)
        spec = lorentz_spectrum(q_matrix(rho))
        rotated = local_rotate(rho, random_unitary(2, rng), random_unitary(3, rng))
        assert np.abs(spec - lorentz_spectrum(q_matrix(rotated))).max() < 1e-9


def test_filter_covariance():
    for seed in range(20):
        rho = random_state(2, 1 + seed % 4, seed + 100)
        x = bloch_vector(partial_trace(rho, "A"))
        q2 = lorentz_spectrum(q_matrix(rho))[1]
        q2_tilde = lorentz_spectrum(q_matrix(filtered_state(rho)))[1]
        assert (1 - float(x @ x)) * q2_tilde == pytest.approx(q2, abs=1e-9)


def test_measurement_direction_unit_norm():
    for seed in range(10):
        rho = random_state(2, 2, seed)
        md = t1_direction(filtered_state(rho), bloch_vector(partial_trace(rho, "A")))
        assert isinstance(md, MeasurementDirection)
        assert abs(np.linalg.norm(md.m) - 1) < 1e-12
        assert md.t1 >= 0
