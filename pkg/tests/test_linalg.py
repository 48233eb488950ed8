import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from cumulant_dynamics.linalg import (NotHermitianError, NotPSDError, apply_super,
                                      check_hermitian, choi_of, commutator_super,
                                      dissipator_super, hermitian_eig, is_cptp, matrix_exp,
                                      partial_trace_output, psd_sqrt, spost, spre,
                                      trace_defect_super, unvec, vec)
from oracles import taylor_exp


def random_matrix(rng, d):
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))


def random_psd(rng, d, rank=None):
    X = random_matrix(rng, d)[:, :rank or d]
    return X @ X.conj().T


def test_vec_is_column_stacking():
    X = np.arange(4).reshape(2, 2)
    np.testing.assert_array_equal(vec(X), [0, 2, 1, 3])
    np.testing.assert_array_equal(unvec(vec(X)), X)


def test_vec_of_product_identity():
    rng = np.random.default_rng(0)
    A, X, B = (random_matrix(rng, 3) for _ in range(3))
    np.testing.assert_allclose(spre(A) @ spost(B) @ vec(X), vec(A @ X @ B), atol=1e-12)


def test_dissipator_matches_operator_form():
    rng = np.random.default_rng(1)
    A, B = random_matrix(rng, 3), random_matrix(rng, 3)
    rho = random_psd(rng, 3)
    BdA = B.conj().T @ A
    expected = A @ rho @ B.conj().T - 0.5 * (BdA @ rho + rho @ BdA)
    np.testing.assert_allclose(apply_super(dissipator_super(A, B), rho), expected, atol=1e-12)


def test_dissipator_and_commutator_annihilate_trace():
    rng = np.random.default_rng(2)
    A, B = random_matrix(rng, 4), random_matrix(rng, 4)
    H = random_matrix(rng, 4)
    H = H + H.conj().T
    assert trace_defect_super(dissipator_super(A, B)) < 1e-12
    assert trace_defect_super(commutator_super(H)) < 1e-12


def test_commutator_super():
    H = np.diag([1.0, -1.0]).astype(complex)
    rho = np.full((2, 2), 0.5, dtype=complex)
    np.testing.assert_allclose(apply_super(commutator_super(H), rho),
                               -1j * (H @ rho - rho @ H))


def test_psd_sqrt_examples():
    np.testing.assert_allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    np.testing.assert_allclose(psd_sqrt(np.zeros((2, 2))), np.zeros((2, 2)))
    # rank one: sqrt(v v^T) = v v^T / |v|
    v = np.array([1.0, 1.0])
    np.testing.assert_allclose(psd_sqrt(np.outer(v, v)), np.outer(v, v) / np.sqrt(2), atol=1e-15)


def test_psd_sqrt_clamps_roundoff_and_rejects_negative():
    R = np.diag([1.0, -1e-14])
    np.testing.assert_allclose(psd_sqrt(R), np.diag([1.0, 0.0]))
    with pytest.raises(NotPSDError):
        psd_sqrt(np.diag([1.0, -0.1]))
    with pytest.raises(NotHermitianError):
        psd_sqrt(np.array([[1.0, 1.0], [0.0, 1.0]]))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 5), rank=st.integers(1, 5))
def test_psd_sqrt_squares_back(seed, d, rank):
    rng = np.random.default_rng(seed)
    R = random_psd(rng, d, min(rank, d))
    S = psd_sqrt(R)
    np.testing.assert_allclose(S @ S, R, atol=1e-10 * max(1.0, np.linalg.norm(R)))
    assert np.linalg.eigvalsh(S)[0] >= -1e-12


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))
    w, V = hermitian_eig(np.diag([2.0, 1.0]))
    np.testing.assert_allclose(w, [1.0, 2.0])


def test_check_hermitian_shape_errors():
    with pytest.raises(ValueError):
        check_hermitian(np.zeros((2, 3)))


def test_matrix_exp_agrees_with_taylor_series():
    rng = np.random.default_rng(3)
    M = 0.5 * random_matrix(rng, 4)
    np.testing.assert_allclose(matrix_exp(M), taylor_exp(M), atol=1e-12)
    np.testing.assert_allclose(matrix_exp(np.zeros((3, 3))), np.eye(3))


def test_choi_of_identity_map_is_unnormalised_bell_projector():
    J = choi_of(np.eye(4))
    phi = np.zeros(4)
    phi[0] = phi[3] = 1.0
    np.testing.assert_allclose(J, np.outer(phi, phi))
    np.testing.assert_allclose(partial_trace_output(J, 2), np.eye(2))


def test_is_cptp_examples():
    assert is_cptp(np.eye(4)).is_cptp
    # transpose map: positive but not completely positive
    T = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            T[j + 2 * i, i + 2 * j] = 1.0
    rep = is_cptp(T)
    assert not rep and rep.min_eigenvalue == pytest.approx(-1.0)
    # amplitude damping channel
    g = 0.3
    K0 = np.array([[1, 0], [0, np.sqrt(1 - g)]])
    K1 = np.array([[0, np.sqrt(g)], [0, 0]])
    S = np.kron(K0.conj(), K0) + np.kron(K1.conj(), K1)
    assert is_cptp(S)
    # not trace preserving
    rep = is_cptp(0.9 * np.eye(4))
    assert not rep and rep.trace_defect > 0.1


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 4), t=st.floats(0.0, 5.0))
def test_exp_of_gksl_generator_is_cptp(seed, d, t):
    rng = np.random.default_rng(seed)
    ops = [random_matrix(rng, d) for _ in range(2)]
    G = random_psd(rng, 2)
    H = random_matrix(rng, d)
    L = commutator_super(H + H.conj().T)
    for a in range(2):
        for b in range(2):
            L = L + G[a, b] * dissipator_super(ops[a], ops[b])
    S = matrix_exp(0.2 * t * L)
    assert is_cptp(S, tol=1e-8)


def test_exp_of_non_gksl_generator_fails_cptp():
    A = np.array([[0, 0], [1, 0]], dtype=complex)
    S = scipy.linalg.expm(-1.0 * dissipator_super(A, A))
    assert not is_cptp(S)
