import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from holevo_recovery.errors import DomainError, LabelMismatch, NotHermitian, ShapeMismatch
from holevo_recovery.numkernel import (
    BipartiteShape,
    hermitian_eig,
    kron,
    matrix_function,
    partial_trace,
    permute_systems,
    polar_unitary,
    psd_inv_sqrt,
    schatten_norm,
)
from holevo_recovery.states import ginibre, max_entangled_vector, random_unitary


def rand_herm(d, rng):
    G = ginibre(d, d, rng)
    return G + G.conj().T


def rand_psd(d, rng):
    G = ginibre(d, d, rng)
    return G @ G.conj().T


def test_eig_diagonal():
    eig = hermitian_eig(np.diag([3.0, 1.0]))
    np.testing.assert_allclose(eig.eigenvalues, [1, 3])
    np.testing.assert_allclose(np.abs(eig.eigenvectors), [[0, 1], [1, 0]])


def test_eig_pauli_x():
    eig = hermitian_eig(np.array([[0, 1], [1, 0]]))
    np.testing.assert_allclose(eig.eigenvalues, [-1, 1], atol=1e-15)
    v_minus, v_plus = eig.eigenvectors.T
    assert abs(abs(np.vdot(v_minus, [1, -1])) / np.sqrt(2) - 1) < 1e-12
    assert abs(abs(np.vdot(v_plus, [1, 1])) / np.sqrt(2) - 1) < 1e-12


def test_eig_reconstruction(rng):
    H = rand_herm(8, rng)
    eig = hermitian_eig(H)
    assert np.all(np.diff(eig.eigenvalues) >= 0)
    U = eig.eigenvectors
    assert np.max(np.abs(U.conj().T @ U - np.eye(8))) < 1e-10
    assert np.max(np.abs(eig.reconstruct() - H)) < 1e-10 * np.linalg.norm(H, 2)


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eig(np.array([[0, 1], [0, 0]]))


def test_matrix_function_examples(rng):
    np.testing.assert_allclose(matrix_function(np.diag([4.0, 9.0]), np.sqrt), np.diag([2, 3]), atol=1e-14)
    np.testing.assert_allclose(psd_inv_sqrt(np.diag([4.0, 0.0])), np.diag([0.5, 0]), atol=1e-14)

    # spectral oracle: build H from a known spectrum and basis
    U = random_unitary(4, 3)
    lam = np.array([0.1, 0.4, 1.3, 2.2])
    H = (U * lam) @ U.conj().T
    out = matrix_function(H, lambda x: x**0.3, psd=True)
    np.testing.assert_allclose(out, (U * lam**0.3) @ U.conj().T, atol=1e-12)


def test_matrix_function_domain_error():
    with pytest.raises(DomainError):
        matrix_function(np.diag([1.0, -0.5]), np.sqrt, psd=True)
    with pytest.raises(DomainError):
        matrix_function(np.diag([1.0, -0.5]), lambda x: x**-0.5, support_only=True)


def test_matrix_function_clips_noise_floor():
    out = matrix_function(np.diag([1.0, -1e-13]), np.sqrt, psd=True)
    np.testing.assert_allclose(out, np.diag([1.0, 0.0]))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 6), p=st.sampled_from([0.3, 0.5, 2.0, -0.5]))
def test_spectral_mapping(seed, d, p):
    rng = np.random.default_rng(seed)
    H = rand_psd(d, rng) + 0.1 * np.eye(d)
    out = matrix_function(H, lambda x: x**p, psd=True)
    lam = np.linalg.eigvalsh(H)
    np.testing.assert_allclose(np.linalg.eigvalsh(out), np.sort(lam**p), rtol=1e-9, atol=1e-9)
    assert np.max(np.abs(out @ H - H @ out)) < 1e-9 * max(1, np.abs(out).max() * np.abs(H).max())


def test_kron_examples(rng):
    np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    np.testing.assert_array_equal(kron(np.diag([1, 2]), np.diag([3, 4])), np.diag([3, 4, 6, 8]))
    A, B, C, D = (ginibre(2, 2, rng) for _ in range(4))
    assert np.max(np.abs(kron(A, B) @ kron(C, D) - kron(A @ C, B @ D))) < 1e-10


def test_kron_matches_loop(rng):
    A, B = ginibre(2, 3, rng), ginibre(3, 2, rng)
    out = np.zeros((6, 6), complex)
    for i, j, k, l in itertools.product(range(2), range(3), range(3), range(2)):
        out[i * 3 + k, j * 2 + l] = A[i, j] * B[k, l]
    np.testing.assert_allclose(kron(A, B), out)


def test_partial_trace_product_and_bell(rng):
    shape = BipartiteShape(2, 3)
    rA, sB = rand_psd(2, rng), rand_psd(3, rng)
    np.testing.assert_allclose(partial_trace(kron(rA, sB), shape, "B"), np.trace(sB) * rA, atol=1e-10)
    np.testing.assert_allclose(partial_trace(kron(rA, sB), shape, "A"), np.trace(rA) * sB, atol=1e-10)
    phi = max_entangled_vector(2) / np.sqrt(2)
    np.testing.assert_allclose(partial_trace(np.outer(phi, phi.conj()), BipartiteShape(2, 2)), np.eye(2) / 2)


def test_partial_trace_index_loop(rng):
    shape = BipartiteShape(2, 3)
    M = ginibre(6, 6, rng)
    expected = np.zeros((2, 2), complex)
    for i, j, b in itertools.product(range(2), range(2), range(3)):
        expected[i, j] += M[i * 3 + b, j * 3 + b]
    out = partial_trace(M, shape)
    np.testing.assert_allclose(out, expected, atol=1e-14)
    assert abs(np.trace(out) - np.trace(M)) < 1e-12


def test_partial_trace_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        partial_trace(np.eye(5), BipartiteShape(2, 2))


def test_permute_identity_and_basis():
    v = np.arange(6, dtype=complex)
    np.testing.assert_array_equal(permute_systems(v, "AB", "AB", [2, 3]), v)
    for i, j in itertools.product(range(2), range(3)):
        e = np.zeros(6)
        e[i * 3 + j] = 1
        out = permute_systems(e, "AB", "BA", [2, 3])
        assert out[j * 2 + i] == 1 and np.sum(np.abs(out)) == 1


def test_permute_gamma_grouping():
    dA, dB = 2, 3
    v = kron(max_entangled_vector(dA), max_entangled_vector(dB))
    out = permute_systems(v, ["A", "a", "B", "b"], ["A", "B", "a", "b"], [dA, dA, dB, dB])
    # componentwise: |a b a' b'> has amplitude [a == a'][b == b']
    expected = np.zeros(dA * dB * dA * dB)
    for a, b in itertools.product(range(dA), range(dB)):
        expected[((a * dB + b) * dA + a) * dB + b] = 1
    np.testing.assert_array_equal(out, expected)
    np.testing.assert_array_equal(out, max_entangled_vector(dA * dB))


def test_permute_involution_matrix(rng):
    M = ginibre(12, 12, rng)
    P = permute_systems(M, "xyz", "zxy", [2, 3, 2])
    back = permute_systems(P, "zxy", "xyz", [2, 2, 3])
    np.testing.assert_array_equal(back, M)
    assert np.isclose(np.linalg.norm(P), np.linalg.norm(M))
    with pytest.raises(LabelMismatch):
        permute_systems(M, "xyz", "xyw", [2, 3, 2])


def test_schatten_examples(rng):
    X = np.diag([1.0, -1.0])
    assert schatten_norm(X, "trace") == pytest.approx(2)
    assert schatten_norm(X, "hilbert_schmidt") == pytest.approx(np.sqrt(2))
    assert schatten_norm(X, "operator") == pytest.approx(1)
    U = random_unitary(5, 1)
    assert schatten_norm(U, "trace") == pytest.approx(5, abs=1e-12)
    assert schatten_norm(U, "operator") == pytest.approx(1, abs=1e-12)
    Y = ginibre(4, 4, rng)
    # independent oracle: trace norm = Tr sqrt(Y^dag Y)
    lam = np.linalg.eigvalsh(Y.conj().T @ Y)
    assert schatten_norm(Y) == pytest.approx(np.sum(np.sqrt(np.clip(lam, 0, None))), rel=1e-12)
    assert schatten_norm(np.zeros((3, 3))) == 0


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 5))
def test_trace_norm_properties(seed, d):
    rng = np.random.default_rng(seed)
    X, Y = ginibre(d, d, rng), ginibre(d, d, rng)
    n1 = schatten_norm(X, "trace")
    assert n1 >= schatten_norm(X, "hilbert_schmidt") - 1e-12 >= schatten_norm(X, "operator") - 2e-12
    assert schatten_norm(X + Y) <= n1 + schatten_norm(Y) + 1e-9
    U, W = random_unitary(d, rng), random_unitary(d, rng)
    assert abs(schatten_norm(U @ X @ W) - n1) < 1e-9


def test_polar_examples(rng):
    np.testing.assert_allclose(polar_unitary(np.diag([2.0, 3.0])), np.eye(2), atol=1e-14)
    np.testing.assert_allclose(polar_unitary(-np.eye(2)), -np.eye(2), atol=1e-14)
    X = ginibre(3, 3, rng)
    U = polar_unitary(X)
    best = abs(np.trace(X @ U.conj().T))
    assert abs(best - schatten_norm(X)) < 1e-9
    sampled = max(abs(np.trace(X @ random_unitary(3, rng).conj().T)) for _ in range(1000))
    assert sampled <= best + 1e-9


def test_polar_rank_deficient():
    X = np.array([[1.0, 0], [0, 0]])
    U = polar_unitary(X)
    assert np.max(np.abs(U.conj().T @ U - np.eye(2))) < 1e-12
    assert abs(np.trace(X @ U.conj().T)) == pytest.approx(1)
