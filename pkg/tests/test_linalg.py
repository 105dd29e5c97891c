import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pmdesd.linalg import (
    JonesVector,
    hermitian_eigenvalues_4x4,
    hermitian_sqrt,
    jacobi_eigh,
    jacobi_singular_values,
    jones_to_stokes,
    kron,
    pauli,
    rotation_to_su2,
    sym_eigenvalues_3x3,
)

from conftest import random_density_matrix, random_unitary

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


# frozen examples


def test_pauli_3_is_diag():
    assert np.array_equal(pauli(3), np.diag([1, -1]))


def test_pauli_1_involution():
    assert np.array_equal(pauli(1) @ pauli(1), np.eye(2))


def test_pauli_2_traceless():
    assert np.trace(pauli(2)) == 0


@pytest.mark.parametrize("n", [0, 4, -1])
def test_pauli_rejects_index(n):
    with pytest.raises(ValueError):
        pauli(n)


def test_pauli_properties():
    for n in (1, 2, 3):
        p = pauli(n)
        assert np.array_equal(p, p.conj().T)
        assert np.array_equal(p @ p, np.eye(2))
        assert np.trace(p) == 0
    assert np.allclose(pauli(1) @ pauli(2), 1j * pauli(3))


def test_kron_examples():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.array_equal(kron(pauli(3), pauli(3)), np.diag([1, -1, -1, 1]))


def test_kron_trace_and_mixed_product(rng):
    a, b, c, d = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(4))
    assert np.isclose(np.trace(kron(a, b)), np.trace(a) * np.trace(b))
    assert np.allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d))
    assert np.allclose(kron(a + 2 * c, b), kron(a, b) + 2 * kron(c, b))


def test_stokes_examples():
    assert np.allclose(jones_to_stokes(JonesVector(1, 0)).array, [0, 0, 1])
    s = 1 / np.sqrt(2)
    assert np.allclose(jones_to_stokes(JonesVector(s, s)).array, [1, 0, 0])


def test_stokes_rejects_unnormalized():
    with pytest.raises(ValueError):
        JonesVector(1.0, 0.1)


@given(st.floats(0, np.pi), st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi))
def test_stokes_unit_antipodal_phase_invariant(theta, phi, g):
    j = JonesVector(np.cos(theta / 2), np.sin(theta / 2) * np.exp(1j * phi))
    s = jones_to_stokes(j).array
    assert abs(np.linalg.norm(s) - 1) < 1e-12
    assert np.allclose(jones_to_stokes(j.orthogonal()).array, -s, atol=1e-12)
    assert np.allclose(jones_to_stokes(j.with_phase(g)).array, s, atol=1e-12)
    assert abs(j.dot(j.orthogonal())) < 1e-15


def test_sym_eig_examples():
    assert np.allclose(sym_eigenvalues_3x3(np.diag([3.0, 1.0, 2.0])), [3, 2, 1])
    assert np.allclose(sym_eigenvalues_3x3(np.zeros((3, 3))), [0, 0, 0])


def test_sym_eig_rejects_asymmetric():
    m = np.arange(9.0).reshape(3, 3)
    with pytest.raises(ValueError):
        sym_eigenvalues_3x3(m)


@given(arrays(float, (3, 3), elements=st.floats(-1, 1)))
def test_sym_eig_gram_matches_cubic_roots(s):
    m = s.T @ s
    w = sym_eigenvalues_3x3(m)
    # characteristic polynomial lambda^3 - c2 lambda^2 + c1 lambda - c0
    c2 = np.trace(m)
    c1 = 0.5 * (c2**2 - np.trace(m @ m))
    with np.errstate(divide="ignore", invalid="ignore"):
        c0 = np.linalg.det(s) ** 2
    roots = np.sort(np.roots([1, -c2, c1, -c0]).real)[::-1]
    scale = max(1.0, c2)
    # cubic roots lose half the digits at double roots; Jacobi does not
    assert np.allclose(w, roots, atol=1e-6 * scale)
    assert np.allclose(w, np.sort(np.linalg.eigvalsh(m))[::-1], atol=1e-12 * scale)
    assert abs(w.sum() - c2) < 1e-10
    assert w.min() >= -1e-10
    assert np.all(np.diff(w) <= 0)


def test_hermitian_examples():
    assert np.allclose(hermitian_eigenvalues_4x4(np.eye(4)), [1, 1, 1, 1])
    assert np.allclose(hermitian_eigenvalues_4x4(np.diag([0.5, 0.5, 0, 0])), [0.5, 0.5, 0, 0])
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(hermitian_eigenvalues_4x4(np.outer(bell, bell)), [1, 0, 0, 0], atol=1e-14)


def test_hermitian_rejects_non_hermitian():
    m = np.zeros((4, 4), complex)
    m[0, 1] = 1j
    with pytest.raises(ValueError):
        hermitian_eigenvalues_4x4(m)


@given(st.integers(0, 2**32 - 1))
def test_hermitian_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = h + h.conj().T
    u = random_unitary(rng, 4)
    w1 = hermitian_eigenvalues_4x4(h)
    w2 = hermitian_eigenvalues_4x4(u @ h @ u.conj().T)
    assert np.allclose(w1, w2, atol=1e-9)
    assert np.allclose(w1, np.sort(np.linalg.eigvalsh(h))[::-1], atol=1e-12 * np.abs(w1).max())
    assert abs(w1.sum() - np.trace(h).real) < 1e-10


def test_jacobi_vectors_reconstruct(rng):
    h = rng.normal(size=(5, 4, 4)) + 1j * rng.normal(size=(5, 4, 4))
    h = h + np.swapaxes(h.conj(), -1, -2)
    w, v = jacobi_eigh(h, vectors=True)
    rebuilt = v @ (w[..., :, None] * np.swapaxes(v.conj(), -1, -2))
    assert np.allclose(rebuilt, h, atol=1e-12)
    assert np.allclose(np.swapaxes(v.conj(), -1, -2) @ v, np.eye(4), atol=1e-12)


def test_jacobi_degenerate_is_deterministic():
    m = np.diag([1.0, 1.0, 0.5])
    w1 = sym_eigenvalues_3x3(m)
    w2 = sym_eigenvalues_3x3(m.copy())
    assert np.array_equal(w1, w2)


def test_singular_values_match_numpy(rng):
    m = rng.normal(size=(20, 4, 4)) + 1j * rng.normal(size=(20, 4, 4))
    np.testing.assert_allclose(jacobi_singular_values(m), np.linalg.svd(m, compute_uv=False), atol=1e-12)


def test_hermitian_sqrt(rng):
    rho = random_density_matrix(rng, rank=2)
    r = hermitian_sqrt(rho)
    assert np.allclose(r @ r, rho, atol=1e-12)
    with pytest.raises(ValueError):
        hermitian_sqrt(-np.eye(4))


@given(st.integers(0, 2**32 - 1))
def test_rotation_to_su2_adjoint_action(seed):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    w = rotation_to_su2(q)
    assert np.allclose(w @ w.conj().T, np.eye(2), atol=1e-12)
    for k in range(3):
        lhs = w @ pauli(k + 1) @ w.conj().T
        rhs = sum(q[n, k] * pauli(n + 1) for n in range(3))
        assert np.allclose(lhs, rhs, atol=1e-12)


def test_rotation_to_su2_rejects_reflection():
    with pytest.raises(ValueError):
        rotation_to_su2(np.diag([1.0, 1.0, -1.0]))
