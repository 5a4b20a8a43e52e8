import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qchan import linalg as L
from qchan.errors import ValidationError

from conftest import rng_of, seeds

PHI = L.pure_state(L.maximally_entangled(2))


def random_hermitian(d, rng):
    Z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (Z + Z.conj().T) / 2


def test_eig_identity():
    lam, V = L.hermitian_eig(np.eye(2))
    assert np.allclose(lam, [1, 1])
    assert np.allclose(V.conj().T @ V, np.eye(2))


def test_eig_diagonal_descending():
    lam, V = L.hermitian_eig(np.diag([3.0, -1.0]))
    assert np.allclose(lam, [3, -1])
    assert np.allclose(np.abs(V), np.eye(2))


def test_eig_pauli_x():
    lam, V = L.hermitian_eig(np.array([[0, 1], [1, 0]]))
    assert np.allclose(lam, [1, -1])
    assert np.isclose(abs(V[:, 0] @ np.array([1, 1]) / np.sqrt(2)), 1)
    assert np.isclose(abs(V[:, 1] @ np.array([1, -1]) / np.sqrt(2)), 1)


def test_eig_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        L.hermitian_eig(np.array([[0, 1], [0, 0]]))


@given(seeds, st.integers(1, 8))
def test_eig_reconstruction(seed, d):
    H = random_hermitian(d, rng_of(seed))
    lam, V = L.hermitian_eig(H)
    assert np.linalg.norm(V @ np.diag(lam) @ V.conj().T - H) <= 1e-10 * max(np.linalg.norm(H), 1)
    assert np.all(np.diff(lam) <= 1e-12)


def test_trace_norm_examples(rng):
    assert L.trace_norm(np.zeros((3, 3))) == 0
    assert np.isclose(L.trace_norm(L.random_density(3, rng)), 1)
    assert np.isclose(L.trace_norm(np.diag([0.75, -0.25, -0.25, -0.25])), 1.5)
    assert np.isclose(L.trace_norm(PHI - np.eye(4) / 4), 1.5)


@given(seeds, st.integers(1, 5))
def test_trace_norm_triangle_and_unitary_invariance(seed, d):
    rng = rng_of(seed)
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    B = random_hermitian(d, rng)
    U, W = L.random_unitary(d, rng), L.random_unitary(d, rng)
    assert L.trace_norm(A + B) <= L.trace_norm(A) + L.trace_norm(B) + 1e-10
    assert np.isclose(L.trace_norm(U @ A @ W), L.trace_norm(A), atol=1e-10)


def test_matrix_power_examples():
    P = np.diag([1.0, 0.0])
    assert np.allclose(L.matrix_power_psd(P, 0.5), P)
    assert np.allclose(L.matrix_power_psd(np.diag([4.0, 0.0]), 0.5), np.diag([2.0, 0.0]))
    psi = L.pure_state([1, 1j])
    assert np.allclose(L.matrix_power_psd(psi, 0.0), psi)
    with pytest.raises(ValidationError):
        L.matrix_power_psd(P, 1.5)
    with pytest.raises(ValidationError):
        L.matrix_power_psd(np.diag([1.0, -1.0]), 0.5)


@given(seeds, st.integers(1, 5), st.floats(0, 1))
def test_matrix_power_properties(seed, d, s):
    rho = L.random_density(d, rng_of(seed), rank=max(1, d - 1))
    assert np.allclose(L.matrix_power_psd(rho, 1.0), rho, atol=1e-10)
    prod = L.matrix_power_psd(rho, s) @ L.matrix_power_psd(rho, 1 - s)
    assert np.isclose(np.trace(prod).real, 1.0, atol=1e-9)


def test_tensor_examples():
    assert np.allclose(L.tensor(np.eye(2), np.eye(2)), np.eye(4))
    assert np.allclose(L.tensor(np.diag([1, 0]), np.diag([0, 1])), np.diag([0, 1, 0, 0]))
    X = np.array([[0, 1], [1, 0]])
    ket00 = np.eye(4)[0]
    assert np.allclose(L.tensor(X, X) @ ket00, np.eye(4)[3])


def test_partial_trace_examples(rng):
    rho, sigma = L.random_density(2, rng), L.random_density(3, rng)
    assert np.allclose(L.partial_trace(np.kron(rho, sigma), (2, 3), keep="A"), rho)
    assert np.allclose(L.partial_trace(np.kron(rho, sigma), (2, 3), keep="B"), sigma)
    assert np.allclose(L.partial_trace(PHI, (2, 2), keep="B"), np.eye(2) / 2)
    lam = 0.3
    psi = np.array([np.sqrt(lam), 0, 0, np.sqrt(1 - lam)])
    assert np.allclose(L.partial_trace(L.pure_state(psi), (2, 2), keep="A"), np.diag([lam, 1 - lam]))
    with pytest.raises(ValidationError):
        L.partial_trace(np.eye(5), (2, 3))


@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_partial_trace_round_trip(seed, da, db):
    rng = rng_of(seed)
    A = rng.normal(size=(da, da)) + 1j * rng.normal(size=(da, da))
    B = rng.normal(size=(db, db)) + 1j * rng.normal(size=(db, db))
    assert np.allclose(L.partial_trace(L.tensor(A, B), (da, db), keep="A"), A * np.trace(B), atol=1e-12)


def test_validation_errors():
    with pytest.raises(ValidationError):
        L.as_matrix([[np.nan]])
    with pytest.raises(ValidationError):
        L.as_square(np.zeros((2, 3)))
    with pytest.raises(ValidationError):
        L.as_density(np.eye(2))
    with pytest.raises(ValidationError):
        L.pure_state([0, 0])
