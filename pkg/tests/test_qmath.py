import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcond.errors import DomainError, ValidationError
from qcond.qmath import (PAULI_X, bloch_to_density, density_to_bloch, hermitian_eigenvalues,
                         hermitian_eigh, random_bloch, random_density, random_hermitian,
                         validate_density)


def test_eigenvalue_examples():
    assert np.allclose(hermitian_eigenvalues(np.eye(2)), [1, 1])
    assert np.allclose(hermitian_eigenvalues(np.diag([0.3, 0.7])), [0.3, 0.7])
    assert np.allclose(hermitian_eigenvalues(PAULI_X), [-1, 1])


def test_eigenvalues_reject_non_hermitian():
    with pytest.raises(ValidationError):
        hermitian_eigenvalues(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValidationError):
        hermitian_eigenvalues(np.ones((2, 3)))


@pytest.mark.parametrize("dim", [2, 3, 5, 8])
def test_trace_and_reconstruction(dim, rng):
    for _ in range(10):
        m = random_hermitian(dim, rng)
        w = hermitian_eigenvalues(m)
        assert np.all(np.diff(w) >= 0)
        assert abs(w.sum() - np.trace(m).real) < 1e-9
        w2, v = hermitian_eigh(m)
        assert np.max(np.abs(v @ np.diag(w2) @ v.conj().T - m)) <= 1e-9


def test_bloch_examples():
    assert np.allclose(bloch_to_density([0, 0, 0]), np.eye(2) / 2)
    assert np.allclose(bloch_to_density([0, 0, 1]), np.diag([1, 0]))
    with pytest.raises(DomainError):
        bloch_to_density([0, 0, 1.5])
    assert np.allclose(density_to_bloch(np.eye(2) / 2), 0)
    assert np.allclose(density_to_bloch(np.diag([1, 0])), [0, 0, 1])
    assert np.allclose(density_to_bloch((np.eye(2) + 0.4 * PAULI_X) / 2), [0.4, 0, 0])
    with pytest.raises(DomainError):
        density_to_bloch(np.eye(3) / 3)


def test_bloch_spectrum(rng):
    for _ in range(100):
        v = random_bloch(rng)
        n = np.linalg.norm(v)
        w = hermitian_eigenvalues(bloch_to_density(v))
        assert np.allclose(w, [(1 - n) / 2, (1 + n) / 2], atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=3, max_size=3))
def test_bloch_roundtrip(v):
    v = np.array(v)
    if np.linalg.norm(v) > 1:
        v = v / np.linalg.norm(v)
    rho = bloch_to_density(v)
    assert np.max(np.abs(bloch_to_density(density_to_bloch(rho)) - rho)) <= 1e-12


def test_validate_density(rng):
    validate_density(random_density(4, rng))
    with pytest.raises(ValidationError):
        validate_density(np.eye(2))
    with pytest.raises(ValidationError):
        validate_density(np.diag([1.5, -0.5]))
