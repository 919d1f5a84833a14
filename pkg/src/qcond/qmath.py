"""Small dense complex linear algebra: Hermitian spectra, density matrices, Bloch vectors.

Matrices are plain ``numpy`` arrays. Spectra come from the cyclic Jacobi
kernel in :mod:`qcond.kernels`, not from LAPACK.
"""
import numpy as np

from . import constants as C
from . import kernels
from .errors import DomainError, NumericalFailure, ValidationError

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = np.stack([PAULI_X, PAULI_Y, PAULI_Z])
IDENTITY2 = np.eye(2, dtype=np.complex128)


def as_square(m):
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValidationError(f"expected a non-empty square matrix, got shape {m.shape}")
    return m


def hermitian_defect(m):
    """Largest entrywise deviation ``|m_ij - conj(m_ji)|``."""
    m = np.asarray(m)
    return float(np.max(np.abs(m - np.conj(np.swapaxes(m, -1, -2))))) if m.size else 0.0


def _check_hermitian(m, tol):
    defect = hermitian_defect(m)
    if defect > tol:
        raise ValidationError(f"matrix is not Hermitian (defect {defect:.3e} > {tol:.1e})")


def _diagonalise(stack, want_vectors):
    w, v, sweeps = kernels.jacobi_eigh_batch(
        stack, C.JACOBI_OFF_TOL, C.JACOBI_MAX_SWEEPS, want_vectors
    )
    if np.any(sweeps < 0):
        raise NumericalFailure("Jacobi iteration did not converge", sweeps=sweeps)
    return w, v


def hermitian_eigenvalues(m):
    """Ascending eigenvalues of a Hermitian matrix.

    >>> hermitian_eigenvalues(PAULI_X)
    array([-1.,  1.])
    """
    m = as_square(m)
    _check_hermitian(m, C.HERMITIAN_TOL)
    w, _ = _diagonalise(m[None], False)
    return np.sort(w[0])


def hermitian_eigh(m):
    """Ascending eigenvalues and matching orthonormal eigenvector columns."""
    m = as_square(m)
    _check_hermitian(m, C.HERMITIAN_TOL)
    w, v = _diagonalise(m[None], True)
    order = np.argsort(w[0])
    return w[0][order], v[0][:, order]


def eigvalsh_batch(stack):
    """Ascending eigenvalues for a stack (k, n, n); no validation."""
    stack = np.asarray(stack, dtype=np.complex128)
    w, _ = _diagonalise(stack, False)
    return np.sort(w, axis=-1)


def validate_density(rho):
    """Return ``rho`` as a complex array after checking the density-matrix invariants."""
    rho = as_square(rho)
    _check_hermitian(rho, C.DENSITY_HERMITIAN_TOL)
    tr = np.trace(rho)
    if abs(tr - 1.0) > C.DENSITY_TRACE_TOL:
        raise ValidationError(f"trace {tr.real:.15g} differs from 1")
    w, _ = _diagonalise(rho[None], False)
    if w.min() < C.DENSITY_EIG_FLOOR:
        raise ValidationError(f"negative eigenvalue {w.min():.3e}")
    return rho


def clip_spectrum(w):
    """Clip round-off negatives to 0 and cap at 1 before taking logs."""
    return np.clip(np.asarray(w, dtype=float), 0.0, 1.0)


def bloch_to_density(v):
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValidationError("Bloch vector must have 3 components")
    norm = np.linalg.norm(v)
    if norm > 1.0 + C.BLOCH_NORM_SLACK:
        raise DomainError(f"Bloch vector norm {norm:.15g} exceeds 1")
    return 0.5 * (IDENTITY2 + np.tensordot(v, PAULIS, axes=1))


def density_to_bloch(rho):
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (2, 2):
        raise DomainError(f"Bloch representation needs a qubit, got shape {rho.shape}")
    return np.real(np.einsum("kij,ji->k", PAULIS, rho))


def bloch_to_density_batch(vs):
    vs = np.asarray(vs, dtype=float)
    return 0.5 * (IDENTITY2 + np.einsum("...k,kij->...ij", vs, PAULIS))


def random_bloch(rng, radius=1.0):
    """Uniform point in the ball of the given radius."""
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    return v * radius * rng.random() ** (1.0 / 3.0)


def random_density(dim, rng, rank=None):
    """Random density matrix ``G G^† / tr`` with ``G`` complex Gaussian (dim × rank)."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(dim, rng):
    a = rng.uniform(-1, 1, size=(dim, dim)) + 1j * rng.uniform(-1, 1, size=(dim, dim))
    return 0.5 * (a + a.conj().T)


def projector(psi):
    psi = np.asarray(psi, dtype=np.complex128)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())
