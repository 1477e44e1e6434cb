"""Dense complex-matrix kernel.

Hermitian algebra, spectral decomposition, Hilbert-Schmidt products,
anticommutator superoperators and the generalized Pauli basis of su(n).
Matrices are plain ``numpy.ndarray`` of dtype complex128.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

HERMITIAN_TOL = 1e-12
SOLVE_TOL = 1e-11

# Pauli matrices. The second one follows sigma_2 = i(|1><2| - |2><1|),
# i.e. it is minus the textbook sigma_y.
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class DomainError(ValueError):
    """A matrix falls outside the domain an operation requires."""


def as_cmatrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a square n x n matrix, got shape {a.shape}")
    return a


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def hermitize(a) -> np.ndarray:
    """Return (a + a^dagger)/2 after checking a is Hermitian within tolerance."""
    a = as_cmatrix(a)
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - dagger(a))) > HERMITIAN_TOL * scale:
        raise DomainError("matrix is not Hermitian")
    return 0.5 * (a + dagger(a))


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt product Tr(a^dagger b)."""
    a = as_cmatrix(a)
    b = as_cmatrix(b)
    _check_same_dim(a, b)
    return complex(np.vdot(a, b))


def spectral_decompose(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and a unitary whose columns are eigenvectors.

    The global phase of the eigenvector matrix is fixed so that its
    determinant equals one.
    """
    a = hermitize(a)
    w, u = np.linalg.eigh(a)
    det = np.linalg.det(u)
    u[:, 0] *= np.conj(det / abs(det))
    return w, u


def matrix_function(a, phi: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a scalar function through the spectral calculus, U phi(L) U^dagger.

    ``phi`` receives the real eigenvalue array. A non-finite result is
    reported as a domain error (e.g. the log of a nonpositive eigenvalue).
    """
    w, u = spectral_decompose(a)
    with np.errstate(all="ignore"):
        fw = np.asarray(phi(w))
    if not np.all(np.isfinite(fw)):
        raise DomainError("spectrum lies outside the domain of the function")
    out = (u * fw) @ dagger(u)
    return 0.5 * (out + dagger(out))


def sqrtm_psd(a) -> np.ndarray:
    return matrix_function(a, lambda w: np.sqrt(np.where(w < 0, np.where(w > -1e-13, 0.0, np.nan), w)))


def logm_pd(a) -> np.ndarray:
    return matrix_function(a, lambda w: np.log(np.where(w > 0, w, np.nan)))


def powm_pd(a, t: float) -> np.ndarray:
    return matrix_function(a, lambda w: np.where(w > 0, w, np.nan) ** t)


def anticomm_super(rho, x) -> np.ndarray:
    """A_rho(x) = (rho x + x rho) / 2."""
    rho = as_cmatrix(rho)
    x = as_cmatrix(x)
    _check_same_dim(rho, x)
    out = 0.5 * (rho @ x + x @ rho)
    return 0.5 * (out + dagger(out))


def to_eigenbasis(u: np.ndarray, x: np.ndarray) -> np.ndarray:
    return dagger(u) @ x @ u


def from_eigenbasis(u: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = u @ x @ dagger(u)
    return 0.5 * (out + dagger(out))


def anticomm_solve(rho, v) -> np.ndarray:
    """Solve A_rho(x) = v by entrywise division by (p_j + p_k)/2 in rho's eigenbasis."""
    rho = as_cmatrix(rho)
    v = as_cmatrix(v)
    _check_same_dim(rho, v)
    p, u = spectral_decompose(rho)
    if p[0] <= SOLVE_TOL:
        raise DomainError(f"rho is not strictly positive (min eigenvalue {p[0]:.3e})")
    vt = to_eigenbasis(u, v)
    return from_eigenbasis(u, vt / (0.5 * (p[:, None] + p[None, :])))


def su_basis_labels(n: int) -> list[tuple[int, int, int]]:
    """(kind, j, k) labels, 1-based, in the basis ordering."""
    if n < 2:
        raise ValueError("su(n) basis needs n >= 2")
    pairs = [(j, k) for j in range(1, n + 1) for k in range(j + 1, n + 1)]
    return ([(1, j, k) for j, k in pairs] + [(2, j, k) for j, k in pairs]
            + [(3, l, l + 1) for l in range(1, n)])


def su_element(n: int, kind: int, j: int, k: int) -> np.ndarray:
    e = np.zeros((n, n), dtype=complex)
    j, k = j - 1, k - 1
    if kind == 1:
        e[j, k] = e[k, j] = 1.0
    elif kind == 2:
        e[j, k] = 1j
        e[k, j] = -1j
    elif kind == 3:
        if k != j + 1:
            raise ValueError("tau3 elements need adjacent indices (l, l+1)")
        e[j, j] = 1.0
        e[k, k] = -1.0
    else:
        raise ValueError(f"unknown basis kind {kind}")
    return e


def su_basis(n: int) -> list[np.ndarray]:
    """The n^2 - 1 generalized Pauli matrices: tau1 pairs, tau2 pairs, tau3 adjacent pairs."""
    return [su_element(n, *lab) for lab in su_basis_labels(n)]


def su_coordinates(h) -> np.ndarray:
    """Real coefficients of a traceless Hermitian h in ``su_basis`` (h = sum c_i e_i)."""
    h = hermitize(h)
    n = h.shape[0]
    basis = su_basis(n)
    gram = np.array([[hs_inner(a, b).real for b in basis] for a in basis])
    rhs = np.array([hs_inner(a, h).real for a in basis])
    return np.linalg.solve(gram, rhs)
