"""Density matrices, tangent vectors and the unfolding map.

A faithful state rho is unfolded into a pair (U, p) with U special unitary
and p the ascending eigenvalue vector, so that rho = U diag(p) U^dagger.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .matcore import (DomainError, DimensionError, as_cmatrix, dagger,
                      hermitize, spectral_decompose)

TRACE_TOL = 1e-12
FAITHFUL_FLOOR = 1e-10
PROB_FLOOR = 1e-12
UNITARY_TOL = 1e-11
DET_TOL = 1e-10


def as_density(rho) -> np.ndarray:
    """Validate a faithful density matrix and return its Hermitian part."""
    rho = hermitize(rho)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise DomainError(f"trace is {tr!r}, expected 1")
    pmin = np.linalg.eigvalsh(rho)[0]
    if pmin <= FAITHFUL_FLOOR:
        raise DomainError(f"state is not faithful (min eigenvalue {pmin:.3e})")
    return rho


def as_tangent(v) -> np.ndarray:
    """Validate a traceless Hermitian matrix."""
    v = hermitize(v)
    tr = np.trace(v).real
    scale = max(1.0, float(np.max(np.abs(v))))
    if abs(tr) > TRACE_TOL * scale:
        raise DomainError(f"tangent vector has trace {tr!r}, expected 0")
    return v


def traceless_part(v) -> np.ndarray:
    v = hermitize(v)
    n = v.shape[0]
    return v - np.trace(v).real / n * np.eye(n)


def as_prob(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise DimensionError("probability vector must be one-dimensional")
    if np.any(p <= PROB_FLOOR):
        raise DomainError("probability vector is not strictly positive")
    if abs(p.sum() - 1.0) > TRACE_TOL:
        raise DomainError(f"probabilities sum to {p.sum()!r}")
    return p


@dataclass(frozen=True)
class UnfoldedPoint:
    U: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        U = as_cmatrix(self.U)
        p = as_prob(self.p)
        if U.shape[0] != p.size:
            raise DimensionError("U and p disagree on dimension")
        if np.max(np.abs(U @ dagger(U) - np.eye(p.size))) > UNITARY_TOL:
            raise DomainError("U is not unitary")
        if abs(np.linalg.det(U) - 1.0) > DET_TOL:
            raise DomainError("det(U) != 1")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "p", p)

    @property
    def dim(self) -> int:
        return self.p.size


@dataclass(frozen=True)
class UnfoldedTangent:
    """Tangent (iH, a) at an unfolded point: H traceless Hermitian, sum(a) = 0."""

    H: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        H = as_tangent(self.H)
        a = np.asarray(self.a, dtype=float)
        if a.ndim != 1 or a.size != H.shape[0]:
            raise DimensionError("H and a disagree on dimension")
        if abs(a.sum()) > TRACE_TOL * max(1.0, float(np.max(np.abs(a), initial=0.0))):
            raise DomainError("simplex direction must sum to zero")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "a", a)

    def __add__(self, other: "UnfoldedTangent") -> "UnfoldedTangent":
        return UnfoldedTangent(self.H + other.H, self.a + other.a)

    def scale(self, s: float) -> "UnfoldedTangent":
        return UnfoldedTangent(s * self.H, s * self.a)


def unfold(rho) -> UnfoldedPoint:
    rho = as_density(rho)
    p, U = spectral_decompose(rho)
    p = p / p.sum()
    return UnfoldedPoint(U, p)


def fold(x: UnfoldedPoint) -> np.ndarray:
    rho = (x.U * x.p) @ dagger(x.U)
    return 0.5 * (rho + dagger(rho))


def tangent_map_pi(x: UnfoldedPoint, t: UnfoldedTangent) -> np.ndarray:
    """U (i[H, diag p] + diag a) U^dagger."""
    d = np.diag(x.p).astype(complex)
    inner = 1j * (t.H @ d - d @ t.H) + np.diag(t.a)
    v = x.U @ inner @ dagger(x.U)
    return 0.5 * (v + dagger(v))


def curve_point(x: UnfoldedPoint, t: UnfoldedTangent, s: float) -> UnfoldedPoint:
    """(U exp(i s H), p + s a)."""
    U = x.U @ expm(1j * s * t.H)
    p = x.p + s * t.a
    if np.any(p <= FAITHFUL_FLOOR):
        raise DomainError("curve left the faithful region")
    return UnfoldedPoint(U, p / p.sum())


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_unitary(n: int, seed=None) -> np.ndarray:
    """Haar-random special unitary from the QR of a complex Ginibre matrix."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = _rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    det = np.linalg.det(q)
    return q * (det / abs(det)) ** (-1.0 / n)


def random_density(n: int, seed=None) -> np.ndarray:
    """rho = G G^dagger / Tr(G G^dagger), resampled until min eigenvalue > 1e-8."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = _rng(seed)
    while True:
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        rho = g @ dagger(g)
        rho = 0.5 * (rho + dagger(rho)) / np.trace(rho).real
        if np.linalg.eigvalsh(rho)[0] > 1e-8:
            return rho


def random_tangent(n: int, seed=None) -> np.ndarray:
    """Traceless Hermitian matrix with Gaussian entries, unit Frobenius norm."""
    rng = _rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    v = traceless_part(0.5 * (g + dagger(g)))
    return v / np.linalg.norm(v)


def random_prob(n: int, seed=None, floor: float = 0.02) -> np.ndarray:
    """Random interior probability vector, sorted ascending, all entries above ``floor``."""
    rng = _rng(seed)
    p = floor + (1 - n * floor) * rng.dirichlet(np.ones(n))
    return np.sort(p)


def random_unfolded_tangent(n: int, seed=None) -> UnfoldedTangent:
    rng = _rng(seed)
    a = rng.standard_normal(n)
    return UnfoldedTangent(random_tangent(n, rng), a - a.mean())


def stratum_dimension(n: int, k: int) -> int:
    """Real dimension 2nk - k^2 - 1 of the rank-k stratum of n-level states."""
    if not 1 <= k <= n:
        raise ValueError(f"rank {k} outside 1..{n}")
    return 2 * n * k - k * k - 1
