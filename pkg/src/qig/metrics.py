"""Petz monotone metrics, closed forms for BH/WY/BKM, Fisher-Rao and the
unfolded pullback split."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .identifications import log_mean
from .matcore import (DomainError, hermitize, powm_pd, spectral_decompose,
                      sqrtm_psd, to_eigenbasis)
from .states import UnfoldedPoint, UnfoldedTangent, as_density, as_tangent, fold, tangent_map_pi

SYMMETRY_GRID = np.logspace(-3, 3, 32)


@dataclass(frozen=True)
class MonotoneFunction:
    """Scalar function labelling a monotone metric.

    ``symmetric`` asserts f(x) = x f(1/x); ``normalized`` asserts f(1) = 1. Both
    flags are checked numerically at construction.
    """

    name: str
    eval: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    symmetric: bool = True
    normalized: bool = True

    def __post_init__(self):
        if self.normalized and abs(float(self(1.0)) - 1.0) > 1e-12:
            raise DomainError(f"{self.name}: f(1) = {float(self(1.0))!r}, flagged normalized")
        if self.symmetric:
            x = SYMMETRY_GRID
            fx = self(x)
            if np.max(np.abs(fx - x * self(1.0 / x)) / np.abs(fx)) > 1e-10:
                raise DomainError(f"{self.name}: f(x) != x f(1/x), flagged symmetric")

    def __call__(self, x):
        return np.asarray(self.eval(np.asarray(x, dtype=float)), dtype=float)

    def mean(self, p: np.ndarray) -> np.ndarray:
        """Matrix of p_k f(p_j / p_k), ratios taken in log space."""
        lp = np.log(p)
        ratio = np.exp(lp[:, None] - lp[None, :])
        return p[None, :] * self(ratio)


def _f_bkm(x):
    x = np.asarray(x, dtype=float)
    u = np.log(x)
    near = np.abs(u) < 1e-6
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(near, 0.0, (x - 1.0) / np.where(near, 1.0, u))
    # (e^u - 1)/u series
    return np.where(near, 1.0 + u / 2 + u * u / 6, out)


BUILTIN_F = {
    "BH": lambda x: (1.0 + x) / 2.0,
    "WY": lambda x: (1.0 + np.sqrt(x)) ** 2 / 4.0,
    "BKM": _f_bkm,
}


def builtin_f(name: str) -> MonotoneFunction:
    try:
        fn = BUILTIN_F[name]
    except KeyError:
        raise ValueError(f"unknown monotone function {name!r}") from None
    return MonotoneFunction(name, fn)


def registry() -> list[MonotoneFunction]:
    return [builtin_f(name) for name in BUILTIN_F]


def _resolve(f) -> MonotoneFunction:
    if isinstance(f, str):
        return builtin_f(f)
    if not (f.symmetric and f.normalized):
        raise DomainError(f"{f.name}: Petz metrics need a symmetric, normalized f")
    return f


def _mean_matrix(f: MonotoneFunction, p: np.ndarray) -> np.ndarray:
    if f.name == "BKM":
        # exact log-mean avoids the 0/0 of (x-1)/ln x at degenerate pairs
        return log_mean(p)
    return f.mean(p)


def petz_metric(f, rho, v, w) -> float:
    """sum_jk conj(v_jk) w_jk / (p_k f(p_j/p_k)) in the eigenbasis of rho."""
    f = _resolve(f)
    rho = as_density(rho)
    v = as_tangent(v)
    w = as_tangent(w)
    p, u = spectral_decompose(rho)
    vt = to_eigenbasis(u, v)
    wt = to_eigenbasis(u, w)
    return float(np.sum(vt.conj() * wt / _mean_matrix(f, p)).real)


def _expect(rho, a) -> float:
    return float(np.trace(rho @ a).real)


def bh_closed(rho, a, b) -> float:
    """Tr(rho {a, b}) - Tr(rho a) Tr(rho b)."""
    rho = as_density(rho)
    a, b = hermitize(a), hermitize(b)
    return _expect(rho, 0.5 * (a @ b + b @ a)) - _expect(rho, a) * _expect(rho, b)


def wy_closed(rho, a, b) -> float:
    """Tr(rho {a, b}) + Tr(sqrt(rho) a sqrt(rho) b) - 2 Tr(rho a) Tr(rho b).

    Against the normalized WY function, petz_metric(WY, S^a, S^b) = 2 * wy_closed(a, b).
    """
    rho = as_density(rho)
    a, b = hermitize(a), hermitize(b)
    s = sqrtm_psd(rho)
    return (_expect(rho, 0.5 * (a @ b + b @ a)) + float(np.trace(s @ a @ s @ b).real)
            - 2.0 * _expect(rho, a) * _expect(rho, b))


WY_CLOSED_FACTOR = 2.0


def bkm_closed(rho, a, b) -> float:
    """int_0^1 Tr(rho^t a rho^(1-t) b) dt - Tr(rho a) Tr(rho b), via the log-mean."""
    rho = as_density(rho)
    a, b = hermitize(a), hermitize(b)
    p, u = spectral_decompose(rho)
    at = to_eigenbasis(u, a)
    bt = to_eigenbasis(u, b)
    integral = float(np.sum(at.T * bt * log_mean(p)).real)
    return integral - _expect(rho, a) * _expect(rho, b)


def bkm_quadrature(rho, a, b, nodes: int = 64) -> float:
    """Gauss-Legendre evaluation of the BKM integral; used as an independent check."""
    rho = as_density(rho)
    a, b = hermitize(a), hermitize(b)
    x, wts = np.polynomial.legendre.leggauss(nodes)
    t = 0.5 * (x + 1.0)
    total = sum(0.5 * wt * np.trace(powm_pd(rho, ti) @ a @ powm_pd(rho, 1 - ti) @ b).real
                for ti, wt in zip(t, wts))
    return float(total) - _expect(rho, a) * _expect(rho, b)


def fisher_rao(p, a, b) -> float:
    p = np.asarray(p, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.sum(a * b / p))


@dataclass(frozen=True)
class PullbackMetricMatrix:
    """Pullback of a Petz metric to SU(n) x simplex in theta/dp coordinates.

    ``theta1``/``theta2`` hold the diagonal coefficients over pairs j<k in
    lexicographic order; the theta3 block is zero and the classical block is
    diag(1/p).
    """

    dim: int
    pairs: list[tuple[int, int]]
    theta1: np.ndarray
    theta2: np.ndarray
    fisher: np.ndarray

    @property
    def theta3(self) -> np.ndarray:
        return np.zeros((self.dim - 1, self.dim - 1))

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "pairs": [[j + 1, k + 1] for j, k in self.pairs],
            "theta1": self.theta1.tolist(),
            "theta2": self.theta2.tolist(),
            "theta3": self.theta3.tolist(),
            "fisher": self.fisher.tolist(),
        }


def _pair_coefficients(f: MonotoneFunction, p: np.ndarray) -> np.ndarray:
    """Matrix c_jk = 2 (p_k - p_j)^2 / (p_k f(p_j/p_k))."""
    dp = p[None, :] - p[:, None]
    return 2.0 * dp**2 / _mean_matrix(f, p)


def pullback_metric(f, x: UnfoldedPoint) -> PullbackMetricMatrix:
    f = _resolve(f)
    n = x.dim
    c = _pair_coefficients(f, x.p)
    pairs = [(j, k) for j in range(n) for k in range(j + 1, n)]
    coeffs = np.array([c[j, k] for j, k in pairs])
    return PullbackMetricMatrix(n, pairs, coeffs, coeffs.copy(), np.diag(1.0 / x.p))


def pullback_quantum_part(f, x: UnfoldedPoint, t1: UnfoldedTangent, t2: UnfoldedTangent) -> float:
    """Unitary contribution sum_{j<k} c_jk (H1 K1 + H2 K2) from theta coordinates."""
    m = pullback_metric(f, x)
    total = 0.0
    for (j, k), c1, c2 in zip(m.pairs, m.theta1, m.theta2):
        h, kk = t1.H[j, k], t2.H[j, k]
        total += c1 * h.real * kk.real + c2 * h.imag * kk.imag
    return float(total)


def pullback_eval(f, x: UnfoldedPoint, t1: UnfoldedTangent, t2: UnfoldedTangent) -> float:
    """Pulled-back Petz metric: quantum (theta1/theta2) part plus Fisher-Rao part."""
    f = _resolve(f)
    return pullback_quantum_part(f, x, t1, t2) + fisher_rao(x.p, t1.a, t2.a)


def pullback_direct(f, x: UnfoldedPoint, t1: UnfoldedTangent, t2: UnfoldedTangent) -> float:
    """Same quantity via tangent_map_pi and petz_metric at the folded state."""
    return petz_metric(f, fold(x), tangent_map_pi(x, t1), tangent_map_pi(x, t2))
