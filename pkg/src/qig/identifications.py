"""Jordan, square-root and exponential identifications of tangent vectors.

Each identification maps a Hermitian parameter ``a`` to a traceless tangent
vector at rho. In the eigenbasis of rho every one of them acts entrywise,
a_jk -> d_jk a_jk, followed by subtraction of Tr(rho a) rho; the solves divide
by the same weights. The solves return the representative with Tr(rho a) = 0.
"""
from __future__ import annotations

import numpy as np

from .matcore import (DomainError, SOLVE_TOL, from_eigenbasis, hermitize,
                      spectral_decompose, to_eigenbasis)
from .states import as_density, as_tangent

DEGENERACY_TOL = 1e-9


def log_mean(p: np.ndarray) -> np.ndarray:
    """Matrix of (p_j - p_k) / (ln p_j - ln p_k), with value p_j on the diagonal.

    Near-degenerate pairs use the series
    sqrt(p_j p_k) * (1 + u^2/24 + u^4/1920), u = ln p_j - ln p_k.
    """
    p = np.asarray(p, dtype=float)
    lp = np.log(p)
    du = lp[:, None] - lp[None, :]
    dp = p[:, None] - p[None, :]
    near = np.abs(dp) < DEGENERACY_TOL * p.max()
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(near, 0.0, dp / du)
    gm = np.sqrt(p[:, None] * p[None, :])
    series = gm * (1.0 + du**2 / 24.0 + du**4 / 1920.0)
    return np.where(near, series, out)


def _weights(kind: str, p: np.ndarray) -> np.ndarray:
    if kind == "jordan":
        return 0.5 * (p[:, None] + p[None, :])
    if kind == "sqrt":
        s = np.sqrt(p)
        return 0.5 * (s[:, None] + s[None, :]) ** 2
    if kind == "exp":
        return log_mean(p)
    raise ValueError(f"unknown identification {kind!r}")


def _forward(kind: str, rho, a) -> np.ndarray:
    rho = as_density(rho)
    a = hermitize(a)
    p, u = spectral_decompose(rho)
    at = to_eigenbasis(u, a)
    # sqrt weights already double the diagonal, hence the factor 2 on the trace term
    shift = 2.0 if kind == "sqrt" else 1.0
    at = at * _weights(kind, p) - shift * np.trace(rho @ a).real * np.diag(p)
    return from_eigenbasis(u, at)


def _solve(kind: str, rho, v) -> np.ndarray:
    rho = as_density(rho)
    v = as_tangent(v)
    p, u = spectral_decompose(rho)
    if p[0] <= SOLVE_TOL:
        raise DomainError("rho is singular")
    return from_eigenbasis(u, to_eigenbasis(u, v) / _weights(kind, p))


def jordan_forward(rho, a) -> np.ndarray:
    """J_rho^a = {rho, a} - Tr(a rho) rho, with {x, y} = (xy + yx)/2."""
    return _forward("jordan", rho, a)


def jordan_solve(rho, v) -> np.ndarray:
    return _solve("jordan", rho, v)


def sqrt_forward(rho, a) -> np.ndarray:
    """S_rho^a = {rho, a} + sqrt(rho) a sqrt(rho) - 2 Tr(a rho) rho."""
    return _forward("sqrt", rho, a)


def sqrt_solve(rho, v) -> np.ndarray:
    return _solve("sqrt", rho, v)


def exp_forward(rho, a) -> np.ndarray:
    """E_rho^a = int_0^1 rho^t a rho^(1-t) dt - Tr(rho a) rho."""
    return _forward("exp", rho, a)


def exp_solve(rho, v) -> np.ndarray:
    return _solve("exp", rho, v)


_GRADIENT = {"BH": jordan_forward, "WY": sqrt_forward, "BKM": exp_forward}


def gradient_field(kind: str, rho, a) -> np.ndarray:
    """Gradient field of the linear function Tr(rho a): Y_a (BH), W_a (WY), Z_a (BKM)."""
    try:
        return _GRADIENT[kind](rho, a)
    except KeyError:
        raise ValueError(f"unknown gradient field kind {kind!r}") from None


def unitary_field(rho, b) -> np.ndarray:
    """X_b(rho) = (i/2)(b rho - rho b)."""
    rho = hermitize(rho)
    b = hermitize(b)
    out = 0.5j * (b @ rho - rho @ b)
    return 0.5 * (out + out.conj().T)
