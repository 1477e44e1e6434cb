"""Quantum and classical divergence functions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .matcore import DimensionError, DomainError, dagger, logm_pd, powm_pd, spectral_decompose, sqrtm_psd
from .states import as_density, as_prob


@dataclass(frozen=True)
class GFunction:
    """Label function g of a relative g-entropy.

    Flags are checked at construction: ``vanishing_at_one`` means g(1) = 0,
    ``normalized_curvature`` means g''(1) = 1 (central second difference).
    ``operator_convex`` is trusted metadata.
    """

    name: str
    eval: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    vanishing_at_one: bool = True
    normalized_curvature: bool = True
    operator_convex: bool = False

    def __post_init__(self):
        if self.vanishing_at_one and abs(float(self(1.0))) > 1e-12:
            raise DomainError(f"{self.name}: g(1) = {float(self(1.0))!r}, flagged vanishing")
        if self.normalized_curvature and abs(self.second_derivative_at_one() - 1.0) > 1e-6:
            raise DomainError(f"{self.name}: g''(1) != 1, flagged normalized")

    def __call__(self, x):
        return np.asarray(self.eval(np.asarray(x, dtype=float)), dtype=float)

    def second_derivative_at_one(self, h: float = 1e-4) -> float:
        return float((self(1 + h) - 2 * self(1.0) + self(1 - h)) / h**2)


def _g_bh(x):
    return (1.0 - x) ** 2 / (1.0 + x)


BUILTIN_G = {
    "BKM": lambda x: -np.log(x),
    "BH": _g_bh,
    "WY": lambda x: 4.0 * (1.0 - np.sqrt(x)),
}


def builtin_g(name: str) -> GFunction:
    """Registry of g functions: -ln x, (1-x)^2/(1+x), 4(1 - sqrt x)."""
    try:
        fn = BUILTIN_G[name]
    except KeyError:
        raise ValueError(f"unknown g function {name!r}") from None
    return GFunction(f"g_{name}", fn, operator_convex=True)


def _pair(rho, sigma):
    rho = as_density(rho)
    sigma = as_density(sigma)
    if rho.shape != sigma.shape:
        raise DimensionError("states have different dimensions")
    return rho, sigma


def g_entropy(g: GFunction, rho, sigma) -> float:
    """Relative g-entropy sum_jk g(q_j/p_k) p_k |<k|U^dagger V|j>|^2."""
    rho, sigma = _pair(rho, sigma)
    p, U = spectral_decompose(rho)
    q, V = spectral_decompose(sigma)
    overlap = np.abs(dagger(U) @ V) ** 2  # [k, j]
    lp = np.log(p)
    lq = np.log(q)
    ratio = np.exp(lq[None, :] - lp[:, None])  # [k, j] = q_j / p_k
    return float(np.sum(g(ratio) * p[:, None] * overlap))


def vnu_entropy(rho, sigma) -> float:
    """Tr(rho ln rho - rho ln sigma), computed from the two spectra."""
    rho, sigma = _pair(rho, sigma)
    p, U = spectral_decompose(rho)
    q, V = spectral_decompose(sigma)
    overlap = np.abs(dagger(U) @ V) ** 2
    return float(np.sum(p * np.log(p)) - p @ overlap @ np.log(q))


def bures_fidelity(rho, sigma) -> float:
    """[Tr sqrt(sqrt(rho) sigma sqrt(rho))]^2."""
    rho, sigma = _pair(rho, sigma)
    s = sqrtm_psd(rho)
    w = np.linalg.eigvalsh(s @ sigma @ s)
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))) ** 2)


def bures_divergence(rho, sigma) -> float:
    """2 (1 - sqrt F)."""
    return 2.0 * (1.0 - np.sqrt(bures_fidelity(rho, sigma)))


def alpha_z_renyi(alpha: float, z: float, rho, sigma) -> float:
    """(alpha-1)^-1 log Tr[(rho^(alpha/2z) sigma^((1-alpha)/z) rho^(alpha/2z))^z]."""
    if alpha <= 0 or alpha == 1:
        raise ValueError("alpha must lie in (0,1) or (1,inf); use vnu_entropy for alpha = 1")
    if z <= 0:
        raise ValueError("z must be positive")
    rho, sigma = _pair(rho, sigma)
    r = powm_pd(rho, alpha / (2 * z))
    m = r @ powm_pd(sigma, (1 - alpha) / z) @ r
    w = np.clip(np.linalg.eigvalsh(0.5 * (m + dagger(m))), 0.0, None)
    return float(np.log(np.sum(w**z)) / (alpha - 1))


def petz_renyi(alpha: float, rho, sigma) -> float:
    """z = 1 preset: (alpha-1)^-1 log Tr(rho^alpha sigma^(1-alpha))."""
    if alpha <= 0 or alpha == 1:
        raise ValueError("alpha must lie in (0,1) or (1,inf)")
    rho, sigma = _pair(rho, sigma)
    return float(np.log(np.trace(powm_pd(rho, alpha) @ powm_pd(sigma, 1 - alpha)).real) / (alpha - 1))


def sandwiched_renyi(alpha: float, rho, sigma) -> float:
    """z = alpha preset: (alpha-1)^-1 log Tr[(sigma^((1-a)/2a) rho sigma^((1-a)/2a))^alpha]."""
    if alpha <= 0 or alpha == 1:
        raise ValueError("alpha must lie in (0,1) or (1,inf)")
    rho, sigma = _pair(rho, sigma)
    s = powm_pd(sigma, (1 - alpha) / (2 * alpha))
    m = s @ rho @ s
    w = np.clip(np.linalg.eigvalsh(0.5 * (m + dagger(m))), 0.0, None)
    return float(np.log(np.sum(w**alpha)) / (alpha - 1))


def classical_kl(p, q) -> float:
    p = as_prob(p)
    q = as_prob(q)
    if p.shape != q.shape:
        raise DimensionError("length mismatch")
    return float(np.sum(p * np.log(p) - p * np.log(q)))


def classical_f_div(fconv: Callable[[np.ndarray], np.ndarray], p, q) -> float:
    """sum_j f(p_j / q_j) q_j."""
    p = as_prob(p)
    q = as_prob(q)
    if p.shape != q.shape:
        raise DimensionError("length mismatch")
    return float(np.sum(np.asarray(fconv(p / q)) * q))


@dataclass(frozen=True)
class DivergenceSpec:
    """A named two-point function on faithful states.

    ``is_divergence`` marks functions with S(rho, rho) = 0 and S >= 0;
    ``monotone`` marks those known to contract under CPTP maps.
    """

    name: str
    evaluator: Callable[[np.ndarray, np.ndarray], float] = field(repr=False)
    params: dict = field(default_factory=dict)
    is_divergence: bool = True
    monotone: bool = True

    def __call__(self, rho, sigma) -> float:
        return float(self.evaluator(rho, sigma))


def g_entropy_spec(g: GFunction) -> DivergenceSpec:
    return DivergenceSpec(g.name, lambda r, s: g_entropy(g, r, s), {"g": g.name},
                          monotone=g.operator_convex)


def _registry() -> dict[str, DivergenceSpec]:
    specs = [
        DivergenceSpec("vnu", vnu_entropy),
        DivergenceSpec("bures", bures_divergence),
        *(g_entropy_spec(builtin_g(name)) for name in BUILTIN_G),
        DivergenceSpec("petz_renyi_0.5", lambda r, s: petz_renyi(0.5, r, s), {"alpha": 0.5, "z": 1.0}),
        DivergenceSpec("petz_renyi_1.5", lambda r, s: petz_renyi(1.5, r, s), {"alpha": 1.5, "z": 1.0}),
        DivergenceSpec("sandwiched_renyi_0.75", lambda r, s: sandwiched_renyi(0.75, r, s),
                       {"alpha": 0.75, "z": 0.75}),
        DivergenceSpec("sandwiched_renyi_2", lambda r, s: sandwiched_renyi(2.0, r, s),
                       {"alpha": 2.0, "z": 2.0}),
        DivergenceSpec("alpha_z_0.5_0.8", lambda r, s: alpha_z_renyi(0.5, 0.8, r, s),
                       {"alpha": 0.5, "z": 0.8}),
    ]
    return {s.name: s for s in specs}


REGISTRY = _registry()


def get_divergence(name: str) -> DivergenceSpec:
    try:
        return REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown divergence {name!r}; known: {', '.join(REGISTRY)}") from None
