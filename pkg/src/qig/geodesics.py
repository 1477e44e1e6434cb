"""Fisher-Rao geodesics on the simplex and the universal geodesics they induce
on faithful states.

Geodesy is certified variationally: the energy of the curve is perturbed by
compactly supported bumps along random state-space directions and its first
variation must vanish. Only metric evaluations are needed, so the same test
runs for every monotone metric.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .matcore import DomainError, dagger
from .metrics import petz_metric
from .states import UnfoldedPoint, as_prob, random_tangent

BOUNDARY_FLOOR = 1e-8


def fr_norm(p, a) -> float:
    return float(np.sqrt(np.sum(np.asarray(a) ** 2 / np.asarray(p))))


def _fr_point(p, a, t):
    n = fr_norm(p, a)
    th = 0.5 * t * n
    return (np.cos(th) ** 2 * p + np.sin(th) ** 2 / n**2 * a * a / p
            + np.sin(2 * th) / n * a)


def _fr_velocity(p, a, t):
    n = fr_norm(p, a)
    th = 0.5 * t * n
    # d/dt of the three terms; theta' = n/2
    return (-0.5 * n * np.sin(2 * th) * p + 0.5 * np.sin(2 * th) / n * a * a / p
            + np.cos(2 * th) * a)


def _check_direction(p, a) -> tuple[np.ndarray, np.ndarray]:
    p = as_prob(p)
    a = np.asarray(a, dtype=float)
    if a.shape != p.shape:
        raise ValueError("p and a disagree on dimension")
    if abs(a.sum()) > 1e-12 * max(1.0, np.abs(a).max()):
        raise ValueError("direction must sum to zero")
    if not np.any(a):
        raise ValueError("direction must be nonzero")
    return p, a


def fr_t_max(p, a, floor: float = BOUNDARY_FLOOR) -> float:
    """Largest t such that every p_j stays >= ``floor`` on (-t, t).

    With theta = t|a|/2 each component is (sqrt(p_j) cos theta + u_j sin theta)^2,
    u_j = a_j / (|a| sqrt(p_j)), i.e. R_j^2 cos^2(theta - phi_j); the floor is
    reached where |cos(theta - phi_j)| = sqrt(floor)/R_j.
    """
    p, a = _check_direction(p, a)
    n = fr_norm(p, a)
    A = np.sqrt(p)
    B = a / (n * A)
    R = np.hypot(A, B)
    phi = np.arctan2(B, A)
    reach = np.arccos(np.minimum(np.sqrt(floor) / R, 1.0))
    theta = min(np.min(phi + reach), np.min(reach - phi))
    return float(max(theta, 0.0) * 2.0 / n)


@dataclass(frozen=True)
class FRGeodesic:
    p0: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        p, a = _check_direction(self.p0, self.a)
        object.__setattr__(self, "p0", p)
        object.__setattr__(self, "a", a)

    @property
    def norm(self) -> float:
        return fr_norm(self.p0, self.a)

    @property
    def t_max(self) -> float:
        return fr_t_max(self.p0, self.a)

    def __call__(self, t: float) -> np.ndarray:
        return _fr_point(self.p0, self.a, t)

    def velocity(self, t: float) -> np.ndarray:
        return _fr_velocity(self.p0, self.a, t)


def fr_geodesic(p0, a, t: float) -> np.ndarray:
    """cos^2(t|a|/2) p + sin^2(t|a|/2) a^2/(|a|^2 p) + sin(t|a|) a/|a|, |a| the Fisher-Rao norm."""
    p0, a = _check_direction(p0, a)
    pt = _fr_point(p0, a, t)
    if pt.min() < BOUNDARY_FLOOR:
        raise DomainError(f"geodesic leaves the simplex interior at t={t}")
    return pt


def universal_geodesic(x: UnfoldedPoint, a, t: float) -> np.ndarray:
    """U diag(fr_geodesic(p, a, t)) U^dagger."""
    pt = fr_geodesic(x.p, a, t)
    rho = (x.U * pt) @ dagger(x.U)
    return 0.5 * (rho + dagger(rho))


@dataclass(frozen=True)
class StateCurve:
    """A smooth curve of density matrices with its analytic velocity on [0, T]."""

    position: Callable[[float], np.ndarray]
    velocity: Callable[[float], np.ndarray]
    T: float


def universal_curve(x: UnfoldedPoint, a, T: float, bend: float = 0.0, bend_dir=None) -> StateCurve:
    """Universal geodesic on [0, T]; ``bend`` adds bend*sin(pi t/T)*bend_dir to p(t)."""
    geo = FRGeodesic(x.p, a)
    n = x.dim
    b = np.zeros(n) if bend_dir is None else np.asarray(bend_dir, dtype=float)
    U = x.U

    def pos(t):
        pt = geo(t) + bend * np.sin(np.pi * t / T) * b
        if pt.min() < BOUNDARY_FLOOR:
            raise DomainError("curve leaves the simplex interior")
        return (U * pt) @ dagger(U)

    def vel(t):
        vt = geo.velocity(t) + bend * np.pi / T * np.cos(np.pi * t / T) * b
        return (U * vt) @ dagger(U)

    return StateCurve(pos, vel, T)


def _herm(a):
    return 0.5 * (a + dagger(a))


def _bump(t, c, w):
    """C^1 bump sin^2 on [c - w/2, c + w/2] and its derivative."""
    u = (t - (c - 0.5 * w)) / w
    inside = (u >= 0) & (u <= 1)
    phi = np.where(inside, np.sin(np.pi * u) ** 2, 0.0)
    dphi = np.where(inside, np.pi / w * np.sin(2 * np.pi * u), 0.0)
    return phi, dphi


def curve_energy(f, curve: StateCurve, nodes: int = 64, panels: int = 8) -> float:
    """Composite Gauss-Legendre approximation of int_0^T G_f(gamma', gamma') dt."""
    return _energy(f, curve, 0.0, curve.T, nodes, panels)


def _energy(f, curve, t0, t1, nodes, panels, var=None) -> float:
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(t0, t1, panels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        ts = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        for t, wt in zip(ts, w):
            rho, vel = curve.position(t), curve.velocity(t)
            if var is not None:
                eps, V, c, width = var
                phi, dphi = _bump(t, c, width)
                rho = rho + eps * phi * V
                vel = vel + eps * dphi * V
            total += 0.5 * (hi - lo) * wt * petz_metric(f, _herm(rho), _herm(vel), _herm(vel))
    return total


def energy_residual(f, curve: StateCurve, m: int = 16, width_frac: float = 0.2,
                    eps: float = 1e-4, seed=0, nodes: int = 32, panels: int = 4) -> dict:
    """Maximum first variation of the curve energy over ``m`` bump variations.

    Each variation is phi(t) V with phi a sin^2 bump of width ``width_frac*T``
    at a random center and V a random traceless Hermitian direction scaled so
    that |V|_G matches the curve speed at the bump center. The first variation
    is the central difference of the energy in the variation amplitude.
    """
    rng = np.random.default_rng(seed)
    T = curve.T
    width = width_frac * T
    n = curve.position(0.0).shape[0]
    worst = 0.0
    for _ in range(m):
        c = rng.uniform(0.5 * width, T - 0.5 * width)
        V = random_tangent(n, rng)
        rho_c, vel_c = _herm(curve.position(c)), _herm(curve.velocity(c))
        speed2 = petz_metric(f, rho_c, vel_c, vel_c)
        V = V * np.sqrt(speed2 / petz_metric(f, rho_c, V, V))
        lo, hi = c - 0.5 * width, c + 0.5 * width
        e_plus = _energy(f, curve, lo, hi, nodes, panels, (eps, V, c, width))
        e_minus = _energy(f, curve, lo, hi, nodes, panels, (-eps, V, c, width))
        worst = max(worst, abs(e_plus - e_minus) / (2 * eps))
    energy = curve_energy(f, curve)
    return {"residual": worst, "energy": energy, "relative": worst / energy}


def geodesic_residual(f, x: UnfoldedPoint, a, T: float, m: int = 16, seed=0, **kw) -> dict:
    """energy_residual of the universal geodesic through ``x`` in direction ``a`` on [0, T]."""
    return energy_residual(f, universal_curve(x, a, T), m=m, seed=seed, **kw)


def speed_profile(f, curve: StateCurve, ts, h: float = 1e-5) -> np.ndarray:
    """Squared G_f speed along the curve using central-difference velocities."""
    out = []
    for t in ts:
        vel = _herm((curve.position(t + h) - curve.position(t - h)) / (2 * h))
        vel = vel - np.trace(vel).real / vel.shape[0] * np.eye(vel.shape[0])
        out.append(petz_metric(f, _herm(curve.position(t)), vel, vel))
    return np.array(out)
