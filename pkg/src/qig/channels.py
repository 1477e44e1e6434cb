"""CPTP maps in Kraus form and randomized monotonicity trials."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matcore import DimensionError, DomainError, dagger
from .metrics import petz_metric
from .states import _rng, random_unitary

COMPLETENESS_TOL = 1e-11
OUTPUT_FLOOR = 1e-8


@dataclass(frozen=True)
class KrausMap:
    """Channel a -> sum_k K_k a K_k^dagger; each K_k is dim_out x dim_in."""

    kraus_ops: tuple

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus_ops)
        if not ops:
            raise ValueError("a Kraus map needs at least one operator")
        shape = ops[0].shape
        if any(k.ndim != 2 or k.shape != shape for k in ops):
            raise DimensionError("Kraus operators must share one 2-d shape")
        resid = np.max(np.abs(sum(dagger(k) @ k for k in ops) - np.eye(shape[1])))
        if resid > COMPLETENESS_TOL:
            raise DomainError(f"completeness violated by {resid:.3e}")
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def dim_in(self) -> int:
        return self.kraus_ops[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus_ops[0].shape[0]

    def __call__(self, a) -> np.ndarray:
        return apply_channel(self, a)


def apply_channel(phi: KrausMap, a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.shape != (phi.dim_in, phi.dim_in):
        raise DimensionError(f"channel expects {phi.dim_in}x{phi.dim_in}, got {a.shape}")
    out = sum(k @ a @ dagger(k) for k in phi.kraus_ops)
    return 0.5 * (out + dagger(out))


def random_kraus(dim_in: int, dim_out: int, n_kraus: int, seed=None) -> KrausMap:
    """Slice a Haar isometry C^dim_in -> C^(dim_out*n_kraus) into Kraus blocks."""
    if n_kraus < 1 or dim_in < 1 or dim_out < 1:
        raise ValueError("dimensions and Kraus count must be positive")
    if dim_out * n_kraus < dim_in:
        raise ValueError("dim_out * n_kraus must be at least dim_in for an isometry")
    rng = _rng(seed)
    m = dim_out * n_kraus
    z = rng.standard_normal((m, dim_in)) + 1j * rng.standard_normal((m, dim_in))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return KrausMap(tuple(q[i * dim_out:(i + 1) * dim_out] for i in range(n_kraus)))


def identity_channel(n: int) -> KrausMap:
    return KrausMap((np.eye(n),))


def unitary_channel(v) -> KrausMap:
    return KrausMap((np.asarray(v, dtype=complex),))


def full_depolarizing(n: int) -> KrausMap:
    """Weyl operators X^a Z^b / n, a, b in Z_n; sends every state to I/n."""
    w = np.exp(2j * np.pi / n)
    shift = np.roll(np.eye(n), 1, axis=0)
    clock = np.diag(w ** np.arange(n))
    ops = [np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b) / n
           for a in range(n) for b in range(n)]
    return KrausMap(tuple(ops))


def partial_trace_channel(d_keep: int, d_traced: int) -> KrausMap:
    """Trace out the second tensor factor: Kraus operators I (x) <i|."""
    ops = []
    for i in range(d_traced):
        bra = np.zeros((1, d_traced))
        bra[0, i] = 1.0
        ops.append(np.kron(np.eye(d_keep), bra))
    return KrausMap(tuple(ops))


def floor_state(rho, floor: float = OUTPUT_FLOOR) -> tuple[np.ndarray, bool]:
    """Mix with floor*I/n when the spectrum dips below ``floor``; report whether it did."""
    n = rho.shape[0]
    if np.linalg.eigvalsh(rho)[0] >= floor:
        return rho, False
    out = (1 - floor) * rho + floor * np.eye(n) / n
    return out / np.trace(out).real, True


def _traceless(v):
    n = v.shape[0]
    return v - np.trace(v).real / n * np.eye(n)


def metric_monotonicity_trial(f, phi: KrausMap, rho, v) -> float:
    """G_f(rho; v, v) - G_f(phi(rho); phi(v), phi(v))."""
    out, _ = floor_state(apply_channel(phi, rho))
    pushed = _traceless(apply_channel(phi, v))
    return petz_metric(f, rho, v, v) - petz_metric(f, out, pushed, pushed)


def divergence_monotonicity_trial(S, phi: KrausMap, rho, sigma) -> float:
    """S(rho, sigma) - S(phi(rho), phi(sigma))."""
    r, _ = floor_state(apply_channel(phi, rho))
    s, _ = floor_state(apply_channel(phi, sigma))
    return S(rho, sigma) - S(r, s)


def random_channel(n: int, seed=None, max_kraus: int = 4, max_out: int | None = None) -> KrausMap:
    """Random channel from n-level input; output dimension in 2..max_out, Kraus count 1..max_kraus."""
    rng = _rng(seed)
    max_out = n if max_out is None else max_out
    dim_out = int(rng.integers(2, max_out + 1)) if max_out > 2 else 2
    lo = -(-n // dim_out)
    k = int(rng.integers(lo, max(lo, max_kraus) + 1))
    return random_kraus(n, dim_out, k, rng)


def random_unitary_channel(n: int, seed=None) -> KrausMap:
    return unitary_channel(random_unitary(n, seed))
