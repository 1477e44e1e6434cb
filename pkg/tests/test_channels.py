import numpy as np
import pytest

from oracles import partial_trace_second
from qig.channels import (KrausMap, apply_channel, divergence_monotonicity_trial, floor_state,
                          full_depolarizing, identity_channel, metric_monotonicity_trial,
                          partial_trace_channel, random_channel, random_kraus, unitary_channel)
from qig.divergences import REGISTRY
from qig.matcore import DimensionError, DomainError
from qig.metrics import petz_metric, registry
from qig.states import random_density, random_tangent, random_unitary


def random_hermitian(n, rng):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (g + g.conj().T)


def test_kraus_validation():
    with pytest.raises(ValueError):
        KrausMap(())
    with pytest.raises(DomainError):
        KrausMap((2 * np.eye(2),))
    with pytest.raises(DimensionError):
        KrausMap((np.eye(2), np.eye(3)))
    with pytest.raises(DimensionError):
        apply_channel(identity_channel(2), np.eye(3))


def test_identity_channel(rng):
    rho = random_density(3, rng)
    assert np.allclose(apply_channel(identity_channel(3), rho), rho)


def test_unitary_channel(rng):
    rho = random_density(3, rng)
    V = random_unitary(3, rng)
    assert np.allclose(apply_channel(unitary_channel(V), rho), V @ rho @ V.conj().T)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_full_depolarizing(n, rng):
    phi = full_depolarizing(n)
    assert len(phi.kraus_ops) == n * n
    assert np.allclose(apply_channel(phi, random_density(n, rng)), np.eye(n) / n, atol=1e-14)


def test_partial_trace_channel(rng):
    rho = random_density(4, rng)
    assert np.allclose(apply_channel(partial_trace_channel(2, 2), rho), partial_trace_second(rho, 2, 2))


@pytest.mark.parametrize("shape", [(2, 2, 1), (3, 2, 2), (2, 3, 4), (4, 2, 3)])
def test_random_kraus(shape, rng):
    din, dout, k = shape
    phi = random_kraus(din, dout, k, rng)
    assert phi.dim_in == din and phi.dim_out == dout and len(phi.kraus_ops) == k
    comp = sum(K.conj().T @ K for K in phi.kraus_ops)
    assert np.max(np.abs(comp - np.eye(din))) <= 1e-11
    rho = random_density(din, rng)
    out = apply_channel(phi, rho)
    assert abs(np.trace(out) - 1) <= 1e-11
    assert np.linalg.eigvalsh(out).min() >= -1e-14


def test_random_kraus_infeasible():
    with pytest.raises(ValueError):
        random_kraus(4, 2, 1)
    with pytest.raises(ValueError):
        random_kraus(2, 2, 0)


def test_channel_linear_hermiticity_preserving(rng):
    phi = random_kraus(3, 2, 3, rng)
    a, b = random_hermitian(3, rng), random_hermitian(3, rng)
    lhs = apply_channel(phi, 2 * a - 0.3 * b)
    assert np.allclose(lhs, 2 * apply_channel(phi, a) - 0.3 * apply_channel(phi, b))
    assert np.allclose(lhs, lhs.conj().T)


def test_floor_state():
    rho, floored = floor_state(np.diag([0.5, 0.5]))
    assert not floored
    rho, floored = floor_state(np.diag([1.0, 0.0]))
    assert floored
    assert np.linalg.eigvalsh(rho).min() >= 5e-9
    assert np.trace(rho).real == pytest.approx(1.0)


@pytest.mark.parametrize("f", ["BH", "WY", "BKM"])
def test_unitary_margins_vanish(f, rng):
    V = unitary_channel(random_unitary(3, rng))
    rho, v = random_density(3, rng), random_tangent(3, rng)
    assert abs(metric_monotonicity_trial(f, V, rho, v)) <= 1e-10
    sigma = random_density(3, rng)
    for spec in REGISTRY.values():
        assert abs(divergence_monotonicity_trial(spec, V, rho, sigma)) <= 1e-10


def test_partial_trace_margin_positive(rng):
    phi = partial_trace_channel(2, 2)
    for f in registry():
        a, b = random_density(2, rng), random_density(2, rng)
        rho = np.kron(a, b)
        v = np.kron(random_tangent(2, rng), b)
        assert metric_monotonicity_trial(f, phi, 0.9 * rho + 0.1 * random_density(4, rng), v) > 0


@pytest.mark.parametrize("n", [2, 3])
def test_metric_sweep(n, rng):
    worst = min(metric_monotonicity_trial(f, random_channel(n, rng), random_density(n, rng),
                                          random_tangent(n, rng))
                for _ in range(50) for f in registry())
    assert worst >= -1e-8


def test_divergence_sweep(rng):
    for spec in REGISTRY.values():
        worst = min(divergence_monotonicity_trial(spec, random_channel(3, rng), random_density(3, rng),
                                                  random_density(3, rng)) for _ in range(30))
        assert worst >= -1e-9


def test_full_depolarizing_kills_metric(rng):
    rho, v = random_density(3, rng), random_tangent(3, rng)
    m = metric_monotonicity_trial("BH", full_depolarizing(3), rho, v)
    assert m == pytest.approx(petz_metric("BH", rho, v, v), rel=1e-10)


def test_random_channel_shapes(rng):
    for n in (2, 3, 4):
        for _ in range(10):
            phi = random_channel(n, rng)
            assert phi.dim_in == n
            assert 2 <= phi.dim_out <= n
