import numpy as np
import pytest
from scipy.linalg import expm

from qig.matcore import DimensionError, DomainError
from qig.states import (UnfoldedPoint, UnfoldedTangent, as_density, as_prob, as_tangent, curve_point,
                        fold, random_density, random_prob, random_tangent, random_unfolded_tangent,
                        random_unitary, stratum_dimension, tangent_map_pi, unfold)


def test_density_validation():
    with pytest.raises(DomainError):
        as_density(np.diag([0.5, 0.6]))
    with pytest.raises(DomainError):
        as_density(np.diag([1.0, 0.0]))
    assert np.allclose(as_density(np.eye(3) / 3), np.eye(3) / 3)


def test_tangent_and_prob_validation():
    with pytest.raises(DomainError):
        as_tangent(np.eye(2))
    with pytest.raises(DomainError):
        as_prob([0.5, 0.6])
    with pytest.raises(DomainError):
        as_prob([1.0, 0.0])
    with pytest.raises(DimensionError):
        as_prob([[0.5, 0.5]])


def test_unfolded_point_validation():
    with pytest.raises(DomainError):
        UnfoldedPoint(np.diag([1j, 1j]), [0.5, 0.5])  # det = -1
    with pytest.raises(DomainError):
        UnfoldedPoint(2 * np.eye(2), [0.5, 0.5])
    with pytest.raises(DimensionError):
        UnfoldedPoint(np.eye(3), [0.5, 0.5])
    with pytest.raises(DomainError):
        UnfoldedTangent(np.zeros((2, 2)), [1.0, 1.0])


def test_unfold_maximally_mixed():
    x = unfold(np.eye(2) / 2)
    assert np.allclose(x.p, [0.5, 0.5])
    assert np.allclose(x.U, np.eye(2))


def test_unfold_sorted_diagonal():
    x = unfold(np.diag([0.7, 0.3]))
    assert np.allclose(x.p, [0.3, 0.7])
    assert np.allclose(np.abs(x.U), [[0, 1], [1, 0]])
    assert abs(np.linalg.det(x.U) - 1) < 1e-10


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_fold_unfold_round_trip(n, rng):
    rho = random_density(n, rng)
    x = unfold(rho)
    assert np.max(np.abs(fold(x) - rho)) <= 1e-11
    y = unfold(fold(x))
    assert np.max(np.abs(y.p - x.p)) <= 1e-11


def test_fold_examples(rng):
    p = np.array([0.2, 0.3, 0.5])
    assert np.allclose(fold(UnfoldedPoint(np.eye(3), p)), np.diag(p))
    U = random_unitary(3, rng)
    phases = np.exp(1j * np.array([0.3, -1.1, 0.8]))
    D = np.diag(phases / np.prod(phases) ** (1 / 3))
    assert np.allclose(fold(UnfoldedPoint(U, p)), fold(UnfoldedPoint(U @ D, p)), atol=1e-12)


def test_fold_unitary_covariance(rng):
    p = random_prob(4, rng)
    U, V = random_unitary(4, rng), random_unitary(4, rng)
    lhs = fold(UnfoldedPoint(V @ U, p))
    rhs = V @ fold(UnfoldedPoint(U, p)) @ V.conj().T
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_tangent_map_kernel():
    x = UnfoldedPoint(np.eye(3), [0.2, 0.3, 0.5])
    H = np.diag([1.0, -2.0, 1.0])
    assert np.allclose(tangent_map_pi(x, UnfoldedTangent(H, np.zeros(3))), 0)
    a = np.array([0.1, 0.2, -0.3])
    assert np.allclose(tangent_map_pi(x, UnfoldedTangent(np.zeros((3, 3)), a)), np.diag(a))


def test_tangent_map_nonzero_off_kernel(rng):
    x = UnfoldedPoint(random_unitary(3, rng), [0.2, 0.3, 0.5])
    H = np.zeros((3, 3), complex)
    H[0, 1] = H[1, 0] = 1.0
    assert np.max(np.abs(tangent_map_pi(x, UnfoldedTangent(H, np.zeros(3))))) > 0.05


@pytest.mark.parametrize("n", [2, 4])
def test_tangent_map_finite_difference(n, rng):
    x = UnfoldedPoint(random_unitary(n, rng), random_prob(n, rng, floor=0.1))
    t = random_unfolded_tangent(n, rng)
    exact = tangent_map_pi(x, t)
    errs = []
    for s in (1e-3, 5e-4):
        y = UnfoldedPoint(x.U @ expm(1j * s * t.H), x.p + s * t.a)
        errs.append(np.max(np.abs((fold(y) - fold(x)) / s - exact)))
    # first-order scheme: halving s halves the error
    assert errs[1] < 0.6 * errs[0]
    assert errs[0] < 1e-2


def test_tangent_map_linear(rng):
    x = UnfoldedPoint(random_unitary(3, rng), random_prob(3, rng))
    t1, t2 = random_unfolded_tangent(3, rng), random_unfolded_tangent(3, rng)
    lhs = tangent_map_pi(x, t1.scale(2.0) + t2.scale(-0.5))
    rhs = 2.0 * tangent_map_pi(x, t1) - 0.5 * tangent_map_pi(x, t2)
    assert np.max(np.abs(lhs - rhs)) < 1e-11
    assert abs(np.trace(lhs)) < 1e-12


def test_curve_point_leaves_region():
    x = UnfoldedPoint(np.eye(2), [0.1, 0.9])
    t = UnfoldedTangent(np.zeros((2, 2)), [-1.0, 1.0])
    with pytest.raises(DomainError):
        curve_point(x, t, 0.2)


@pytest.mark.parametrize("n", [1, 2, 3, 7])
def test_random_unitary(n, rng):
    U = random_unitary(n, rng)
    assert np.max(np.abs(U @ U.conj().T - np.eye(n))) <= 1e-11
    assert abs(np.linalg.det(U) - 1) <= 1e-10


def test_random_unitary_column_statistics(rng):
    # for Haar U(n), |U_11|^2 ~ Beta(1, n-1): mean 1/n, variance (n-1)/(n^2 (n+1))
    n = 3
    vals = np.array([abs(random_unitary(n, rng)[0, 0]) ** 2 for _ in range(1000)])
    assert vals.mean() == pytest.approx(1 / n, abs=0.03)
    assert vals.var() == pytest.approx((n - 1) / (n * n * (n + 1)), abs=0.015)


def test_random_unitary_seeded():
    assert np.array_equal(random_unitary(3, 7), random_unitary(3, 7))


@pytest.mark.parametrize("n", [1, 2, 5])
def test_random_density(n, rng):
    rho = random_density(n, rng)
    w = np.linalg.eigvalsh(rho)
    assert abs(np.trace(rho) - 1) < 1e-14
    assert np.all(w > 0)
    assert w.mean() == pytest.approx(1 / n)


def test_random_tangent(rng):
    v = random_tangent(4, rng)
    assert abs(np.trace(v)) < 1e-14
    assert np.linalg.norm(v) == pytest.approx(1)


def test_stratum_dimension():
    for n in range(1, 6):
        assert stratum_dimension(n, n) == n * n - 1
        assert stratum_dimension(n, 1) == 2 * n - 2
    assert stratum_dimension(3, 2) == 7
    with pytest.raises(ValueError):
        stratum_dimension(3, 4)
    with pytest.raises(ValueError):
        stratum_dimension(3, 0)
