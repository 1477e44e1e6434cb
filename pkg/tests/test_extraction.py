import numpy as np
import pytest

from qig.channels import apply_channel, random_kraus
from qig.divergences import (REGISTRY, DivergenceSpec, GFunction, builtin_g, classical_kl,
                             g_entropy_spec, get_divergence)
from qig.extraction import (ExtractionReport, check_potential, extract_classical, extract_from_curves,
                            extract_tensor, f_from_g, first_derivative, is_potential, mixed_derivative,
                            unfolded_curve, unfolded_surface, verify_correspondence)
from qig.matcore import DomainError
from qig.metrics import builtin_f, fisher_rao, petz_metric, pullback_direct, pullback_eval
from qig.states import (UnfoldedPoint, UnfoldedTangent, fold, random_prob, random_unfolded_tangent,
                        random_unitary, tangent_map_pi)

GRID = np.logspace(-3, 3, 32)

KL_SPEC = DivergenceSpec("kl_diag", lambda r, s: classical_kl(np.diag(r).real, np.diag(s).real))
BROKEN = DivergenceSpec("overlap", lambda r, s: float(np.trace(r @ s).real), is_divergence=False)


def point(n, rng, floor=0.05):
    return UnfoldedPoint(random_unitary(n, rng), random_prob(n, rng, floor=floor))


def test_finite_difference_helpers():
    assert first_derivative(np.sin, 1e-3) == pytest.approx(1.0, abs=1e-12)
    assert first_derivative(np.exp, 1e-3, richardson=2) == pytest.approx(1.0, abs=1e-12)
    assert mixed_derivative(lambda s, t: np.sin(s) * np.exp(2 * t), 1e-3) == pytest.approx(2.0, abs=1e-10)


def test_step_range():
    x = UnfoldedPoint(np.eye(2), [0.5, 0.5])
    t = UnfoldedTangent(np.zeros((2, 2)), [0.5, -0.5])
    for h in (1e-6, 0.1):
        with pytest.raises(ValueError):
            check_potential(get_divergence("vnu"), x, t, h)


def test_curve_realizes_tangent(rng):
    x = point(3, rng)
    t = random_unfolded_tangent(3, rng)
    c = unfolded_curve(x, t)
    assert np.allclose(c(0.0), fold(x))
    h = 1e-5
    fd = (c(h) - c(-h)) / (2 * h)
    assert np.max(np.abs(fd - tangent_map_pi(x, t))) < 1e-8
    s = unfolded_surface(x, t, t)
    assert np.allclose(s(0.0, 0.0), fold(x))


def test_kl_potential_on_simplex():
    x = UnfoldedPoint(np.eye(3), [0.2, 0.3, 0.5])
    t = UnfoldedTangent(np.zeros((3, 3)), [0.3, -0.1, -0.2])
    res = check_potential(KL_SPEC, x, t, 1e-3)
    assert is_potential(res)
    assert max(map(abs, res)) <= 10 * 1e-3**2


@pytest.mark.parametrize("n", [2, 3, 4])
def test_vnu_potential(n, rng):
    x = point(n, rng)
    res = check_potential(get_divergence("vnu"), x, random_unfolded_tangent(n, rng))
    assert max(map(abs, res)) <= 1e-8


def test_broken_divergence_flagged(rng):
    x = point(3, rng)
    t = random_unfolded_tangent(3, rng)
    left, right = check_potential(BROKEN, x, t)
    # analytic derivative Tr(v sigma), v = T pi(t)
    v = tangent_map_pi(x, t)
    assert left == pytest.approx(np.trace(v @ fold(x)).real, abs=1e-10)
    assert not is_potential((left, right))


@pytest.mark.parametrize("a,expected", [([0.5, -0.5], 1.0), ([1.0, -1.0], 4.0)])
def test_kl_extraction_examples(a, expected):
    x = UnfoldedPoint(np.eye(2), [0.5, 0.5])
    t = UnfoldedTangent(np.zeros((2, 2)), a)
    assert extract_tensor(KL_SPEC, x, t, t).value == pytest.approx(expected, abs=1e-8)
    assert extract_tensor(get_divergence("vnu"), x, t, t).value == pytest.approx(expected, abs=1e-8)


def test_classical_kl_hessian_entries():
    p = np.array([0.1, 0.2, 0.3, 0.4])
    n = p.size
    for j in range(n):
        for k in range(n):
            ej, ek = np.eye(n)[j], np.eye(n)[k]
            # classical_kl normalizes nothing, so use the unnormalized sum directly
            D = lambda u, w: float(np.sum(u * np.log(u) - u * np.log(w)))
            val = extract_classical(D, p, ej, ek)
            assert val == pytest.approx((j == k) / p[j], abs=1e-8)


@pytest.mark.parametrize("n", [2, 3])
def test_vnu_extracts_bkm(n, rng):
    x = point(n, rng)
    t1, t2 = random_unfolded_tangent(n, rng), random_unfolded_tangent(n, rng)
    rep = extract_tensor(get_divergence("vnu"), x, t1, t2, 1e-3)
    ref = petz_metric("BKM", fold(x), tangent_map_pi(x, t1), tangent_map_pi(x, t2))
    assert abs(rep.value - ref) / max(1.0, abs(ref)) <= 1e-5
    assert rep.richardson_used


def test_report_consistency(rng):
    x = point(3, rng)
    t1, t2 = random_unfolded_tangent(3, rng), random_unfolded_tangent(3, rng)
    rep = extract_tensor(get_divergence("g_BH"), x, t1, t2)
    scale = max(1.0, abs(rep.value))
    for v in rep.consistency.values():
        assert abs(v) <= 1e-6 * scale
    js = rep.to_json()
    assert js["value"] == rep.value
    assert set(js) >= {"value_ll", "value_rr", "value_lr", "value_rl", "first_order_residuals", "step"}
    assert isinstance(rep, ExtractionReport)


def test_bures_extracts_half_bh(rng):
    x = UnfoldedPoint(np.eye(3), [0.2, 0.3, 0.5])
    t = UnfoldedTangent(np.zeros((3, 3)), [0.1, 0.2, -0.3])
    val = extract_tensor(get_divergence("bures"), x, t, t).value
    assert val == pytest.approx(0.5 * fisher_rao(x.p, t.a, t.a), rel=1e-7)
    y = point(3, rng)
    t1, t2 = random_unfolded_tangent(3, rng), random_unfolded_tangent(3, rng)
    val = extract_tensor(get_divergence("bures"), y, t1, t2).value
    assert val == pytest.approx(0.5 * pullback_direct("BH", y, t1, t2), rel=1e-6, abs=1e-7)


@pytest.mark.parametrize("name", list(REGISTRY))
def test_extracted_tensor_symmetric_and_psd(name, rng):
    spec = REGISTRY[name]
    n = 2
    x = point(n, rng)
    frame = [random_unfolded_tangent(n, rng) for _ in range(3)]
    G = np.array([[extract_tensor(spec, x, a, b).value for b in frame] for a in frame])
    scale = max(1.0, np.abs(G).max())
    assert np.max(np.abs(G - G.T)) <= 1e-6 * scale
    assert np.linalg.eigvalsh(0.5 * (G + G.T)).min() >= -1e-6 * scale


def test_extraction_monotonicity_transfer(rng):
    n = 3
    spec = get_divergence("vnu")
    phi = random_kraus(n, 2, 3, rng)
    x = point(n, rng, floor=0.1)
    t = random_unfolded_tangent(n, rng)
    c = unfolded_curve(x, t)
    s = unfolded_surface(x, t, t)
    up = extract_tensor(spec, x, t, t).value
    down = extract_from_curves(spec, apply_channel(phi, fold(x)), lambda u: apply_channel(phi, c(u)),
                               lambda u: apply_channel(phi, c(u)),
                               lambda u, w: apply_channel(phi, s(u, w))).value
    assert up - down >= -1e-5


def test_f_from_g_examples():
    f = f_from_g(builtin_g("BKM"))
    assert f(2.0) == pytest.approx(1 / np.log(2), abs=1e-12)
    assert np.max(np.abs(f(GRID) - builtin_f("BKM")(GRID))) <= 1e-10
    fbh = f_from_g(builtin_g("BH"))
    assert np.max(np.abs(fbh(GRID) - (1 + GRID) / 2)) <= 1e-10
    fwy = f_from_g(builtin_g("WY"))
    assert np.max(np.abs(fwy(GRID) - builtin_f("WY")(GRID))) <= 1e-10
    for g in ("BKM", "BH", "WY"):
        assert f_from_g(builtin_g(g))(1.0) == 1.0


def test_f_from_g_near_one_is_smooth():
    f = f_from_g(builtin_g("BH"))
    x = 1 + np.linspace(-3e-4, 3e-4, 61)
    assert np.max(np.abs(f(x) - (1 + x) / 2)) < 1e-12


def test_f_from_g_custom_and_errors():
    # g(x) = (x - 1)^2 / 2 (chi-square type) gives f(x) = 2x/(1+x), the harmonic mean
    g = GFunction("chi2", lambda x: 0.5 * (x - 1) ** 2)
    f = f_from_g(g)
    assert np.allclose(f(GRID), 2 * GRID / (1 + GRID), rtol=1e-10)
    with pytest.raises(DomainError):
        f_from_g(GFunction("off", lambda x: 1 - x + 0.1, vanishing_at_one=False, normalized_curvature=False))


@pytest.mark.parametrize("name", ["BKM", "BH", "WY"])
def test_verify_correspondence(name, rng):
    x = point(3, rng)
    rep = verify_correspondence(builtin_g(name), x, trials=3, seed=1)
    assert rep["max_rel_error"] <= 1e-4
    assert abs(rep["theta3_extracted"]) <= 1e-6
    assert rep["theta3_reference"] == 0


@pytest.mark.parametrize("name", ["BKM", "BH", "WY"])
def test_g_entropy_extracts_pullback(name, rng):
    g = builtin_g(name)
    x = point(2, rng)
    t1, t2 = random_unfolded_tangent(2, rng), random_unfolded_tangent(2, rng)
    val = extract_tensor(g_entropy_spec(g), x, t1, t2).value
    ref = pullback_eval(f_from_g(g), x, t1, t2)
    assert abs(val - ref) / max(1.0, abs(ref)) <= 1e-4


def test_extraction_rejects_boundary():
    x = UnfoldedPoint(np.eye(2), [1e-4, 1 - 1e-4])
    t = UnfoldedTangent(np.zeros((2, 2)), [-1.0, 1.0])
    with pytest.raises(DomainError):
        extract_tensor(get_divergence("vnu"), x, t, t, 1e-3)
