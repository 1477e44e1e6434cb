"""Randomized invariant suites behind ``qig verify``.

Every suite returns a :class:`SuiteResult` with one row per sampled check.
Randomness is drawn from child seeds of the config seed so reports are
reproducible byte for byte.
"""
from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import channels, divergences, extraction, geodesics, metrics
from .identifications import exp_forward, jordan_forward, sqrt_forward
from .serialization import fmt_float, write_json
from .states import (UnfoldedPoint, UnfoldedTangent, fold, random_density, random_prob,
                     random_tangent, random_unfolded_tangent, random_unitary)

DEFAULT_TOLERANCES = {
    "bh_closed": 1e-10,
    "wy_closed": 1e-9,
    "bkm_closed": 1e-9,
    "commuting": 1e-12,
    "unitary_invariance": 1e-10,
    "pullback_split": 1e-10,
    "vnu_extraction": 1e-5,
    "g_extraction": 1e-4,
    "potential": 1e-8,
    "f_from_g": 1e-10,
    "geodesic": 1e-4,
    "metric_margin": 1e-8,
    "divergence_margin": 1e-9,
    "unitary_margin": 1e-10,
    "diagonal_zero": 1e-10,
    "nonnegative": 1e-10,
}


@dataclass
class SuiteConfig:
    dims: list = field(default_factory=lambda: [2, 3, 4])
    trials: int = 50
    seed: int = 0
    step: float = 1e-3
    tolerances: dict = field(default_factory=dict)
    output: str = "qig-report"

    def __post_init__(self):
        if not self.dims or any(int(n) != n or not 2 <= n <= 8 for n in self.dims):
            raise ValueError(f"dims must be integers in 2..8, got {self.dims}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError("trials must be a positive integer")
        self.dims = [int(n) for n in self.dims]
        self.trials = int(self.trials)
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES) - {"*"}
        if unknown:
            raise ValueError(f"unknown tolerance keys: {sorted(unknown)}")

    @classmethod
    def from_json(cls, obj: dict) -> "SuiteConfig":
        known = {"dims", "trials", "seed", "step", "tolerances", "tolerance", "output"}
        extra = set(obj) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        obj = dict(obj)
        tol = dict(obj.pop("tolerances", {}))
        if "tolerance" in obj:
            tol["*"] = obj.pop("tolerance")
        cfg = cls(**obj, tolerances=tol)
        env = os.environ.get("QIG_SEED")
        if env is not None:
            cfg.seed = int(env)
        return cfg

    def tol(self, key: str) -> float:
        if key in self.tolerances:
            return float(self.tolerances[key])
        if "*" in self.tolerances:
            return float(self.tolerances["*"])
        return DEFAULT_TOLERANCES[key]


@dataclass
class SuiteResult:
    name: str
    rows: list = field(default_factory=list)  # (check, dim, trial, value, tolerance, ok)

    def add(self, check: str, dim: int, trial: int, value: float, tol: float, ok: bool) -> None:
        self.rows.append((check, dim, trial, float(value), tol, bool(ok)))

    @property
    def passed(self) -> bool:
        return all(r[5] for r in self.rows)

    def worst(self) -> dict:
        out = {}
        for check, _, _, value, tol, ok in self.rows:
            cur = out.setdefault(check, {"worst": value, "tolerance": tol, "failures": 0})
            cur["failures"] += 0 if ok else 1
            cur["worst"] = value if _worse(check, value, cur["worst"]) else cur["worst"]
        return out


def _worse(check: str, a: float, b: float) -> bool:
    # margins are worst when smallest, errors when largest
    return a < b if check.endswith("margin") or check == "negative_control_ratio" else a > b


def _rng(cfg: SuiteConfig, suite: int, dim: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, suite, dim])


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(b))


def suite_metrics(cfg: SuiteConfig) -> SuiteResult:
    res = SuiteResult("metrics")
    fs = metrics.registry()
    for n in cfg.dims:
        rng = _rng(cfg, 0, n)
        for i in range(cfg.trials):
            rho = random_density(n, rng)
            a = random_tangent(n, rng)
            b = random_tangent(n, rng)
            bh = metrics.petz_metric("BH", rho, jordan_forward(rho, a), jordan_forward(rho, b))
            e = _rel(bh, metrics.bh_closed(rho, a, b))
            res.add("bh_closed", n, i, e, cfg.tol("bh_closed"), e <= cfg.tol("bh_closed"))
            wy = metrics.petz_metric("WY", rho, sqrt_forward(rho, a), sqrt_forward(rho, b))
            e = _rel(wy, metrics.WY_CLOSED_FACTOR * metrics.wy_closed(rho, a, b))
            res.add("wy_closed", n, i, e, cfg.tol("wy_closed"), e <= cfg.tol("wy_closed"))
            bkm = metrics.petz_metric("BKM", rho, exp_forward(rho, a), exp_forward(rho, b))
            e = _rel(bkm, metrics.bkm_closed(rho, a, b))
            res.add("bkm_closed", n, i, e, cfg.tol("bkm_closed"), e <= cfg.tol("bkm_closed"))

            p = random_prob(n, rng)
            da, db = rng.standard_normal(n), rng.standard_normal(n)
            da, db = da - da.mean(), db - db.mean()
            v = random_tangent(n, rng)
            w = random_tangent(n, rng)
            V = random_unitary(n, rng)
            for f in fs:
                e = _rel(metrics.petz_metric(f, np.diag(p), np.diag(da), np.diag(db)),
                         metrics.fisher_rao(p, da, db))
                res.add("commuting", n, i, e, cfg.tol("commuting"), e <= cfg.tol("commuting"))
                g0 = metrics.petz_metric(f, rho, v, w)
                g1 = metrics.petz_metric(f, V @ rho @ V.conj().T, V @ v @ V.conj().T, V @ w @ V.conj().T)
                e = _rel(g1, g0)
                res.add("unitary_invariance", n, i, e, cfg.tol("unitary_invariance"),
                        e <= cfg.tol("unitary_invariance"))
                x = UnfoldedPoint(random_unitary(n, rng), p)
                t1, t2 = random_unfolded_tangent(n, rng), random_unfolded_tangent(n, rng)
                e = _rel(metrics.pullback_eval(f, x, t1, t2), metrics.pullback_direct(f, x, t1, t2))
                res.add("pullback_split", n, i, e, cfg.tol("pullback_split"),
                        e <= cfg.tol("pullback_split"))
    return res


def suite_divergences(cfg: SuiteConfig) -> SuiteResult:
    res = SuiteResult("divergences")
    tol = cfg.tol("unitary_invariance")
    for n in cfg.dims:
        rng = _rng(cfg, 1, n)
        for i in range(cfg.trials):
            rho, sigma = random_density(n, rng), random_density(n, rng)
            V = random_unitary(n, rng)
            r2, s2 = V @ rho @ V.conj().T, V @ sigma @ V.conj().T
            for spec in divergences.REGISTRY.values():
                d = spec(rho, sigma)
                e = _rel(spec(r2, s2), d)
                res.add("unitary_invariance", n, i, e, tol, e <= tol)
                res.add("nonnegative_margin", n, i, d, cfg.tol("nonnegative"), d >= -cfg.tol("nonnegative"))
                z = abs(spec(rho, rho))
                res.add("diagonal_zero", n, i, z, cfg.tol("diagonal_zero"), z <= cfg.tol("diagonal_zero"))
    return res


def suite_extraction(cfg: SuiteConfig) -> SuiteResult:
    res = SuiteResult("extraction")
    trials = max(1, min(cfg.trials, 10))
    gs = [divergences.builtin_g(k) for k in divergences.BUILTIN_G]
    vnu = divergences.get_divergence("vnu")
    for n in cfg.dims:
        rng = _rng(cfg, 2, n)
        for i in range(trials):
            x = UnfoldedPoint(random_unitary(n, rng), random_prob(n, rng, floor=0.05))
            t1, t2 = random_unfolded_tangent(n, rng), random_unfolded_tangent(n, rng)
            rep = extraction.extract_tensor(vnu, x, t1, t2, cfg.step)
            e = _rel(rep.value, metrics.pullback_direct("BKM", x, t1, t2))
            res.add("vnu_extraction", n, i, e, cfg.tol("vnu_extraction"), e <= cfg.tol("vnu_extraction"))
            for g in gs:
                ext = extraction.extract_tensor(divergences.g_entropy_spec(g), x, t1, t2, cfg.step)
                e = _rel(ext.value, metrics.pullback_direct(extraction.f_from_g(g), x, t1, t2))
                res.add("g_extraction", n, i, e, cfg.tol("g_extraction"), e <= cfg.tol("g_extraction"))
            for spec in divergences.REGISTRY.values():
                r = max(abs(v) for v in extraction.check_potential(spec, x, t1, cfg.step))
                res.add("potential", n, i, r, cfg.tol("potential"), r <= cfg.tol("potential"))
    grid = np.logspace(-3, 3, 32)
    for name in ("BKM", "BH"):
        f = extraction.f_from_g(divergences.builtin_g(name))
        ref = metrics.builtin_f(name)
        e = float(np.max(np.abs(f(grid) - ref(grid)) / np.abs(ref(grid))))
        res.add("f_from_g", 0, 0, e, cfg.tol("f_from_g"), e <= cfg.tol("f_from_g"))
    return res


def suite_geodesics(cfg: SuiteConfig) -> SuiteResult:
    res = SuiteResult("geodesics")
    tol = cfg.tol("geodesic")
    for n in cfg.dims:
        rng = _rng(cfg, 3, n)
        p = random_prob(n, rng, floor=0.1)
        a = rng.standard_normal(n)
        a = (a - a.mean()) * 0.1
        x = UnfoldedPoint(random_unitary(n, rng), p)
        T = 0.5 * geodesics.fr_t_max(p, a)
        curve = geodesics.universal_curve(x, a, T)
        b = rng.standard_normal(n)
        bent = geodesics.universal_curve(x, a, T, bend=0.05, bend_dir=b - b.mean())
        seed = int(rng.integers(2**31))
        for f in metrics.registry():
            r = geodesics.energy_residual(f, curve, seed=seed)
            res.add("geodesic", n, 0, r["relative"], tol, r["relative"] <= tol)
            rb = geodesics.energy_residual(f, bent, seed=seed)
            ratio = rb["relative"] / tol
            res.add("negative_control_ratio", n, 0, ratio, 10.0, ratio >= 10.0)
        ts = np.linspace(-0.9, 0.9, 100) * geodesics.fr_t_max(p, a)
        drift = max(abs(geodesics.fr_geodesic(p, a, t).sum() - 1.0) for t in ts)
        res.add("normalization", n, 0, drift, 1e-13, drift <= 1e-13)
    return res


def suite_channels(cfg: SuiteConfig) -> SuiteResult:
    res = SuiteResult("channels")
    specs = [s for s in divergences.REGISTRY.values() if s.monotone]
    for n in cfg.dims:
        rng = _rng(cfg, 4, n)
        for i in range(cfg.trials):
            phi = channels.random_channel(n, rng)
            rho = random_density(n, rng)
            sigma = random_density(n, rng)
            v = random_tangent(n, rng)
            U = channels.random_unitary_channel(n, rng)
            for f in metrics.registry():
                m = channels.metric_monotonicity_trial(f, phi, rho, v)
                res.add("metric_margin", n, i, m, cfg.tol("metric_margin"), m >= -cfg.tol("metric_margin"))
                # relative to max(1, G): the conjugated state is re-diagonalized, which
                # costs ~eps relative accuracy on its small eigenvalues
                scale = max(1.0, metrics.petz_metric(f, rho, v, v))
                mu = abs(channels.metric_monotonicity_trial(f, U, rho, v)) / scale
                res.add("unitary_margin", n, i, mu, cfg.tol("unitary_margin"), mu <= cfg.tol("unitary_margin"))
            for spec in specs:
                m = channels.divergence_monotonicity_trial(spec, phi, rho, sigma)
                res.add("divergence_margin", n, i, m, cfg.tol("divergence_margin"),
                        m >= -cfg.tol("divergence_margin"))
    return res


SUITES = {
    "metrics": suite_metrics,
    "divergences": suite_divergences,
    "extraction": suite_extraction,
    "geodesics": suite_geodesics,
    "channels": suite_channels,
}


def run_suites(cfg: SuiteConfig, names=None) -> list[SuiteResult]:
    return [SUITES[name](cfg) for name in (names or SUITES)]


def build_report(cfg: SuiteConfig, results: list[SuiteResult]) -> dict:
    return {
        "config": {"dims": cfg.dims, "trials": cfg.trials, "seed": cfg.seed, "step": cfg.step,
                   "tolerances": {k: cfg.tol(k) for k in DEFAULT_TOLERANCES}},
        "passed": all(r.passed for r in results),
        "suites": [{"name": r.name, "passed": r.passed, "checks": r.worst()} for r in results],
    }


def write_outputs(outdir, cfg: SuiteConfig, results: list[SuiteResult]) -> dict:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    report = build_report(cfg, results)
    write_json(outdir / "report.json", report)
    for r in results:
        with open(outdir / f"{r.name}.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["check", "dim", "trial", "value", "tolerance", "ok"])
            for check, dim, trial, value, tol, ok in r.rows:
                w.writerow([check, dim, trial, fmt_float(value), fmt_float(tol), int(ok)])
    return report
