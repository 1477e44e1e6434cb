"""Command-line driver.

Exit codes: 0 success, 1 verification failure, 2 invalid input (malformed
JSON, invariant violation, unknown verb).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import channels, divergences, extraction, geodesics, metrics, suites
from .matcore import DimensionError, DomainError
from .serialization import (dumps, fmt_float, load_json, matrix_from_json, state_from_json,
                            tangent_from_json, unfolded_from_json, write_json)
from .states import UnfoldedPoint, random_density, random_tangent

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


def _emit(obj) -> None:
    sys.stdout.write(dumps(obj) + "\n")


def cmd_metric(args) -> int:
    rho = state_from_json(load_json(args.state))
    v = matrix_from_json(load_json(args.v))
    w = matrix_from_json(load_json(args.w)) if args.w else v
    value = metrics.petz_metric(args.f, rho, v, w)
    _emit({"f": args.f, "value": value})
    return EXIT_OK


def cmd_divergence(args) -> int:
    rho = state_from_json(load_json(args.rho))
    sigma = state_from_json(load_json(args.sigma))
    spec = divergences.get_divergence(args.name)
    _emit({"divergence": spec.name, "value": spec(rho, sigma)})
    return EXIT_OK


def cmd_extract(args) -> int:
    x = unfolded_from_json(load_json(args.point))
    t1 = tangent_from_json(load_json(args.t1))
    t2 = tangent_from_json(load_json(args.t2)) if args.t2 else t1
    spec = divergences.get_divergence(args.divergence)
    rep = extraction.extract_tensor(spec, x, t1, t2, args.h, not args.no_richardson)
    out = {"divergence": spec.name, "report": rep.to_json()}
    if args.f:
        ref = metrics.pullback_direct(args.f, x, t1, t2)
        out["reference"] = {"f": args.f, "value": ref,
                            "rel_error": abs(rep.value - ref) / max(1.0, abs(ref))}
    _emit(out)
    return EXIT_OK


def _geodesic_csv(x: UnfoldedPoint, a, T: float, samples: int, f) -> str:
    curve = geodesics.universal_curve(x, a, T)
    geo = geodesics.FRGeodesic(x.p, a)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    n = x.dim
    w.writerow(["t", *(f"p_{j + 1}" for j in range(n)), "speed2"])
    for t in np.linspace(0.0, T, samples):
        vel = curve.velocity(t)
        vel = 0.5 * (vel + vel.conj().T)
        speed2 = metrics.petz_metric(f, curve.position(t), vel, vel)
        w.writerow([fmt_float(t), *(fmt_float(v) for v in geo(t)), fmt_float(speed2)])
    return buf.getvalue()


def cmd_geodesic(args) -> int:
    if args.point:
        x = unfolded_from_json(load_json(args.point))
    else:
        p = np.asarray(json.loads(args.p), dtype=float)
        x = UnfoldedPoint(np.eye(p.size), p)
    a = np.asarray(json.loads(args.a), dtype=float)
    t_max = geodesics.fr_t_max(x.p, a)
    T = args.T if args.T is not None else 0.5 * t_max
    if not 0 < T < t_max:
        raise DomainError(f"T={T} outside (0, t_max={t_max})")
    text = _geodesic_csv(x, a, T, args.samples, args.f)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _sweep(args):
    rng = np.random.default_rng(args.seed)
    n = args.dim
    rows = []
    if args.f:
        for i in range(args.trials):
            phi = channels.random_channel(n, rng)
            rows.append((i, channels.metric_monotonicity_trial(
                args.f, phi, random_density(n, rng), random_tangent(n, rng))))
        tol = suites.DEFAULT_TOLERANCES["metric_margin"]
    else:
        spec = divergences.get_divergence(args.divergence)
        for i in range(args.trials):
            phi = channels.random_channel(n, rng)
            rows.append((i, channels.divergence_monotonicity_trial(
                spec, phi, random_density(n, rng), random_density(n, rng))))
        tol = suites.DEFAULT_TOLERANCES["divergence_margin"]
    return rows, tol


def cmd_monotonicity(args) -> int:
    if not 2 <= args.dim <= 8 or args.trials < 1:
        raise ValueError("need 2 <= dim <= 8 and trials >= 1")
    rows, tol = _sweep(args)
    margins = np.array([m for _, m in rows])
    summary = {
        "target": args.f or args.divergence,
        "dim": args.dim,
        "trials": args.trials,
        "seed": args.seed,
        "min": float(margins.min()),
        "mean": float(margins.mean()),
        "violations": int(np.sum(margins < -tol)),
        "tolerance": tol,
    }
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "margins.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["trial", "margin"])
            w.writerows([i, fmt_float(m)] for i, m in rows)
        write_json(out / "summary.json", summary)
    _emit(summary)
    return EXIT_OK if summary["violations"] == 0 else EXIT_FAIL


def cmd_verify(args) -> int:
    obj = load_json(args.config) if args.config else {}
    if not isinstance(obj, dict):
        raise ValueError("config must be a JSON object")
    cfg = suites.SuiteConfig.from_json(obj)
    outdir = args.out or cfg.output
    results = suites.run_suites(cfg, args.suite or None)
    report = suites.write_outputs(outdir, cfg, results)
    for s in report["suites"]:
        print(f"{s['name']}: {'PASS' if s['passed'] else 'FAIL'}")
    return EXIT_OK if report["passed"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qig", description="Monotone metrics, divergences and geodesics on quantum states.")
    sub = ap.add_subparsers(dest="verb", required=True)
    f_names = list(metrics.BUILTIN_F)

    p = sub.add_parser("metric", help="evaluate a Petz metric G_f(rho; v, w)")
    p.add_argument("--f", choices=f_names, default="BH")
    p.add_argument("--state", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--w")
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("divergence", help="evaluate a registered divergence S(rho, sigma)")
    p.add_argument("--name", default="vnu")
    p.add_argument("--rho", required=True)
    p.add_argument("--sigma", required=True)
    p.set_defaults(func=cmd_divergence)

    p = sub.add_parser("extract", help="extract a metric value from a divergence")
    p.add_argument("--divergence", default="vnu")
    p.add_argument("--point", required=True, help="unfolded point JSON {U, p}")
    p.add_argument("--t1", required=True, help="unfolded tangent JSON {H, a}")
    p.add_argument("--t2")
    p.add_argument("--h", type=float, default=extraction.DEFAULT_STEP)
    p.add_argument("--no-richardson", action="store_true")
    p.add_argument("--f", choices=f_names, help="compare against this pulled-back metric")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("geodesic", help="sample a universal geodesic as CSV")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--point", help="unfolded point JSON {U, p}")
    src.add_argument("--p", help="probability vector as a JSON list (U = I)")
    p.add_argument("--a", required=True, help="zero-sum direction as a JSON list")
    p.add_argument("--T", type=float, help="final time (default t_max/2)")
    p.add_argument("--samples", type=int, default=11)
    p.add_argument("--f", choices=f_names, default="BH")
    p.add_argument("--out")
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("monotonicity", help="random monotonicity sweep under CPTP maps")
    tgt = p.add_mutually_exclusive_group(required=True)
    tgt.add_argument("--f", choices=f_names)
    tgt.add_argument("--divergence")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_monotonicity)

    p = sub.add_parser("verify", help="run the invariant suites and write report.json")
    p.add_argument("config", nargs="?")
    p.add_argument("--out")
    p.add_argument("--suite", action="append", choices=list(suites.SUITES))
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON: {exc}", file=sys.stderr)
    except (DomainError, DimensionError) as exc:
        print(f"error: invariant violated: {exc}", file=sys.stderr)
    except (ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
