"""JSON file formats for matrices, states, unfolded points and tangents.

A matrix is ``{"dim": n, "re": [[...]], "im": [[...]]}``; a state adds
``"kind": "density"``. Floats are written with 17 significant digits so
that files round-trip exactly.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .matcore import DimensionError, as_cmatrix
from .states import UnfoldedPoint, UnfoldedTangent, as_density


def matrix_to_json(a) -> dict:
    a = as_cmatrix(a)
    return {"dim": a.shape[0], "re": a.real.tolist(), "im": a.imag.tolist()}


def matrix_from_json(obj) -> np.ndarray:
    try:
        n = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros((n, n))), dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from None
    if re.shape != (n, n) or im.shape != (n, n):
        raise DimensionError(f"matrix entries do not match dim={n}")
    return re + 1j * im


def state_to_json(rho) -> dict:
    return {"kind": "density", **matrix_to_json(rho)}


def state_from_json(obj) -> np.ndarray:
    if obj.get("kind", "density") != "density":
        raise ValueError(f"expected kind 'density', got {obj.get('kind')!r}")
    return as_density(matrix_from_json(obj))


def unfolded_to_json(x: UnfoldedPoint) -> dict:
    return {"U": matrix_to_json(x.U), "p": x.p.tolist()}


def unfolded_from_json(obj) -> UnfoldedPoint:
    try:
        return UnfoldedPoint(matrix_from_json(obj["U"]), np.asarray(obj["p"], dtype=float))
    except KeyError as exc:
        raise ValueError(f"unfolded point lacks field {exc}") from None


def tangent_to_json(t: UnfoldedTangent) -> dict:
    return {"H": matrix_to_json(t.H), "a": t.a.tolist()}


def tangent_from_json(obj) -> UnfoldedTangent:
    try:
        return UnfoldedTangent(matrix_from_json(obj["H"]), np.asarray(obj["a"], dtype=float))
    except KeyError as exc:
        raise ValueError(f"unfolded tangent lacks field {exc}") from None


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," + pad if indent else ", "
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + pad + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        # short numeric rows stay on one line
        if all(isinstance(v, (int, float, np.number)) for v in seq):
            return "[" + ", ".join(_encode(v, 0, 0) for v in seq) + "]"
        return "[" + pad + sep.join(_encode(v, indent, level + 1) for v in seq) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON with 17-significant-digit floats."""
    return _encode(obj, indent, 0)


def load_json(path) -> object:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj) + "\n", encoding="utf-8")
