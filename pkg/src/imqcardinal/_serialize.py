"""Deterministic text serialization: canonical JSON and CSV helpers.

All reals are written with 17 significant digits so outputs round-trip and
re-runs of identical computations are byte-identical.  JSON objects are
emitted with sorted keys; non-finite reals become the strings "inf",
"-inf", "nan" (plain JSON has no literals for them).
"""

from __future__ import annotations

import json
import math

import numpy as np


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _json_fragment(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    close_pad = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{pad}{json.dumps(str(key))}: {_json_fragment(obj[key], indent, level + 1)}"
            for key in sorted(obj, key=str)
        ]
        return "{\n" + ",\n".join(items) + "\n" + close_pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{pad}{_json_fragment(v, indent, level + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + close_pad + "]"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return format_float(x)
        return json.dumps(format_float(x))  # "inf"/"-inf"/"nan" as strings
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__} to canonical JSON")


def canonical_json(obj, indent: int = 2) -> str:
    """Render ``obj`` as deterministic JSON text (sorted keys, 17-digit reals)."""
    return _json_fragment(obj, indent, 0) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(canonical_json(obj))


def write_xy_csv(path, header: tuple[str, str], xs, ys) -> None:
    """Two-column CSV with the given header, 17 significant digits."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape:
        raise ValueError(f"column length mismatch: {xs.shape} vs {ys.shape}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for x, y in zip(xs, ys):
            fh.write(f"{format_float(x)},{format_float(y)}\n")
