"""Byte-stable JSON: sorted keys, exact rationals as ``p/q`` strings, floats at 17 digits."""
from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np

from .algebra import GradedPolynomial, ScalarC, format_scalar
from .expr import format_poly

__all__ = ["dumps", "format_float"]


def format_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = format(x, ".17g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if isinstance(obj, ScalarC):
        return json.dumps(format_scalar(obj))
    if isinstance(obj, GradedPolynomial):
        return json.dumps(format_poly(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = sorted((str(k), v) for k, v in obj.items())
        body = ",\n".join(f"{pad}{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in items)
        return "{\n" + body + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        body = ",\n".join(pad + _encode(v, indent, level + 1) for v in obj)
        return "[\n" + body + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"
