"""Flat ``key = value`` model files.

    # comment
    name = oscillator
    n = 1
    hamiltonian = (phi[1]^2 + phi[2]^2)/2
    omega = 0 1; -1 0        # optional, rows separated by ';'
"""
from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Dict, Optional

from .charges import PhaseModel
from .epb import BracketTable
from .expr import ParseError, parse

__all__ = ["ModelFileError", "parse_model", "load_model"]

KEYS = ("name", "n", "hamiltonian", "omega")


class ModelFileError(ValueError):
    """Malformed or inconsistent model file."""


def _fields(text: str) -> Dict[str, str]:
    out: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ModelFileError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ModelFileError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ModelFileError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _omega(text: str, n: int) -> BracketTable:
    try:
        rows = [[Fraction(tok) for tok in row.split()] for row in text.split(";")]
    except ValueError as exc:
        raise ModelFileError(f"omega: {exc}") from None
    try:
        return BracketTable.from_omega(n, rows)
    except ValueError as exc:
        raise ModelFileError(f"omega: {exc}") from None


def parse_model(text: str, default_name: Optional[str] = None) -> PhaseModel:
    """Build a model; expression errors propagate as ``ParseError``."""
    fields = _fields(text)
    for key in ("n", "hamiltonian"):
        if key not in fields:
            raise ModelFileError(f"missing required key {key!r}")
    try:
        n = int(fields["n"])
    except ValueError:
        raise ModelFileError(f"n must be an integer, got {fields['n']!r}") from None
    if n < 1:
        raise ModelFileError("n must be >= 1")
    table = _omega(fields["omega"], n) if "omega" in fields else None
    try:
        H = parse(fields["hamiltonian"], n)
    except ParseError as exc:
        exc.args = (f"hamiltonian: {exc}",)
        raise
    if not H.free_of("lam", "c", "cb"):
        raise ModelFileError("the Hamiltonian may only depend on phi")
    return PhaseModel(n, H, table, fields.get("name", default_name or "model"))


def load_model(path) -> PhaseModel:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ModelFileError(f"cannot read {path}: {exc.strerror}") from None
    return parse_model(text, default_name=path.stem)
