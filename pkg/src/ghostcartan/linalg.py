"""Exact sparse Gauss-Jordan elimination over complex rationals.

Vectors are dicts ``key -> ScalarC`` with no zero entries.  Pivot choice
follows a caller-supplied ranking of keys, so echelon forms are canonical
for a fixed ranking.
"""
from __future__ import annotations

from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .algebra import ScalarC

Vec = Dict[Hashable, ScalarC]

__all__ = ["Vec", "axpy", "combine", "Echelon", "nullspace"]


def axpy(y: Vec, a: ScalarC, x: Vec) -> Vec:
    """Return ``y + a*x`` as a new vector."""
    out = dict(y)
    if not a:
        return out
    for k, v in x.items():
        s = out.get(k)
        s = a * v if s is None else s + a * v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def combine(coeffs: Vec, vectors: Sequence[Vec]) -> Vec:
    """``sum_j coeffs[j] * vectors[j]`` for integer keys ``j``."""
    out: Vec = {}
    for j, a in coeffs.items():
        out = axpy(out, a, vectors[j])
    return out


class Echelon:
    """Reduced row echelon basis that remembers how each row was built.

    Every stored row carries a ``tag``: its expression as a combination of
    the vectors passed to :meth:`add` (indexed by insertion order).
    """

    def __init__(self, rank: Callable[[Hashable], object]):
        self.rank = rank
        self.rows: List[Tuple[Hashable, Vec, Vec]] = []  # (pivot, row, tag)
        self._count = 0

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec: Vec, tag: Optional[Vec] = None) -> Tuple[Vec, Vec]:
        vec = dict(vec)
        tag = dict(tag or {})
        for pivot, row, rtag in self.rows:
            a = vec.get(pivot)
            if a:
                vec = axpy(vec, -a, row)
                tag = axpy(tag, -a, rtag)
        return vec, tag

    def add(self, vec: Vec) -> Optional[Vec]:
        """Insert ``vec``; return None if it was new, else the dependency tag.

        The returned tag ``t`` satisfies ``sum_j t[j] * input_j == 0`` and
        includes the current input with coefficient 1.
        """
        index = self._count
        self._count += 1
        reduced, tag = self.reduce(vec, {index: ScalarC(1)})
        if not reduced:
            return tag
        pivot = min(reduced, key=self.rank)
        inv = ScalarC(1) / reduced[pivot]
        reduced = {k: v * inv for k, v in reduced.items()}
        tag = {k: v * inv for k, v in tag.items()}
        new_rows = []
        for p, row, rtag in self.rows:
            a = row.get(pivot)
            if a:
                row = axpy(row, -a, reduced)
                rtag = axpy(rtag, -a, tag)
            new_rows.append((p, row, rtag))
        new_rows.append((pivot, reduced, tag))
        new_rows.sort(key=lambda r: self.rank(r[0]))
        self.rows = new_rows
        return None

    def express(self, vec: Vec) -> Optional[Vec]:
        """Coefficients over the inputs reproducing ``vec``, or None if outside the span."""
        reduced, tag = self.reduce(vec)
        if reduced:
            return None
        return {k: -v for k, v in tag.items() if v}

    def vectors(self) -> List[Vec]:
        return [row for _, row, _ in self.rows]


def nullspace(columns: Sequence[Vec], rank: Callable[[Hashable], object] = repr) -> List[Vec]:
    """Basis of ``{x : sum_j x[j] * columns[j] == 0}``, each as a dict ``j -> coeff``."""
    ech = Echelon(rank)
    kernel = []
    for col in columns:
        dep = ech.add(col)
        if dep is not None:
            kernel.append({k: v for k, v in dep.items() if v})
    return kernel


def span_rank(vectors: Iterable[Vec], rank: Callable[[Hashable], object] = repr) -> int:
    ech = Echelon(rank)
    for v in vectors:
        ech.add(v)
    return len(ech)
