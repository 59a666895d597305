"""Extended Poisson bracket on graded polynomials.

Fundamental brackets: ``{phi^a, lam_b} = delta^a_b`` and
``{cb_b, c^a} = -i delta^a_b``; everything else between generators vanishes.
Extended by graded bilinearity and the graded Leibniz rule this is

    {A, B} = sum_a  dA/dphi^a dB/dlam_a - dA/dlam_a dB/dphi^a
             + i (-1)^|A| (dA/dc^a dB/dcb_a + dA/dcb_a dB/dc^a)

with left Grassmann derivatives.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Sequence, Tuple

from .algebra import I, GradedPolynomial, Var, mul, partial_even, partial_odd

if TYPE_CHECKING:
    from .charges import PhaseModel

__all__ = ["BracketTable", "epb", "hamiltonian_flow_bracket"]

Matrix = Tuple[Tuple[Fraction, ...], ...]


def _invert(m: Sequence[Sequence[Fraction]]) -> Matrix:
    size = len(m)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(size)]
           for i, row in enumerate(m)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if aug[r][col]), None)
        if pivot is None:
            raise ValueError("omega is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(size):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[size:]) for row in aug)


def standard_omega(n: int) -> Matrix:
    """``[[0, I], [-I, 0]]`` in the (q^1..q^n, p^1..p^n) ordering."""
    N = 2 * n
    rows = []
    for a in range(N):
        row = [Fraction(0)] * N
        if a < n:
            row[a + n] = Fraction(1)
        else:
            row[a - n] = Fraction(-1)
        rows.append(tuple(row))
    return tuple(rows)


@dataclass(frozen=True)
class BracketTable:
    """Symplectic data: ``omega_upper`` is omega^{ab}, ``omega_lower`` its inverse omega_ab."""

    n: int
    omega_upper: Matrix
    omega_lower: Matrix

    @classmethod
    def standard(cls, n: int) -> "BracketTable":
        return cls.from_omega(n, standard_omega(n))

    @classmethod
    def from_omega(cls, n: int, omega) -> "BracketTable":
        N = 2 * n
        m = tuple(tuple(Fraction(x) for x in row) for row in omega)
        if len(m) != N or any(len(row) != N for row in m):
            raise ValueError(f"omega must be {N}x{N} for n={n}")
        for a in range(N):
            for b in range(N):
                if m[a][b] != -m[b][a]:
                    raise ValueError(f"omega is not antisymmetric at ({a + 1},{b + 1})")
        return cls(n, m, _invert(m))

    def upper(self, a: int, b: int) -> Fraction:
        """omega^{ab} with 1-based indices."""
        return self.omega_upper[a - 1][b - 1]

    def lower(self, a: int, b: int) -> Fraction:
        return self.omega_lower[a - 1][b - 1]


def _parity(p: GradedPolynomial, label: str) -> int:
    try:
        return p.parity()
    except ValueError as exc:
        raise ValueError(f"bracket needs homogeneous parity in {label}: {exc}") from None


def epb(A: GradedPolynomial, B: GradedPolynomial) -> GradedPolynomial:
    """The extended Poisson bracket ``{A, B}``."""
    if A.n != B.n:
        raise ValueError(f"mismatched n: {A.n} vs {B.n}")
    pa = _parity(A, "first argument")
    _parity(B, "second argument")
    n = A.n
    out = GradedPolynomial.zero(n)
    if A.is_zero() or B.is_zero():
        return out
    for a in range(1, 2 * n + 1):
        phi, lam = Var("phi", a), Var("lam", a)
        dA_phi = partial_even(A, phi)
        if dA_phi:
            dB_lam = partial_even(B, lam)
            if dB_lam:
                out = out + mul(dA_phi, dB_lam)
        dA_lam = partial_even(A, lam)
        if dA_lam:
            dB_phi = partial_even(B, phi)
            if dB_phi:
                out = out - mul(dA_lam, dB_phi)
    ghost = GradedPolynomial.zero(n)
    for a in range(1, 2 * n + 1):
        c, cb = Var("c", a), Var("cb", a)
        dA_c = partial_odd(A, c)
        if dA_c:
            dB_cb = partial_odd(B, cb)
            if dB_cb:
                ghost = ghost + mul(dA_c, dB_cb)
        dA_cb = partial_odd(A, cb)
        if dA_cb:
            dB_c = partial_odd(B, c)
            if dB_c:
                ghost = ghost + mul(dA_cb, dB_c)
    if ghost:
        out = out + ghost.scale(-I if pa else I)
    return out


def hamiltonian_flow_bracket(model: "PhaseModel", p: GradedPolynomial) -> GradedPolynomial:
    """``{p, H~}``: the time derivative of ``p`` along the extended flow."""
    from .charges import extended_hamiltonian

    return epb(p, extended_hamiltonian(model))
