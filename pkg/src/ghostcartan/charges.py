"""The extended Hamiltonian and the universally conserved charges."""
from __future__ import annotations

from dataclasses import dataclass, fields
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Tuple

from .algebra import I, GradedPolynomial, ScalarC, Var, partial_even
from .epb import BracketTable, epb

__all__ = [
    "PhaseModel",
    "ChargeSet",
    "SUSY_KAPPA",
    "build_charges",
    "extended_hamiltonian",
    "conservation_report",
    "susy_square",
    "brs_nilpotency",
]

# (1/2){Q_1, Q_1} = kappa * H~, fixed on the n=1 oscillator and checked model by model.
SUSY_KAPPA = ScalarC(-1)


@dataclass(frozen=True, eq=False)
class PhaseModel:
    n: int
    H: GradedPolynomial
    table: BracketTable = None
    name: str = "model"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.H.n != self.n:
            raise ValueError(f"Hamiltonian built for n={self.H.n}, model has n={self.n}")
        if not self.H.free_of("lam", "c", "cb"):
            raise ValueError("the Hamiltonian may only depend on phi")
        if self.table is None:
            object.__setattr__(self, "table", BracketTable.standard(self.n))
        elif self.table.n != self.n:
            raise ValueError("bracket table does not match n")

    @property
    def N(self) -> int:
        return 2 * self.n

    def const(self, value) -> GradedPolynomial:
        return GradedPolynomial.const(self.n, value)

    def v(self, kind: str, a: int) -> GradedPolynomial:
        return GradedPolynomial.var(self.n, kind, a)

    @cached_property
    def gradient(self) -> List[GradedPolynomial]:
        return [partial_even(self.H, Var("phi", a)) for a in range(1, self.N + 1)]

    @cached_property
    def hessian(self) -> List[List[GradedPolynomial]]:
        return [[partial_even(g, Var("phi", b)) for b in range(1, self.N + 1)]
                for g in self.gradient]

    @cached_property
    def flow(self) -> List[GradedPolynomial]:
        """Components ``omega^{ab} d_b H`` of the Hamiltonian vector field."""
        return [self._raise(a, self.gradient) for a in range(1, self.N + 1)]

    def _raise(self, a: int, covector) -> GradedPolynomial:
        out = GradedPolynomial.zero(self.n)
        for b in range(1, self.N + 1):
            w = self.table.upper(a, b)
            if w:
                out = out + covector[b - 1].scale(w)
        return out


@dataclass(frozen=True)
class ChargeSet:
    H_tilde: GradedPolynomial
    Q_BRS: GradedPolynomial
    Qbar_BRS: GradedPolynomial
    Q_g: GradedPolynomial
    K: GradedPolynomial
    Kbar: GradedPolynomial
    N_H: GradedPolynomial
    Nbar_H: GradedPolynomial
    Q_1: GradedPolynomial
    Q_2: GradedPolynomial

    def charges(self) -> Dict[str, GradedPolynomial]:
        """Everything except ``H_tilde``, in declaration order."""
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "H_tilde"}


def extended_hamiltonian(model: PhaseModel) -> GradedPolynomial:
    """``lam_a omega^{ab} d_b H + i cb_a omega^{ac} (d_c d_b H) c^b``."""
    N = model.N
    out = GradedPolynomial.zero(model.n)
    for a in range(1, N + 1):
        out = out + model.v("lam", a) * model.flow[a - 1]
    ghost = GradedPolynomial.zero(model.n)
    for a in range(1, N + 1):
        for b in range(1, N + 1):
            coeff = model._raise(a, [row[b - 1] for row in model.hessian])
            if coeff:
                ghost = ghost + model.v("cb", a) * coeff * model.v("c", b)
    return out + ghost.scale(I)


def build_charges(model: PhaseModel) -> ChargeSet:
    N, t = model.N, model.table
    v = model.v
    zero = GradedPolynomial.zero(model.n)
    Q_BRS, Qbar, Q_g, K, Kbar, N_H, Nbar = (zero,) * 7
    for a in range(1, N + 1):
        Q_BRS = Q_BRS + v("c", a) * v("lam", a)
        Q_g = Q_g + v("c", a) * v("cb", a)
        N_H = N_H + v("c", a) * model.gradient[a - 1]
        Nbar = Nbar + v("cb", a) * model.flow[a - 1]
        for b in range(1, N + 1):
            if t.upper(a, b):
                Qbar = Qbar + (v("cb", a) * v("lam", b)).scale(t.upper(a, b))
                Kbar = Kbar + (v("cb", a) * v("cb", b)).scale(t.upper(a, b) / 2)
            if t.lower(a, b):
                K = K + (v("c", a) * v("c", b)).scale(t.lower(a, b) / 2)
    Q_BRS = Q_BRS.scale(I)
    Qbar = Qbar.scale(I)
    return ChargeSet(
        H_tilde=extended_hamiltonian(model),
        Q_BRS=Q_BRS,
        Qbar_BRS=Qbar,
        Q_g=Q_g,
        K=K,
        Kbar=Kbar,
        N_H=N_H,
        Nbar_H=Nbar,
        Q_1=Q_BRS - Nbar,
        Q_2=Qbar + N_H,
    )


def conservation_report(cs: ChargeSet) -> Dict[str, GradedPolynomial]:
    """``{Q, H~}`` for every charge; all should vanish."""
    return {name: epb(q, cs.H_tilde) for name, q in cs.charges().items()}


def proportionality(p: GradedPolynomial, q: GradedPolynomial) -> ScalarC | None:
    """The constant ``k`` with ``p == k*q``, or None if there is none.

    Zero ``q`` only matches zero ``p`` (returned constant 0).
    """
    if q.is_zero():
        return ScalarC(0) if p.is_zero() else None
    key, qc = next(iter(q.items()))
    k = p.terms.get(key, ScalarC(0)) / qc
    return k if p == q.scale(k) else None


def susy_square(cs: ChargeSet) -> Tuple[GradedPolynomial, GradedPolynomial]:
    half = Fraction(1, 2)
    return epb(cs.Q_1, cs.Q_1).scale(half), epb(cs.Q_2, cs.Q_2).scale(half)


def brs_nilpotency(cs: ChargeSet) -> Tuple[GradedPolynomial, GradedPolynomial, GradedPolynomial]:
    return (
        epb(cs.Q_BRS, cs.Q_BRS),
        epb(cs.Qbar_BRS, cs.Qbar_BRS),
        epb(cs.Q_BRS, cs.Qbar_BRS),
    )
