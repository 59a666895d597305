"""Exact identity suites run against a model.

Every check compares two polynomials and records the difference; an
identity passes only when that residual is exactly zero.  Random inputs come
from a ``random.Random`` seeded per suite, so reports are reproducible.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from . import components
from .algebra import I, GradedPolynomial, ScalarC, Var, partial_even
from .cartan import (
    FLAT_SIGN,
    SHARP_SIGN,
    MultivectorSpec,
    _k_pair,
    basis_forms,
    degree_count,
    ext_d,
    flat,
    grad_sharp,
    hat_form,
    hat_vec,
    interior,
    lie_bracket,
    lie_derivative,
    sharp,
)
from .charges import SUSY_KAPPA, PhaseModel, brs_nilpotency, build_charges, conservation_report, susy_square
from .epb import epb
from .expr import format_poly, parse
from .superfield import berezin_H

__all__ = [
    "Identity",
    "SUITES",
    "run_suite",
    "random_monomial",
    "random_phi_polynomial",
    "fundamental_table",
    "motion_expected",
]

SUITES = ("algebra", "charges", "cartan", "superfield")
SEED = 20240611


@dataclass
class Identity:
    name: str
    passed: bool
    checked: int = 1
    residual: Optional[str] = None

    def to_json(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "checked": self.checked}
        if not self.passed:
            out["residual"] = self.residual
        return out


class _Recorder:
    """Accumulates many residual checks under one identity name."""

    def __init__(self):
        self.items: Dict[str, Identity] = {}

    def check(self, name: str, residual: GradedPolynomial, context: str = "") -> None:
        ident = self.items.setdefault(name, Identity(name, True, 0))
        ident.checked += 1
        if ident.passed and not residual.is_zero():
            ident.passed = False
            prefix = f"{context}: " if context else ""
            ident.residual = prefix + format_poly(residual)

    def result(self) -> List[Identity]:
        return list(self.items.values())


# ---------------------------------------------------------------- inputs
def random_monomial(n: int, rng: random.Random, max_power: int = 2, ghost_prob: float = 0.35) -> GradedPolynomial:
    """A single monomial with a nonzero rational coefficient (so it has a definite parity)."""
    coeff = Fraction(rng.choice([-1, 1]) * rng.randint(1, 5), rng.randint(1, 3))
    p = GradedPolynomial.const(n, coeff)
    for kind in ("phi", "lam"):
        for a in range(1, 2 * n + 1):
            e = rng.randint(0, max_power)
            if e:
                p = p * GradedPolynomial.var(n, kind, a) ** e
    for kind in ("c", "cb"):
        for a in range(1, 2 * n + 1):
            if rng.random() < ghost_prob:
                p = p * GradedPolynomial.var(n, kind, a)
    return p


def random_phi_polynomial(n: int, degree: int, rng: random.Random, terms: int = 5,
                          allow_constant: bool = True) -> GradedPolynomial:
    """Random phi-polynomial with small rational coefficients and total degree <= ``degree``."""
    N = 2 * n
    out = GradedPolynomial.zero(n)
    lo = 0 if allow_constant else 1
    for _ in range(terms):
        d = rng.randint(lo, degree)
        mono = GradedPolynomial.const(n, Fraction(rng.randint(-6, 6), rng.randint(1, 4)))
        for _ in range(d):
            mono = mono * GradedPolynomial.var(n, "phi", rng.randint(1, N))
        out = out + mono
    return out


def fundamental_table(n: int) -> Dict[Tuple[str, int, str, int], ScalarC]:
    """Nonzero brackets among generators: {phi^a, lam_b} = delta, {cb_b, c^a} = -i delta and mirrors."""
    out = {}
    for a in range(1, 2 * n + 1):
        out[("phi", a, "lam", a)] = ScalarC(1)
        out[("lam", a, "phi", a)] = ScalarC(-1)
        out[("cb", a, "c", a)] = -I
        out[("c", a, "cb", a)] = -I
    return out


def motion_expected(model: PhaseModel) -> Dict[str, List[GradedPolynomial]]:
    """Right-hand sides of the extended equations of motion, written out by components."""
    N = model.N
    v = model.v
    phi_dot, c_dot, cb_dot, lam_dot = [], [], [], []
    A = [[model._raise(a, [row[b] for row in model.hessian]) for b in range(N)] for a in range(1, N + 1)]
    for a in range(N):
        phi_dot.append(model.flow[a])
        acc = GradedPolynomial.zero(model.n)
        for b in range(N):
            acc = acc + A[a][b] * v("c", b + 1)
        c_dot.append(acc)
    for b in range(N):
        cb = GradedPolynomial.zero(model.n)
        lam = GradedPolynomial.zero(model.n)
        for a in range(N):
            cb = cb - v("cb", a + 1) * A[a][b]
            lam = lam - A[a][b] * v("lam", a + 1)
        source = GradedPolynomial.zero(model.n)
        for a in range(N):
            for d in range(N):
                third = [partial_even(row[b], Var("phi", d + 1)) for row in model.hessian]
                coeff = model._raise(a + 1, third)
                if coeff:
                    source = source + v("cb", a + 1) * coeff * v("c", d + 1)
        cb_dot.append(cb)
        lam_dot.append(lam - source.scale(I))
    return {"phi": phi_dot, "c": c_dot, "cb": cb_dot, "lam": lam_dot}


# ---------------------------------------------------------------- suites
def suite_algebra(model: PhaseModel, rng: random.Random, triples: int = 40) -> List[Identity]:
    n = model.n
    rec = _Recorder()
    table = fundamental_table(n)
    kinds = ("phi", "lam", "c", "cb")
    for k1, k2 in itertools.product(kinds, repeat=2):
        for a, b in itertools.product(range(1, 2 * n + 1), repeat=2):
            got = epb(GradedPolynomial.var(n, k1, a), GradedPolynomial.var(n, k2, b))
            want = GradedPolynomial.const(n, table.get((k1, a, k2, b), ScalarC(0)))
            rec.check("fundamental_brackets", got - want, f"{{{k1}[{a}], {k2}[{b}]}}")
    for _ in range(triples):
        A, B, C = (random_monomial(n, rng) for _ in range(3))
        pa, pb, pc = A.parity(), B.parity(), C.parity()
        sign = lambda k: -1 if k % 2 else 1  # noqa: E731
        rec.check("graded_antisymmetry", epb(A, B) + epb(B, A).scale(sign(pa * pb)))
        rec.check("graded_jacobi",
                  epb(A, epb(B, C)).scale(sign(pa * pc)) + epb(B, epb(C, A)).scale(sign(pb * pa))
                  + epb(C, epb(A, B)).scale(sign(pc * pb)))
        rec.check("graded_leibniz",
                  epb(A, B * C) - epb(A, B) * C - (B * epb(A, C)).scale(sign(pa * pb)))
        rec.check("associativity", (A * B) * C - A * (B * C))
    rec.check("expression_roundtrip", parse(format_poly(model.H), n) - model.H)
    return rec.result()


def suite_charges(model: PhaseModel, rng: random.Random) -> List[Identity]:
    rec = _Recorder()
    cs = build_charges(model)
    expected = motion_expected(model)
    for kind, rows in expected.items():
        for a, want in enumerate(rows, start=1):
            got = epb(model.v(kind, a), cs.H_tilde)
            rec.check(f"equation_of_motion.{kind}", got - want, f"{kind}[{a}]")
    for name, residual in sorted(conservation_report(cs).items()):
        rec.check(f"conservation.{name}", residual)
    sq1, sq2 = susy_square(cs)
    rec.check("susy.Q_1_square", sq1 - cs.H_tilde.scale(SUSY_KAPPA))
    rec.check("susy.Q_2_square", sq2 - cs.H_tilde.scale(SUSY_KAPPA))
    rec.check("susy.Q_1_Q_2_anticommute", epb(cs.Q_1, cs.Q_2))
    qq, qbqb, qqb = brs_nilpotency(cs)
    rec.check("brs.Q_BRS_nilpotent", qq)
    rec.check("brs.Qbar_BRS_nilpotent", qbqb)
    rec.check("brs.Q_BRS_Qbar_BRS_anticommute", qqb)
    return rec.result()


def _second_field(model: PhaseModel) -> MultivectorSpec:
    """A fixed non-Hamiltonian companion field with quadratic components."""
    N = model.N
    phi = [model.v("phi", a) for a in range(1, N + 1)]
    comps = [phi[(a + 1) % N] * phi[a] + phi[0] for a in range(N)]
    return MultivectorSpec.vector(comps)


def suite_cartan(model: PhaseModel, rng: random.Random, coeff_degree: int = 2) -> List[Identity]:
    n = model.n
    table = model.table
    rec = _Recorder()
    V = MultivectorSpec.vector(model.flow)
    W = _second_field(model)
    fields = (("V_H", V), ("W", W))
    K = _k_pair(table)[0]
    for F in basis_forms(n, coeff_degree):
        Fh = hat_form(F)
        ctx = format_poly(Fh)
        rec.check("d.components", ext_d(Fh) - hat_form(components.d(F)), ctx)
        rec.check("d.squared", ext_d(ext_d(Fh)), ctx)
        rec.check("degree_operator", Fh.scale(degree_count(Fh)) - Fh.scale(F.degree), ctx)
        for label, X in fields:
            Xh = hat_vec(X)
            iota = interior(Xh, Fh)
            rec.check(f"interior.components.{label}", iota - hat_form(components.interior(X, F)), ctx)
            lie = lie_derivative(X, Fh)
            rec.check(f"lie_derivative.components.{label}", lie - hat_form(components.lie_derivative(X, F)), ctx)
            rec.check(f"cartan_magic_formula.{label}", lie - ext_d(interior(Xh, Fh)) - interior(Xh, ext_d(Fh)), ctx)
    rec.check("lie_bracket.components", hat_vec(lie_bracket(V, W)) - hat_vec(components.lie_bracket(V, W)))
    rec.check("lie_derivative.symplectic_form_invariant", lie_derivative(V, K))
    for label, X in fields:
        Xh = hat_vec(X)
        fl = flat(Xh, table)
        rec.check(f"flat.components.{label}", fl - hat_form(components.flat(X, table)).scale(FLAT_SIGN))
        want_sharp = hat_vec(components.sharp(components.flat(X, table), table))
        rec.check(f"sharp.components.{label}", sharp(fl, table) - want_sharp.scale(FLAT_SIGN * SHARP_SIGN))
    rec.check("hamiltonian_field", grad_sharp(model.H, table) - hat_vec(components.hamiltonian_field(model.H, table)))
    return rec.result()


def suite_superfield(model: PhaseModel, rng: random.Random) -> List[Identity]:
    from .charges import extended_hamiltonian

    rec = _Recorder()
    rec.check("berezin_integral_equals_extended_hamiltonian", berezin_H(model) - extended_hamiltonian(model))
    return rec.result()


_RUNNERS: Dict[str, Callable[[PhaseModel, random.Random], List[Identity]]] = {
    "algebra": suite_algebra,
    "charges": suite_charges,
    "cartan": suite_cartan,
    "superfield": suite_superfield,
}


def run_suite(model: PhaseModel, suite: str, seed: int = SEED) -> Dict[str, List[Identity]]:
    """Run one suite (or ``all``) and return identities grouped by suite name."""
    names: Iterable[str] = SUITES if suite == "all" else (suite,)
    out = {}
    for name in names:
        if name not in _RUNNERS:
            raise ValueError(f"unknown suite {name!r}")
        out[name] = _RUNNERS[name](model, random.Random(seed))
    return out
