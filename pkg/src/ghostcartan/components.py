"""Textbook component formulas for forms and vector fields on flat R^2n.

This is deliberately independent of the bracket machinery: everything here
is index bookkeeping on antisymmetric arrays of phi-polynomials.  It serves
as the reference the bracket-realized calculus is checked against.
"""
from __future__ import annotations

import itertools
from typing import Dict

from .algebra import GradedPolynomial, Var, partial_even
from .cartan import FormSpec, MultivectorSpec
from .epb import BracketTable

__all__ = [
    "d",
    "interior",
    "lie_derivative",
    "flat",
    "sharp",
    "hamiltonian_field",
    "lie_bracket",
    "homotopy",
    "homogeneous_parts",
]


def _dphi(p: GradedPolynomial, a: int) -> GradedPolynomial:
    return partial_even(p, Var("phi", a))


def d(F: FormSpec) -> FormSpec:
    n, p, N = F.n, F.degree, 2 * F.n
    out: Dict = {}
    for J in itertools.combinations(range(1, N + 1), p + 1):
        acc = GradedPolynomial.zero(n)
        for j, a in enumerate(J):
            rest = J[:j] + J[j + 1:]
            term = _dphi(F.component(rest), a)
            acc = acc + term if j % 2 == 0 else acc - term
        out[J] = acc
    return FormSpec(n, p + 1, out)


def interior(V: MultivectorSpec, F: FormSpec) -> FormSpec:
    n, p, N = F.n, F.degree, 2 * F.n
    if p == 0:
        return FormSpec(n, 0)
    comps = V.vector_components()
    out: Dict = {}
    for K in itertools.combinations(range(1, N + 1), p - 1):
        acc = GradedPolynomial.zero(n)
        for a in range(1, N + 1):
            if comps[a - 1]:
                acc = acc + comps[a - 1] * F.component((a,) + K)
        out[K] = acc
    return FormSpec(n, p - 1, out)


def lie_derivative(V: MultivectorSpec, F: FormSpec) -> FormSpec:
    n, p, N = F.n, F.degree, 2 * F.n
    comps = V.vector_components()
    out: Dict = {}
    for I in itertools.combinations(range(1, N + 1), p):
        acc = GradedPolynomial.zero(n)
        for b in range(1, N + 1):
            acc = acc + comps[b - 1] * _dphi(F.component(I), b)
        for j, a in enumerate(I):
            for b in range(1, N + 1):
                dV = _dphi(comps[b - 1], a)
                if dV:
                    acc = acc + dV * F.component(I[:j] + (b,) + I[j + 1:])
        out[I] = acc
    return FormSpec(n, p, out)


def flat(V: MultivectorSpec, table: BracketTable) -> FormSpec:
    """``omega(V, .)``: components ``omega_ab V^a``."""
    n, N = V.n, 2 * V.n
    comps = V.vector_components()
    out = {}
    for b in range(1, N + 1):
        acc = GradedPolynomial.zero(n)
        for a in range(1, N + 1):
            w = table.lower(a, b)
            if w:
                acc = acc + comps[a - 1].scale(w)
        out[(b,)] = acc
    return FormSpec(n, 1, out)


def sharp(alpha: FormSpec, table: BracketTable) -> MultivectorSpec:
    """Inverse of ``flat``: components ``-omega^{ab} alpha_b``."""
    n, N = alpha.n, 2 * alpha.n
    out = {}
    for a in range(1, N + 1):
        acc = GradedPolynomial.zero(n)
        for b in range(1, N + 1):
            w = table.upper(a, b)
            if w:
                acc = acc - alpha.component((b,)).scale(w)
        out[(a,)] = acc
    return MultivectorSpec(n, 1, out)


def hamiltonian_field(f: GradedPolynomial, table: BracketTable) -> MultivectorSpec:
    """Components ``omega^{ab} d_b f``."""
    n, N = f.n, 2 * f.n
    grad = [_dphi(f, b) for b in range(1, N + 1)]
    out = {}
    for a in range(1, N + 1):
        acc = GradedPolynomial.zero(n)
        for b in range(1, N + 1):
            w = table.upper(a, b)
            if w:
                acc = acc + grad[b - 1].scale(w)
        out[(a,)] = acc
    return MultivectorSpec(n, 1, out)


def lie_bracket(V: MultivectorSpec, W: MultivectorSpec) -> MultivectorSpec:
    n, N = V.n, 2 * V.n
    v, w = V.vector_components(), W.vector_components()
    out = {}
    for a in range(1, N + 1):
        acc = GradedPolynomial.zero(n)
        for b in range(1, N + 1):
            acc = acc + v[b - 1] * _dphi(w[a - 1], b) - w[b - 1] * _dphi(v[a - 1], b)
        out[(a,)] = acc
    return MultivectorSpec(n, 1, out)


def homogeneous_parts(p: GradedPolynomial) -> Dict[int, GradedPolynomial]:
    N = 2 * p.n
    parts: Dict[int, Dict] = {}
    for key, coeff in p.terms.items():
        parts.setdefault(sum(key[0][:N]), {})[key] = coeff
    return {k: GradedPolynomial(p.n, v) for k, v in parts.items()}


def homotopy(F: FormSpec) -> FormSpec:
    """Poincare-lemma homotopy ``h`` with ``d h F + h d F = F`` for ``deg F >= 1``.

    On a form whose coefficients are homogeneous of degree k this is
    ``iota_E F / (k + p)`` with ``E = phi^a d_a`` the Euler field.
    """
    n, p, N = F.n, F.degree, 2 * F.n
    if p == 0:
        raise ValueError("homotopy operator is defined on forms of degree >= 1")
    euler = MultivectorSpec.vector([GradedPolynomial.var(n, "phi", a) for a in range(1, N + 1)])
    pieces: Dict[int, Dict] = {}
    for idx, value in F.components.items():
        for k, part in homogeneous_parts(value).items():
            pieces.setdefault(k, {})[idx] = part
    out: Dict = {}
    for k, comps in pieces.items():
        contracted = interior(euler, FormSpec(n, p, comps))
        for idx, value in contracted.components.items():
            term = value / (k + p)
            out[idx] = out[idx] + term if idx in out else term
    return FormSpec(n, p - 1, out)

