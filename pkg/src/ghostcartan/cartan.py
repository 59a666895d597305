"""Hat map and Cartan calculus realized through the extended Poisson bracket.

Forms hat to polynomials in ``c``, multivectors to polynomials in ``cb``:

    F = (1/p!) F_{a1..ap} dphi^a1 ^ ... ^ dphi^ap  ->  (1/p!) F_{a1..ap} c^a1 ... c^ap
    V = (1/p!) V^{a1..ap} d_a1 ^ ... ^ d_ap        ->  (1/p!) V^{a1..ap} cb_a1 ... cb_ap

and each Cartan operation is a bracket with a fixed charge.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from math import factorial
from typing import Dict, Mapping, Sequence, Tuple

from .algebra import I, GradedPolynomial, ScalarC, Var, partial_even
from .charges import proportionality
from .epb import BracketTable, epb

__all__ = [
    "FormSpec",
    "MultivectorSpec",
    "FLAT_SIGN",
    "SHARP_SIGN",
    "hat_form",
    "hat_vec",
    "unhat_form",
    "unhat_vec",
    "ext_d",
    "interior",
    "degree_count",
    "flat",
    "sharp",
    "grad_sharp",
    "lie_derivative",
    "lie_bracket",
    "vector_hamiltonian",
]

# i{K, V^} = FLAT_SIGN * hat(omega(V, .)) and i{Kbar, a^} = SHARP_SIGN * hat(a^sharp);
# both measured at n=1 against the component formulas.
FLAT_SIGN = -1
SHARP_SIGN = -1


def _perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq`` (0 if it repeats an entry)."""
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    s = list(seq)
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if s[i] > s[j]:
                sign = -sign
    return sign


class _Antisymmetric:
    """Totally antisymmetric array of phi-polynomials stored by increasing index tuples."""

    kind = ""

    def __init__(self, n: int, degree: int, components: Mapping[Tuple[int, ...], GradedPolynomial] | None = None):
        N = 2 * n
        if degree < 0:
            raise ValueError("degree must be non-negative")
        self.n = n
        self.degree = degree
        comps: Dict[Tuple[int, ...], GradedPolynomial] = {}
        for idx, value in (components or {}).items():
            idx = tuple(idx)
            if len(idx) != degree or any(not 1 <= a <= N for a in idx):
                raise ValueError(f"bad index tuple {idx} for degree {degree}, n={n}")
            if any(idx[k] >= idx[k + 1] for k in range(len(idx) - 1)):
                raise ValueError(f"component keys must be strictly increasing, got {idx}; "
                                 "use antisymmetrize() for full arrays")
            value = _coerce_coeff(n, value)
            if value:
                comps[idx] = value
        self.components = comps

    @classmethod
    def antisymmetrize(cls, n: int, degree: int, array: Mapping[Tuple[int, ...], object]):
        """Build from an arbitrary array by taking ``F_[a1..ap]``."""
        acc: Dict[Tuple[int, ...], GradedPolynomial] = {}
        for idx, value in array.items():
            s = _perm_sign(idx)
            if not s:
                continue
            key = tuple(sorted(idx))
            term = _coerce_coeff(n, value).scale(ScalarC(s, 0) / factorial(degree))
            acc[key] = acc[key] + term if key in acc else term
        return cls(n, degree, acc)

    def component(self, idx: Sequence[int]) -> GradedPolynomial:
        s = _perm_sign(idx)
        zero = GradedPolynomial.zero(self.n)
        if not s:
            return zero
        value = self.components.get(tuple(sorted(idx)), zero)
        return value if s > 0 else -value

    def __eq__(self, other):
        return (type(self) is type(other) and self.n == other.n
                and self.degree == other.degree and self.components == other.components)

    def __repr__(self):
        body = ", ".join(f"{k}: {v}" for k, v in sorted(self.components.items()))
        return f"{type(self).__name__}(n={self.n}, degree={self.degree}, {{{body}}})"


def _coerce_coeff(n: int, value) -> GradedPolynomial:
    if not isinstance(value, GradedPolynomial):
        value = GradedPolynomial.const(n, value)
    if value.n != n:
        raise ValueError("component built for a different n")
    if not value.free_of("lam", "c", "cb"):
        raise ValueError("components must be polynomials in phi only")
    return value


class FormSpec(_Antisymmetric):
    kind = "c"


class MultivectorSpec(_Antisymmetric):
    kind = "cb"

    @classmethod
    def vector(cls, components: Sequence[GradedPolynomial]) -> "MultivectorSpec":
        """Degree-1 field from its ``2n`` components ``V^a``."""
        n = len(components) // 2
        return cls(n, 1, {(a + 1,): v for a, v in enumerate(components)})

    def vector_components(self):
        if self.degree != 1:
            raise ValueError("not a vector field")
        return [self.component((a,)) for a in range(1, 2 * self.n + 1)]


def _hat(spec: _Antisymmetric) -> GradedPolynomial:
    n = spec.n
    out = GradedPolynomial.zero(n)
    for idx, value in spec.components.items():
        mono = GradedPolynomial.const(n, 1)
        for a in idx:
            mono = mono * GradedPolynomial.var(n, spec.kind, a)
        out = out + value * mono
    return out


def hat_form(F: FormSpec) -> GradedPolynomial:
    return _hat(F)


def hat_vec(V: MultivectorSpec) -> GradedPolynomial:
    return _hat(V)


def _unhat(p: GradedPolynomial, cls, kind: str):
    n, N = p.n, 2 * p.n
    other = "cb" if kind == "c" else "c"
    if not p.free_of("lam", other):
        raise ValueError(f"not a hatted {'form' if kind == 'c' else 'multivector'}: "
                         f"depends on lam or {other}")
    shift = 0 if kind == "c" else N
    comps: Dict[Tuple[int, ...], Dict] = {}
    degree = None
    for (exps, mask), coeff in p.terms.items():
        idx = tuple(b - shift + 1 for b in range(2 * N) if mask >> b & 1)
        if degree is None:
            degree = len(idx)
        elif degree != len(idx):
            raise ValueError("mixed ghost degree; split the polynomial by degree first")
        comps.setdefault(idx, {})[(exps, 0)] = coeff
    return cls(n, degree or 0, {k: GradedPolynomial(n, v) for k, v in comps.items()})


def unhat_form(p: GradedPolynomial) -> FormSpec:
    return _unhat(p, FormSpec, "c")


def unhat_vec(p: GradedPolynomial) -> MultivectorSpec:
    return _unhat(p, MultivectorSpec, "cb")


@lru_cache(maxsize=None)
def _q_brs(n: int) -> GradedPolynomial:
    out = GradedPolynomial.zero(n)
    for a in range(1, 2 * n + 1):
        out = out + GradedPolynomial.var(n, "c", a) * GradedPolynomial.var(n, "lam", a)
    return out.scale(I)


@lru_cache(maxsize=None)
def _q_ghost(n: int) -> GradedPolynomial:
    out = GradedPolynomial.zero(n)
    for a in range(1, 2 * n + 1):
        out = out + GradedPolynomial.var(n, "c", a) * GradedPolynomial.var(n, "cb", a)
    return out


@lru_cache(maxsize=None)
def _k_pair(table: BracketTable) -> Tuple[GradedPolynomial, GradedPolynomial, GradedPolynomial]:
    n, N = table.n, 2 * table.n
    v = lambda kind, a: GradedPolynomial.var(n, kind, a)  # noqa: E731
    K = Kbar = Qbar = GradedPolynomial.zero(n)
    for a in range(1, N + 1):
        for b in range(1, N + 1):
            if table.lower(a, b):
                K = K + (v("c", a) * v("c", b)).scale(table.lower(a, b) / 2)
            if table.upper(a, b):
                Kbar = Kbar + (v("cb", a) * v("cb", b)).scale(table.upper(a, b) / 2)
                Qbar = Qbar + (v("cb", a) * v("lam", b)).scale(table.upper(a, b))
    return K, Kbar, Qbar.scale(I)


def ext_d(F: GradedPolynomial) -> GradedPolynomial:
    """Exterior derivative ``i{Q_BRS, F^}``."""
    return epb(_q_brs(F.n), F).scale(I)


def interior(V: GradedPolynomial, F: GradedPolynomial) -> GradedPolynomial:
    """Contraction ``i{V^, F^}``."""
    return epb(V, F).scale(I)


def degree_count(F: GradedPolynomial) -> int:
    """Eigenvalue of ``i{Q_g, .}`` on ``F``: the form degree for hatted forms."""
    image = epb(_q_ghost(F.n), F).scale(I)
    k = proportionality(image, F)
    if F.is_zero():
        return 0
    if k is None or k.im or k.re.denominator != 1:
        raise ValueError("polynomial is not homogeneous in ghost number")
    return int(k.re)


def flat(V: GradedPolynomial, table: BracketTable | None = None) -> GradedPolynomial:
    table = table or BracketTable.standard(V.n)
    return epb(_k_pair(table)[0], V).scale(I)


def sharp(alpha: GradedPolynomial, table: BracketTable | None = None) -> GradedPolynomial:
    table = table or BracketTable.standard(alpha.n)
    return epb(_k_pair(table)[1], alpha).scale(I)


def grad_sharp(f: GradedPolynomial, table: BracketTable | None = None) -> GradedPolynomial:
    """``i{Qbar_BRS, f}``: the hatted Hamiltonian vector field of ``f``."""
    if not f.free_of("lam", "c", "cb"):
        raise ValueError("grad_sharp takes a function of phi only")
    table = table or BracketTable.standard(f.n)
    return epb(_k_pair(table)[2], f).scale(I)


def vector_hamiltonian(V: MultivectorSpec) -> GradedPolynomial:
    """``H~_V = lam_a V^a + i cb_a (d_b V^a) c^b``."""
    n = V.n
    comps = V.vector_components()
    out = GradedPolynomial.zero(n)
    ghost = GradedPolynomial.zero(n)
    for a, Va in enumerate(comps, start=1):
        if not Va:
            continue
        out = out + GradedPolynomial.var(n, "lam", a) * Va
        for b in range(1, 2 * n + 1):
            dV = partial_even(Va, Var("phi", b))
            if dV:
                ghost = ghost + GradedPolynomial.var(n, "cb", a) * dV * GradedPolynomial.var(n, "c", b)
    return out + ghost.scale(I)


def lie_derivative(V: MultivectorSpec, F: GradedPolynomial) -> GradedPolynomial:
    """``{-H~_V, F^}``."""
    return epb(-vector_hamiltonian(V), F)


def lie_bracket(V: MultivectorSpec, W: MultivectorSpec) -> MultivectorSpec:
    """``[V, W]`` read back from ``{-H~_V, W^}``."""
    image = epb(-vector_hamiltonian(V), hat_vec(W))
    if image.is_zero():
        return MultivectorSpec(V.n, 1)
    return unhat_vec(image)


def basis_forms(n: int, max_coeff_degree: int):
    """All monomial forms ``phi^alpha dphi^I`` with ``|alpha| <= max_coeff_degree``."""
    N = 2 * n
    for p in range(N + 1):
        for idx in itertools.combinations(range(1, N + 1), p):
            for mono in phi_monomials(n, max_coeff_degree):
                yield FormSpec(n, p, {idx: mono})


def phi_monomials(n: int, max_degree: int):
    N = 2 * n
    for total in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(N), total):
            exps = [0] * (4 * n)
            for k in combo:
                exps[k] += 1
            yield GradedPolynomial._raw(n, {(tuple(exps), 0): ScalarC(1)})
