"""Exact Z2-graded polynomial algebra on T*(PiTM).

For ``n`` degrees of freedom there are ``N = 2n`` phase-space directions.
The generators are

* even: ``phi[1..N]`` and ``lam[1..N]``
* odd:  ``c[1..N]`` and ``cb[1..N]``

A term is keyed by ``(exps, mask)``: ``exps`` is a length ``2N`` tuple of
exponents (phi first, then lam) and ``mask`` is an int whose bit ``k`` marks
the odd generator of global position ``k`` in the order
``c[1] < ... < c[N] < cb[1] < ... < cb[N]``.  Ghost monomials are always
stored in that order; reordering during multiplication produces the
permutation sign.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Iterator, Mapping, Tuple

__all__ = [
    "ScalarC",
    "Var",
    "GradedPolynomial",
    "GradingError",
    "mul",
    "add",
    "partial_even",
    "partial_odd",
    "grade",
]


class GradingError(ValueError):
    """Raised when an operation needs a homogeneous input and did not get one."""


class ScalarC:
    """Complex rational ``re + i*im`` with exact Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, ScalarC):
            self.re, self.im = re.re, re.im + Fraction(im)
            return
        if isinstance(re, complex):
            raise TypeError("floating complex values are not exact; pass rationals")
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, x) -> "ScalarC":
        if isinstance(x, ScalarC):
            return x
        if isinstance(x, (int, Fraction, Rational)):
            return cls(x)
        raise TypeError(f"cannot use {type(x).__name__} as an exact coefficient")

    def __add__(self, other):
        o = ScalarC.coerce(other)
        return ScalarC(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = ScalarC.coerce(other)
        return ScalarC(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return ScalarC.coerce(other) - self

    def __mul__(self, other):
        o = ScalarC.coerce(other)
        if not self.im and not o.im:
            return ScalarC(self.re * o.re)
        return ScalarC(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = ScalarC.coerce(other)
        if not o:
            raise ZeroDivisionError("division by zero coefficient")
        if not o.im:
            return ScalarC(self.re / o.re, self.im / o.re)
        den = o.re * o.re + o.im * o.im
        return ScalarC(
            (self.re * o.re + self.im * o.im) / den,
            (self.im * o.re - self.re * o.im) / den,
        )

    def __rtruediv__(self, other):
        return ScalarC.coerce(other) / self

    def __neg__(self):
        return ScalarC(-self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            o = ScalarC.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def conjugate(self) -> "ScalarC":
        return ScalarC(self.re, -self.im)

    def is_real(self) -> bool:
        return not self.im

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"ScalarC({self.re}, {self.im})"

    def __str__(self):
        return format_scalar(self)


I = ScalarC(0, 1)
ONE = ScalarC(1)
ZERO = ScalarC(0)


def _fmt_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(s: ScalarC) -> str:
    if not s.im:
        return _fmt_fraction(s.re)
    if not s.re:
        if s.im == 1:
            return "i"
        if s.im == -1:
            return "-i"
        return f"{_fmt_fraction(s.im)}*i"
    sign = "-" if s.im < 0 else "+"
    mag = abs(s.im)
    im = "i" if mag == 1 else f"{_fmt_fraction(mag)}*i"
    return f"({_fmt_fraction(s.re)} {sign} {im})"


@dataclass(frozen=True, order=True)
class Var:
    """A single generator; ``kind`` is one of phi, lam, c, cb and ``index`` is 1-based."""

    kind: str
    index: int

    EVEN = ("phi", "lam")
    ODD = ("c", "cb")

    def __post_init__(self):
        if self.kind not in self.EVEN + self.ODD:
            raise ValueError(f"unknown variable kind {self.kind!r}")
        if self.index < 1:
            raise ValueError(f"variable index must be >= 1, got {self.index}")

    @property
    def odd(self) -> bool:
        return self.kind in self.ODD

    def position(self, n: int) -> int:
        """Slot in the exponent tuple (even) or bit in the ghost mask (odd)."""
        N = 2 * n
        if self.index > N:
            raise ValueError(f"{self} out of range for n={n} (indices 1..{N})")
        offset = N if self.kind in ("lam", "cb") else 0
        return offset + self.index - 1

    def __str__(self):
        return f"{self.kind}[{self.index}]"


def _inversions(left: int, right: int) -> int:
    """Number of pairs (a in left, b in right) with a > b."""
    count = 0
    while right:
        low = right & -right
        count += (left & ~((low << 1) - 1)).bit_count()
        right ^= low
    return count


Key = Tuple[Tuple[int, ...], int]


class GradedPolynomial:
    """Immutable sparse polynomial over complex rationals.

    Construct through the class helpers (``var``, ``const``, ``from_terms``)
    or by combining existing polynomials with ``+ - *``.
    """

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Key, ScalarC] | None = None):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = n
        clean: Dict[Key, ScalarC] = {}
        if terms:
            width = 4 * n
            for (exps, mask), coeff in terms.items():
                if len(exps) != width or mask >> width:
                    raise ValueError("term key does not match n")
                coeff = ScalarC.coerce(coeff)
                if coeff:
                    clean[(tuple(exps), mask)] = coeff
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, n: int, terms: Dict[Key, ScalarC]) -> "GradedPolynomial":
        obj = cls.__new__(cls)
        obj.n = n
        obj._terms = terms
        obj._hash = None
        return obj

    # -- constructors --------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> "GradedPolynomial":
        return cls._raw(n, {})

    @classmethod
    def const(cls, n: int, value) -> "GradedPolynomial":
        value = ScalarC.coerce(value)
        if not value:
            return cls.zero(n)
        return cls._raw(n, {((0,) * (4 * n), 0): value})

    @classmethod
    def var(cls, n: int, kind: str, index: int) -> "GradedPolynomial":
        v = Var(kind, index)
        pos = v.position(n)
        exps = [0] * (4 * n)
        mask = 0
        if v.odd:
            mask = 1 << pos
        else:
            exps[pos] = 1
        return cls._raw(n, {(tuple(exps), mask): ONE})

    @classmethod
    def from_terms(cls, n: int, terms: Mapping[Key, object]) -> "GradedPolynomial":
        return cls(n, terms)

    # -- inspection ----------------------------------------------------
    @property
    def terms(self) -> Mapping[Key, ScalarC]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Key, ScalarC]]:
        return iter(sorted(self._terms.items(), key=lambda kv: _sort_key(kv[0])))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other):
        if isinstance(other, GradedPolynomial):
            return self.n == other.n and self._terms == other._terms
        if isinstance(other, (int, Fraction, ScalarC)):
            return self._terms == GradedPolynomial.const(self.n, other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    def constant_value(self) -> ScalarC | None:
        """The scalar value if this polynomial is constant, else None."""
        if not self._terms:
            return ZERO
        if len(self._terms) == 1:
            (exps, mask), coeff = next(iter(self._terms.items()))
            if mask == 0 and not any(exps):
                return coeff
        return None

    def parity(self) -> int:
        """0 (even) or 1 (odd); raises GradingError on mixed parity."""
        parities = {mask.bit_count() & 1 for _, mask in self._terms}
        if len(parities) > 1:
            raise GradingError(f"mixed parity polynomial: {self}")
        return parities.pop() if parities else 0

    def even_part(self) -> "GradedPolynomial":
        return self._filter(lambda k: not k[1].bit_count() & 1)

    def odd_part(self) -> "GradedPolynomial":
        return self._filter(lambda k: k[1].bit_count() & 1)

    def parity_twist(self) -> "GradedPolynomial":
        """The grading automorphism: even part minus odd part."""
        return GradedPolynomial._raw(
            self.n,
            {k: (-v if k[1].bit_count() & 1 else v) for k, v in self._terms.items()},
        )

    def _filter(self, pred) -> "GradedPolynomial":
        return GradedPolynomial._raw(self.n, {k: v for k, v in self._terms.items() if pred(k)})

    def free_of(self, *kinds: str) -> bool:
        """True if no term involves any generator of the given kinds."""
        N = 2 * self.n
        for exps, mask in self._terms:
            if "phi" in kinds and any(exps[:N]):
                return False
            if "lam" in kinds and any(exps[N:]):
                return False
            if "c" in kinds and mask & ((1 << N) - 1):
                return False
            if "cb" in kinds and mask >> N:
                return False
        return True

    def phi_degree(self) -> int:
        N = 2 * self.n
        return max((sum(exps[:N]) for exps, _ in self._terms), default=0)

    def is_real(self) -> bool:
        return all(v.is_real() for v in self._terms.values())

    # -- arithmetic ----------------------------------------------------
    def _check(self, other) -> "GradedPolynomial":
        if isinstance(other, GradedPolynomial):
            if other.n != self.n:
                raise ValueError(f"mismatched n: {self.n} vs {other.n}")
            return other
        return GradedPolynomial.const(self.n, other)

    def __add__(self, other):
        other = self._check(other)
        out = dict(self._terms)
        for k, v in other._terms.items():
            s = out.get(k)
            s = v if s is None else s + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return GradedPolynomial._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return GradedPolynomial._raw(self.n, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def scale(self, factor) -> "GradedPolynomial":
        factor = ScalarC.coerce(factor)
        if not factor:
            return GradedPolynomial.zero(self.n)
        return GradedPolynomial._raw(self.n, {k: v * factor for k, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, GradedPolynomial):
            return mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, GradedPolynomial):
            return mul(other, self)
        return self.scale(other)

    def __truediv__(self, other):
        if isinstance(other, GradedPolynomial):
            value = other.constant_value()
            if value is None:
                raise ValueError("can only divide by a constant polynomial")
            other = value
        return self.scale(ONE / ScalarC.coerce(other))

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = GradedPolynomial.const(self.n, 1)
        base = self
        while k:
            if k & 1:
                result = mul(result, base)
            base = mul(base, base)
            k >>= 1
        return result

    def __repr__(self):
        return f"GradedPolynomial(n={self.n}, {self})"

    def __str__(self):
        from .expr import format_poly

        return format_poly(self)


def _sort_key(key: Key):
    exps, mask = key
    return (mask.bit_count(), mask, sum(exps), tuple(-e for e in exps))


def mul(p: GradedPolynomial, q: GradedPolynomial) -> GradedPolynomial:
    """Product with Grassmann signs relative to the global generator order."""
    q = p._check(q)
    out: Dict[Key, ScalarC] = {}
    for (e1, m1), a in p._terms.items():
        for (e2, m2), b in q._terms.items():
            if m1 & m2:
                continue
            coeff = a * b
            if _inversions(m1, m2) & 1:
                coeff = -coeff
            key = (tuple(x + y for x, y in zip(e1, e2)), m1 | m2)
            s = out.get(key)
            s = coeff if s is None else s + coeff
            if s:
                out[key] = s
            else:
                del out[key]
    return GradedPolynomial._raw(p.n, out)


def add(p: GradedPolynomial, q: GradedPolynomial) -> GradedPolynomial:
    return p + q


def partial_even(p: GradedPolynomial, v: Var) -> GradedPolynomial:
    """Derivative with respect to a phi or lam variable."""
    if v.odd:
        raise ValueError(f"{v} is odd; use partial_odd")
    pos = v.position(p.n)
    out: Dict[Key, ScalarC] = {}
    for (exps, mask), coeff in p._terms.items():
        e = exps[pos]
        if e:
            new = exps[:pos] + (e - 1,) + exps[pos + 1:]
            out[(new, mask)] = coeff * e
    return GradedPolynomial._raw(p.n, out)


def partial_odd(p: GradedPolynomial, g: Var) -> GradedPolynomial:
    """Left Grassmann derivative: move ``g`` to the front, then strike it."""
    if not g.odd:
        raise ValueError(f"{g} is even; use partial_even")
    bit = 1 << g.position(p.n)
    below = bit - 1
    out: Dict[Key, ScalarC] = {}
    for (exps, mask), coeff in p._terms.items():
        if mask & bit:
            if (mask & below).bit_count() & 1:
                coeff = -coeff
            out[(exps, mask ^ bit)] = coeff
    return GradedPolynomial._raw(p.n, out)


def ghost_counts(mask: int, n: int) -> Tuple[int, int]:
    N = 2 * n
    return (mask & ((1 << N) - 1)).bit_count(), (mask >> N).bit_count()


def grade(p: GradedPolynomial) -> Tuple[int, str]:
    """Ghost number ``#c - #cb`` and parity of a ghost-number homogeneous polynomial."""
    first = None
    for key in sorted(p._terms, key=_sort_key):
        nc, ncb = ghost_counts(key[1], p.n)
        if first is None:
            first = (key, nc - ncb)
        elif nc - ncb != first[1]:
            a = GradedPolynomial._raw(p.n, {first[0]: p._terms[first[0]]})
            b = GradedPolynomial._raw(p.n, {key: p._terms[key]})
            raise GradingError(
                f"non-homogeneous ghost number: term {a} has {first[1]}, term {b} has {nc - ncb}"
            )
    if first is None:
        return 0, "even"
    number = first[1]
    return number, ("odd" if number % 2 else "even")


def variables(n: int, kind: str) -> Iterable[GradedPolynomial]:
    return [GradedPolynomial.var(n, kind, a) for a in range(1, 2 * n + 1)]
