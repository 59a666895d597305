"""Truncated equivariant cohomology of d - iota_V on L_V-invariant polynomial forms.

Cocycles are forms rho with ``(d - iota_V) rho = 0`` and ``L_V rho = 0``;
they are trivial when ``rho = (d - iota_V) chi`` with ``L_V chi = 0``.

Truncation: cocycles live in the DOMAIN (coefficient degree <= D).
Candidate preimages chi range over coefficient degree <= D + 1, since d
lowers the degree by one; a coboundary is only counted when it lands back in
the domain.  Classes are computed block by block in a grading preserved by
both operators, and each block is flagged ``complete`` when truncation
removed none of its elements.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, List, Optional, Tuple

from . import cartan
from .algebra import GradedPolynomial, ScalarC
from .cartan import MultivectorSpec
from .charges import PhaseModel
from .components import homogeneous_parts
from .expr import format_poly
from .linalg import Echelon, Vec, axpy, combine, nullspace

__all__ = [
    "BasisTooLarge",
    "CohomologyInstance",
    "CohomologyResult",
    "build_instance",
    "equivariant_cohomology",
    "compare_dimensions",
    "DEFAULT_MAX_BASIS",
]

DEFAULT_MAX_BASIS = 20000
Key = Tuple[Tuple[int, ...], int]


class BasisTooLarge(ValueError):
    pass


def max_basis_from_env() -> int:
    raw = os.environ.get("GHOSTCARTAN_MAX_BASIS")
    return int(raw) if raw else DEFAULT_MAX_BASIS


def vector_degree(V: MultivectorSpec) -> Tuple[int, bool]:
    """(max coefficient degree, homogeneous?) of a vector field; V = 0 gives (0, True)."""
    degrees = set()
    for comp in V.vector_components():
        degrees.update(homogeneous_parts(comp))
    if not degrees:
        return 0, True
    return max(degrees), len(degrees) == 1


def form_keys(n: int, max_degree: int) -> List[Key]:
    N = 2 * n
    keys = []
    for p in range(N + 1):
        for idx in itertools.combinations(range(N), p):
            mask = sum(1 << b for b in idx)
            for total in range(max_degree + 1):
                for combo in itertools.combinations_with_replacement(range(N), total):
                    exps = [0] * (4 * n)
                    for k in combo:
                        exps[k] += 1
                    keys.append((tuple(exps), mask))
    return keys


def key_bigrade(key: Key, n: int) -> Tuple[int, int]:
    """(form degree, coefficient degree)."""
    return key[1].bit_count(), sum(key[0][:2 * n])


def key_rank(key: Key):
    exps, mask = key
    return (mask.bit_count(), sum(exps), mask, tuple(-e for e in exps))


def _to_vec(p: GradedPolynomial) -> Vec:
    return dict(p.terms)


def _to_poly(n: int, v: Vec) -> GradedPolynomial:
    return GradedPolynomial(n, v)


@dataclass
class CohomologyInstance:
    n: int
    V: MultivectorSpec
    D: int
    deg_V: int
    homogeneous_V: bool
    basis: List[Key]
    ext_basis: List[Key]
    op_D: Dict[Key, Vec] = field(repr=False)
    op_L: Dict[Key, Vec] = field(repr=False)

    def __post_init__(self):
        self._domain = set(self.basis)
        self._Vhat = cartan.hat_vec(self.V)

    def in_domain(self, key: Key) -> bool:
        return key in self._domain

    def _unit(self, key: Key) -> GradedPolynomial:
        return GradedPolynomial(self.n, {key: ScalarC(1)})

    def column_D(self, key: Key) -> Vec:
        col = self.op_D.get(key)
        if col is None:
            x = self._unit(key)
            col = _to_vec(cartan.ext_d(x) - cartan.interior(self._Vhat, x))
            self.op_D[key] = col
        return col

    def column_L(self, key: Key) -> Vec:
        col = self.op_L.get(key)
        if col is None:
            col = _to_vec(cartan.lie_derivative(self.V, self._unit(key)))
            self.op_L[key] = col
        return col

    def apply(self, column: Callable[[Key], Vec], vec: Vec) -> Vec:
        out: Vec = {}
        for k, a in vec.items():
            out = axpy(out, a, column(k))
        return out

    def label(self, key: Key) -> Hashable:
        """Block label of a basis key in a grading preserved by both operators."""
        p, k = key_bigrade(key, self.n)
        if self._Vhat.is_zero():
            return (p, k)
        if self.homogeneous_V:
            return 2 * k + (self.deg_V + 1) * p
        return 0

    def preimage_label(self, label: Hashable) -> Hashable:
        if isinstance(label, tuple):
            p, k = label
            return (p - 1, k + 1)
        if self.homogeneous_V:
            return label - (self.deg_V - 1)
        return label

    def block_complete(self, label: Hashable) -> bool:
        """True if no element of this block or its preimage block was cut off."""
        if isinstance(label, tuple):
            return True
        if not self.homogeneous_V:
            return False
        N = 2 * self.n
        for lab, cap in ((label, self.D), (self.preimage_label(label), self.D + 1)):
            for p in range(N + 1):
                rest = lab - (self.deg_V + 1) * p
                if rest >= 0 and rest % 2 == 0 and rest // 2 > cap:
                    return False
        return True

    def square_identity(self) -> Tuple[bool, Dict[Key, Vec]]:
        """Check ``op_D . op_D == -op_L`` column by column on the domain.

        Returns (holds, residual columns).
        """
        residuals = {}
        for key in self.basis:
            sq = self.apply(self.column_D, self.column_D(key))
            res = axpy(sq, ScalarC(1), self.column_L(key))
            if res:
                residuals[key] = res
        return not residuals, residuals

    def commutator_DL(self) -> Dict[Key, Vec]:
        """Nonzero columns of ``op_D op_L - op_L op_D`` on the domain."""
        out = {}
        for key in self.basis:
            a = self.apply(self.column_D, self.column_L(key))
            b = self.apply(self.column_L, self.column_D(key))
            res = axpy(a, ScalarC(-1), b)
            if res:
                out[key] = res
        return out


def build_instance(source, D: int, max_basis: Optional[int] = None) -> CohomologyInstance:
    """Assemble the operator matrices for a vector field (or a model's Hamiltonian field)."""
    if isinstance(source, PhaseModel):
        V = MultivectorSpec.vector(source.flow)
    else:
        V = source
    if V.degree != 1:
        raise ValueError("equivariant cohomology needs a vector field (degree-1 multivector)")
    deg_V, homogeneous = vector_degree(V)
    if D < deg_V:
        raise ValueError(f"degree cap D={D} is below deg V={deg_V}")
    cap = max_basis if max_basis is not None else max_basis_from_env()
    ext = form_keys(V.n, D + 1)
    if len(ext) > cap:
        raise BasisTooLarge(f"basis of {len(ext)} elements exceeds the cap of {cap}")
    domain = [k for k in ext if sum(k[0]) <= D]
    inst = CohomologyInstance(V.n, V, D, deg_V, homogeneous, domain, ext, {}, {})
    for key in ext:
        inst.column_D(key)
        inst.column_L(key)
    return inst


@dataclass
class CohomologyClass:
    label: Hashable
    bigrade: Tuple[int, int]
    representative: GradedPolynomial
    complete: bool


@dataclass
class ExactnessCertificate:
    cocycle: GradedPolynomial
    preimage: GradedPolynomial


@dataclass
class CohomologyResult:
    instance: CohomologyInstance
    classes: List[CohomologyClass]
    certificates: List[ExactnessCertificate]
    blocks: Dict[Hashable, Dict[str, int]]

    @property
    def total_dim(self) -> int:
        return len(self.classes)

    def dims(self, complete_only: bool = False) -> Dict[Tuple[int, int], int]:
        out: Dict[Tuple[int, int], int] = {}
        for c in self.classes:
            if complete_only and not c.complete:
                continue
            out[c.bigrade] = out.get(c.bigrade, 0) + 1
        return out

    def to_json(self) -> dict:
        grouped: Dict[Tuple[int, int], List[CohomologyClass]] = {}
        for c in self.classes:
            grouped.setdefault(c.bigrade, []).append(c)
        entries = []
        for bigrade in sorted(grouped):
            reps = grouped[bigrade]
            entries.append({
                "bigrade": list(bigrade),
                "dim": len(reps),
                "representative": format_poly(reps[0].representative),
                "representatives": [format_poly(c.representative) for c in reps],
                "complete": all(c.complete for c in reps),
            })
        inst = self.instance
        return {
            "n": inst.n,
            "degree_cap": inst.D,
            "vector_degree": inst.deg_V,
            "vector_field": [format_poly(c) for c in inst.V.vector_components()],
            "basis_size": len(inst.basis),
            "preimage_basis_size": len(inst.ext_basis),
            "total_dim": self.total_dim,
            "total_dim_complete": sum(1 for c in self.classes if c.complete),
            "classes": entries,
            "exact_cocycles_certified": len(self.certificates),
            "truncation": "cocycles: coefficient degree <= D; preimages: <= D+1, "
                          "coboundaries kept only inside the domain",
        }


def equivariant_cohomology(inst: CohomologyInstance) -> CohomologyResult:
    n = inst.n
    by_label: Dict[Hashable, List[Key]] = {}
    for key in inst.ext_basis:
        by_label.setdefault(inst.label(key), []).append(key)
    domain_labels = sorted({inst.label(k) for k in inst.basis}, key=_label_sort)

    classes: List[CohomologyClass] = []
    certificates: List[ExactnessCertificate] = []
    blocks: Dict[Hashable, Dict[str, int]] = {}
    for lab in domain_labels:
        dom = [k for k in by_label[lab] if inst.in_domain(k)]
        invariant = _invariant_subspace(inst, dom, extra_condition=None)
        images = [inst.apply(inst.column_D, w) for w in invariant]
        cocycles = [combine(x, invariant) for x in nullspace(images, key_rank)]

        pre_keys = by_label.get(inst.preimage_label(lab), [])
        chis = _invariant_subspace(inst, pre_keys, extra_condition=inst.in_domain)
        bound = Echelon(key_rank)
        for chi in chis:
            bound.add(inst.apply(inst.column_D, chi))
        for row in bound.vectors():
            chi = combine(bound.express(row), chis)
            certificates.append(ExactnessCertificate(_to_poly(n, row), _to_poly(n, chi)))

        reps = Echelon(key_rank)
        for z in cocycles:
            reduced, _ = bound.reduce(z)
            if reduced:
                reps.add(reduced)
        complete = inst.block_complete(lab)
        for rep in reps.vectors():
            lead = min(rep, key=key_rank)
            classes.append(CohomologyClass(lab, key_bigrade(lead, n), _to_poly(n, rep), complete))
        blocks[lab] = {"cocycles": len(cocycles), "coboundaries": len(bound), "classes": len(reps)}
    return CohomologyResult(inst, classes, certificates, blocks)


def _label_sort(label):
    return (0, label) if isinstance(label, tuple) else (1, (label,))


def _invariant_subspace(inst: CohomologyInstance, keys: List[Key], extra_condition) -> List[Vec]:
    """Basis of ``{x in span(keys) : L_V x = 0}``, optionally also requiring
    ``op_D x`` to stay inside the domain."""
    cols = []
    for k in keys:
        col = {("L", kk): v for kk, v in inst.column_L(k).items()}
        if extra_condition is not None:
            for kk, v in inst.column_D(k).items():
                if not extra_condition(kk):
                    col[("D", kk)] = v
        cols.append(col)
    basis = nullspace(cols, repr)
    return [{keys[j]: a for j, a in x.items()} for x in basis]


def compare_dimensions(a: CohomologyResult, b: CohomologyResult) -> Dict[str, object]:
    """Per-bigrade dimensions over blocks complete in both results."""
    common = ({lab for lab in a.blocks if a.instance.block_complete(lab)}
              & {lab for lab in b.blocks if b.instance.block_complete(lab)})
    dims_a: Dict[Tuple[int, int], int] = {}
    dims_b: Dict[Tuple[int, int], int] = {}
    for res, dims in ((a, dims_a), (b, dims_b)):
        for c in res.classes:
            if c.label in common:
                dims[c.bigrade] = dims.get(c.bigrade, 0) + 1
    return {"stable": dims_a == dims_b, "dims_a": dims_a, "dims_b": dims_b,
            "blocks_compared": sorted(common, key=_label_sort)}


def homotopy_preimage(form: GradedPolynomial) -> GradedPolynomial:
    """Independent Poincare-lemma preimage of a closed hatted form (V = 0 case)."""
    from .components import homotopy

    total = GradedPolynomial.zero(form.n)
    by_degree: Dict[int, Dict] = {}
    for key, coeff in form.terms.items():
        by_degree.setdefault(key[1].bit_count(), {})[key] = coeff
    for p, terms in by_degree.items():
        if p == 0:
            raise ValueError("0-forms have no homotopy preimage")
        spec = cartan.unhat_form(GradedPolynomial(form.n, terms))
        total = total + cartan.hat_form(homotopy(spec))
    return total

