"""Exact graded-bracket toolkit for the ghost formulation of classical mechanics."""
from .algebra import GradedPolynomial, GradingError, ScalarC, Var, grade, partial_even, partial_odd
from .expr import NonPolynomialError, ParseError, format_poly, parse
from .epb import BracketTable, epb, hamiltonian_flow_bracket
from .charges import (
    SUSY_KAPPA,
    ChargeSet,
    PhaseModel,
    brs_nilpotency,
    build_charges,
    conservation_report,
    extended_hamiltonian,
    susy_square,
)
from .cartan import (
    FormSpec,
    MultivectorSpec,
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
    unhat_form,
    unhat_vec,
    vector_hamiltonian,
)
from .superfield import SuperValue, berezin_H, superfield
from .grassmann import GrassmannAlgebra, GrassmannNumber
from .dynamics import (
    ExtendedStateGrassmann,
    ExtendedStateMatrix,
    Trajectory,
    grassmann_state,
    integrate,
    jacobi_vs_finite_difference,
    matrix_state,
    monitor,
    rhs,
)
from .equivariant import CohomologyResult, build_instance, equivariant_cohomology

__version__ = "0.1.0"

__all__ = [
    "GradedPolynomial",
    "GradingError",
    "ScalarC",
    "Var",
    "grade",
    "partial_even",
    "partial_odd",
    "NonPolynomialError",
    "ParseError",
    "format_poly",
    "parse",
    "BracketTable",
    "epb",
    "hamiltonian_flow_bracket",
    "SUSY_KAPPA",
    "ChargeSet",
    "PhaseModel",
    "brs_nilpotency",
    "build_charges",
    "conservation_report",
    "extended_hamiltonian",
    "susy_square",
    "FormSpec",
    "MultivectorSpec",
    "degree_count",
    "ext_d",
    "flat",
    "grad_sharp",
    "hat_form",
    "hat_vec",
    "interior",
    "lie_bracket",
    "lie_derivative",
    "sharp",
    "unhat_form",
    "unhat_vec",
    "vector_hamiltonian",
    "SuperValue",
    "berezin_H",
    "superfield",
    "GrassmannAlgebra",
    "GrassmannNumber",
    "ExtendedStateGrassmann",
    "ExtendedStateMatrix",
    "Trajectory",
    "grassmann_state",
    "integrate",
    "jacobi_vs_finite_difference",
    "matrix_state",
    "monitor",
    "rhs",
    "CohomologyResult",
    "build_instance",
    "equivariant_cohomology",
]
