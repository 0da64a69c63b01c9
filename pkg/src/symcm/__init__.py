"""Exact symbolic quantum mechanics in phase space.

Classical symbols (PhasePolynomial) and operators (OperatorPolynomial) are
sparse polynomials with coefficients in Q(i)[hbar, 1/hbar].  The star
product, Weyl maps, Moyal dynamics and Gaussian classicality checks all
work in exact rational arithmetic.
"""

__version__ = "0.1.0"

from .classicality import (
    ClassicalDatum,
    ClassicalityReport,
    GaussianState,
    classicality_check,
    consistency_check,
    error_ket_norm,
    expectation,
    gaussian_moment,
    interval_probability,
    mixed_error_ket_norm,
    propagate_error,
)
from .dynamics import (
    canonical_invariance_check,
    classical_limit,
    conjugate_by_unitary,
    eom_residual,
    hamilton_rhs,
    heisenberg_series,
    poisson_series,
    star_unitarity_check,
    trajectory,
    unitary_series,
)
from .errors import (
    EvaluationError,
    InternalConsistencyError,
    LimitUndefinedError,
    PreconditionError,
    StructuralError,
    SymcmError,
)
from ._poly import Monomial, Term
from .operators import (
    OperatorPolynomial,
    P,
    Q,
    SymmetrizedExpansion,
    commutator,
    dagger,
    op_heisenberg_series,
    op_mul,
    reconstruct,
    symmetrize,
    symmetrized_product,
)
from .phase import (
    PhasePolynomial,
    conjugate,
    evaluate,
    hbar_limit_zero,
    p,
    partial_derivative,
    poisson_bracket,
    poly_add,
    poly_mul,
    q,
)
from .scalars import Coefficient, GaussianRational
from .series import EvolutionSeries, UnitarySeries
from .star import janus_power, moyal_bracket, star, star_power
from .textio import FormatError, ParseError, parse_classical, parse_operator, render
from .weyl import dequantize, dequantize_by_star, quantize, taylor_identity_check

__all__ = [
    "canonical_invariance_check",
    "classical_limit",
    "ClassicalDatum",
    "classicality_check",
    "ClassicalityReport",
    "Coefficient",
    "commutator",
    "conjugate",
    "conjugate_by_unitary",
    "consistency_check",
    "dagger",
    "dequantize",
    "dequantize_by_star",
    "eom_residual",
    "error_ket_norm",
    "evaluate",
    "EvaluationError",
    "EvolutionSeries",
    "expectation",
    "FormatError",
    "gaussian_moment",
    "GaussianRational",
    "GaussianState",
    "hamilton_rhs",
    "hbar_limit_zero",
    "heisenberg_series",
    "InternalConsistencyError",
    "interval_probability",
    "janus_power",
    "LimitUndefinedError",
    "mixed_error_ket_norm",
    "Monomial",
    "moyal_bracket",
    "op_heisenberg_series",
    "op_mul",
    "OperatorPolynomial",
    "P",
    "p",
    "parse_classical",
    "parse_operator",
    "ParseError",
    "partial_derivative",
    "PhasePolynomial",
    "poisson_bracket",
    "poisson_series",
    "poly_add",
    "poly_mul",
    "PreconditionError",
    "propagate_error",
    "q",
    "Q",
    "quantize",
    "reconstruct",
    "render",
    "star",
    "star_power",
    "star_unitarity_check",
    "StructuralError",
    "SymcmError",
    "symmetrize",
    "symmetrized_product",
    "SymmetrizedExpansion",
    "taylor_identity_check",
    "Term",
    "trajectory",
    "unitary_series",
    "UnitarySeries",
]
