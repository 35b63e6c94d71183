"""Exact formal-group-law calculus and vertex F-algebra checks."""

from .ring import NOT_INVERTIBLE, Ring, RingElement, RingMismatch
from .series import (
    BilateralWindow,
    DiagonalDivergence,
    EmptyWindow,
    IllegalSubstitution,
    LaurentElement,
    NonConvergentProduct,
    NotInvertibleError,
    NotLocalizable,
    OrderingMismatch,
    PowerSeries,
    WindowMiss,
)
from .fgl import (
    AxiomViolation,
    DivisionFailure,
    FormalGroupLaw,
    IntegralityFailure,
    NeedsRationals,
    exponential,
    fgl_inverse,
    fgl_new,
    g_factor,
    invariant_differential,
    logarithm,
    partial_derivative,
    standard_law,
)
from .calculus import (
    FBinomialTable,
    Report,
    delta_F,
    delta_support_check,
    f_binomial,
    f_binomial_identities,
    f_jacobi_delta_check,
    f_residue,
    hyperderivative,
    hyperderivatives,
    hyperderivative_properties,
    iterated_residue_check,
    residue_theorems_check,
)
from .vertex import (
    HeisenbergAlgebra,
    LieClass,
    MeromorphicityPair,
    MismatchBug,
    NeedsField,
    NotFound,
    ShiftQuotient,
    TrivialAlgebra,
    VertexFAlgebra,
    YUndefined,
    axiom_check,
    heisenberg_build,
    heisenberg_cocycle,
    jacobi_identity_check,
    lie_axiom_check,
    lie_bracket,
    meromorphicity_pair,
    quotient_reduce,
    weak_associativity_order,
    weak_commutativity_order,
)

__all__ = [
    "NOT_INVERTIBLE",
    "Ring",
    "RingElement",
    "RingMismatch",
    "PowerSeries",
    "LaurentElement",
    "BilateralWindow",
    "OrderingMismatch",
    "NonConvergentProduct",
    "NotInvertibleError",
    "IllegalSubstitution",
    "NotLocalizable",
    "DiagonalDivergence",
    "WindowMiss",
    "EmptyWindow",
    "FormalGroupLaw",
    "AxiomViolation",
    "NeedsRationals",
    "IntegralityFailure",
    "DivisionFailure",
    "standard_law",
    "fgl_new",
    "fgl_inverse",
    "invariant_differential",
    "logarithm",
    "exponential",
    "partial_derivative",
    "g_factor",
    "Report",
    "FBinomialTable",
    "f_binomial",
    "f_binomial_identities",
    "delta_F",
    "delta_support_check",
    "f_jacobi_delta_check",
    "f_residue",
    "hyperderivative",
    "hyperderivatives",
    "hyperderivative_properties",
    "residue_theorems_check",
    "iterated_residue_check",
    "VertexFAlgebra",
    "HeisenbergAlgebra",
    "TrivialAlgebra",
    "ShiftQuotient",
    "LieClass",
    "MeromorphicityPair",
    "YUndefined",
    "NeedsField",
    "MismatchBug",
    "NotFound",
    "axiom_check",
    "weak_associativity_order",
    "weak_commutativity_order",
    "meromorphicity_pair",
    "jacobi_identity_check",
    "quotient_reduce",
    "lie_bracket",
    "lie_axiom_check",
    "heisenberg_build",
    "heisenberg_cocycle",
]
