"""Exact exterior calculus, graded differential operators, and n-ary brackets."""

from .rational import Chart, Polynomial, RationalFunction, normalize, poly_gcd
from .graded import (
    FORM,
    MULTIVECTOR,
    GradedElement,
    basis_vector,
    coordinate_differential,
    differential,
    exterior_derivative,
    insert_covector,
    insert_multivector,
    lie_derivative,
    pair,
    vector_field,
    vf_apply,
    vf_commutator,
)
from .nambu import (
    AlgebroidReport,
    NambuStructure,
    algebroid_axioms_check,
    anchor,
    calogero_structure,
    canonical_operator,
    check_fi_via_lie,
    fi_residual_functions,
    hamiltonian_vf,
    kepler_structure,
    nambu_bracket,
    section_bracket,
    theorem_bracket_residual,
    verify_fundamental_identity,
)
from .operators import (
    Commutator,
    Compose,
    ExtDiff,
    FormValuedMultivector,
    GradedOperator,
    Insert,
    InsertTensor,
    LieDer,
    MulForm,
    OrderVerdict,
    Scale,
    Sum,
    TestStrategy,
    ZeroOperator,
    decompose_tensorial,
    extract_top_multivector,
    fi_residual,
    filippov_bracket,
    function_bracket,
    graded_commutator,
    is_tensorial,
    koszul_binary_expansion_check,
    order_at_most,
    phi,
    random_multivector,
    random_unit_killing_operator,
    symb_top_vanishes,
    unit_form,
)

__all__ = [
    "Chart",
    "Polynomial",
    "RationalFunction",
    "normalize",
    "poly_gcd",
    "FORM",
    "MULTIVECTOR",
    "GradedElement",
    "basis_vector",
    "coordinate_differential",
    "differential",
    "exterior_derivative",
    "insert_covector",
    "insert_multivector",
    "lie_derivative",
    "pair",
    "vector_field",
    "vf_apply",
    "vf_commutator",
    "Commutator",
    "Compose",
    "ExtDiff",
    "FormValuedMultivector",
    "GradedOperator",
    "Insert",
    "InsertTensor",
    "LieDer",
    "MulForm",
    "OrderVerdict",
    "Scale",
    "Sum",
    "TestStrategy",
    "ZeroOperator",
    "decompose_tensorial",
    "extract_top_multivector",
    "fi_residual",
    "filippov_bracket",
    "function_bracket",
    "graded_commutator",
    "is_tensorial",
    "koszul_binary_expansion_check",
    "order_at_most",
    "phi",
    "random_multivector",
    "random_unit_killing_operator",
    "symb_top_vanishes",
    "unit_form",
    "AlgebroidReport",
    "NambuStructure",
    "algebroid_axioms_check",
    "anchor",
    "calogero_structure",
    "canonical_operator",
    "check_fi_via_lie",
    "fi_residual_functions",
    "hamiltonian_vf",
    "kepler_structure",
    "nambu_bracket",
    "section_bracket",
    "theorem_bracket_residual",
    "verify_fundamental_identity",
]

__version__ = "0.1.0"
