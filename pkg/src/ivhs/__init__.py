"""Exact linear-algebraic machinery for infinitesimal variations of Hodge
structure: graded polynomial rings and Jacobian rings over Q and F_p,
Hodge-frame block matrices and horizontal subspaces, symmetrizer spaces of
composition settings, and an end-to-end verification pipeline for a
hypersurface non-genericity criterion.
"""

from .errors import BudgetExceededError, PreconditionError, SingularInputError
from .fields import DEFAULT_PRIME, QQ, FieldSpec, default_prime_field
from .hodge import (
    BlockMatrix,
    ChartData,
    HodgeShape,
    HorizontalElement,
    IntegralElementCandidate,
    ThetaCoordinates,
    build_transpose_element,
    check_integral,
    commutator,
    complete_horizontal,
    horizontal_commutator,
    in_chart,
    lie_algebra_residual,
    polarization_matrix,
    project,
    theta,
    theta_inverse,
    verified_candidate,
)
from .jacobian import (
    JacobianContext,
    MultiplicationMap,
    action_matrix,
    graded_table,
    macaulay_injectivity_check,
    multiplication_map,
    quotient_dimension,
    smoothness_probe,
    socle_check,
)
from .linalg import Matrix, Subspace, random_matrix, standard_complement
from .polyring import HomogeneousPoly, graded_dimension, parse_poly
from .symmetrizers import (
    CompositionSetting,
    SubspaceE,
    SymmetrizerSpace,
    fiber_forward_check,
    genericity_experiment,
    hodge_symmetrizer_setting,
    lemma3_rank_one_construction,
    prop4_construction,
    symmetrizer_dimension,
    symmetrizer_space,
    verify_candidate_symmetrizer,
)
from .theorem import (
    HypersurfaceProfile,
    MonotonicityRow,
    TheoremReport,
    base_case_terms,
    canonical_symmetrizer_check,
    fixture_id,
    geometric_frame_candidate,
    hypersurface_hodge_shape,
    inequality_check,
    monotonicity_check,
    profile,
    ring_frame_candidate,
    smoothness_gate,
    verify_theorem,
)

__all__ = [
    "BudgetExceededError",
    "PreconditionError",
    "SingularInputError",
    "DEFAULT_PRIME",
    "QQ",
    "FieldSpec",
    "default_prime_field",
    "Matrix",
    "Subspace",
    "random_matrix",
    "standard_complement",
    "HomogeneousPoly",
    "graded_dimension",
    "parse_poly",
    "JacobianContext",
    "MultiplicationMap",
    "action_matrix",
    "graded_table",
    "macaulay_injectivity_check",
    "multiplication_map",
    "quotient_dimension",
    "smoothness_probe",
    "socle_check",
    "BlockMatrix",
    "ChartData",
    "HodgeShape",
    "HorizontalElement",
    "IntegralElementCandidate",
    "ThetaCoordinates",
    "build_transpose_element",
    "check_integral",
    "commutator",
    "complete_horizontal",
    "horizontal_commutator",
    "in_chart",
    "lie_algebra_residual",
    "polarization_matrix",
    "project",
    "theta",
    "theta_inverse",
    "verified_candidate",
    "CompositionSetting",
    "SubspaceE",
    "SymmetrizerSpace",
    "fiber_forward_check",
    "genericity_experiment",
    "hodge_symmetrizer_setting",
    "lemma3_rank_one_construction",
    "prop4_construction",
    "symmetrizer_dimension",
    "symmetrizer_space",
    "verify_candidate_symmetrizer",
    "HypersurfaceProfile",
    "MonotonicityRow",
    "TheoremReport",
    "base_case_terms",
    "canonical_symmetrizer_check",
    "fixture_id",
    "geometric_frame_candidate",
    "hypersurface_hodge_shape",
    "inequality_check",
    "monotonicity_check",
    "profile",
    "ring_frame_candidate",
    "smoothness_gate",
    "verify_theorem",
]

__version__ = "0.1.0"
