"""Computational toolkit for set transversality in R^n.

Certify and estimate transversality, tangential transversality, and
subtransversality of closed sets; solve set-intersection problems by gap
reduction; check tangent-cone intersection properties; derive Lagrange
multipliers from convex-cone separation; and run all of it from structured
scenario files with deterministic reports.
"""

from .cones import (
    ACTIVITY_TOL,
    IN,
    OUT,
    SAMPLED_TOL,
    UNDECIDED,
    PolyCone,
    SampledCone,
    clarke_cone_convex,
    cone_insert_coordinate,
    cone_intersect,
    cone_negate,
    cone_product,
    cone_slice_last_zero,
    cone_sum,
    halfspace_cone,
    is_dense_difference,
    ray_cone,
    tangent_cone_polyhedral,
    tangent_cone_sampled,
)
from .errors import (
    DimensionMismatchError,
    InfeasibleProblemError,
    NonConvergenceError,
    PreconditionError,
    RepresentationCapError,
    ScenarioFormatError,
    ToolkitError,
    UnsupportedVariantError,
)
from .gapreduce import (
    BUDGET,
    CONVERGED,
    STALLED,
    GapTrace,
    ProductVector,
    admissible_radius,
    check_metric_form,
    gap_reduction_solve,
    nonseparation_sequence,
    product_unit_vectors,
)
from .intersection import (
    IntersectionReport,
    check_bouligand_derivable,
    check_clarke,
)
from .lagrange import (
    MultiplierPair,
    NotSubtransversalVerdict,
    OptimalityContradiction,
    OptProblem,
    multiplier_rule,
    multiplier_rule_massive,
    qualification_equivalences,
    separate_cones,
    strong_minimum_transform,
)
from .numkernel import (
    LpProblem,
    LpResult,
    NormKind,
    as_vector,
    direction_net,
    distance_polyhedron,
    lp_solve,
    max_product,
    norm,
    project_polyhedron,
)
from .scenario import (
    REPORT_VERSION,
    Scenario,
    hilbert_cube_scaling,
    parse_scenario,
    run_corpus,
    run_scenario,
    set_from_payload,
    set_to_payload,
)
from .sets import (
    AffineSet,
    Ball,
    Epigraph,
    FunctionSpec,
    Polyhedron,
    ProductSet,
    SetSpec,
    Translate,
    UnionSet,
    indicator_fn,
    intersect,
    linear_fn,
    maxlin_fn,
)
from .transversality import (
    CERTIFIED,
    INCONCLUSIVE,
    NOTION_MASSIVE_DENSE,
    NOTION_PROP44,
    NOTION_SUB,
    NOTION_TANGENTIAL,
    NOTION_TRANSVERSAL,
    REFUTED,
    StepPair,
    TransversalityCertificate,
    altproj_rate,
    certify_massive_dense,
    certify_prop44,
    certify_transversality_kruger,
    estimate_subtransversality_constant,
    estimate_tangential_constants,
    transfer_constants_tangential_to_sub,
    transfer_constants_transversal_to_tangential,
    verify_implication_chain,
    verify_step,
)

__version__ = "0.1.0"

__all__ = [
    "ACTIVITY_TOL",
    "AffineSet",
    "BUDGET",
    "Ball",
    "CERTIFIED",
    "CONVERGED",
    "DimensionMismatchError",
    "Epigraph",
    "FunctionSpec",
    "GapTrace",
    "IN",
    "INCONCLUSIVE",
    "InfeasibleProblemError",
    "IntersectionReport",
    "LpProblem",
    "LpResult",
    "MultiplierPair",
    "NOTION_MASSIVE_DENSE",
    "NOTION_PROP44",
    "NOTION_SUB",
    "NOTION_TANGENTIAL",
    "NOTION_TRANSVERSAL",
    "NonConvergenceError",
    "NormKind",
    "NotSubtransversalVerdict",
    "OUT",
    "OptProblem",
    "OptimalityContradiction",
    "PolyCone",
    "Polyhedron",
    "PreconditionError",
    "ProductSet",
    "ProductVector",
    "REFUTED",
    "REPORT_VERSION",
    "RepresentationCapError",
    "SAMPLED_TOL",
    "STALLED",
    "SampledCone",
    "Scenario",
    "ScenarioFormatError",
    "SetSpec",
    "StepPair",
    "ToolkitError",
    "Translate",
    "TransversalityCertificate",
    "UNDECIDED",
    "UnionSet",
    "UnsupportedVariantError",
    "admissible_radius",
    "altproj_rate",
    "as_vector",
    "certify_massive_dense",
    "certify_prop44",
    "certify_transversality_kruger",
    "check_bouligand_derivable",
    "check_clarke",
    "check_metric_form",
    "clarke_cone_convex",
    "cone_insert_coordinate",
    "cone_intersect",
    "cone_negate",
    "cone_product",
    "cone_slice_last_zero",
    "cone_sum",
    "direction_net",
    "distance_polyhedron",
    "estimate_subtransversality_constant",
    "estimate_tangential_constants",
    "gap_reduction_solve",
    "halfspace_cone",
    "hilbert_cube_scaling",
    "indicator_fn",
    "intersect",
    "is_dense_difference",
    "linear_fn",
    "lp_solve",
    "max_product",
    "maxlin_fn",
    "multiplier_rule",
    "multiplier_rule_massive",
    "nonseparation_sequence",
    "norm",
    "parse_scenario",
    "product_unit_vectors",
    "project_polyhedron",
    "qualification_equivalences",
    "ray_cone",
    "run_corpus",
    "run_scenario",
    "separate_cones",
    "set_from_payload",
    "set_to_payload",
    "strong_minimum_transform",
    "tangent_cone_polyhedral",
    "tangent_cone_sampled",
    "transfer_constants_tangential_to_sub",
    "transfer_constants_transversal_to_tangential",
    "verify_implication_chain",
    "verify_step",
]
