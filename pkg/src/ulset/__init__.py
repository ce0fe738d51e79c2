"""Translation-invariant scalarization functionals with uniform sublevel sets.

The central object is phi(y) = inf {t : y in t*k + A} for a closed set
A and a direction k admissible for A. The package evaluates phi exactly
on polyhedral structure and by monotone bisection otherwise, verifies
its defining identities as seeded property checks, separates point
clouds from sets, scalarizes finite multiobjective clouds against
reference points, and exposes the induced gauges and order-unit norms.
"""

from .errors import (
    DirectionRejected,
    EmptyContour,
    InvalidInput,
    PreconditionFailed,
    UlsetError,
    Unsupported,
)
from .geometry import (
    ComplementClosure,
    Direction,
    HalfSpace,
    Polyhedron,
    RecessionCone,
    SetExpr,
    SetIntersection,
    SetUnion,
    Shift,
    certify_direction,
    complement_closure,
    contains,
    contains_many,
    probably_empty,
    recession_cone,
    set_from_json,
    set_to_json,
    shift_set,
)
from .evaluator import (
    MINUS_INF,
    NU,
    ExtReal,
    FunctionalHandle,
    Strategy,
    closed_form_supported,
    contour2d,
    evaluate,
    evaluate_batch,
    evaluate_dual,
    evaluate_dual_many,
    evaluate_level_shifted,
    evaluate_many,
    evaluate_scaled,
    make_handle,
)
from .analysis import (
    HOLDS,
    INAPPLICABLE,
    VIOLATED,
    LipschitzEstimate,
    MonotoneCone,
    PropertyReport,
    SeparationVerdict,
    check_dual_relation,
    check_monotone,
    check_recession_inequality,
    check_sublevel_identity,
    check_subgradient_bound,
    check_translation_invariance,
    classify_convexity,
    estimate_lipschitz,
    separate,
)
from .scalarization import (
    OrderCone,
    PointCloud,
    load_points_csv,
    scalarize,
    trace_front,
    weakly_efficient,
)
from .norms import check_norm_score_identity, gauge_cone_shift, order_unit_norm

__version__ = "0.1.0"

__all__ = [
    "UlsetError", "InvalidInput", "DirectionRejected", "Unsupported",
    "PreconditionFailed", "EmptyContour",
    "HalfSpace", "SetExpr", "Polyhedron", "SetUnion", "SetIntersection",
    "Shift", "ComplementClosure", "RecessionCone", "Direction",
    "contains", "contains_many", "recession_cone", "certify_direction",
    "shift_set", "complement_closure", "probably_empty",
    "set_from_json", "set_to_json",
    "ExtReal", "MINUS_INF", "NU", "FunctionalHandle", "Strategy",
    "closed_form_supported", "make_handle",
    "evaluate", "evaluate_many", "evaluate_batch",
    "evaluate_scaled", "evaluate_level_shifted",
    "evaluate_dual", "evaluate_dual_many", "contour2d",
    "PropertyReport", "MonotoneCone", "SeparationVerdict", "LipschitzEstimate",
    "HOLDS", "VIOLATED", "INAPPLICABLE",
    "check_sublevel_identity", "check_translation_invariance", "check_monotone",
    "classify_convexity", "check_recession_inequality", "check_dual_relation",
    "check_subgradient_bound", "estimate_lipschitz", "separate",
    "PointCloud", "OrderCone", "scalarize", "weakly_efficient", "trace_front",
    "load_points_csv",
    "gauge_cone_shift", "order_unit_norm", "check_norm_score_identity",
    "__version__",
]
