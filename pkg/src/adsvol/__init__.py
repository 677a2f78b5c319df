"""adsvol: volumes of good quadric polytopes in double anti-de Sitter space.

The package computes the complex-valued, epsilon-regularized volume of
regions cut out by finitely many good quadric half-spaces in the doubled
Minkowski model, transports them under the signed isometry group, and
evaluates conformal volumes of polygons on the boundary at infinity.
"""

from .errors import (
    AdsvolError,
    BoundaryPointError,
    BreakpointError,
    ConventionViolationError,
    DecompositionRequiredError,
    DegenerateFacetError,
    IllConditionedArcError,
    LiftConstructionError,
    NonConvergenceError,
    NullTangentError,
    NullVectorError,
)
from .minkowski import (
    CausalClass,
    MVector,
    Signature,
    ads_quadric,
    bilinear,
    causal_class,
    complex_length,
    lorentz,
    mvector,
    norm_sq,
    raw_bilinear,
    sphere_volume,
)
from .model import (
    Box,
    CenterRadius,
    GoodPolytope,
    MetricClass,
    Orientation,
    QuadricHalfSpace,
    SignedPoint,
    center_radius,
    check_bound_certificate,
    contains,
    discriminant,
    embed_to_hyperboloid,
    face_orientation,
    feasible_mask,
    good_polytope,
    halfspace,
    halfspace_from_json,
    halfspace_to_json,
    metric_class,
    normalize_halfspace,
    polytope_from_json,
    polytope_to_json,
    q_value,
    validate_good_polytope,
)
from .isometry import (
    InversionJ,
    InversionJminus,
    IsometryWord,
    LinearFix0,
    Similarity,
    Translation,
    apply_halfspace,
    apply_point,
    apply_point_batch,
    compose,
    invert_word,
    move_from_json,
    move_to_json,
    random_isometry,
    transport_with_box,
    word,
    word_from_json,
    word_to_json,
)
from .slicing import (
    Breakpoint,
    ComplexVolume,
    FaceSlice,
    SlicePlan,
    VolumeDetail,
    breakpoints,
    face_volume_dh1,
    integrand_b,
    map_lower_sheet,
    slice_faces,
    volume,
)
from .epsoracle import (
    EpsilonSchedule,
    ExtrapolationResult,
    OracleEstimate,
    default_schedule,
    epsilon_extrapolate,
    epsilon_oracle,
    require_converged,
)
from .boundary import (
    BoundaryPolygon,
    BoundaryVolumeResult,
    ConicSide,
    PlaneVector,
    SegmentSide,
    boundary_polygon,
    boundary_volume_via_3d,
    c2m,
    conformal_apply,
    correspondence_check,
    lift_polygon,
    minkowski_angle,
    plane_form,
    plane_length,
    plane_vector,
    polygon_from_json,
    polygon_to_json,
    polygon_volume,
    trace_polygon,
)
from . import errors

__version__ = "0.1.0"
