"""Common and simple R^3 realisations of the Moebius strip, with brute-force checks."""

from .closed_form import (
    SQRT2,
    AxisSegment,
    CrossSection,
    GluedPair,
    PolarCoords,
    SelfIntersectionSet,
    axis_intersection,
    cross_section_common,
    cross_section_simple,
    cubic_residual,
    f,
    g,
    glued_partner,
    in_region,
    invert_graph,
    is_embedding,
    min_max_r_squared,
    polar,
    s_delta,
    self_intersection_set,
    sigma_delta,
)
from .core import (
    INFINITE,
    ParamPoint,
    Point3,
    RealizationKind,
    canonicalize,
    eval_common,
    eval_simple,
    moving_segment,
    param_distance,
)
from .errors import DomainError, MoebiusError, PreconditionError, SingularPointError

__version__ = "0.1.0"
