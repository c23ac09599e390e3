"""Lunes and lambda-convex domains in the model surfaces M^2(kappa)."""

from __future__ import annotations

__version__ = "0.1.0"

from .curves import (
    ConstantCurvatureArc,
    Containment,
    CurveKind,
    FLambdaRegion,
    arc_point,
    classify,
    f_lambda_supporting_at,
    region_contains,
    swerve,
)
from .domains import (
    BalancedChord,
    ConvexityError,
    ConvexPolyDomain,
    DomainError,
    GenerationError,
    SolverError,
    balanced_chord,
    circumradius,
    generate_lambda_convex,
    inradius,
    is_lambda_convex,
    reflect_arc,
    rolling_check,
)
from .kernel import (
    AntipodalError,
    CurvatureMismatch,
    GeodesicSegment,
    GeometryError,
    ModelPoint,
    TangentVector,
    angle,
    distance,
    exp_map,
    midpoint,
    point_reflection,
)
from .lune import (
    Lune,
    LuneDomainError,
    build_lune,
    lune_inradius_numeric,
    phase_transition_check,
    rho,
    rho_domain,
)

