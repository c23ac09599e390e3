"""Curves of constant geodesic curvature and the convex regions they bound.

A unit-speed curve of geodesic curvature ``lam`` in M^2(kappa) with moving
frame ``(x, T, N = rot90(T))`` obeys the constant-coefficient system

    x' = T,   T' = -kappa x + lam N,   N' = -lam T,

whose matrix has eigenvalues 0 and +-i*sqrt(lam^2 + kappa).  Its flow is
therefore given by the generalized sine/cosine of the "curve curvature"
``omega2 = lam^2 + kappa``: circles (omega2 > 0), horocycles (= 0) and
hypercycles (< 0) are all evaluated by the same formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .kernel import (
    FLAT_EPS,
    CurvatureMismatch,
    GeometryError,
    ModelPoint,
    Space,
    TangentVector,
    generalized_trig,
    space,
    versine,
)

HOROCYCLE_BAND = 1e-9


class CurveKind(str, Enum):
    CIRCLE = "circle"
    HOROCYCLE = "horocycle"
    HYPERCYCLE = "hypercycle"


class Containment(str, Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not lam > 0 or not math.isfinite(lam):
        raise GeometryError(f"geodesic curvature must be positive, got {lam}")
    return lam


def classify(kappa: float, lam: float) -> CurveKind:
    lam = _check_lambda(lam)
    if kappa >= 0 or abs(kappa) < FLAT_EPS:
        return CurveKind.CIRCLE
    k = math.sqrt(-kappa)
    if abs(lam - k) < HOROCYCLE_BAND:
        return CurveKind.HOROCYCLE
    return CurveKind.CIRCLE if lam > k else CurveKind.HYPERCYCLE


def f_lambda_radius(kappa: float, lam: float) -> float:
    """Geodesic radius of the compact F_lambda disk, ``math.inf`` if unbounded."""
    if classify(kappa, lam) is not CurveKind.CIRCLE:
        return math.inf
    if abs(kappa) < FLAT_EPS:
        return 1.0 / lam
    k = math.sqrt(abs(kappa))
    if kappa > 0:
        return math.atan(k / lam) / k
    return math.atanh(k / lam) / k


def f_lambda_perimeter(kappa: float, lam: float) -> float:
    if classify(kappa, lam) is not CurveKind.CIRCLE:
        return math.inf
    return 2.0 * math.pi / math.sqrt(lam * lam + kappa)


def hypercycle_offset(kappa: float, lam: float) -> float:
    """Distance from the axis of a hypercycle of curvature lam."""
    k = math.sqrt(-kappa)
    return math.atanh(lam / k) / k


@dataclass(frozen=True, eq=False)
class ConstantCurvatureArc:
    """Unit-speed arc of curvature ``lam`` turning left from a frame.

    ``anchor`` is the point at arclength 0 and ``tangent`` its unit tangent;
    the curve bends toward ``rot90(tangent)``.
    """

    kappa: float
    lam: float
    anchor: np.ndarray
    tangent: np.ndarray
    s_min: float = 0.0
    s_max: float = 0.0

    def __post_init__(self):
        _check_lambda(self.lam)
        for name in ("anchor", "tangent"):
            a = np.array(getattr(self, name), dtype=float).reshape(3)
            a.flags.writeable = False
            object.__setattr__(self, name, a)
        if self.s_max < self.s_min:
            raise GeometryError("arc parameter interval is reversed")

    @property
    def kind(self) -> CurveKind:
        return classify(self.kappa, self.lam)

    @property
    def space(self) -> Space:
        return space(self.kappa)

    @property
    def length(self) -> float:
        return self.s_max - self.s_min

    def frame(self, s):
        """Return (x, T, N) at arclength s (arrays broadcast over s)."""
        sp = self.space
        s = np.asarray(s, dtype=float)
        x0, t0 = self.anchor, self.tangent
        n0 = sp.rot90(x0, t0)
        omega2 = self.lam**2 + self.kappa
        sn, cs = generalized_trig(omega2, s)
        ver = versine(omega2, s)
        sn = sn[..., None]
        cs = cs[..., None]
        ver = ver[..., None]
        accel = -self.kappa * x0 + self.lam * n0
        x = x0 + sn * t0 + ver * accel
        t = cs * t0 + sn * accel
        n = n0 - self.lam * sn * t0 + ver * (self.kappa * self.lam * x0 - self.lam**2 * n0)
        return sp.project(x), t, n

    def points(self, s):
        return self.frame(s)[0]

    def sample(self, h: float, *, even: bool = False) -> np.ndarray:
        """Points at uniform arclength spacing <= h, endpoints included."""
        n = max(1, math.ceil(self.length / h - 1e-12))
        if even and n % 2:
            n += 1
        return self.points(np.linspace(self.s_min, self.s_max, n + 1))

    def point(self, s: float) -> ModelPoint:
        return arc_point(self, s)

    def transformed(self, iso) -> "ConstantCurvatureArc":
        return ConstantCurvatureArc(
            self.kappa, self.lam, iso(self.anchor), iso.vector(self.tangent), self.s_min, self.s_max
        )


def arc_point(arc: ConstantCurvatureArc, s: float) -> ModelPoint:
    if not (arc.s_min - 1e-12 <= s <= arc.s_max + 1e-12):
        raise GeometryError(f"arclength {s} outside [{arc.s_min}, {arc.s_max}]")
    return ModelPoint(arc.kappa, arc.points(s))


@dataclass(frozen=True, eq=False)
class FLambdaRegion:
    """Closed convex region bounded by a complete curve of curvature lam.

    The region is stored through a boundary frame (``anchor``, ``tangent``)
    with the region on the left of the tangent, plus the locus data of its
    kind, from which an exact signed distance to the boundary is computed.
    """

    kappa: float
    lam: float
    kind: CurveKind
    anchor: np.ndarray
    tangent: np.ndarray
    center: np.ndarray | None = None
    radius: float = math.inf
    ideal: np.ndarray | None = None
    axis_normal: np.ndarray | None = None
    offset: float = 0.0
    _space: Space = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_space", space(self.kappa))

    @property
    def compact(self) -> bool:
        return self.kind is CurveKind.CIRCLE

    def signed_distance(self, x):
        """Signed distance to the boundary curve; negative inside."""
        sp = self._space
        x = np.asarray(x, dtype=float)
        if self.kind is CurveKind.CIRCLE:
            return sp.dist(self.center, x) - self.radius
        k = sp.k
        if self.kind is CurveKind.HOROCYCLE:
            val = self.kappa * sp.inner(x, self.ideal)
            return np.log(np.maximum(val, 1e-300)) / k
        return np.arcsinh(k * sp.inner(x, self.axis_normal)) / k - self.offset

    def boundary(self, s_min: float = 0.0, s_max: float | None = None) -> ConstantCurvatureArc:
        if s_max is None:
            s_max = f_lambda_perimeter(self.kappa, self.lam) if self.compact else s_min
        return ConstantCurvatureArc(self.kappa, self.lam, self.anchor, self.tangent, s_min, s_max)

    def reflected(self, m) -> "FLambdaRegion":
        sp = self._space
        s = sp.reflect(m, self.anchor)
        t = sp.reflect_vector(m, self.tangent)
        return _supporting(sp, s, sp.rot90(s, t), self.lam)

    def transformed(self, iso) -> "FLambdaRegion":
        sp = self._space
        s = iso(self.anchor)
        t = iso.vector(self.tangent)
        return _supporting(sp, s, sp.rot90(s, t), self.lam)


def _supporting(sp: Space, s, inward, lam: float) -> FLambdaRegion:
    s = sp.project(np.asarray(s, dtype=float))
    inward = sp.normalize(s, inward)
    tangent = -sp.rot90(s, inward)
    kind = classify(sp.kappa, lam)
    if kind is CurveKind.CIRCLE:
        r = f_lambda_radius(sp.kappa, lam)
        c = sp.exp(s, inward, r)
        return FLambdaRegion(sp.kappa, lam, kind, s, tangent, center=c, radius=r)
    k = sp.k
    if kind is CurveKind.HOROCYCLE:
        ideal = s + inward / k
        return FLambdaRegion(sp.kappa, lam, kind, s, tangent, ideal=ideal)
    delta = hypercycle_offset(sp.kappa, lam)
    n = -(k * math.sinh(k * delta) * s + math.cosh(k * delta) * inward)
    return FLambdaRegion(sp.kappa, lam, kind, s, tangent, axis_normal=n, offset=delta)


def f_lambda_supporting_at(s: ModelPoint, inward: TangentVector, lam: float) -> FLambdaRegion:
    """The F_lambda region through s whose inner normal at s is ``inward``."""
    lam = _check_lambda(lam)
    if inward.base.kappa != s.kappa:
        raise CurvatureMismatch("tangent vector and point live in different spaces")
    sp = s.space
    if sp.norm(sp.project_tangent(s.coords, inward.dir)) < 1e-12:
        raise GeometryError("degenerate inward direction")
    return _supporting(sp, s.coords, inward.dir, lam)


def region_contains(region: FLambdaRegion, p: ModelPoint, tol: float = 1e-9) -> Containment:
    if p.kappa != region.kappa:
        raise CurvatureMismatch("point and region live in different spaces")
    d = float(region.signed_distance(p.coords))
    if d < -tol:
        return Containment.INSIDE
    if d > tol:
        return Containment.OUTSIDE
    return Containment.BOUNDARY


# ---------------------------------------------------------------------------
# Discrete swerve


def turning_angles(sp: Space, pts: np.ndarray, closed: bool = True) -> np.ndarray:
    """Left turning angle at each vertex (interior vertices only if open)."""
    pts = np.asarray(pts, dtype=float)
    if closed:
        prev = np.roll(pts, 1, axis=0)
        nxt = np.roll(pts, -1, axis=0)
        mid = pts
    else:
        prev, mid, nxt = pts[:-2], pts[1:-1], pts[2:]
    t_in = -sp.log_dir(mid, prev)
    t_out = sp.log_dir(mid, nxt)
    return sp.signed_angle(mid, t_in, t_out)


def swerve(points, side: str = "left", *, closed: bool = False, endpoints: str = "exclude") -> float:
    """Total turning of a polyline toward ``side``.

    ``points`` is a sequence of :class:`ModelPoint` or an ``(n, 3)`` array
    paired with ``kappa`` via ``ModelPoint`` values.  For open polylines the
    turns at the two end vertices are excluded by default; with
    ``endpoints="half"`` each end contributes half the turn of its
    neighbouring vertex, which is the chord-to-curve angle of a smooth
    curve sampled by the polyline.
    """
    kappa, pts = _as_array(points)
    if len(pts) < 3:
        raise GeometryError("swerve needs at least three points")
    sp = space(kappa)
    gaps = sp.dist(pts[:-1], pts[1:])
    if closed:
        gaps = np.append(gaps, sp.dist(pts[-1], pts[0]))
    if np.any(gaps < 1e-14):
        raise GeometryError("repeated consecutive points")
    if sp.kappa > 0 and not sp.flat and np.any(gaps >= math.pi / sp.k - 1e-9):
        raise GeometryError("polyline gap reaches the antipode")
    turns = turning_angles(sp, pts, closed=closed)
    total = float(np.sum(turns))
    if not closed and endpoints == "half":
        total += 0.5 * (float(turns[0]) + float(turns[-1]))
    elif endpoints not in ("exclude", "half"):
        raise ValueError(f"unknown endpoint convention {endpoints!r}")
    if side == "left":
        return total
    if side == "right":
        return -total
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def _as_array(points):
    if isinstance(points, np.ndarray):
        raise TypeError("pass ModelPoint values, or use turning_angles() for raw arrays")
    points = list(points)
    kappa = points[0].kappa
    for p in points:
        if p.kappa != kappa:
            raise CurvatureMismatch("polyline mixes curvatures")
    return kappa, np.array([p.coords for p in points])
