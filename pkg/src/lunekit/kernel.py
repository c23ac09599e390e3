"""Exact-formula primitives for the model planes M^2(kappa).

Points are stored in embedding coordinates:

* kappa > 0: the sphere |x| = 1/sqrt(kappa) in Euclidean R^3,
* kappa = 0: the plane z = 0,
* kappa < 0: the upper sheet <x, x> = 1/kappa of the hyperboloid in
  Minkowski R^{2,1} with form diag(1, 1, -1).

Every geometric quantity is a closed-form inner-product expression.  The
``Space`` class holds the vectorised array-level routines (arrays of shape
``(..., 3)``); the module-level functions at the bottom wrap them for
single :class:`ModelPoint` values and do the argument checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

FLAT_EPS = 1e-12
ANTIPODAL_TOL = 1e-9
DEFAULT_TOL = 1e-10


class GeometryError(ValueError):
    """Invalid geometric input (mismatched curvature, degenerate data...)."""


class CurvatureMismatch(GeometryError):
    pass


class AntipodalError(GeometryError):
    pass


def generalized_trig(kappa: float, t):
    """Return ``(sn, cs)`` with sn'' + kappa*sn = 0, sn(0) = 0, sn'(0) = 1, cs = sn'.

    Works elementwise on arrays.  For |kappa| < 1e-12 the flat pair
    ``(t, 1)`` is returned.
    """
    t = np.asarray(t, dtype=float)
    if abs(kappa) < FLAT_EPS:
        return t * 1.0, np.ones_like(t)
    k = math.sqrt(abs(kappa))
    if kappa > 0:
        return np.sin(k * t) / k, np.cos(k * t)
    return np.sinh(k * t) / k, np.cosh(k * t)


def versine(kappa: float, t):
    """Return (1 - cs(t)) / kappa, i.e. the integral of sn, without cancellation."""
    t = np.asarray(t, dtype=float)
    if abs(kappa) < FLAT_EPS:
        return 0.5 * t * t
    k = math.sqrt(abs(kappa))
    if kappa > 0:
        return 2.0 * np.sin(0.5 * k * t) ** 2 / kappa
    return -2.0 * np.sinh(0.5 * k * t) ** 2 / kappa


def arcsn(kappa: float, y):
    """Inverse of ``sn`` on its monotone branch through 0."""
    y = np.asarray(y, dtype=float)
    if abs(kappa) < FLAT_EPS:
        return y * 1.0
    k = math.sqrt(abs(kappa))
    if kappa > 0:
        return np.arcsin(np.clip(k * y, -1.0, 1.0)) / k
    return np.arcsinh(k * y) / k


class Space:
    """Vectorised geometry of M^2(kappa) in embedding coordinates."""

    def __init__(self, kappa: float):
        kappa = float(kappa)
        if not math.isfinite(kappa):
            raise GeometryError(f"curvature must be finite, got {kappa}")
        self.kappa = kappa
        self.flat = abs(kappa) < FLAT_EPS
        self.k = 0.0 if self.flat else math.sqrt(abs(kappa))
        sign = -1.0 if kappa < 0 and not self.flat else 1.0
        self.gram = np.diag([1.0, 1.0, sign])

    def __repr__(self) -> str:
        return f"Space(kappa={self.kappa!r})"

    # -- basic algebra -------------------------------------------------
    def inner(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] + self.gram[2, 2] * a[..., 2] * b[..., 2]

    def norm(self, v):
        return np.sqrt(np.maximum(self.inner(v, v), 0.0))

    def origin(self) -> np.ndarray:
        if self.flat:
            return np.zeros(3)
        return np.array([0.0, 0.0, 1.0 / self.k])

    def unit_normal(self, p):
        """Unit normal of the surface at p, used to orient tangent planes."""
        p = np.asarray(p, dtype=float)
        if self.flat:
            return np.broadcast_to(np.array([0.0, 0.0, 1.0]), p.shape)
        return self.k * p

    def project(self, x):
        """Push ambient vectors back onto the model surface."""
        x = np.array(x, dtype=float)
        if self.flat:
            x[..., 2] = 0.0
            return x
        if self.kappa > 0:
            n = np.linalg.norm(x, axis=-1, keepdims=True)
            return x / (self.k * n)
        # hyperboloid: keep the planar part, recompute the height
        r2 = x[..., 0] ** 2 + x[..., 1] ** 2
        x[..., 2] = np.sqrt(r2 + 1.0 / self.k**2)
        return x

    def project_tangent(self, p, v):
        """Orthogonal projection of v onto the tangent plane at p."""
        p = np.asarray(p, dtype=float)
        v = np.array(v, dtype=float)
        if self.flat:
            v[..., 2] = 0.0
            return v
        return v - self.kappa * self.inner(p, v)[..., None] * p

    def normalize(self, p, v):
        v = self.project_tangent(p, v)
        n = self.norm(v)
        if np.any(n < 1e-300):
            raise GeometryError("degenerate tangent direction")
        return v / n[..., None]

    def rot90(self, p, v):
        """Rotate the tangent vector v at p by +pi/2 (counterclockwise)."""
        n = self.unit_normal(p)
        w = np.cross(n, v)
        return w @ self.gram

    def tangent_basis(self, p):
        """Positively oriented orthonormal basis (e1, e2) of T_p."""
        p = np.asarray(p, dtype=float)
        guess = np.array([1.0, 0.0, 0.0])
        e1 = self.project_tangent(p, guess)
        if self.norm(e1) < 1e-6:
            e1 = self.project_tangent(p, np.array([0.0, 1.0, 0.0]))
        e1 = e1 / self.norm(e1)
        return e1, self.rot90(p, e1)

    # -- metric --------------------------------------------------------
    def dist(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self.flat:
            return np.linalg.norm(a - b, axis=-1)
        if self.kappa > 0:
            cr = np.linalg.norm(np.cross(a, b), axis=-1)
            return np.arctan2(cr, np.sum(a * b, axis=-1)) / self.k
        d = a - b
        m2 = np.maximum(self.inner(d, d), 0.0)
        return 2.0 / self.k * np.arcsinh(0.5 * self.k * np.sqrt(m2))

    def is_antipodal(self, a, b, tol: float = ANTIPODAL_TOL):
        if self.kappa <= 0 or self.flat:
            return np.zeros(np.broadcast_shapes(np.shape(a)[:-1], np.shape(b)[:-1]), dtype=bool)
        c = self.kappa * np.sum(np.asarray(a) * np.asarray(b), axis=-1)
        return c < -1.0 + tol

    def exp(self, p, v, t):
        """Point at distance t along the unit-speed geodesic from p in direction v."""
        sn, cs = generalized_trig(self.kappa, t)
        sn = np.asarray(sn)[..., None]
        cs = np.asarray(cs)[..., None]
        p = np.asarray(p, dtype=float)
        v = np.asarray(v, dtype=float)
        return self.project(cs * p + sn * v)

    def geodesic_velocity(self, p, v, t):
        """Unit tangent at time t of the geodesic exp(p, v, .)."""
        sn, cs = generalized_trig(self.kappa, t)
        sn = np.asarray(sn)[..., None]
        cs = np.asarray(cs)[..., None]
        return cs * np.asarray(v, dtype=float) - self.kappa * sn * np.asarray(p, dtype=float)

    def log_dir(self, a, b):
        """Unit initial direction at a of the geodesic segment from a to b."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        w = (b - a) - self.kappa * self.inner(a, b - a)[..., None] * a
        if self.flat:
            w = b - a
        n = self.norm(w)
        if np.any(n < 1e-300):
            raise GeometryError("coincident points have no connecting direction")
        return w / n[..., None]

    def log(self, a, b):
        """Tangent vector at a with exp(a, log(a, b)) = b."""
        return self.log_dir(a, b) * self.dist(a, b)[..., None]

    def signed_angle(self, p, u, v):
        """Counterclockwise angle in (-pi, pi] from tangent u to tangent v at p."""
        s = self.inner(self.rot90(p, u), v)
        c = self.inner(u, v)
        return np.arctan2(s, c)

    def angle_between(self, p, u, v):
        s = self.inner(self.rot90(p, u), v)
        c = self.inner(u, v)
        return np.arctan2(np.abs(s), c)

    def midpoint(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self.flat:
            return 0.5 * (a + b)
        s = a + b
        return s / (self.k * np.sqrt(np.abs(self.inner(s, s))))[..., None]

    def reflect(self, m, x):
        """Point reflection R_m(x): m is the midpoint of x and R_m(x)."""
        m = np.asarray(m, dtype=float)
        x = np.asarray(x, dtype=float)
        if self.flat:
            return 2.0 * m - x
        return 2.0 * self.kappa * self.inner(m, x)[..., None] * m - x

    def reflect_vector(self, m, v):
        """Differential of the point reflection applied to a tangent vector."""
        v = np.asarray(v, dtype=float)
        if self.flat:
            return -v
        return 2.0 * self.kappa * self.inner(m, v)[..., None] * np.asarray(m, dtype=float) - v

    # -- lines and segments --------------------------------------------
    def line_coefficients(self, a, b):
        """Return (w, c) with signed distance arcsn(<x, w> - c) to the geodesic ab.

        Positive values lie to the left of the direction a -> b.  The
        vectors are in ambient (Euclidean dot product) form.
        """
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self.flat:
            d = b - a
            n = np.stack([-d[..., 1], d[..., 0], np.zeros_like(d[..., 0])], axis=-1)
            n = n / np.linalg.norm(d, axis=-1, keepdims=True)
            return n, np.sum(n * a, axis=-1)
        w = np.cross(a, b)
        s = np.sqrt(np.maximum(np.einsum("...i,ij,...j->...", w, self.gram, w), 0.0))
        return w / s[..., None], np.zeros(w.shape[:-1])

    def line_signed_distance(self, x, w, c):
        """Signed distances from points x (M,3) to lines (N,3),(N,) -> (M,N)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        val = x @ np.atleast_2d(w).T - np.atleast_1d(c)[None, :]
        return arcsn(self.kappa, val)

    def _towards(self, a, q):
        return (q - a) - self.kappa * self.inner(a, q - a)[..., None] * a

    def segment_distance(self, x, a, b):
        """Distance from x to the geodesic segment [a, b] (broadcasting)."""
        x = np.asarray(x, dtype=float)
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        w, c = self.line_coefficients(a, b)
        line = np.abs(arcsn(self.kappa, np.sum(x * w, axis=-1) - c))
        at_a = self.inner(self._towards(a, x), self._towards(a, b)) >= 0.0
        at_b = self.inner(self._towards(b, x), self._towards(b, a)) >= 0.0
        ends = np.minimum(self.dist(x, a), self.dist(x, b))
        return np.where(at_a & at_b, line, ends)

    # -- charts ----------------------------------------------------------
    def chart_map(self, p, v):
        """Isometry sending p to the origin and the unit tangent v to e1.

        Returns ``(matrix, offset)``; apply with ``points @ matrix.T + offset``
        (tangent vectors: ``vecs @ matrix.T``).
        """
        p = np.asarray(p, dtype=float)
        v = np.asarray(v, dtype=float)
        u = self.rot90(p, v)
        if self.flat:
            rot = np.array([[v[0], v[1], 0.0], [u[0], u[1], 0.0], [0.0, 0.0, 1.0]])
            return rot, -(rot @ p)
        frame = np.column_stack([v, u, self.k * p])
        if self.kappa > 0:
            return frame.T, np.zeros(3)
        return self.gram @ frame.T @ self.gram, np.zeros(3)

    def isometry(self, p_from, v_from, p_to, v_to):
        """Orientation-preserving isometry mapping (p_from, v_from) to (p_to, v_to)."""
        a, oa = self.chart_map(p_from, v_from)
        b, ob = self.chart_map(p_to, v_to)
        binv = np.linalg.inv(b)
        matrix = binv @ a
        offset = binv @ (oa - ob)
        return Isometry(self, matrix, offset)

    def from_polar(self, r, theta, center=None, e1=None):
        """Geodesic polar coordinates about ``center`` (default: the origin)."""
        if center is None:
            center = self.origin()
            e1 = np.array([1.0, 0.0, 0.0])
        elif e1 is None:
            e1, _ = self.tangent_basis(center)
        e2 = self.rot90(center, e1)
        theta = np.asarray(theta, dtype=float)
        v = np.cos(theta)[..., None] * e1 + np.sin(theta)[..., None] * e2
        return self.exp(center, v, r)

    def from_chart(self, xy, center=None):
        """Exponential chart: tangent coordinates about ``center`` -> points."""
        xy = np.asarray(xy, dtype=float)
        if center is None:
            center = self.origin()
        e1, e2 = self.tangent_basis(center)
        r = np.hypot(xy[..., 0], xy[..., 1])
        theta = np.arctan2(xy[..., 1], xy[..., 0])
        v = np.cos(theta)[..., None] * e1 + np.sin(theta)[..., None] * e2
        return self.exp(center, v, r)

    def to_chart(self, x, center=None):
        """Inverse of :meth:`from_chart` (log map coordinates)."""
        if center is None:
            center = self.origin()
        e1, e2 = self.tangent_basis(center)
        x = np.atleast_2d(np.asarray(x, dtype=float))
        d = self.dist(center, x)
        out = np.zeros(x.shape[:-1] + (2,))
        nz = d > 0
        if np.any(nz):
            u = self.log_dir(np.broadcast_to(center, x[nz].shape), x[nz])
            out[nz, 0] = d[nz] * self.inner(u, e1)
            out[nz, 1] = d[nz] * self.inner(u, e2)
        return out

    def on_surface_error(self, x):
        x = np.asarray(x, dtype=float)
        if self.flat:
            return np.abs(x[..., 2])
        return np.abs(self.kappa * self.inner(x, x) - 1.0)


@dataclass(frozen=True)
class Isometry:
    space: Space
    matrix: np.ndarray
    offset: np.ndarray

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        return self.space.project(points @ self.matrix.T + self.offset)

    def vector(self, vecs):
        return np.asarray(vecs, dtype=float) @ self.matrix.T


@lru_cache(maxsize=64)
def space(kappa: float) -> Space:
    return Space(kappa)


# ---------------------------------------------------------------------------
# Value types and single-point API


@dataclass(frozen=True, eq=False)
class ModelPoint:
    kappa: float
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float).reshape(3)
        c.flags.writeable = False
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "kappa", float(self.kappa))

    @classmethod
    def from_coords(cls, kappa: float, coords, *, check: bool = True, tol: float = 1e-12) -> "ModelPoint":
        sp = space(float(kappa))
        c = np.asarray(coords, dtype=float).reshape(3)
        if check:
            err = float(sp.on_surface_error(c))
            if err > tol * max(1.0, float(np.dot(c, c)) * abs(sp.kappa)):
                raise GeometryError(f"coordinates {c} are not on M^2({kappa}) (error {err:.3g})")
            if sp.kappa < 0 and not sp.flat and c[2] <= 0:
                raise GeometryError("hyperboloid points must lie on the upper sheet")
        return cls(kappa, sp.project(c))

    @classmethod
    def plane(cls, x: float, y: float) -> "ModelPoint":
        return cls(0.0, (x, y, 0.0))

    @classmethod
    def origin(cls, kappa: float) -> "ModelPoint":
        return cls(kappa, space(kappa).origin())

    @property
    def space(self) -> Space:
        return space(self.kappa)

    def __eq__(self, other):
        return (
            isinstance(other, ModelPoint)
            and self.kappa == other.kappa
            and bool(np.allclose(self.coords, other.coords, rtol=0, atol=DEFAULT_TOL))
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"ModelPoint(kappa={self.kappa!r}, coords={self.coords.tolist()!r})"


@dataclass(frozen=True, eq=False)
class TangentVector:
    base: ModelPoint
    dir: np.ndarray

    def __post_init__(self):
        d = np.array(self.dir, dtype=float).reshape(3)
        d.flags.writeable = False
        object.__setattr__(self, "dir", d)

    @property
    def norm(self) -> float:
        return float(self.base.space.norm(self.dir))

    def is_normalized(self, tol: float = 1e-9) -> bool:
        sp = self.base.space
        ortho = abs(float(sp.inner(self.base.coords, self.dir))) if not sp.flat else abs(self.dir[2])
        return ortho < tol and abs(self.norm - 1.0) < tol

    def normalized(self) -> "TangentVector":
        sp = self.base.space
        return TangentVector(self.base, sp.normalize(self.base.coords, self.dir))


@dataclass(frozen=True)
class GeodesicSegment:
    start: ModelPoint
    end: ModelPoint

    @property
    def length(self) -> float:
        return distance(self.start, self.end)

    def point(self, t: float) -> ModelPoint:
        sp = self.start.space
        u = sp.log_dir(self.start.coords, self.end.coords)
        return ModelPoint(self.start.kappa, sp.exp(self.start.coords, u, t))


def _same_space(*points: ModelPoint) -> Space:
    kappa = points[0].kappa
    for p in points[1:]:
        if p.kappa != kappa:
            raise CurvatureMismatch(f"points live in M^2({kappa}) and M^2({p.kappa})")
    return space(kappa)


def distance(p: ModelPoint, q: ModelPoint) -> float:
    sp = _same_space(p, q)
    if sp.is_antipodal(p.coords, q.coords):
        raise AntipodalError("antipodal points have no unique geodesic")
    return float(sp.dist(p.coords, q.coords))


def exp_map(v: TangentVector, t: float) -> ModelPoint:
    sp = v.base.space
    if not v.is_normalized():
        raise GeometryError("exp_map needs a unit tangent vector")
    if t < 0:
        raise GeometryError("geodesic time must be nonnegative")
    if sp.kappa > 0 and not sp.flat and t >= math.pi / sp.k:
        raise GeometryError("geodesic time reaches the antipode")
    return ModelPoint(v.base.kappa, sp.exp(v.base.coords, v.dir, t))


def angle(at: ModelPoint, p: ModelPoint, q: ModelPoint) -> float:
    sp = _same_space(at, p, q)
    if np.allclose(at.coords, p.coords, atol=1e-15) or np.allclose(at.coords, q.coords, atol=1e-15):
        raise GeometryError("angle is undefined at coincident points")
    u = sp.log_dir(at.coords, p.coords)
    v = sp.log_dir(at.coords, q.coords)
    return float(sp.angle_between(at.coords, u, v))


def point_reflection(m: ModelPoint, x: ModelPoint) -> ModelPoint:
    sp = _same_space(m, x)
    if sp.is_antipodal(m.coords, x.coords):
        raise AntipodalError("reflection of an antipodal point is ill-defined")
    return ModelPoint(m.kappa, sp.project(sp.reflect(m.coords, x.coords)))


def midpoint(p: ModelPoint, q: ModelPoint) -> ModelPoint:
    sp = _same_space(p, q)
    if sp.is_antipodal(p.coords, q.coords):
        raise AntipodalError("antipodal points have no unique midpoint")
    return ModelPoint(p.kappa, sp.midpoint(p.coords, q.coords))
