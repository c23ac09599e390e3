"""Discrete convex domains in M^2(kappa) and the numeric solvers that act on them.

A domain is a counterclockwise ring of boundary vertices joined by geodesic
edges.  Everything here is vectorised over the vertices with numpy; the
boundary of a generated domain typically has a few thousand vertices.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .curves import CurveKind, FLambdaRegion, _check_lambda, _supporting, classify, f_lambda_radius, hypercycle_offset
from .kernel import GeometryError, ModelPoint, Space, arcsn, generalized_trig, space

MIN_VERTICES = 8
SCHEMA_VERSION = 1


class DomainError(GeometryError):
    pass


class ConvexityError(DomainError):
    def __init__(self, message: str, vertex: int | None = None):
        super().__init__(message)
        self.vertex = vertex


class SolverError(RuntimeError):
    pass


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class ConvexPolyDomain:
    """Closed convex geodesic polygon, counterclockwise with the domain on the left."""

    kappa: float
    boundary: np.ndarray
    lam: float | None = None
    metadata: dict = field(default_factory=dict)
    edge_lengths: np.ndarray = field(init=False, repr=False)
    cumulative_arclength: np.ndarray = field(init=False, repr=False)
    turning: np.ndarray = field(init=False, repr=False)
    directions: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        sp = space(self.kappa)
        pts = sp.project(np.asarray(self.boundary, dtype=float).reshape(-1, 3))
        pts.flags.writeable = False
        object.__setattr__(self, "boundary", pts)
        nxt = np.roll(pts, -1, axis=0)
        lengths = sp.dist(pts, nxt)
        if np.any(lengths < 1e-14):
            raise DomainError("repeated consecutive boundary points")
        cum = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
        object.__setattr__(self, "edge_lengths", lengths)
        object.__setattr__(self, "cumulative_arclength", cum)
        object.__setattr__(self, "directions", sp.log_dir(pts, nxt))
        t_in = sp.geodesic_velocity(np.roll(pts, 1, axis=0), np.roll(self.directions, 1, axis=0), np.roll(lengths, 1))
        object.__setattr__(self, "turning", sp.signed_angle(pts, t_in, self.directions))

    # -- construction ------------------------------------------------------
    @classmethod
    def from_points(
        cls,
        kappa: float,
        points,
        *,
        lam: float | None = None,
        metadata: dict | None = None,
        h: float | None = None,
        validate: bool = True,
        turn_tol: float = 1e-12,
    ) -> "ConvexPolyDomain":
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise DomainError("boundary must be an (n, 3) array of embedding coordinates")
        if len(pts) < 3:
            raise DomainError("a domain needs at least three vertices")
        dom = cls(float(kappa), pts, lam, dict(metadata or {}))
        if validate:
            dom.validate(h=h, turn_tol=turn_tol)
        return dom

    def validate(self, h: float | None = None, turn_tol: float = 1e-12) -> None:
        sp = self.space
        n = len(self.boundary)
        if n < MIN_VERTICES:
            raise DomainError(f"domain has {n} vertices, at least {MIN_VERTICES} required")
        if not np.all(np.isfinite(self.boundary)):
            raise DomainError("non-finite boundary coordinates")
        if sp.kappa > 0 and not sp.flat:
            c = self.boundary.sum(axis=0)
            if np.any(self.boundary @ c <= 0):
                raise DomainError("spherical domain is not contained in an open hemisphere")
        if h is not None and self.edge_lengths.max() > 10.0 * h * (1 + 1e-9):
            raise DomainError(f"edge of length {self.edge_lengths.max():.3g} exceeds 10*h = {10 * h:.3g}")
        bad = np.flatnonzero(self.turning <= -turn_tol)
        if bad.size:
            i = int(bad[np.argmin(self.turning[bad])])
            raise ConvexityError(f"vertex {i} turns right by {-self.turning[i]:.3g} rad", vertex=i)
        total = float(self.turning.sum()) + sp.kappa * self.area()
        if abs(total - 2.0 * math.pi) > 1e-6:
            raise DomainError(f"boundary is not a simple counterclockwise curve (total turning {total:.6g})")

    # -- basic measures ----------------------------------------------------
    @property
    def space(self) -> Space:
        return space(self.kappa)

    @property
    def n(self) -> int:
        return len(self.boundary)

    @property
    def perimeter(self) -> float:
        return float(self.edge_lengths.sum())

    def reference_point(self) -> np.ndarray:
        sp = self.space
        return sp.project(self.boundary.mean(axis=0))

    def area(self, o=None) -> float:
        sp = self.space
        pts = self.boundary
        nxt = np.roll(pts, -1, axis=0)
        if sp.flat:
            return 0.5 * float(np.sum(pts[:, 0] * nxt[:, 1] - nxt[:, 0] * pts[:, 1]))
        o = self.reference_point() if o is None else np.asarray(o, dtype=float)
        ob = np.broadcast_to(o, pts.shape)
        a_o = sp.signed_angle(ob, sp.log_dir(ob, pts), sp.log_dir(ob, nxt))
        a_p = sp.signed_angle(pts, sp.log_dir(pts, nxt), sp.log_dir(pts, ob))
        a_q = sp.signed_angle(nxt, sp.log_dir(nxt, ob), sp.log_dir(nxt, pts))
        sign = np.sign(a_o)
        excess = sign * (np.abs(a_o) + np.abs(a_p) + np.abs(a_q) - math.pi)
        return float(np.sum(excess) / sp.kappa)

    def swerve(self) -> float:
        return float(self.turning.sum())

    def gauss_bonnet_residual(self) -> float:
        return abs(self.swerve() + self.kappa * self.area() - 2.0 * math.pi)

    # -- boundary parametrisation -----------------------------------------
    def edge_index(self, sigma):
        sigma = np.mod(np.asarray(sigma, dtype=float), self.perimeter)
        i = np.searchsorted(self.cumulative_arclength, sigma, side="right") - 1
        return np.clip(i, 0, self.n - 1), sigma

    def on_edge(self, i, t):
        """Point and unit tangent at distance t along edge i."""
        sp = self.space
        v = self.boundary[i]
        u = self.directions[i]
        return sp.exp(v, u, t), sp.geodesic_velocity(v, u, t)

    def point_at(self, sigma):
        i, sigma = self.edge_index(sigma)
        return self.on_edge(i, sigma - self.cumulative_arclength[i])

    def vertex_tangents(self) -> np.ndarray:
        """Unit bisector of the incoming and outgoing edge directions."""
        sp = self.space
        prev = np.roll(self.boundary, 1, axis=0)
        t_in = sp.geodesic_velocity(prev, np.roll(self.directions, 1, axis=0), np.roll(self.edge_lengths, 1))
        return sp.normalize(self.boundary, t_in + self.directions)

    def edge_lines(self):
        nxt = np.roll(self.boundary, -1, axis=0)
        return self.space.line_coefficients(self.boundary, nxt)

    def boundary_distance(self, x) -> np.ndarray:
        """Signed distance to the boundary (positive inside), via edge geodesics."""
        w, c = self.edge_lines()
        x = np.atleast_2d(x)
        out = np.empty(len(x))
        for s in range(0, len(x), 256):
            out[s : s + 256] = self.space.line_signed_distance(x[s : s + 256], w, c).min(axis=1)
        return out

    def contains(self, x, tol: float = 0.0) -> np.ndarray:
        return self.boundary_distance(x) >= -tol

    # -- serialisation -----------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kappa": self.kappa,
            "lambda": self.lam,
            "boundary": self.boundary.tolist(),
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, data: dict, *, validate: bool = True) -> "ConvexPolyDomain":
        if data.get("schema_version") != SCHEMA_VERSION:
            raise DomainError(f"unsupported domain schema version {data.get('schema_version')!r}")
        return cls.from_points(
            data["kappa"],
            data["boundary"],
            lam=data.get("lambda"),
            metadata=data.get("metadata") or {},
            validate=validate,
        )


# ---------------------------------------------------------------------------
# Lambda-convexity


@dataclass(frozen=True)
class LambdaConvexityReport:
    ok: bool
    min_excess: float
    window: tuple[int, int]
    n_edges: int
    tol: float

    def __bool__(self) -> bool:
        return self.ok


def _running_arg(s: np.ndarray, better) -> tuple[np.ndarray, np.ndarray]:
    """Running extremum of s and the index where it was attained."""
    run = better.accumulate(s)
    hit = s == run
    idx = np.maximum.accumulate(np.where(hit, np.arange(len(s)), 0))
    return run, idx


def _min_circular_window(q: np.ndarray):
    """Minimum-sum contiguous window of a circular array -> (sum, start, n_edges)."""
    n = len(q)
    s = np.concatenate([[0.0], np.cumsum(q)])
    total = float(s[-1])
    run_max, arg_max = _running_arg(s[:-1], np.maximum)
    drops = s[1:] - run_max
    j = int(np.argmin(drops))
    cand = [(float(drops[j]), int(arg_max[j]), j + 1 - int(arg_max[j])), (total, 0, n)]
    # windows that wrap around are complements of a maximum-sum linear window
    run_min, arg_min = _running_arg(s[:-1], np.minimum)
    rises = s[1:] - run_min
    jm = int(np.argmax(rises))
    inner = jm + 1 - int(arg_min[jm])
    if inner < n:
        cand.append((total - float(rises[jm]), (jm + 1) % n, n - inner))
    return min(cand, key=lambda c: c[0])


def is_lambda_convex(D: ConvexPolyDomain, lam: float, tol: float | None = None) -> LambdaConvexityReport:
    """Check swerve >= lam * length on every contiguous boundary window.

    A window from vertex i to vertex j counts the full turn at its interior
    vertices and half the turn at its two end vertices (the chord-to-arc
    angle of an inscribed polyline).  ``tol`` defaults to ``lam`` times the
    longest edge, the resolution of the polyline.
    """
    lam = _check_lambda(lam)
    if tol is None:
        tol = lam * float(D.edge_lengths.max())
    th = D.turning
    q = 0.5 * th + 0.5 * np.roll(th, -1) - lam * D.edge_lengths
    best, start, n_edges = _min_circular_window(q)
    end = (start + n_edges) % D.n
    return LambdaConvexityReport(bool(best >= -tol), float(best), (int(start), int(end)), int(n_edges), float(tol))


# ---------------------------------------------------------------------------
# Inradius / circumradius


class _Chart:
    """Central-projection chart about a point: geodesics map to straight lines."""

    def __init__(self, sp: Space, p):
        self.sp = sp
        self.p = np.asarray(p, dtype=float)
        self.e1, self.e2 = sp.tangent_basis(self.p)

    def _raw(self, xy):
        xy = np.asarray(xy, dtype=float)
        return self.p + xy[..., :1] * self.e1 + xy[..., 1:2] * self.e2

    def point(self, xy):
        q = self._raw(xy)
        sp = self.sp
        if sp.flat:
            return q
        nrm = np.sqrt(np.abs(sp.inner(q, q)))
        return q / (sp.k * nrm)[..., None]

    def jacobian(self, xy):
        """d point / d(x, y) as two ambient vectors of shape (..., 3)."""
        sp = self.sp
        if sp.flat:
            shape = np.shape(xy)[:-1] + (3,)
            return np.broadcast_to(self.e1, shape), np.broadcast_to(self.e2, shape)
        q = self._raw(xy)
        nrm = np.sqrt(np.abs(sp.inner(q, q)))
        sgn = 1.0 if sp.kappa > 0 else -1.0
        out = []
        for e in (self.e1, self.e2):
            dn = sgn * sp.inner(q, e) / nrm
            out.append(e / (sp.k * nrm)[..., None] - q * (dn / (sp.k * nrm**2))[..., None])
        return tuple(out)

    def coords(self, x):
        """Inverse map (points must lie in the chart's hemisphere / sheet)."""
        sp = self.sp
        x = np.asarray(x, dtype=float)
        if sp.flat:
            d = x - self.p
            return np.stack([d @ self.e1, d @ self.e2], axis=-1)
        # scale x so its component along p matches p
        s = sp.inner(x, self.p) / sp.inner(self.p, self.p)
        y = x / s[..., None] - self.p
        return np.stack([sp.inner(y, self.e1), sp.inner(y, self.e2)], axis=-1)


def golden_section_max(fun, a: float, b: float, tol: float = 1e-10, maxiter: int = 200):
    """Maximise a unimodal function on [a, b]; returns (x, f(x))."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(maxiter):
        if abs(b - a) < tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    return (c, fc) if fc >= fd else (d, fd)


def _grid_then_ascent(objective, chart: _Chart, half_width: float, n_grid: int = 21, sweeps: int = 3):
    """Coarse grid over the chart square, then golden-section along geodesics."""
    g = np.linspace(-half_width, half_width, n_grid)
    xx, yy = np.meshgrid(g, g)
    xy = np.stack([xx.ravel(), yy.ravel()], axis=-1)
    vals = objective(chart.point(xy))
    best = xy[int(np.argmax(vals))]
    step = 2.0 * half_width / (n_grid - 1)
    sp = chart.sp
    p = chart.point(best)
    fp = float(objective(p[None])[0])
    dirs = [0.0, math.pi / 2, math.pi / 4, 3 * math.pi / 4]
    for _ in range(sweeps):
        for ang in dirs:
            e1, e2 = sp.tangent_basis(p)
            u = math.cos(ang) * e1 + math.sin(ang) * e2

            def along(t, p=p, u=u):
                return float(objective(sp.exp(p, u, t)[None])[0])

            t, ft = golden_section_max(along, -step, step, tol=step * 1e-3)
            if ft > fp:
                p, fp = sp.exp(p, u, t), ft
        step *= 0.5
    return p, fp, 2.0 * half_width / (n_grid - 1)


def _polish(sp: Space, p0, value_fn, con_fn, sense: float, radius: float, rounds: int = 40):
    """Trust-region SLSQP for the max-min (sense=+1) or min-max (-1) problem.

    Each round works in a central-projection chart about the current point,
    restricted to the box |x|, |y| <= radius.  Every constraint within
    3 * radius of the current optimum value is included, which covers all
    constraints that can become active inside the box, so the box problem
    is solved exactly.  Rounds re-centre until the box optimum is interior.
    ``con_fn(chart, xy, idx)`` returns constraint values and chart gradients.
    """
    p = np.asarray(p0, dtype=float)
    full = value_fn(p)
    r = float(sense * (sense * full).min())
    for _ in range(rounds):
        chart = _Chart(sp, p)
        active = np.flatnonzero(sense * (full - r) <= 3.0 * radius)

        def cons(z, active=active, chart=chart):
            vals, _ = con_fn(chart, z[:2], active)
            return sense * (vals - z[2])

        def cons_jac(z, active=active, chart=chart):
            _, grad = con_fn(chart, z[:2], active)
            jac = np.empty((len(active), 3))
            jac[:, :2] = sense * grad
            jac[:, 2] = -sense
            return jac

        with warnings.catch_warnings():
            warnings.filterwarnings("ignore", "Values in x were outside bounds", RuntimeWarning)
            res = optimize.minimize(
                lambda z: -sense * z[2],
                np.array([0.0, 0.0, r]),
                jac=lambda z: np.array([0.0, 0.0, -sense]),
                bounds=[(-radius, radius), (-radius, radius), (None, None)],
                constraints=[{"type": "ineq", "fun": cons, "jac": cons_jac}],
                method="SLSQP",
                options={"ftol": 1e-16, "maxiter": 300},
            )
        z = res.x
        q = chart.point(z[:2])
        full_q = value_fn(q)
        r_q = float(sense * (sense * full_q).min())
        if sense * r_q <= sense * r:
            # no progress at this scale: shrink, or stop once negligible
            radius *= 0.25
            if radius < 1e-12:
                break
            continue
        p, full, r = q, full_q, r_q
        if np.max(np.abs(z[:2])) < 0.9 * radius:
            radius *= 0.25
            if radius < 1e-9:
                break
    return p, r


def inradius(D: ConvexPolyDomain, tol: float = 1e-9):
    """Largest inscribed ball: returns (r, incenter ModelPoint)."""
    sp = D.space
    w, c = D.edge_lines()
    ref = D.reference_point()
    chart = _Chart(sp, ref)
    half = float(np.abs(chart.coords(D.boundary)).max()) * 1.02

    def objective(P):
        return sp.line_signed_distance(P, w, c).min(axis=1)

    p, fp, grid_step = _grid_then_ascent(objective, chart, half)
    if fp <= 0:
        raise SolverError("no interior point found for the inradius search")

    def values(P):
        return sp.line_signed_distance(P, w, c)[0]

    def con_fn(ch, xy, idx):
        P = ch.point(xy)
        y = P @ w[idx].T - c[idx]
        d = arcsn(sp.kappa, y)
        _, cs = generalized_trig(sp.kappa, d)
        j1, j2 = ch.jacobian(xy)
        grad = np.stack([w[idx] @ j1, w[idx] @ j2], axis=-1) / cs[:, None]
        return d, grad

    best_p, r = _polish(sp, p, values, con_fn, 1.0, grid_step)
    if r < fp - tol:
        best_p, r = p, fp
    return float(r), ModelPoint(D.kappa, best_p)


def circumradius(D: ConvexPolyDomain, tol: float = 1e-9):
    """Smallest enclosing ball of the boundary: returns (R, center ModelPoint)."""
    sp = D.space
    V = D.boundary
    ref = D.reference_point()
    chart = _Chart(sp, ref)
    half = float(np.abs(chart.coords(V)).max()) * 1.02

    # the coarse phase only needs a thinned vertex set; the polish uses all of them
    coarse = V[:: max(1, len(V) // 400)]

    def objective(P):
        P = np.atleast_2d(P)
        out = np.empty(len(P))
        for s in range(0, len(P), 128):
            out[s : s + 128] = -sp.dist(P[s : s + 128, None, :], coarse[None, :, :]).max(axis=1)
        return out

    p, fp, grid_step = _grid_then_ascent(objective, chart, half)

    def values(P):
        return sp.dist(P[None, :], V)

    def con_fn(ch, xy, idx):
        P = ch.point(xy)
        d = sp.dist(P[None, :], V[idx])
        # d(dist)/dP is minus the unit direction towards the vertex; a trial
        # point sitting exactly on a vertex gets a zero subgradient
        B = V[idx]
        A = np.broadcast_to(P, B.shape)
        toward = B - A if sp.flat else (B - A) - sp.kappa * sp.inner(A, B - A)[:, None] * A
        n = sp.norm(toward)
        away = -toward / np.where(n > 1e-300, n, 1.0)[:, None]
        j1, j2 = ch.jacobian(xy)
        grad = np.stack([sp.inner(away, j1), sp.inner(away, j2)], axis=-1)
        return d, grad

    # fp only saw the thinned vertices; score the start on all of them
    R0 = float(values(p).max())
    best_p, R = _polish(sp, p, values, con_fn, -1.0, grid_step)
    if R > R0 + tol:
        best_p, R = p, R0
    return float(R), ModelPoint(D.kappa, best_p)


# ---------------------------------------------------------------------------
# Balanced chord, reflection and rolling


@dataclass(frozen=True, eq=False)
class BalancedChord:
    p_star: np.ndarray
    q_star: np.ndarray
    m: np.ndarray
    sigma_p: float
    tangent_p: np.ndarray
    tangent_q: np.ndarray
    arc_split: tuple[tuple[int, int], tuple[int, int]]
    g_residual: float
    arc_lengths: tuple[float, float]


def chord_gap(D: ConvexPolyDomain, sigma) -> np.ndarray:
    """The angle-balance function g at arclength positions sigma.

    g(x) = angle(T_x -> chord x f(x)) - angle(T_f(x) -> chord f(x) x), with
    edge directions as tangents; g(f(x)) = -g(x) by construction.
    """
    sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
    x, tx = D.point_at(sigma)
    y, ty = D.point_at(sigma + 0.5 * D.perimeter)
    return _gap(D.space, x, tx, y, ty)


def _gap(sp: Space, x, tx, y, ty):
    a = sp.signed_angle(x, tx, sp.log_dir(x, y))
    b = sp.signed_angle(y, ty, sp.log_dir(y, x))
    return a - b


def _rotate(sp: Space, p, t, ang):
    return math.cos(ang) * t + math.sin(ang) * sp.rot90(p, t)


def balanced_chord(D: ConvexPolyDomain, o: ModelPoint | None = None) -> BalancedChord:
    """Chord splitting the boundary into equal halves with balanced end angles."""
    sp = D.space
    if o is not None:
        if o.kappa != D.kappa:
            raise GeometryError("interior point lives in a different space")
        if D.boundary_distance(o.coords[None])[0] <= 0:
            raise DomainError("reference point must lie strictly inside the domain")
    L = D.perimeter
    half = 0.5 * L
    cum = D.cumulative_arclength
    ev = np.concatenate([[0.0, half], cum[cum <= half], cum[cum >= half] - half])
    ev = np.unique(np.clip(ev, 0.0, half))
    lo, hi = ev[:-1], ev[1:]
    keep = hi - lo > 0
    lo, hi = lo[keep], hi[keep]
    mid = 0.5 * (lo + hi)
    ix, _ = D.edge_index(mid)
    iy, _ = D.edge_index(mid + half)

    def g_fixed(s, ix, iy):
        x, tx = D.on_edge(ix, s - cum[ix])
        y, ty = D.on_edge(iy, s + half - cum[iy])
        return _gap(sp, x, tx, y, ty), (x, tx, y, ty)

    g_lo, _ = g_fixed(lo, ix, iy)
    g_hi, _ = g_fixed(hi, ix, iy)

    # 1. zero inside an interval where both ends sit on fixed edges
    inside = np.flatnonzero(g_lo * g_hi <= 0)
    # 2. sign change across an event (vertex): pick a tangent from the cone
    jump = np.flatnonzero(g_hi[:-1] * g_lo[1:] < 0)
    first_inside = inside[0] if inside.size else len(lo)
    first_jump = jump[0] if jump.size else len(lo)
    if inside.size == 0 and jump.size == 0:
        raise DomainError("angle-balance root not bracketed; boundary is not strictly convex")
    if first_inside <= first_jump:
        j = int(first_inside)
        a, b, i1, i2 = lo[j], hi[j], ix[j], iy[j]
        ga, gb = float(g_lo[j]), float(g_hi[j])
        if ga == 0.0:
            s = a
        elif gb == 0.0:
            s = b
        else:
            s = optimize.brentq(lambda t: float(g_fixed(np.array([t]), i1, i2)[0][0]), a, b, xtol=1e-15, rtol=1e-15, maxiter=200)
        g, (x, tx, y, ty) = g_fixed(np.array([s]), i1, i2)
        x, tx, y, ty = x[0], tx[0], y[0], ty[0]
        residual = abs(float(g[0]))
    else:
        j = int(first_jump)
        s = hi[j]
        ga, gb = float(g_hi[j]), float(g_lo[j + 1])
        tau = ga / (ga - gb)
        _, (x, tx_a, y, ty_a) = g_fixed(np.array([s]), ix[j], iy[j])
        _, (_, tx_b, _, ty_b) = g_fixed(np.array([s]), ix[j + 1], iy[j + 1])
        x, y = x[0], y[0]
        rot_x = float(sp.signed_angle(x, tx_a[0], tx_b[0]))
        rot_y = float(sp.signed_angle(y, ty_a[0], ty_b[0]))
        tx = _rotate(sp, x, tx_a[0], tau * rot_x)
        ty = _rotate(sp, y, ty_a[0], tau * rot_y)
        residual = abs(float(_gap(sp, x[None], tx[None], y[None], ty[None])[0]))
    s = float(s)
    m = sp.midpoint(x, y)
    inner1 = np.flatnonzero((cum > s) & (cum < s + half))
    inner2 = np.flatnonzero((cum > s + half) | (cum < s))
    split = ((int(inner1[0]), int(inner1[-1])) if inner1.size else (-1, -1),
             (int(inner2[0]), int(inner2[-1])) if inner2.size else (-1, -1))
    len1 = _sub_length(D, s, s + half)
    return BalancedChord(x, y, m, s, tx, ty, split, residual, (len1, L - len1))


def _sub_length(D: ConvexPolyDomain, a: float, b: float) -> float:
    """Polyline length between arclength positions a < b, summed edge by edge."""
    sp = D.space
    cum = D.cumulative_arclength
    inner = np.flatnonzero((cum > a) & (cum < b))
    if inner.size == 0:
        pa, _ = D.point_at(a)
        pb, _ = D.point_at(b)
        return float(sp.dist(pa, pb))
    pa, _ = D.point_at(a)
    pb, _ = D.point_at(b)
    total = float(sp.dist(pa, D.boundary[inner[0]]))
    total += float(D.edge_lengths[inner[:-1]].sum())
    total += float(sp.dist(D.boundary[inner[-1]], pb))
    return total


def reflect_arc(D: ConvexPolyDomain, chord: BalancedChord, tol: float = 1e-9) -> ConvexPolyDomain:
    """Close the first half-arc with its point reflection in the chord midpoint."""
    sp = D.space
    cum = D.cumulative_arclength
    s = chord.sigma_p
    half = 0.5 * D.perimeter
    idx = np.flatnonzero((cum > s) & (cum < s + half))
    arc = D.boundary[idx]
    close = 1e-12
    if len(arc) and sp.dist(arc[0], chord.p_star) < close:
        arc = arc[1:]
    if len(arc) and sp.dist(arc[-1], chord.q_star) < close:
        arc = arc[:-1]
    first = np.vstack([chord.p_star[None], arc, chord.q_star[None]])
    second = sp.reflect(chord.m, first[1:-1])
    ring = np.vstack([first, second])
    meta = {"generator": "reflect_arc", "source": D.metadata, "sigma_p": s}
    out = ConvexPolyDomain.from_points(D.kappa, ring, lam=D.lam, metadata=meta, validate=False)
    bad = np.flatnonzero(out.turning < -tol)
    if bad.size:
        i = int(bad[np.argmin(out.turning[bad])])
        raise ConvexityError(f"reflected curve turns right by {-out.turning[i]:.3g} rad at vertex {i}", vertex=i)
    out.validate(turn_tol=tol)
    return out


@dataclass(frozen=True)
class RollingReport:
    ok: bool
    max_violation: float
    worst_sample: int
    worst_vertex: int
    tol: float

    def __bool__(self) -> bool:
        return self.ok


def rolling_check(D: ConvexPolyDomain, lam: float, n_samples: int = 64, tol: float = 1e-9) -> RollingReport:
    """Every vertex must lie in the F_lambda region supporting D at each sample."""
    lam = _check_lambda(lam)
    sp = D.space
    tangents = D.vertex_tangents()
    samples = np.unique(np.linspace(0, D.n, max(1, n_samples), endpoint=False).astype(int))
    worst, ws, wv = -math.inf, -1, -1
    for i in samples:
        s = D.boundary[i]
        region = _supporting(sp, s, sp.rot90(s, tangents[i]), lam)
        sd = region.signed_distance(D.boundary)
        j = int(np.argmax(sd))
        if sd[j] > worst:
            worst, ws, wv = float(sd[j]), int(i), j
    return RollingReport(bool(worst <= tol), worst, ws, wv, float(tol))


# ---------------------------------------------------------------------------
# Random lambda-convex domains


def _draw_regions(sp: Space, lam: float, rng: np.random.Generator, n: int) -> list[FLambdaRegion]:
    kind = classify(sp.kappa, lam)
    o = sp.origin()
    base = rng.uniform(0.0, 2.0 * math.pi)
    jitter = rng.uniform(-0.15, 0.15, n) * (2.0 * math.pi / n)
    phis = base + 2.0 * math.pi * np.arange(n) / n + jitter
    if kind is CurveKind.CIRCLE:
        depths = rng.uniform(0.2, 0.9, n) * f_lambda_radius(sp.kappa, lam)
    elif kind is CurveKind.HOROCYCLE:
        depths = rng.uniform(0.15, 1.0, n) / sp.k
    else:
        depths = rng.uniform(0.15, 0.6, n) * hypercycle_offset(sp.kappa, lam)
    regions = []
    for phi, d in zip(phis, depths):
        s = sp.from_polar(d, phi)
        regions.append(_supporting(sp, s, sp.log_dir(s, o), lam))
    return regions


def _piece(regions, i: int, n_grid: int):
    """Arclength interval of region i's boundary that lies inside all others."""
    reg = regions[i]
    others = [r for j, r in enumerate(regions) if j != i]
    arc = reg.boundary()

    def g(sig):
        pts = arc.points(np.asarray(sig, dtype=float))
        return np.max([r.signed_distance(pts) for r in others], axis=0)

    if reg.compact:
        C = 2.0 * math.pi / math.sqrt(reg.lam**2 + reg.kappa)
        grid = np.linspace(-0.5 * C, 0.5 * C, n_grid, endpoint=False)
        vals = g(grid)
        if np.all(vals <= 0):
            return (-0.5 * C, 0.5 * C, True)
        if np.all(vals > 0):
            return None
        shift = int(np.argmax(vals > 0))
        grid = np.concatenate([grid[shift:], grid[:shift] + C])
        vals = np.concatenate([vals[shift:], vals[:shift]])
        grid = np.append(grid, grid[0] + C)
        vals = np.append(vals, vals[0])
    else:
        sig_max = 2.0 / max(space(reg.kappa).k, 1e-12)
        while True:
            ends = g(np.array([-sig_max, sig_max]))
            if np.all(ends > 0):
                break
            sig_max *= 2.0
            if sig_max > 256.0 / space(reg.kappa).k:
                raise GenerationError("intersection is unbounded")
        grid = np.linspace(-sig_max, sig_max, n_grid)
        vals = g(grid)
        if np.all(vals > 0):
            return None
    inside = vals <= 0
    # longest run of inside samples
    best, best_len, run_start = None, -1, None
    for t, flag in enumerate(inside):
        if flag and run_start is None:
            run_start = t
        if (not flag or t == len(inside) - 1) and run_start is not None:
            end = t - 1 if not flag else t
            if end - run_start > best_len:
                best, best_len = (run_start, end), end - run_start
            run_start = None
    a_idx, b_idx = best

    def root(lo, hi):
        return optimize.brentq(lambda t: float(g(np.array([t]))[0]), lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)

    a = root(grid[a_idx - 1], grid[a_idx])
    b = root(grid[b_idx], grid[b_idx + 1])
    return (a, b, False)


def _assemble(regions, h: float, n_grid: int):
    sp = space(regions[0].kappa)
    pieces = []
    for i in range(len(regions)):
        got = _piece(regions, i, n_grid)
        if got is None:
            continue
        a, b, full = got
        arc = regions[i].boundary(a, b)
        if full:
            return arc.sample(h)[:-1], 1
        if b - a > 1e-10:
            pieces.append(arc)
    if len(pieces) < 2:
        return None, len(pieces)
    starts = np.array([p.points(p.s_min) for p in pieces])
    order = [0]
    used = {0}
    for _ in range(len(pieces) - 1):
        end = pieces[order[-1]].points(pieces[order[-1]].s_max)
        d = sp.dist(end[None], starts)
        d[list(used)] = np.inf
        j = int(np.argmin(d))
        if d[j] > 1e-8:
            return None, len(pieces)
        order.append(j)
        used.add(j)
    closing = sp.dist(pieces[order[-1]].points(pieces[order[-1]].s_max), starts[order[0]])
    if closing > 1e-8:
        return None, len(pieces)
    ring = []
    for j in order:
        pts = pieces[j].sample(h)
        ring.append(pts[:-1])
    return np.vstack(ring), len(pieces)


def generate_lambda_convex(
    kappa: float,
    lam: float,
    seed: int,
    n_supports: int,
    h: float,
    *,
    max_retries: int = 100,
    max_perimeter: float = 16.0,
) -> ConvexPolyDomain:
    """Random intersection of ``n_supports`` F_lambda regions sampled at step <= h.

    All regions contain the origin, so the intersection has interior.
    Draws that come out unbounded, too large, or fail validation are
    redrawn from the next seed stream, up to ``max_retries`` times.
    """
    lam = _check_lambda(lam)
    if int(n_supports) < 2:
        raise GeometryError("n_supports must be at least 2")
    if not h > 0:
        raise GeometryError("sampling step must be positive")
    sp = space(kappa)
    for attempt in range(max_retries):
        rng = np.random.default_rng([int(seed), attempt])
        regions = _draw_regions(sp, lam, rng, int(n_supports))
        ring = None
        try:
            for n_grid in (2048, 32768):
                ring, used = _assemble(regions, h, n_grid)
                if ring is not None:
                    break
        except GenerationError:
            continue
        if ring is None:
            continue
        meta = {
            "generator": "f_lambda_intersection",
            "seed": int(seed),
            "attempt": attempt,
            "h": float(h),
            "n_supports": int(n_supports),
            "n_arcs": int(used),
            "supports": [r.anchor.tolist() for r in regions],
        }
        try:
            D = ConvexPolyDomain.from_points(kappa, ring, lam=lam, metadata=meta, h=h)
        except DomainError:
            continue
        if D.perimeter > max_perimeter:
            continue
        if not is_lambda_convex(D, lam):
            continue
        return D
    raise GenerationError(f"no bounded lambda-convex intersection after {max_retries} draws (seed {seed})")
