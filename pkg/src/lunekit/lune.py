"""Lambda-convex lunes and the inradius bound rho_lambda(L).

``rho`` evaluates the closed form on each of the five branches (spherical,
Euclidean, and the three hyperbolic regimes); ``build_lune`` constructs the
lune geometrically so the closed form can be checked against
``lune_inradius_numeric``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .curves import (
    ConstantCurvatureArc,
    CurveKind,
    FLambdaRegion,
    _check_lambda,
    _supporting,
    classify,
    f_lambda_perimeter,
)
from .kernel import FLAT_EPS, GeometryError, ModelPoint, Space, space

BRANCH_BAND = 1e-9


class LuneDomainError(GeometryError):
    """Boundary length outside the interval I_lambda."""


class Branch(str, Enum):
    SPHERE = "eq2"
    EUCLID = "eq3"
    CIRCLE_HYP = "eq4"
    HOROCYCLE = "eq5"
    HYPERCYCLE = "eq7"


def branch(kappa: float, lam: float) -> Branch:
    lam = _check_lambda(lam)
    if abs(kappa) < FLAT_EPS:
        return Branch.EUCLID
    if kappa > 0:
        return Branch.SPHERE
    k = math.sqrt(-kappa)
    if abs(lam - k) < BRANCH_BAND:
        return Branch.HOROCYCLE
    return Branch.CIRCLE_HYP if lam > k else Branch.HYPERCYCLE


@dataclass(frozen=True)
class RhoDomain:
    kappa: float
    lam: float
    upper: float

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.upper)

    def contains(self, L: float, *, interior: bool = False, rtol: float = 1e-12) -> bool:
        slack = rtol * max(1.0, self.upper if self.bounded else L)
        if interior:
            return 0.0 < L < self.upper
        return -slack <= L <= self.upper + slack

    def describe(self) -> str:
        hi = f"{self.upper:.12g}" if self.bounded else "+inf)"
        return f"I_lambda = [0, {hi}]" if self.bounded else f"I_lambda = [0, {hi}"


def rho_domain(kappa: float, lam: float) -> RhoDomain:
    lam = _check_lambda(lam)
    if branch(kappa, lam) in (Branch.HOROCYCLE, Branch.HYPERCYCLE):
        return RhoDomain(kappa, lam, math.inf)
    return RhoDomain(kappa, lam, f_lambda_perimeter(kappa, lam))


def _check_length(kappa: float, lam: float, L: float, interior: bool = False) -> RhoDomain:
    dom = rho_domain(kappa, lam)
    L = float(L)
    if not math.isfinite(L) or not dom.contains(L, interior=interior):
        where = "interior of " if interior else ""
        raise LuneDomainError(f"L = {L} is outside the {where}{dom.describe()}")
    return dom


def rho(kappa: float, lam: float, L: float) -> float:
    """Inradius of the lambda-convex lune with boundary length L."""
    lam = _check_lambda(lam)
    dom = _check_length(kappa, lam, L)
    L = min(max(float(L), 0.0), dom.upper)
    b = branch(kappa, lam)
    if b is Branch.EUCLID:
        return 2.0 * math.sin(L * lam / 8.0) ** 2 / lam
    k = math.sqrt(abs(kappa))
    if b is Branch.HOROCYCLE:
        return math.log1p((L * k / 4.0) ** 2) / (2.0 * k)
    a = k / lam
    if b is Branch.SPHERE:
        theta = L * math.sqrt(lam * lam + k * k) / 4.0
        one_minus_cos = 2.0 * math.sin(0.5 * theta) ** 2
        # arctan(a) - arctan(a cos) folded into one arctan
        return math.atan(a * one_minus_cos / (1.0 + a * a * math.cos(theta))) / k
    if b is Branch.CIRCLE_HYP:
        theta = L * math.sqrt(lam * lam - k * k) / 4.0
        one_minus_cos = 2.0 * math.sin(0.5 * theta) ** 2
        denom = (lam * lam - k * k) / (lam * lam) + a * a * one_minus_cos
        return math.atanh(a * one_minus_cos / denom) / k
    # hypercycle branch; a = lam / k here
    a = lam / k
    theta = L * math.sqrt(k * k - lam * lam) / 4.0
    cosh_minus_one = 2.0 * math.sinh(0.5 * theta) ** 2
    denom = cosh_minus_one + (k * k - lam * lam) / (k * k)
    return math.atanh(a * cosh_minus_one / denom) / k


def rho_eq7_printed(kappa: float, lam: float, L: float) -> float:
    """The hypercycle-regime expression in its originally printed form.

    Kept only so reports can show how far it sits from the geometric
    construction; :func:`rho` does not use it.
    """
    k = math.sqrt(-kappa)
    c = math.cosh(L * math.sqrt(k * k - lam * lam) / 4.0)
    num = (k + lam) * (c * c - lam * lam / (k * k))
    den = (k - lam) * (c + 1.0) ** 2
    return math.log(num / den) / (2.0 * k)


def rho_derivative(kappa: float, lam: float, L: float) -> float:
    """Analytic d rho / dL on the interior of I_lambda."""
    lam = _check_lambda(lam)
    _check_length(kappa, lam, L, interior=True)
    b = branch(kappa, lam)
    if b is Branch.EUCLID:
        return 0.25 * math.sin(L * lam / 4.0)
    k = math.sqrt(abs(kappa))
    if b is Branch.HOROCYCLE:
        return (L * k / 16.0) / (1.0 + (L * k / 4.0) ** 2)
    if b is Branch.SPHERE:
        a = k / lam
        w = math.sqrt(lam * lam + k * k)
        th = L * w / 4.0
        return a * math.sin(th) * (w / 4.0) / (1.0 + (a * math.cos(th)) ** 2) / k
    if b is Branch.CIRCLE_HYP:
        a = k / lam
        w = math.sqrt(lam * lam - k * k)
        th = L * w / 4.0
        return a * math.sin(th) * (w / 4.0) / (1.0 - (a * math.cos(th)) ** 2) / k
    a = lam / k
    w = math.sqrt(k * k - lam * lam)
    th = L * w / 4.0
    c = math.cosh(th)
    return a * math.sinh(th) * (w / 4.0) / (c * c - a * a) / k


# ---------------------------------------------------------------------------
# Geometric construction


@dataclass(frozen=True, eq=False)
class Lune:
    kappa: float
    lam: float
    L: float
    center: np.ndarray
    axis: np.ndarray
    arcs: tuple[ConstantCurvatureArc, ConstantCurvatureArc]
    corners: tuple[np.ndarray, np.ndarray]
    regions: tuple[FLambdaRegion, FLambdaRegion]
    arc_midpoint: np.ndarray

    @property
    def space(self) -> Space:
        return space(self.kappa)

    @property
    def kind(self) -> CurveKind:
        return classify(self.kappa, self.lam)

    def center_point(self) -> ModelPoint:
        return ModelPoint(self.kappa, self.center)

    def boundary_points(self, h: float) -> np.ndarray:
        """Counterclockwise ring starting at the first corner, spacing <= h.

        Each arc gets an even number of segments so the arc midpoints are
        vertices; the second arc is the exact point reflection of the first.
        """
        sp = self.space
        first = self.arcs[0].sample(h, even=True)
        second = sp.reflect(self.center, first)
        return np.vstack([first[:-1], second[:-1]])

    def corner_turn(self) -> float:
        """Exterior angle at each corner."""
        sp = self.space
        p = self.corners[0]
        _, t_depart, _ = self.arcs[0].frame(self.arcs[0].s_min)
        _, t_arrive, _ = self.arcs[1].frame(self.arcs[1].s_max)
        return float(sp.signed_angle(p, t_arrive, t_depart))

    def area(self) -> float:
        sp = self.space
        if sp.flat:
            r = 1.0 / self.lam
            phi = self.L * self.lam / 2.0
            return r * r * (phi - math.sin(phi))
        return (2.0 * math.pi - self.lam * self.L - 2.0 * self.corner_turn()) / self.kappa

    def circumradius(self) -> float:
        return float(self.space.dist(self.center, self.corners[0]))

    def transformed(self, iso) -> "Lune":
        return Lune(
            self.kappa,
            self.lam,
            self.L,
            iso(self.center),
            iso.vector(self.axis),
            tuple(a.transformed(iso) for a in self.arcs),
            tuple(iso(c) for c in self.corners),
            tuple(r.transformed(iso) for r in self.regions),
            iso(self.arc_midpoint),
        )


def build_lune(kappa: float, lam: float, L: float) -> Lune:
    """Construct the lune of boundary length L, centred at the origin.

    The first arc is laid out symmetrically about its midpoint; the second is
    its point reflection in the midpoint of the corner chord, so both arcs
    have length L/2 by construction.  The result is moved so that the centre
    is the origin, the corners lie on the first axis and the first arc passes
    below the centre.
    """
    lam = _check_lambda(lam)
    dom = _check_length(kappa, lam, L)
    L = float(L)
    if not 0.0 < L < dom.upper or (dom.bounded and L >= dom.upper * (1 - 1e-14)):
        raise LuneDomainError(f"lune needs L in the interior of {dom.describe()}, got {L}")
    sp = space(kappa)
    o = sp.origin()
    e1 = np.array([1.0, 0.0, 0.0])
    arc = ConstantCurvatureArc(kappa, lam, o, e1, -L / 4.0, L / 4.0)
    p, q = arc.points(-L / 4.0), arc.points(L / 4.0)
    m = sp.midpoint(p, q)
    axis = sp.log_dir(m, o)
    # normalise: centre -> origin, axis -> -e2
    iso = sp.isometry(m, sp.rot90(m, axis), o, e1)
    arc1 = arc.transformed(iso)
    m0 = iso(m)
    arc2 = ConstantCurvatureArc(
        kappa,
        lam,
        sp.reflect(m0, arc1.anchor),
        sp.reflect_vector(m0, arc1.tangent),
        -L / 4.0,
        L / 4.0,
    )
    region1 = _supporting(sp, arc1.anchor, sp.rot90(arc1.anchor, arc1.tangent), lam)
    region2 = region1.reflected(m0)
    p0, q0 = arc1.points(-L / 4.0), arc1.points(L / 4.0)
    return Lune(
        kappa,
        lam,
        L,
        m0,
        iso.vector(axis),
        (arc1, arc2),
        (p0, q0),
        (region1, region2),
        arc1.anchor,
    )


def lune_inradius_numeric(lune: Lune, tol: float = 1e-12) -> float:
    """Distance from the lune centre to the arc midpoint, by construction."""
    del tol  # exact up to rounding; kept for interface symmetry with the solvers
    return float(lune.space.dist(lune.center, lune.arc_midpoint))


def lune_length_for_area(kappa: float, lam: float, area: float, *, tol: float = 1e-12) -> float | None:
    """Boundary length of the lune with the given area (None if unreachable)."""
    dom = rho_domain(kappa, lam)
    lo = 0.0
    if dom.bounded:
        hi = dom.upper * (1 - 1e-12)
        if area >= build_lune(kappa, lam, hi).area():
            return None
    else:
        hi = 1.0
        while build_lune(kappa, lam, hi).area() < area:
            hi *= 2.0
            if hi > 1e6:
                return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if build_lune(kappa, lam, mid).area() < area:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Phase transitions between branches


@dataclass(frozen=True)
class PhaseTransitionRow:
    """Branch gaps at one eps; flat gaps are None when L lies outside I_lambda."""

    eps: float
    gap_from_above: float
    gap_from_below: float
    gap_flat_from_sphere: float | None
    gap_flat_from_hyperbolic: float | None

    def gaps(self) -> dict:
        return {name: getattr(self, name) for name in GAP_NAMES}

    def max_gap(self) -> float:
        return max(v for v in self.gaps().values() if v is not None)


GAP_NAMES = ("gap_from_above", "gap_from_below", "gap_flat_from_sphere", "gap_flat_from_hyperbolic")


@dataclass(frozen=True)
class PhaseTransitionReport:
    """Gap table plus two verdicts.

    ``continuous``: every gap shrinks monotonically and at least linearly in
    eps (the limits exist).  ``final_below``: the gaps at the smallest eps
    are under ``threshold``.  The hyperbolic gaps are first order in eps, so
    the threshold is met only once eps is small relative to the slope
    recorded in ``rates``.
    """

    k: float
    L: float
    rows: tuple[PhaseTransitionRow, ...]
    continuous: bool
    final_below: bool
    threshold: float
    rates: dict
    offending: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.continuous

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "L": self.L,
            "threshold": self.threshold,
            "continuous": self.continuous,
            "final_below_threshold": self.final_below,
            "rates": self.rates,
            "offending": list(self.offending),
            "rows": [dict(eps=r.eps, **r.gaps()) for r in self.rows],
        }


def phase_transition_check(k: float, L: float, eps_sequence, *, threshold: float = 1e-6) -> PhaseTransitionReport:
    """Gaps between neighbouring branches as the parameters approach a switch.

    Hyperbolic gaps compare lam = k(1 +- eps) against the horocycle branch at
    kappa = -k^2; the flat limits use lam = k and kappa = +-(eps k)^2 and are
    skipped when L is beyond the flat I_lambda.
    """
    if not (k > 0 and L > 0):
        raise GeometryError("phase transition check needs k > 0 and L > 0")
    eps_sequence = sorted((float(e) for e in eps_sequence), reverse=True)
    if any(not 0.0 < e < 0.5 for e in eps_sequence):
        raise GeometryError("eps values must lie in (0, 1/2)")
    base = rho(-k * k, k, L)
    flat_ok = L < rho_domain(0.0, k).upper
    flat = rho(0.0, k, L) if flat_ok else None
    rows = []
    for eps in eps_sequence:
        small = (eps * k) ** 2
        fs = fh = None
        if flat_ok and rho_domain(small, k).contains(L) and rho_domain(-small, k).contains(L):
            fs = abs(rho(small, k, L) - flat)
            fh = abs(rho(-small, k, L) - flat)
        rows.append(
            PhaseTransitionRow(
                eps,
                abs(rho(-k * k, k * (1 + eps), L) - base),
                abs(rho(-k * k, k * (1 - eps), L) - base),
                fs,
                fh,
            )
        )
    continuous = True
    offending = []
    rates = {}
    for name in GAP_NAMES:
        pairs = [(r.eps, getattr(r, name)) for r in rows if getattr(r, name) is not None]
        if not pairs:
            continue
        rates[name] = pairs[-1][1] / pairs[-1][0]
        ok = True
        for (e0, g0), (e1, g1) in zip(pairs, pairs[1:]):
            # non-increasing, and no slower than linear (with a little slack)
            ok &= g1 <= g0 + 1e-14 and g1 <= 1.1 * g0 * (e1 / e0) + 1e-14
        if not ok:
            continuous = False
        if pairs[-1][1] >= threshold:
            offending.append(name)
        if not ok and name not in offending:
            offending.append(name)
    final = not any(getattr(rows[-1], n) is not None and getattr(rows[-1], n) >= threshold for n in GAP_NAMES) if rows else True
    return PhaseTransitionReport(float(k), float(L), tuple(rows), bool(continuous), bool(final), threshold, rates, tuple(offending))
