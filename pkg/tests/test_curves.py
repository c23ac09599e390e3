from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frozen import ORACLE
from lunekit import curves
from lunekit.curves import (
    ConstantCurvatureArc,
    Containment,
    CurveKind,
    arc_point,
    classify,
    f_lambda_perimeter,
    f_lambda_radius,
    f_lambda_supporting_at,
    region_contains,
    swerve,
    turning_angles,
)
from lunekit.kernel import GeometryError, ModelPoint, TangentVector, space
from oracles import central_chart_area, central_chart_point, circle_perimeter, circle_radius_for_curvature


def as_points(kappa, arr):
    return [ModelPoint(kappa, p) for p in arr]


# -- classification and the radius dictionary ----------------------------


def test_classify_examples():
    assert classify(0.0, 1.0) is CurveKind.CIRCLE
    assert classify(-1.0, 1.0) is CurveKind.HOROCYCLE
    assert classify(-1.0, 0.5) is CurveKind.HYPERCYCLE
    assert classify(-1.0, 2.0) is CurveKind.CIRCLE
    assert classify(1.0, 0.01) is CurveKind.CIRCLE


def test_classify_rejects_nonpositive_lambda():
    for lam in (0.0, -1.0, math.nan):
        with pytest.raises(GeometryError):
            classify(0.0, lam)


def test_f_lambda_radius_examples():
    assert f_lambda_radius(0.0, 2.0) == 0.5
    assert f_lambda_radius(1.0, 1.0) == pytest.approx(math.pi / 4, abs=1e-15)
    assert f_lambda_radius(-1.0, 1.0) == math.inf
    assert f_lambda_radius(-1.0, 0.5) == math.inf


def test_f_lambda_radius_against_quadrature_oracle():
    assert f_lambda_radius(1.0, 1.0) == pytest.approx(ORACLE["sphere_radius_lam1"], abs=1e-9)
    assert circle_radius_for_curvature(1.0, 1.0) == pytest.approx(ORACLE["sphere_radius_lam1"], abs=1e-12)


def test_f_lambda_perimeter_examples():
    assert f_lambda_perimeter(0.0, 1.0) == pytest.approx(2 * math.pi)
    assert f_lambda_perimeter(1.0, 1.0) == pytest.approx(2 * math.pi / math.sqrt(2))
    assert f_lambda_perimeter(-1.0, 2.0) == pytest.approx(2 * math.pi / math.sqrt(3))
    assert f_lambda_perimeter(-1.0, 1.0) == math.inf
    assert f_lambda_perimeter(1.0, 1.0) == pytest.approx(ORACLE["sphere_perimeter_lam1"], abs=1e-9)
    assert f_lambda_perimeter(-1.0, 2.0) == pytest.approx(ORACLE["hyperbolic_perimeter_lam2"], abs=1e-9)
    r = f_lambda_radius(-1.0, 2.0)
    assert circle_perimeter(-1.0, r) == pytest.approx(2 * math.pi / math.sqrt(3), rel=1e-12)


# -- supporting regions and containment ------------------------------------


def test_supporting_region_flat_is_unit_disk():
    s = ModelPoint.plane(0, 0)
    F = f_lambda_supporting_at(s, TangentVector(s, (0.0, 1.0, 0.0)), 1.0)
    assert F.kind is CurveKind.CIRCLE
    assert np.allclose(F.center, (0, 1, 0)) and F.radius == pytest.approx(1.0)


def test_supporting_region_sphere():
    s = ModelPoint(1.0, (1.0, 0.0, 0.0))
    F = f_lambda_supporting_at(s, TangentVector(s, (0.0, 0.0, 1.0)), 1.0)
    assert F.radius == pytest.approx(math.pi / 4)
    assert np.allclose(F.center, (math.cos(math.pi / 4), 0.0, math.sin(math.pi / 4)))


def test_supporting_horocycle_swerve_per_length():
    s = ModelPoint.origin(-1.0)
    F = f_lambda_supporting_at(s, TangentVector(s, (0.3, 0.8, 0.0)).normalized(), 1.0)
    assert F.kind is CurveKind.HOROCYCLE
    assert region_contains(F, s) is Containment.BOUNDARY
    arc = F.boundary(-1.5, 1.5)
    pts = arc.sample(1e-3)
    assert swerve(as_points(-1.0, pts), endpoints="half") / arc.length == pytest.approx(1.0, abs=1e-6)


def test_region_contains_examples():
    o = ModelPoint.plane(0, 0)
    # the unit disk about the origin, supported at (0, -1)
    s = ModelPoint.plane(0, -1)
    F = f_lambda_supporting_at(s, TangentVector(s, (0, 1, 0)), 1.0)
    assert region_contains(F, o) is Containment.INSIDE
    assert region_contains(F, ModelPoint.plane(1, 0), tol=1e-9) is Containment.BOUNDARY
    assert region_contains(F, ModelPoint.plane(1.1, 0)) is Containment.OUTSIDE


def test_horocycle_outside_after_outward_step():
    sp = space(-1.0)
    s = ModelPoint.origin(-1.0)
    inward = np.array([0.0, 1.0, 0.0])
    F = f_lambda_supporting_at(s, TangentVector(s, inward), 1.0)
    out = ModelPoint(-1.0, sp.exp(s.coords, -inward, 1.0))
    assert region_contains(F, out) is Containment.OUTSIDE
    assert float(F.signed_distance(out.coords)) == pytest.approx(1.0, abs=1e-12)
    # second route: nearest point on a densely sampled stretch of the horocycle
    bd = F.boundary(-6.0, 6.0).sample(1e-3)
    assert float(sp.dist(out.coords, bd).min()) == pytest.approx(1.0, abs=1e-6)


# -- arcs ------------------------------------------------------------------


def test_arc_point_examples():
    arc = ConstantCurvatureArc(0.0, 1.0, (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), 0.0, math.pi)
    assert np.allclose(arc_point(arc, math.pi / 2).coords, (0.0, 1.0, 0.0), atol=1e-15)
    assert np.allclose(arc_point(arc, 0.0).coords, arc.anchor)
    with pytest.raises(GeometryError):
        arc_point(arc, 4.0)


def test_hypercycle_fermi_coordinates():
    """Axis distance 1: lam = tanh 1; s = 2 sits over axis parameter 2 / cosh 1."""
    c1, s1 = math.cosh(1.0), math.sinh(1.0)
    o = ModelPoint.origin(-1.0)
    F = f_lambda_supporting_at(o, TangentVector(o, (0.0, 1.0, 0.0)), math.tanh(1.0))
    assert F.kind is CurveKind.HYPERCYCLE
    arc = F.boundary(0.0, 2.0)
    p = arc_point(arc, 2.0).coords
    # axis through a0 = (0, sinh 1, cosh 1) with direction e1, unit normal n_ax
    a0 = np.array([0.0, s1, c1])
    e1 = np.array([1.0, 0.0, 0.0])
    n_ax = np.array([0.0, c1, s1])
    u = 2.0 / c1
    expected = c1 * (math.cosh(u) * a0 + math.sinh(u) * e1) - s1 * n_ax
    if np.dot(p - expected, p - expected) > 1e-20:  # the arc may run toward -e1
        expected = c1 * (math.cosh(u) * a0 - math.sinh(u) * e1) - s1 * n_ax
    assert np.allclose(p, expected, atol=1e-12)
    sp = space(-1.0)
    assert float(np.arcsinh(abs(sp.inner(p, n_ax)))) == pytest.approx(1.0, abs=1e-12)


def test_swerve_examples():
    sq = [ModelPoint.plane(x, y) for x, y in [(0, 0), (1, 0), (1, 1), (0, 1)]]
    assert swerve(sq, closed=True) == pytest.approx(2 * math.pi)
    assert swerve(sq, side="right", closed=True) == pytest.approx(-2 * math.pi)
    for n in (3, 7, 40):
        th = np.linspace(0, 2 * math.pi, n, endpoint=False)
        poly = [ModelPoint.plane(math.cos(t), math.sin(t)) for t in th]
        assert swerve(poly, closed=True) == pytest.approx(2 * math.pi)
    th = np.linspace(0.0, 2.0, 1000)
    arc = [ModelPoint.plane(math.cos(t), math.sin(t)) for t in th]
    # excluding the end turns drops one step of turning out of 999
    assert swerve(arc) == pytest.approx(2.0 * 998 / 999, abs=1e-12)
    assert swerve(arc, endpoints="half") == pytest.approx(2.0, abs=1e-10)


def test_swerve_rejects_degenerate_input():
    with pytest.raises(GeometryError):
        swerve([ModelPoint.plane(0, 0), ModelPoint.plane(1, 0)])
    with pytest.raises(GeometryError):
        swerve([ModelPoint.plane(0, 0), ModelPoint.plane(0, 0), ModelPoint.plane(1, 0)])
    with pytest.raises(TypeError):
        swerve(np.zeros((4, 3)))


GRID = [(k, l) for k in (-1.0, 0.0, 1.0) for l in (0.25, 1.0, 2.0)]


@pytest.mark.parametrize("kappa,lam", GRID)
def test_boundary_swerve_per_length(kappa, lam):
    h = 1e-3
    o = ModelPoint.origin(kappa)
    F = f_lambda_supporting_at(o, TangentVector(o, (0.0, 1.0, 0.0)), lam)
    length = min(2.0, 0.9 * f_lambda_perimeter(kappa, lam))
    pts = F.boundary(0.0, length).sample(h)
    turns = turning_angles(space(kappa), pts, closed=False)
    s = length * (len(pts) - 2) / (len(pts) - 1)
    assert abs(turns.sum() / s - lam) < 10 * h


# -- properties --------------------------------------------------------------


@given(st.floats(-4, 4), st.floats(1e-3, 5))
def test_classify_total_and_consistent(kappa, lam):
    kind = classify(kappa, lam)
    o = ModelPoint.origin(kappa)
    F = f_lambda_supporting_at(o, TangentVector(o, (1.0, 0.0, 0.0)), lam)
    assert F.kind is kind
    assert F.compact == (kind is CurveKind.CIRCLE)


@given(
    st.sampled_from([(-1.0, 0.5), (-1.0, 1.0), (-1.0, 2.0), (0.0, 1.0), (1.0, 1.0)]),
    st.floats(-2.0, 2.0),
    st.floats(-2.0, 2.0),
    st.floats(0.05, 0.95),
)
def test_f_lambda_regions_are_convex(cell, s1, s2, frac):
    kappa, lam = cell
    o = ModelPoint.origin(kappa)
    F = f_lambda_supporting_at(o, TangentVector(o, (0.0, 1.0, 0.0)), lam)
    per = f_lambda_perimeter(kappa, lam)
    if math.isfinite(per):
        s1, s2 = s1 * per / 4.5, s2 * per / 4.5
    if abs(s1 - s2) < 1e-6:
        return
    arc = F.boundary(-3.0, 3.0)
    a, b = arc.points(s1), arc.points(s2)
    sp = space(kappa)
    x = sp.exp(a, sp.log_dir(a, b), frac * float(sp.dist(a, b)))
    assert region_contains(F, ModelPoint(kappa, x), tol=1e-9) is not Containment.OUTSIDE


@given(
    st.sampled_from((-1.0, 0.0, 1.0)),
    st.lists(st.tuples(st.floats(-0.8, 0.8), st.floats(-0.8, 0.8)), min_size=5, max_size=25),
)
def test_gauss_bonnet_on_random_convex_polygons(kappa, raw):
    """Closed swerve plus kappa * area equals 2 pi; area by an independent chart integral."""
    from scipy.spatial import ConvexHull, QhullError

    pts = np.array(raw)
    if kappa < 0:
        pts *= 0.85  # keep the central chart inside the unit (Klein) disk
    try:
        hull = ConvexHull(pts)
    except (QhullError, ValueError):
        return
    poly = pts[hull.vertices]  # counterclockwise in the chart
    if hull.volume < 1e-3 or np.min(np.linalg.norm(poly - np.roll(poly, 1, axis=0), axis=1)) < 1e-3:
        return
    emb = np.array([central_chart_point(kappa, p) for p in poly])
    total = swerve(as_points(kappa, emb), closed=True)
    area = central_chart_area(kappa, poly)
    assert total + kappa * area == pytest.approx(2 * math.pi, abs=1e-9)


def test_module_exports_constant_band():
    assert curves.HOROCYCLE_BAND == 1e-9
    assert classify(-1.0, 1.0 + 5e-10) is CurveKind.HOROCYCLE
