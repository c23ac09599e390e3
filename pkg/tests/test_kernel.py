from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frozen import ORACLE
from lunekit.kernel import (
    AntipodalError,
    CurvatureMismatch,
    GeometryError,
    ModelPoint,
    TangentVector,
    angle,
    distance,
    exp_map,
    generalized_trig,
    midpoint,
    point_reflection,
    space,
)
from oracles import hyperboloid_to_disk, jacobi_sn_cs, poincare_distance

S1, C1 = math.sinh(1.0), math.cosh(1.0)


def pt(kappa, xy):
    """Point at exponential-chart coordinates xy about the origin."""
    return ModelPoint(kappa, space(kappa).from_chart(np.asarray(xy, float)))


def unit(kappa, base: ModelPoint, theta):
    sp = space(kappa)
    e1, e2 = sp.tangent_basis(base.coords)
    return TangentVector(base, math.cos(theta) * e1 + math.sin(theta) * e2)


# -- examples ------------------------------------------------------------


def test_distance_examples():
    assert distance(ModelPoint.plane(0, 0), ModelPoint.plane(3, 4)) == pytest.approx(5.0, abs=1e-12)
    north = ModelPoint.origin(1.0)
    assert distance(north, ModelPoint(1.0, (1.0, 0.0, 0.0))) == pytest.approx(math.pi / 2, abs=1e-12)
    o = ModelPoint.origin(-1.0)
    p = ModelPoint(-1.0, (S1, 0.0, C1))
    assert distance(o, p) == pytest.approx(1.0, abs=1e-12)


def test_hyperbolic_distance_matches_disk_formula(rng):
    sp = space(-1.0)
    for _ in range(50):
        a, b = sp.from_chart(rng.normal(size=(2, 2)) * 1.5)
        ref = poincare_distance(hyperboloid_to_disk(a), hyperboloid_to_disk(b))
        assert float(sp.dist(a, b)) == pytest.approx(ref, rel=1e-10, abs=1e-12)


def test_exp_map_examples():
    p = exp_map(TangentVector(ModelPoint.plane(0, 0), (1.0, 0.0, 0.0)), 2.0)
    assert np.allclose(p.coords, (2.0, 0.0, 0.0))
    for th in np.linspace(0, 2 * math.pi, 7):
        q = exp_map(unit(1.0, ModelPoint.origin(1.0), th), math.pi / 2)
        assert abs(q.coords[2]) < 1e-12
    h = exp_map(TangentVector(ModelPoint.origin(-1.0), (1.0, 0.0, 0.0)), 1.0)
    assert np.allclose(h.coords, (S1, 0.0, C1), atol=1e-13)
    assert distance(ModelPoint.origin(-1.0), h) == pytest.approx(1.0, abs=1e-12)


def test_exp_map_rejects_bad_input():
    base = ModelPoint.origin(1.0)
    with pytest.raises(GeometryError):
        exp_map(TangentVector(base, (2.0, 0.0, 0.0)), 0.5)
    with pytest.raises(GeometryError):
        exp_map(TangentVector(base, (1.0, 0.0, 0.0)), math.pi)


def test_angle_examples():
    o = ModelPoint.plane(0, 0)
    assert angle(o, ModelPoint.plane(1, 0), ModelPoint.plane(0, 1)) == pytest.approx(math.pi / 2)
    assert angle(o, ModelPoint.plane(1, 0), ModelPoint.plane(2, 0)) == pytest.approx(0.0, abs=1e-12)


def test_equilateral_hyperbolic_angle_law_of_cosines():
    o = ModelPoint.origin(-1.0)
    a = exp_map(unit(-1.0, o, 0.0), 1.0)
    # third vertex: intersection of two circles of radius 1, found along the bisector
    sp = space(-1.0)
    m = sp.midpoint(o.coords, a.coords)
    up = sp.rot90(m, sp.log_dir(m, a.coords))
    h = math.acosh(C1 / math.cosh(0.5))  # right triangle with hypotenuse 1 and leg 1/2
    b = ModelPoint(-1.0, sp.exp(m, up, h))
    assert distance(o, b) == pytest.approx(1.0, abs=1e-12)
    expected = math.acos(C1 * (C1 - 1) / S1**2)
    assert angle(o, a, b) == pytest.approx(expected, abs=1e-12)
    assert expected < math.pi / 3


def test_point_reflection_examples():
    r = point_reflection(ModelPoint.plane(0, 0), ModelPoint.plane(1, 2))
    assert np.allclose(r.coords, (-1, -2, 0))
    for kappa in (-1.0, 0.0, 1.0):
        m = pt(kappa, (0.3, -0.2))
        assert point_reflection(m, m) == m
    o = ModelPoint.origin(-1.0)
    x = ModelPoint(-1.0, (S1, 0.0, C1))
    r = point_reflection(o, x)
    assert np.allclose(r.coords, (-S1, 0.0, C1), atol=1e-13)
    # second route: walk twice the distance from x through m
    sp = space(-1.0)
    via = sp.exp(x.coords, sp.log_dir(x.coords, o.coords), 2 * distance(o, x))
    assert np.allclose(via, r.coords, atol=1e-12)


def test_generalized_trig_examples():
    assert generalized_trig(0.0, 3.0) == (3.0, 1.0)
    sn, cs = generalized_trig(1.0, math.pi / 2)
    assert sn == pytest.approx(1.0) and cs == pytest.approx(0.0, abs=1e-15)
    sn, cs = generalized_trig(-4.0, 1.0)
    assert sn == pytest.approx(math.sinh(2) / 2, rel=1e-14)
    assert cs == pytest.approx(math.cosh(2), rel=1e-14)


def test_generalized_trig_matches_jacobi_ode():
    sn, cs = generalized_trig(-4.0, 1.0)
    assert sn == pytest.approx(ORACLE["jacobi_sn_m4"], rel=1e-10)
    assert cs == pytest.approx(ORACLE["jacobi_cs_m4"], rel=1e-10)
    # regenerate the frozen values
    osn, ocs = jacobi_sn_cs(-4.0, 1.0)
    assert (osn, ocs) == pytest.approx((ORACLE["jacobi_sn_m4"], ORACLE["jacobi_cs_m4"]), rel=1e-12)


def test_tiny_curvature_uses_flat_formulas():
    sn, cs = generalized_trig(1e-14, 2.0)
    assert (sn, cs) == (2.0, 1.0)


def test_model_point_validation():
    with pytest.raises(GeometryError):
        ModelPoint.from_coords(1.0, (1.0, 1.0, 0.0))
    with pytest.raises(GeometryError):
        ModelPoint.from_coords(-1.0, (0.0, 0.0, -1.0))
    p = ModelPoint.from_coords(4.0, (0.0, 0.0, 0.5))
    assert p.kappa == 4.0


def test_mixed_curvature_and_antipodes_rejected():
    with pytest.raises(CurvatureMismatch):
        distance(ModelPoint.origin(1.0), ModelPoint.origin(-1.0))
    with pytest.raises(AntipodalError):
        distance(ModelPoint(1.0, (0, 0, 1.0)), ModelPoint(1.0, (0, 0, -1.0)))
    with pytest.raises(AntipodalError):
        midpoint(ModelPoint(1.0, (1.0, 0, 0)), ModelPoint(1.0, (-1.0, 0, 0)))


# -- properties ----------------------------------------------------------

coord = st.floats(-1.2, 1.2, allow_nan=False)
xy = st.tuples(coord, coord)
kappas = st.sampled_from((-1.0, 0.0, 1.0))


@given(kappas, xy, xy, xy)
def test_triangle_inequality(kappa, a, b, c):
    p, q, r = pt(kappa, a), pt(kappa, b), pt(kappa, c)
    assert distance(p, q) <= distance(p, r) + distance(r, q) + 1e-10


def test_triangle_inequality_bulk(rng):
    for kappa in (-1.0, 0.0, 1.0):
        sp = space(kappa)
        P = sp.from_chart(rng.uniform(-1.3, 1.3, size=(1000, 3, 2)))
        d = lambda i, j: sp.dist(P[:, i], P[:, j])  # noqa: E731
        assert np.all(d(0, 1) <= d(0, 2) + d(2, 1) + 1e-10)


@given(kappas, xy, xy, xy)
def test_reflection_is_isometry(kappa, m, a, b):
    M, A, B = pt(kappa, m), pt(kappa, a), pt(kappa, b)
    ra, rb = point_reflection(M, A), point_reflection(M, B)
    assert distance(ra, rb) == pytest.approx(distance(A, B), abs=1e-10)
    assert distance(M, ra) == pytest.approx(distance(M, A), abs=1e-10)


@given(kappas, xy, st.floats(0, 2 * math.pi), st.floats(0.0, 3.0))
def test_exp_distance_consistency(kappa, base, theta, t):
    if kappa > 0:
        t = min(t, math.pi - 1e-3)
    b = pt(kappa, base)
    q = exp_map(unit(kappa, b, theta), t)
    assert distance(b, q) == pytest.approx(t, abs=1e-10)


@given(kappas, xy, xy)
def test_midpoint_is_equidistant(kappa, a, b):
    A, B = pt(kappa, a), pt(kappa, b)
    m = midpoint(A, B)
    d = distance(A, B)
    assert distance(A, m) == pytest.approx(d / 2, abs=1e-10)
    assert distance(B, m) == pytest.approx(d / 2, abs=1e-10)


@given(st.sampled_from((-1.0, 1.0)), st.sampled_from((0.5, 2.0, 10.0)), xy, xy, st.floats(0, 6.3), st.floats(0, 1.0))
def test_scaling_covariance(kappa, c, a, b, theta, t):
    """kappa -> kappa / c^2 with every length multiplied by c."""
    k2 = kappa / c**2
    A, B = pt(kappa, a), pt(kappa, b)
    A2, B2 = pt(k2, c * np.asarray(a)), pt(k2, c * np.asarray(b))
    assert distance(A2, B2) == pytest.approx(c * distance(A, B), abs=1e-9 * c)
    q = exp_map(unit(kappa, A, theta), t)
    q2 = exp_map(unit(k2, A2, theta), c * t)
    back = space(k2).to_chart(q2.coords)[0]
    ref = space(kappa).to_chart(q.coords)[0]
    assert np.allclose(back, c * ref, atol=1e-9 * c)
