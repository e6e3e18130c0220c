import cmath
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypflow.geometry import (
    ORIGIN,
    BoundaryPoint,
    Geodesic,
    GeometryError,
    HyperbolicPoint,
    Isometry,
    apply_boundary,
    apply_isometry,
    axis_nearest_origin,
    busemann,
    busemann_translates,
    classify_and_fixed_points,
    flow_toward,
    foot_on_geodesic,
    hyperbolic_distance,
    point_to_geodesic_distance,
    visual_density_ratio,
)

TWO_PI = 2 * math.pi


def rnd_isometry(rng):
    while True:
        a, b, c = rng.uniform(-2, 2, 3)
        if abs(a) > 0.1:
            return Isometry.from_matrix(a, b, c, (1 + b * c) / a)


points = st.tuples(
    st.floats(-0.75, 0.75), st.floats(-0.6, 0.6)
).map(lambda t: HyperbolicPoint(t[0] * 0.9, t[1] * 0.9))
angles = st.floats(0, TWO_PI - 1e-9).map(BoundaryPoint.from_angle)


def test_identity_fixes_points():
    x = HyperbolicPoint(0.3, 0.1)
    assert apply_isometry(Isometry.identity(), x) == x


def test_diagonal_matrix_translates_ln4():
    g = Isometry.from_matrix(2, 0, 0, 0.5)
    y = apply_isometry(g, ORIGIN)
    assert abs(hyperbolic_distance(ORIGIN, y) - math.log(4)) < 1e-12


def test_composition_matches_sequential_application(rng):
    for _ in range(100):
        g, h = rnd_isometry(rng), rnd_isometry(rng)
        x = HyperbolicPoint(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6))
        lhs = apply_isometry(g @ h, x)
        rhs = apply_isometry(g, apply_isometry(h, x))
        assert abs(lhs.z - rhs.z) < 1e-12


def test_point_outside_disk_rejected():
    with pytest.raises(GeometryError):
        HyperbolicPoint(1.0, 0.3)


def test_boundary_identity_and_fixed_angle():
    xi = BoundaryPoint.from_angle(1.1)
    assert apply_boundary(Isometry.identity(), xi).theta == pytest.approx(1.1)
    g = Isometry.from_matrix(2, 0, 0, 0.5)
    att = classify_and_fixed_points(g).fixed[0]
    assert apply_boundary(g, att).theta == pytest.approx(att.theta, abs=1e-12)


def test_boundary_action_is_radial_limit(rng):
    for _ in range(50):
        g = rnd_isometry(rng)
        th = rng.uniform(0, TWO_PI)
        deep = HyperbolicPoint.from_complex((1 - 1e-6) * cmath.exp(1j * th))
        lim = apply_isometry(g, deep)
        bnd = apply_boundary(g, BoundaryPoint.from_angle(th))
        assert abs(cmath.phase(lim.z / bnd.z)) < 1e-4


def test_distance_basics():
    assert hyperbolic_distance(ORIGIN, ORIGIN) == 0.0
    assert hyperbolic_distance(ORIGIN, HyperbolicPoint(0.5, 0)) == pytest.approx(math.log(3))


@settings(max_examples=200, deadline=None)
@given(points, points, points)
def test_triangle_inequality(x, y, z):
    assert hyperbolic_distance(x, z) <= (
        hyperbolic_distance(x, y) + hyperbolic_distance(y, z) + 1e-12
    )


def test_busemann_zero_and_radial():
    xi = BoundaryPoint.from_angle(0.0)
    x = HyperbolicPoint(0.2, -0.3)
    assert busemann(xi, x, x) == 0.0
    # radial case reduces to the distance
    assert busemann(xi, ORIGIN, HyperbolicPoint(0.5, 0)) == pytest.approx(math.log(3))


@settings(max_examples=200, deadline=None)
@given(angles, points, points, st.floats(-2, 2))
def test_busemann_along_flow(xi, x, _y, t):
    assert busemann(xi, x, flow_toward(x, xi, t)) == pytest.approx(t, abs=1e-11)


@settings(max_examples=300, deadline=None)
@given(angles, points, points, points)
def test_busemann_cocycle_and_distance_bound(xi, x, y, z):
    lhs = busemann(xi, x, z)
    rhs = busemann(xi, x, y) + busemann(xi, y, z)
    assert lhs == pytest.approx(rhs, abs=1e-9)
    assert abs(busemann(xi, x, y)) <= hyperbolic_distance(x, y) + 1e-9


def test_busemann_equivariance(rng):
    for _ in range(200):
        g = rnd_isometry(rng)
        xi = BoundaryPoint.from_angle(rng.uniform(0, TWO_PI))
        x = HyperbolicPoint(rng.uniform(-0.7, 0.7), rng.uniform(-0.55, 0.55))
        y = HyperbolicPoint(rng.uniform(-0.7, 0.7), rng.uniform(-0.55, 0.55))
        moved = busemann(apply_boundary(g, xi), apply_isometry(g, x), apply_isometry(g, y))
        assert moved == pytest.approx(busemann(xi, x, y), abs=1e-9)


def test_busemann_translates_matches_direct(rng):
    for _ in range(50):
        g, h = rnd_isometry(rng), rnd_isometry(rng)
        xi = BoundaryPoint.from_angle(rng.uniform(0, TWO_PI))
        direct = busemann(xi, apply_isometry(g, ORIGIN), apply_isometry(h, ORIGIN))
        assert busemann_translates(xi, g, h) == pytest.approx(direct, abs=1e-10)


def test_visual_density_identity_and_center_rotation():
    xi = BoundaryPoint.from_angle(0.8)
    x = HyperbolicPoint(0.1, 0.4)
    assert visual_density_ratio(x, x, xi) == 1.0
    # rotations about the center preserve the centered visual measure
    rot = Isometry.from_matrix(math.cos(0.4), math.sin(0.4), -math.sin(0.4), math.cos(0.4))
    assert abs(apply_isometry(rot, ORIGIN).z) < 1e-15
    assert visual_density_ratio(apply_isometry(rot, ORIGIN), ORIGIN, xi) == pytest.approx(1.0)


def test_visual_density_along_ray():
    xi = BoundaryPoint.from_angle(2.4)
    for t in (0.3, 1.1, 2.2):
        y = flow_toward(ORIGIN, xi, t)
        assert visual_density_ratio(ORIGIN, y, xi) == pytest.approx(math.exp(-t), rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(angles, points, points, points)
def test_visual_density_multiplicative(xi, x, y, z):
    lhs = visual_density_ratio(x, z, xi)
    rhs = visual_density_ratio(x, y, xi) * visual_density_ratio(y, z, xi)
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_flow_group_law_and_unit_speed():
    xi = BoundaryPoint.from_angle(1.3)
    x = HyperbolicPoint(0.2, -0.4)
    assert flow_toward(x, xi, 0.0) == x
    a = flow_toward(flow_toward(x, xi, 0.8), xi, -1.9)
    b = flow_toward(x, xi, -1.1)
    assert abs(a.z - b.z) < 1e-10
    assert hyperbolic_distance(x, flow_toward(x, xi, 2.5)) == pytest.approx(2.5, abs=1e-10)


def test_classification():
    assert classify_and_fixed_points(Isometry.identity()).kind == "identity"
    g = Isometry.from_matrix(2, 0, 0, 0.5)
    cls = classify_and_fixed_points(g)
    assert cls.kind == "hyperbolic"
    assert cls.translation_length == pytest.approx(math.log(4))
    rot = Isometry.from_matrix(math.cos(0.3), math.sin(0.3), -math.sin(0.3), math.cos(0.3))
    assert classify_and_fixed_points(rot).kind == "elliptic"
    par = Isometry.from_matrix(1, 1, 0, 1)
    assert classify_and_fixed_points(par).kind == "parabolic"


def test_hyperbolic_iterates_converge_to_attractor(rng):
    for _ in range(30):
        g = rnd_isometry(rng)
        cls = classify_and_fixed_points(g)
        if cls.kind != "hyperbolic":
            continue
        th = BoundaryPoint.from_angle(rng.uniform(0, TWO_PI))
        for _ in range(80):
            th = apply_boundary(g, th)
        gap = abs(th.theta - cls.fixed[0].theta) % TWO_PI
        assert min(gap, TWO_PI - gap) < 1e-6


def test_boundary_preserves_cyclic_order(rng):
    def order(a, b, c):
        return ((b - a) % TWO_PI) < ((c - a) % TWO_PI)

    for _ in range(100):
        g = rnd_isometry(rng)
        t1, t2, t3 = rng.uniform(0, TWO_PI, 3)
        f1, f2, f3 = (apply_boundary(g, BoundaryPoint.from_angle(t)).theta for t in (t1, t2, t3))
        assert order(t1, t2, t3) == order(f1, f2, f3)


def test_geodesic_projection(rng):
    geo = Geodesic(BoundaryPoint.from_angle(0.0), BoundaryPoint.from_angle(math.pi))
    pt = HyperbolicPoint(0.0, 0.3)
    assert point_to_geodesic_distance(pt, geo) == pytest.approx(2 * math.atanh(0.3), abs=1e-10)
    assert abs(foot_on_geodesic(pt, geo).z) < 1e-9
    for _ in range(50):
        t1, t2 = rng.uniform(0, TWO_PI, 2)
        gap = abs(t1 - t2) % TWO_PI
        if min(gap, TWO_PI - gap) < 0.2:
            continue
        geo = Geodesic(BoundaryPoint.from_angle(t1), BoundaryPoint.from_angle(t2))
        x = HyperbolicPoint(rng.uniform(-0.8, 0.8), rng.uniform(-0.5, 0.5))
        ft = foot_on_geodesic(x, geo)
        assert point_to_geodesic_distance(ft, geo) < 1e-9
        assert hyperbolic_distance(x, ft) == pytest.approx(
            point_to_geodesic_distance(x, geo), abs=1e-9
        )


def test_axis_nearest_origin():
    g = Isometry.from_matrix(2, 0, 0, 0.5)
    assert abs(axis_nearest_origin(g).z) < 1e-9
