import math

import pytest

from hypflow.circle_action import CirclePoint
from hypflow.geometry import (
    BoundaryPoint,
    HyperbolicPoint,
    apply_isometry,
    classify_and_fixed_points,
    flow_toward,
    TWO_PI,
)
from hypflow.measure import (
    ChartAtlas,
    ChartDomainError,
    FiberMetric,
    MeasureDomainError,
    PullbackMeasure,
    pushforward_mass,
)
from hypflow.surface_group import Word

LETTERS = (1, 2, 3, 4, -1, -2, -3, -4)


def rnd_word(rng, n):
    return Word.from_letters(int(rng.choice(LETTERS)) for _ in range(n))


def test_nu_interval_basics(bundle, bundle2):
    m1, m2 = bundle.measure, bundle2.measure
    a, b = CirclePoint.of(0.2, 1), CirclePoint.of(0.7, 1)
    assert m1.nu_interval(a, a) == 0.0
    assert m1.nu_interval(a, b) == pytest.approx(0.5)
    assert m1.total_mass == 1.0 and m2.total_mass == 2.0
    # one full base period on the double cover carries unit mass
    assert m2.nu_interval(CirclePoint.of(0.3, 2), CirclePoint.of(1.3, 2)) == pytest.approx(1.0)
    with pytest.raises(MeasureDomainError):
        m2.nu_interval(CirclePoint.of(0.0, 2), CirclePoint.of(1.5, 2), multiplicity=False)


def test_nu_additivity(bundle, rng):
    m = bundle.measure
    cuts = sorted(rng.uniform(0, 1, 6))
    total = m.nu_interval(CirclePoint.of(cuts[0], 1), CirclePoint.of(cuts[-1], 1))
    parts = sum(
        m.nu_interval(CirclePoint.of(a, 1), CirclePoint.of(b, 1))
        for a, b in zip(cuts, cuts[1:])
    )
    assert parts == pytest.approx(total, abs=1e-10)


def test_rn_derivative_identity_word(bundle):
    p = CirclePoint.of(0.4, 1)
    assert bundle.measure.rn_derivative(Word.identity(), p) == pytest.approx(1.0)


def test_rn_derivative_at_attracting_fixed_point(bundle):
    for name in ("a1", "b2", "a1 b1", "a1 b1 a2"):
        w = Word.parse(name)
        cls = classify_and_fixed_points(bundle.group.evaluate(w))
        p = CirclePoint.of((cls.fixed[0].theta / TWO_PI) % 1.0, 1)
        rn = bundle.measure.rn_derivative(w, p)
        assert rn == pytest.approx(math.exp(-cls.translation_length), rel=1e-9)


def test_rn_matches_finite_difference(bundle, rng):
    m, act = bundle.measure, bundle.action
    for _ in range(80):
        w = rnd_word(rng, 4)
        p = CirclePoint.of(rng.uniform(0, 1), 1)
        rn = m.rn_derivative(w, p)
        assert rn == pytest.approx(act.lift_derivative(w, p.s), rel=1e-10)
        h = 1e-5
        fd = (act.lift(w, p.s + h) - act.lift(w, p.s - h)) / (2 * h)
        assert fd == pytest.approx(rn, rel=1e-3)


def test_chart_atlas(bundle):
    atlas = ChartAtlas.uniform(bundle.measure, 4)
    c0, c1 = atlas.anchors[0], atlas.anchors[1]
    assert atlas.chart_coordinate(c0, c0) == 0.0
    diffs = [
        atlas.chart_coordinate(c0, CirclePoint.of(0.26 + 0.001 * i, 1))
        - atlas.chart_coordinate(c1, CirclePoint.of(0.26 + 0.001 * i, 1))
        for i in range(100)
    ]
    assert max(diffs) - min(diffs) < 1e-10
    with pytest.raises(ChartDomainError):
        atlas.chart_coordinate(c0, CirclePoint.of(0.9, 1))
    # strictly increasing coordinates
    vals = [atlas.chart_coordinate(c0, CirclePoint.of(s, 1)) for s in (0.05, 0.15, 0.3)]
    assert vals == sorted(vals) and len(set(vals)) == 3


def test_fiber_length_identity_tile(bundle):
    fm = bundle.metric
    a, b = CirclePoint.of(0.1, 1), CirclePoint.of(0.35, 1)
    x = HyperbolicPoint(0.05, 0.02)
    assert fm.fiber_length(x, a, b) == pytest.approx(bundle.measure.nu_interval(a, b), abs=1e-12)


def test_fiber_metric_invariance(bundle, rng):
    fm = bundle.metric
    for _ in range(30):
        w = rnd_word(rng, 2)
        x = flow_toward(
            HyperbolicPoint(0, 0),
            BoundaryPoint.from_angle(rng.uniform(0, TWO_PI)),
            rng.uniform(0, 1.5),
        )
        s0, ln = rng.uniform(0, 1), rng.uniform(0.01, 0.3)
        a, b = CirclePoint.of(s0, 1), CirclePoint.of(s0 + ln, 1)
        lhs = fm.fiber_length(x, a, b)
        gx = apply_isometry(bundle.group.evaluate(w), x)
        rhs = fm.fiber_length(gx, bundle.action.act(w, a), bundle.action.act(w, b))
        assert rhs == pytest.approx(lhs, abs=1e-9)


def test_pushforward_identity_by_quadrature(bundle, rng):
    # nu(rho(w)^-1 I) computed from lifts equals the integral of the
    # change-of-basepoint density over I
    fm = bundle.metric
    for _ in range(15):
        w = rnd_word(rng, 3)
        s0 = rng.uniform(0, 1)
        ln = rng.uniform(0.05, 0.4)
        a, b = CirclePoint.of(s0, 1), CirclePoint.of(s0 + ln, 1)
        lhs = fm.fiber_length_word(w, a, b)
        rhs = pushforward_mass(bundle.measure, w, a, b)
        assert rhs == pytest.approx(lhs, rel=1e-6)


def test_fiber_density_comparable_to_uniform(bundle, rng):
    # pointwise comparability of the piecewise fiber metric with the
    # uniform one, within the orbit-distance bound
    for _ in range(40):
        x = flow_toward(
            HyperbolicPoint(0, 0),
            BoundaryPoint.from_angle(rng.uniform(0, TWO_PI)),
            rng.uniform(0, 2.0),
        )
        _, gamma = bundle.group.reduce_to_domain(x)
        p = CirclePoint.of(rng.uniform(0, 1), 1)
        dens = bundle.metric.fiber_density(gamma, p)
        g_o = apply_isometry(bundle.group.evaluate(gamma), HyperbolicPoint(0, 0))
        bound = math.exp(bundle.delta * (2 * math.atanh(abs(g_o.z))))
        assert 1.0 / bound - 1e-9 <= dens <= bound + 1e-9


def test_rn_derivative_continuity(bundle):
    # finite-difference modulus check: the worst relative jump between
    # neighbors halves when the grid doubles, as it must for a C^1 map
    w = Word.parse("a1 b1")

    def max_jump(n):
        vals = [bundle.measure.rn_derivative(w, CirclePoint.of(s / n, 1)) for s in range(n)]
        vals.append(vals[0])
        return max(abs(b - a) / min(a, b) for a, b in zip(vals, vals[1:]))

    j512, j1024, j2048 = max_jump(512), max_jump(1024), max_jump(2048)
    assert j1024 < 0.7 * j512
    assert j2048 < 0.7 * j1024
