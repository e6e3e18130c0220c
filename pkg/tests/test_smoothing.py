import math

import numpy as np
import pytest

from hypflow.circle_action import CirclePoint
from hypflow.flow import flow_phi, periodic_orbit
from hypflow.geometry import TWO_PI, HyperbolicPoint, classify_and_fixed_points
from hypflow.smoothing import (
    ConeField,
    GeodesicField,
    GridTooCoarseError,
    MollifiedField,
    Mollifier,
    PerturbedField,
    cone_check,
    cone_sweep,
    field_c1_distance,
    fiber_expansion_profile,
    flow_psi,
    flow_psi_batch,
    mollify,
    quasigeodesic_radius,
    smooth_fiber_density,
    triangle_wave,
)
from hypflow.surface_group import Word


def test_mollifier_mass_and_constant():
    m = Mollifier(16)
    assert m.weights.sum() == pytest.approx(1.0, abs=1e-15)
    assert abs(m.dweights.sum()) < 1e-15
    grid = mollify(np.full(512, 3.7), 16)
    assert np.abs(grid.b - 3.7).max() < 1e-10
    assert np.abs(grid.db_dy).max() < 1e-9


def test_mollifier_error_decays_for_smooth_fields():
    y = np.arange(1024) / 1024
    a = np.sin(2 * np.pi * y)
    e32 = np.abs(mollify(a, 32).b - a).max()
    e64 = np.abs(mollify(a, 64).b - a).max()
    assert e64 < e32


def test_mollifier_halving_for_lipschitz_fields():
    y = np.arange(2048) / 2048
    a = triangle_wave(y)
    errs = {k: np.abs(mollify(a, k).b - a).max() for k in (16, 32, 64)}
    for r in (errs[16] / errs[32], errs[32] / errs[64]):
        assert 1.6 <= r <= 2.4


def test_mollifier_derivative_kernel():
    y = np.arange(1024) / 1024
    a = np.sin(2 * np.pi * y)
    grid = mollify(a, 64)
    assert np.abs(grid.db_dy - 2 * np.pi * np.cos(2 * np.pi * y)).max() < 5e-3


def test_grid_too_coarse():
    with pytest.raises(GridTooCoarseError):
        mollify(np.sin(2 * np.pi * np.arange(64) / 64), 32)


def test_leafwise_partials_converge():
    nx, ny = 64, 1024
    x = np.arange(nx) / nx
    y = np.arange(ny) / ny
    a = np.sin(2 * np.pi * x)[:, None] * (1 + 0.5 * np.cos(2 * np.pi * y))[None, :]
    dadx = 2 * np.pi * np.cos(2 * np.pi * x)[:, None] * (1 + 0.5 * np.cos(2 * np.pi * y))[None, :]
    errs = {
        k: np.abs(mollify(a, k, x_step=1.0 / nx).db_dx - dadx).max() for k in (16, 32)
    }
    assert errs[32] < errs[16]


def test_psi_matches_phi_for_exact_field(bundle):
    field = GeodesicField()
    pt = bundle.point(HyperbolicPoint(0.1, -0.2), CirclePoint.of(0.3, 1))
    end_psi = flow_psi(bundle, field, pt, 3.0, error_check=True)
    end_phi, _ = flow_phi(bundle, pt, 3.0, record_samples=False)
    assert abs(end_psi.x.z - end_phi.x.z) < 1e-9
    assert end_psi.domain_word == end_phi.domain_word


def test_mollified_field_c1_close(bundle, rng):
    pert = PerturbedField(amp=0.015)
    field = MollifiedField(pert, 16)
    xs = 0.6 * np.sqrt(rng.uniform(size=100)) * np.exp(2j * np.pi * rng.uniform(size=100))
    ss = rng.uniform(0, 1, 100)
    assert field_c1_distance(field, pert, xs, ss) < 0.2
    assert field_c1_distance(field, GeodesicField(), xs, ss) < 0.2


def test_quasigeodesic_radius_bounded(bundle, rng):
    field = MollifiedField(PerturbedField(amp=0.015), 16)
    pts = [
        bundle.point(
            HyperbolicPoint.from_complex(
                complex(0.4 * rng.uniform() * np.exp(2j * np.pi * rng.uniform()))
            ),
            CirclePoint.of(float(rng.uniform()), 1),
        )
        for _ in range(8)
    ]
    radii = quasigeodesic_radius(bundle, field, pts, 10.0, step=4e-3, n_checks=20)
    assert max(radii) < 0.1


def test_perturbed_same_leaf_orbits_converge(bundle):
    # forward convergence up to reparameterization: distance from one
    # orbit's point to the other orbit as a curve
    from hypflow.geometry import hyperbolic_distance

    field = MollifiedField(PerturbedField(amp=0.015), 16)
    p = 0.62
    checks1 = [4.0, 12.0]
    checks2 = sorted(
        [3.0 + 0.002 * j for j in range(1000)] + [11.0 + 0.002 * j for j in range(1000)]
    )
    _, saved1 = flow_psi_batch(field, np.array([0.1 + 0j]), np.array([p]), 12.0, step=4e-3, checkpoints=checks1)
    _, saved2 = flow_psi_batch(field, np.array([-0.1 + 0.15j]), np.array([p]), 13.0, step=4e-3, checkpoints=checks2)
    curve = [(t, HyperbolicPoint.from_complex(complex(a[0]))) for t, a in saved2]

    def dist_to_curve(z, lo, hi):
        pt = HyperbolicPoint.from_complex(complex(z))
        return min(hyperbolic_distance(pt, q) for t, q in curve if lo <= t <= hi)

    d4 = dist_to_curve(saved1[0][1][0], 3.0, 5.0)
    d12 = dist_to_curve(saved1[1][1][0], 11.0, 13.0)
    assert d12 < 0.2 * d4


def test_cone_expansion_on_periodic_orbit(bundle):
    # unperturbed field, one full period: the fiber-direction growth is
    # exactly the reciprocal of the backward holonomy contraction
    field = GeodesicField()
    w = Word.parse("a1")
    cls = classify_and_fixed_points(bundle.group.evaluate(w))
    p = CirclePoint.of((cls.fixed[0].theta / TWO_PI) % 1.0, 1)
    seg = periodic_orbit(bundle, w, p)
    res = cone_check(bundle, field, seg.start, cls.translation_length, ConeField(8.0))
    assert res.fiber_expansion == pytest.approx(math.exp(cls.translation_length), rel=1e-6)
    assert res.contained


def test_cone_containment_and_expansion_fit(bundle, rng):
    field = MollifiedField(PerturbedField(amp=0.015), 16)
    pts = [
        bundle.point(
            HyperbolicPoint.from_complex(
                complex(0.5 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform()))
            ),
            CirclePoint.of(float(rng.uniform()), 1),
        )
        for _ in range(20)
    ]
    res = cone_sweep(bundle, field, pts, 3.0, beta=8.0, step=4e-3)
    assert all(r.contained for r in res)
    prof = fiber_expansion_profile(bundle, field, pts, [1.0, 2.0, 3.0], step=4e-3)
    slopes = np.diff(np.log(np.array([v for _, v in prof])), axis=0)
    assert np.median(slopes) > 0.5


def test_smooth_fiber_density_comparable_to_piecewise(bundle, rng):
    # the smooth comparison density interpolates the tile densities within
    # the diameter bound
    diam = bundle.group.domain.diameter
    for _ in range(30):
        z = 0.8 * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        x = HyperbolicPoint.from_complex(complex(z))
        s = float(rng.uniform())
        smooth = float(smooth_fiber_density(bundle, z, s))
        _, gamma = bundle.group.reduce_to_domain(x)
        piecewise = bundle.metric.fiber_density(gamma, CirclePoint.of(s, 1))
        assert abs(math.log(smooth / piecewise)) <= bundle.delta * diam + 1e-9
