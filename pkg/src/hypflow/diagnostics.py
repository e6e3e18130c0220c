"""Empirical estimators for the orbit-behavior axioms of the flow:
forward asymptoticity inside horizontal leaves, uniform-time separation
inside vertical leaves, and the leafwise contraction exponents.

These are reported quantities, not proofs; each estimator states what it
sampled and what it measured.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circle_action import CirclePoint
from .flow import FoliatedBundle, flow_phi
from .geometry import (
    BoundaryPoint,
    Geodesic,
    HyperbolicPoint,
    busemann,
    flow_toward,
    foot_on_geodesic,
    hyperbolic_distance,
    point_to_geodesic_distance,
)


@dataclass
class AsymptoticityReport:
    n_pairs: int
    t_grid: list[float]
    decay_exponents: list[float]  # per-pair fitted decay rates
    min_exponent: float
    median_exponent: float


def horizontal_asymptoticity(
    bundle: FoliatedBundle,
    rng: np.random.Generator,
    n_pairs: int = 100,
    t_max: float = 8.0,
    n_checks: int = 8,
) -> AsymptoticityReport:
    """Decay rate of the distance between same-leaf orbits.

    Pairs are placed on a common horosphere about the target point (the
    standard reparameterization of the leafwise convergence axiom is
    exactly this normalization), flowed simultaneously, and the distance
    decay fitted per pair.
    """
    ts = [t_max * (i + 1) / n_checks for i in range(n_checks)]
    exps = []
    for _ in range(n_pairs):
        p = CirclePoint.of(rng.uniform(0.0, bundle.k), bundle.k)
        xi = bundle.target(p)
        x1 = _random_point(rng, 0.5)
        x2_raw = _random_point(rng, 0.5)
        x2 = flow_toward(x2_raw, xi, -busemann(xi, x1, x2_raw))
        d0 = hyperbolic_distance(x1, x2)
        if d0 < 1e-3:
            continue
        logs = []
        for t in ts:
            y1 = flow_toward(x1, xi, t)
            y2 = flow_toward(x2, xi, t)
            d = hyperbolic_distance(y1, y2)
            if d < 1e-12:
                break
            logs.append((t, math.log(d)))
        if len(logs) < 3:
            continue
        arr = np.array(logs)
        slope = np.polyfit(arr[:, 0], arr[:, 1], 1)[0]
        exps.append(-slope)
    exps.sort()
    return AsymptoticityReport(
        n_pairs=len(exps),
        t_grid=ts,
        decay_exponents=exps,
        min_exponent=min(exps),
        median_exponent=float(np.median(exps)),
    )


@dataclass
class SeparationReport:
    """Uniform-time separation of vertical-leaf pairs: for each initial
    gap, the worst time needed for the orbits to separate to eps."""

    eps: float
    gaps: list[float]
    max_times: list[float]
    mean_times: list[float]
    n_pairs_per_gap: int
    monotone: bool
    all_finite: bool


def vertical_separation_times(
    bundle: FoliatedBundle,
    rng: np.random.Generator,
    gaps: list[float],
    eps: float = 0.5,
    n_pairs: int = 100,
    t_cap: float = 40.0,
    t_step: float = 0.05,
) -> SeparationReport:
    """Estimate the uniform separation time for pairs on one vertical leaf.

    A vertical leaf collects the geodesics with a fixed negative endpoint
    across fiber heights.  Pairs start at fiber gap `gap` (the second
    point is the orthogonal projection onto its geodesic), flow forward,
    and the separation time is the first time the moving point is eps
    away from the entire companion orbit (separation in this sense is
    reparameterization-proof).  Distances are between universal-cover
    representatives started in the fundamental tile.
    """
    max_times, mean_times = [], []
    for gap in gaps:
        times = []
        for _ in range(n_pairs):
            eta = BoundaryPoint.from_angle(rng.uniform(0.0, 2.0 * math.pi))
            s1 = rng.uniform(0.0, bundle.k)
            q1 = CirclePoint.of(s1, bundle.k)
            q2 = CirclePoint.of(s1 + gap, bundle.k)
            xi1, xi2 = bundle.target(q1), bundle.target(q2)
            if _angle_gap(eta, xi1) < 0.2 or _angle_gap(eta, xi2) < 0.2:
                continue
            geo1 = Geodesic(eta, xi1)
            geo2 = Geodesic(eta, xi2)
            x1 = foot_on_geodesic(_random_point(rng, 0.3), geo1)
            x2 = foot_on_geodesic(x1, geo2)
            t_sep = _separation_time(x1, xi1, geo2, x2, eps, t_cap, t_step)
            times.append(t_sep)
        max_times.append(max(times))
        mean_times.append(float(np.mean([t for t in times if math.isfinite(t)])))
    finite = all(math.isfinite(t) for t in max_times)
    # larger 1/gap must need at least as much time: times grow as gaps shrink
    order = np.argsort(gaps)[::-1]
    ordered = [max_times[i] for i in order]
    monotone = all(a <= b + 1e-9 for a, b in zip(ordered, ordered[1:]))
    return SeparationReport(
        eps=eps,
        gaps=list(gaps),
        max_times=max_times,
        mean_times=mean_times,
        n_pairs_per_gap=n_pairs,
        monotone=monotone,
        all_finite=finite,
    )


def _separation_time(x1, xi1, geo2, x2, eps, t_cap, t_step):
    """First forward time at which the orbit of x1 is eps away from the
    whole companion geodesic (hence from any reparameterized companion
    orbit)."""
    t = 0.0
    while t <= t_cap:
        y = flow_toward(x1, xi1, t)
        if point_to_geodesic_distance(y, geo2) > eps:
            return t
        t += t_step
    return math.inf


def _angle_gap(a: BoundaryPoint, b: BoundaryPoint) -> float:
    d = abs(a.theta - b.theta) % (2.0 * math.pi)
    return min(d, 2.0 * math.pi - d)


def _random_point(rng: np.random.Generator, radius: float) -> HyperbolicPoint:
    r = radius * math.sqrt(rng.uniform())
    th = rng.uniform(0.0, 2.0 * math.pi)
    return HyperbolicPoint(r * math.cos(th), r * math.sin(th))


@dataclass
class LeafContractionReport:
    n_samples: int
    t_grid: list[float]
    exponents: list[float]
    min_exponent: float
    prefactors: list[float]


def leafwise_stable_contraction(
    bundle: FoliatedBundle,
    rng: np.random.Generator,
    n_samples: int = 50,
    t_max: float = 10.0,
    n_checks: int = 5,
    h: float = 1e-5,
) -> LeafContractionReport:
    """Contraction exponent of the flow derivative on the leafwise stable
    direction (the horocyclic direction about the target point),
    measured by flowing horocyclically-displaced pairs."""
    ts = [t_max * (i + 1) / n_checks for i in range(n_checks)]
    exps, prefs = [], []
    for _ in range(n_samples):
        p = CirclePoint.of(rng.uniform(0.0, bundle.k), bundle.k)
        xi = bundle.target(p)
        x = _random_point(rng, 0.6)
        x2 = _horocyclic_neighbor(x, xi, h)
        logs = []
        for t in ts:
            d = hyperbolic_distance(flow_toward(x, xi, t), flow_toward(x2, xi, t))
            logs.append((t, math.log(d / h)))
        arr = np.array(logs)
        slope, intercept = np.polyfit(arr[:, 0], arr[:, 1], 1)
        exps.append(-slope)
        prefs.append(math.exp(intercept))
    return LeafContractionReport(
        n_samples=n_samples,
        t_grid=ts,
        exponents=sorted(exps),
        min_exponent=min(exps),
        prefactors=prefs,
    )


def _horocyclic_neighbor(x: HyperbolicPoint, xi: BoundaryPoint, h: float) -> HyperbolicPoint:
    """Point at distance ~h from x on the horosphere about xi through x."""
    w = x.z
    target = (xi.z - w) / (1.0 - w.conjugate() * xi.z)
    target /= abs(target)
    side = 1j * target  # unit vector orthogonal to the flow direction at x
    moved = math.tanh(0.5 * h) * side
    y = HyperbolicPoint.from_complex((moved + w) / (1.0 + w.conjugate() * moved))
    # project back to the horosphere: slide along the geodesic toward xi
    return flow_toward(y, xi, -busemann(xi, x, y))
