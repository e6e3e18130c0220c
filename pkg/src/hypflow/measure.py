"""Pullback of the visual measure along the boundary identification,
chart coordinates, Radon-Nikodym derivatives, and the piecewise fiber
metric.

With the base identification being the identity and the visual measure
from the disk center normalized to mass one, the pulled-back measure on
R/kZ is Lebesgue in the coordinate s; the substance lives in the
Busemann closed forms that express how the group transports it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .circle_action import CircleAction, CirclePoint, EquivariantMap
from .geometry import (
    ORIGIN,
    BoundaryPoint,
    HyperbolicPoint,
    Isometry,
    busemann,
    busemann_translates,
)
from .surface_group import SurfaceGroup, Word


class MeasureDomainError(ValueError):
    pass


class ChartDomainError(ValueError):
    pass


def _arc(a: CirclePoint, b: CirclePoint, k: int) -> float:
    """Positively oriented length of [a, b] in R/kZ."""
    return (b.s - a.s) % k


@dataclass(frozen=True)
class PullbackMeasure:
    """Visual-measure mass pulled back through the k-fold boundary covering.

    Total mass is k; intervals shorter than one base period meet the
    boundary injectively, longer ones are measured with multiplicity.
    """

    action: CircleAction
    delta: float = 1.0

    @property
    def k(self) -> int:
        return self.action.k

    @property
    def fmap(self) -> EquivariantMap:
        return self.action.fmap

    @property
    def total_mass(self) -> float:
        return float(self.k)

    def nu_interval(self, a: CirclePoint, b: CirclePoint, *, multiplicity: bool = True) -> float:
        """Mass of the positively oriented interval [a, b].

        ``multiplicity=False`` flags intervals longer than one base
        period, where the set image of the covering is the whole circle
        and the naive pushforward mass is ambiguous.
        """
        if a.k != self.k or b.k != self.k:
            raise MeasureDomainError("interval endpoints live on the wrong cover")
        length = _arc(a, b, self.k)
        if not multiplicity and length > 1.0 + 1e-12:
            raise MeasureDomainError(
                f"interval of length {length} exceeds one base period of the covering"
            )
        return length

    def rn_derivative(self, w: Word, p: CirclePoint) -> float:
        """Derivative of the circle map of w at p in the measure charts.

        Equals exp(-delta * busemann(f(p), w^-1 o, o)): the change-of-
        basepoint density of the visual measure, evaluated through the
        boundary identification.  At the attracting fixed point of a
        hyperbolic word this is exp(-delta * translation length).
        """
        xi = self.fmap(p)
        g = self.action.group.evaluate(w.inverse())
        return math.exp(-self.delta * busemann_translates(xi, g, Isometry.identity()))

    def pushforward_density(self, w: Word, p: CirclePoint) -> float:
        """d(rho(w)_* nu)/d nu at p = exp(-delta * busemann(f(p), w o, o));
        the reciprocal-at-image-point companion of rn_derivative."""
        xi = self.fmap(p)
        g = self.action.group.evaluate(w)
        return math.exp(-self.delta * busemann_translates(xi, g, Isometry.identity()))

    def basepoint_density(self, x: HyperbolicPoint, p: CirclePoint) -> float:
        """d(visual measure at x)/d(visual measure at o) at f(p)."""
        return math.exp(-self.delta * busemann(self.fmap(p), x, ORIGIN))


@dataclass(frozen=True)
class ChartAtlas:
    """Charts zeta_a(s) = nu[a, s] on intervals of a fixed width < k."""

    measure: PullbackMeasure
    anchors: tuple[CirclePoint, ...]
    width: float

    @staticmethod
    def uniform(measure: PullbackMeasure, n_charts: int = 4, width: float | None = None) -> "ChartAtlas":
        k = measure.k
        if width is None:
            width = k * (1.5 / n_charts)  # adjacent charts overlap by half
        anchors = tuple(CirclePoint.of(i * k / n_charts, k) for i in range(n_charts))
        return ChartAtlas(measure, anchors, width)

    def chart_coordinate(self, a: CirclePoint, s: CirclePoint) -> float:
        off = _arc(a, s, self.measure.k)
        if off > self.width + 1e-12:
            raise ChartDomainError(f"point at offset {off} outside chart of width {self.width}")
        return off

    def overlap_shift(self, a: CirclePoint, b: CirclePoint) -> float:
        """zeta_a - zeta_b on the overlap; a translation by construction."""
        return _arc(b, a, self.measure.k)


class FiberMetric:
    """Piecewise fiber length: over a point of the tile gamma D, the
    interval [a, b] has length nu(rho(gamma)^-1 [a, b])."""

    def __init__(self, measure: PullbackMeasure, group: SurfaceGroup):
        self.measure = measure
        self.group = group
        self.action = measure.action

    def fiber_length(self, x: HyperbolicPoint, a: CirclePoint, b: CirclePoint) -> float:
        _, gamma = self.group.reduce_to_domain(x)
        return self.fiber_length_word(gamma, a, b)

    def fiber_length_word(self, gamma: Word, a: CirclePoint, b: CirclePoint) -> float:
        k = self.measure.k
        length = _arc(a, b, k)
        ginv = gamma.inverse()
        lo = self.action.lift(ginv, a.s)
        hi = self.action.lift(ginv, a.s + length)
        return hi - lo

    def fiber_density(self, gamma: Word, p: CirclePoint) -> float:
        """Length density of the fiber direction at height p over gamma D;
        the change-of-coordinate factor exp(-delta busemann(f(p), gamma o, o))."""
        return self.measure.pushforward_density(gamma, p)


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10, max_depth: int = 30) -> float:
    """Adaptive Simpson quadrature with absolute tolerance."""

    def simpson(x0, x2, f0, f1, f2):
        return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    def recurse(x0, x2, f0, f1, f2, whole, eps, depth):
        xm = 0.5 * (x0 + x2)
        lm, rm = 0.5 * (x0 + xm), 0.5 * (xm + x2)
        flm, frm = f(lm), f(rm)
        left = simpson(x0, xm, f0, flm, f1)
        right = simpson(xm, x2, f1, frm, f2)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * eps:
            return left + right + (left + right - whole) / 15.0
        return recurse(x0, xm, f0, flm, f1, left, 0.5 * eps, depth - 1) + recurse(
            xm, x2, f1, frm, f2, right, 0.5 * eps, depth - 1
        )

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = simpson(a, b, fa, fm, fb)
    return recurse(a, b, fa, fm, fb, whole, tol, max_depth)


def pushforward_mass(measure: PullbackMeasure, w: Word, a: CirclePoint, b: CirclePoint, tol: float = 1e-10) -> float:
    """nu(rho(w)^-1 [a, b]) by quadrature of the pushforward density over
    [a, b]; the independent route to the fiber-length value."""
    length = _arc(a, b, measure.k)
    f = lambda s: measure.pushforward_density(w, CirclePoint.of(s, measure.k))
    return adaptive_simpson(f, a.s, a.s + length, tol)
