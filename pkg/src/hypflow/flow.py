"""The geodesic-type flow on the foliated circle bundle.

Upstairs the flow moves the disk coordinate at unit speed along the
geodesic aimed at the boundary image of the (constant) fiber height;
the bundle bookkeeping tracks which translate of the fundamental octagon
the moving point occupies.  Fiber-transverse holonomy derivatives come
from the Busemann closed form evaluated on the start and end tile words.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .circle_action import CircleAction, CirclePoint
from .geometry import (
    ORIGIN,
    BoundaryPoint,
    GeometryError,
    HyperbolicPoint,
    Isometry,
    apply_boundary,
    apply_isometry,
    axis_nearest_origin,
    busemann_translates,
    classify_and_fixed_points,
    flow_toward,
    hyperbolic_distance,
)
from .measure import FiberMetric, PullbackMeasure
from .surface_group import SurfaceGroup, Word

FLOW_TIME_CAP = 100.0


class FlowBudgetError(RuntimeError):
    pass


class PeriodicOrbitError(ValueError):
    pass


class TransversalError(RuntimeError):
    pass


@dataclass(frozen=True)
class BundlePoint:
    """Point of the trivialized bundle: disk position, fiber height, and
    the word of the octagon translate containing the position."""

    x: HyperbolicPoint
    p: CirclePoint
    domain_word: Word

    @property
    def reduced_x(self) -> HyperbolicPoint:
        return self.x  # valid when domain_word is the empty word

    def fiber_downstairs(self, action: CircleAction) -> CirclePoint:
        """Fiber coordinate of the fundamental-domain representative."""
        return action.act(self.domain_word.inverse(), self.p)


@dataclass
class OrbitSegment:
    """Sampled flow segment with the tile-crossing letters."""

    t0: float
    t1: float
    samples: list[tuple[float, BundlePoint]] = field(default_factory=list)
    crossings: list[tuple[float, int]] = field(default_factory=list)

    def crossing_word(self) -> Word:
        return Word.from_letters([l for _, l in self.crossings])

    @property
    def start(self) -> BundlePoint:
        return self.samples[0][1]

    @property
    def end(self) -> BundlePoint:
        return self.samples[-1][1]


@dataclass(frozen=True)
class HolonomyRecord:
    """Fiber-direction derivative of the transverse holonomy over time t,
    with the slack of the two-sided tile-diameter bound (negative slack
    within tolerance means the bound holds)."""

    t: float
    derivative: float
    bound_check: float


class FoliatedBundle:
    """Assembled system: octagon group, k-fold boundary action, pulled
    back measure and fiber metric."""

    def __init__(self, group: SurfaceGroup, k: int = 1, delta: float = 1.0):
        self.group = group
        self.action = CircleAction(group, k)
        self.fmap = self.action.fmap
        self.measure = PullbackMeasure(self.action, delta)
        self.metric = FiberMetric(self.measure, group)
        self.delta = delta
        self.k = k

    def point(self, x: HyperbolicPoint, p: CirclePoint) -> BundlePoint:
        _, w = self.group.reduce_to_domain(x)
        return BundlePoint(x, p, w)

    def target(self, p: CirclePoint) -> BoundaryPoint:
        return self.fmap(p)


def flow_phi(
    bundle: FoliatedBundle,
    pt: BundlePoint,
    t: float,
    *,
    step: float = 0.25,
    refine_crossings: bool = True,
    record_samples: bool = True,
) -> tuple[BundlePoint, OrbitSegment]:
    """Flow for time t (either sign), tracking tile crossings.

    The reduced representative is advanced in fundamental-domain
    coordinates, so accuracy does not degrade with |t|; the recorded
    upstairs positions use the exact closed form.
    """
    if abs(t) > FLOW_TIME_CAP:
        raise FlowBudgetError(f"|t| = {abs(t)} exceeds the flow budget {FLOW_TIME_CAP}")
    if t == 0.0:
        seg = OrbitSegment(t0=0.0, t1=0.0, samples=[(0.0, pt)])
        return pt, seg
    group = bundle.group
    xi = bundle.target(pt.p)
    word_letters = list(pt.domain_word.letters)
    # reduced coordinates: y = w^-1 x, xi_red = w^-1 xi
    g_inv = group.evaluate(pt.domain_word).inverse()
    y = apply_isometry(g_inv, pt.x)
    xi_red = apply_boundary(g_inv, xi)
    seg = OrbitSegment(t0=0.0, t1=t)
    if record_samples:
        seg.samples.append((0.0, pt))

    n_steps = max(1, math.ceil(abs(t) / step))
    dt = t / n_steps
    tau = 0.0
    for i in range(n_steps):
        tau_next = t if i == n_steps - 1 else tau + dt
        y_next = flow_toward(y, xi_red, tau_next - tau)
        # pull the representative back into the octagon, one letter at a time
        guard = 0
        while True:
            l = group.reduce_step(y_next.z)
            if l is None:
                break
            guard += 1
            if guard > 40:
                raise FlowBudgetError("tile reduction runaway during flow")
            t_cross = tau_next
            if refine_crossings:
                t_cross = _bisect_crossing(group, y, xi_red, tau, tau_next, l)
            g = group.gens[-l]
            y_next = apply_isometry(g, y_next)
            y = apply_isometry(g, y)  # keep the bracketing point consistent
            xi_red = apply_boundary(g, xi_red)
            word_letters.append(l)
            seg.crossings.append((t_cross, l))
        tau = tau_next
        y = y_next
        if record_samples or i == n_steps - 1:
            up = flow_toward(pt.x, xi, tau)
            bp = BundlePoint(up, pt.p, Word.from_letters(word_letters))
            if record_samples:
                seg.samples.append((tau, bp))
    end = BundlePoint(flow_toward(pt.x, xi, t), pt.p, Word.from_letters(word_letters))
    if record_samples:
        seg.samples[-1] = (t, end)
    else:
        seg.samples = [(0.0, pt), (t, end)]
    return end, seg


def _bisect_crossing(group, y, xi_red, tau_lo, tau_hi, letter, iters: int = 40):
    """Crossing time of the Dirichlet face of `letter`, bisected between
    the bracketing times (positions relative to the pre-crossing frame)."""
    face = group._face_pts[letter]

    def side(tau):
        z = flow_toward(y, xi_red, tau - tau_lo).z
        return group._q(z, 0.0) - group._q(z, face)

    lo, hi = tau_lo, tau_hi
    s_lo = side(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if (side(mid) > 0) == (s_lo > 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def holonomy_derivative(bundle: FoliatedBundle, pt: BundlePoint, t: float) -> HolonomyRecord:
    """Derivative of the fiber holonomy along the orbit of pt over time t,
    measured in the piecewise fiber metric.

    Closed form exp(-delta * busemann(f(p), beta o, alpha o)) where alpha
    and beta are the start and end tile words.  bound_check is
    log(derivative) - (delta t + 2 delta diam D) for t < 0 (contraction
    bound; passes when <= tolerance) and the mirrored
    (delta t - 2 delta diam D) - log(derivative) for t >= 0 (expansion).
    """
    end, _ = flow_phi(bundle, pt, t, record_samples=False, refine_crossings=False)
    alpha = bundle.group.evaluate(pt.domain_word)
    beta = bundle.group.evaluate(end.domain_word)
    xi = bundle.target(pt.p)
    b = busemann_translates(xi, beta, alpha)
    der = math.exp(-bundle.delta * b)
    diam = bundle.group.domain.diameter
    if t < 0:
        bound_check = math.log(der) - (bundle.delta * t + 2.0 * bundle.delta * diam)
    else:
        bound_check = (bundle.delta * t - 2.0 * bundle.delta * diam) - math.log(der)
    return HolonomyRecord(t=t, derivative=der, bound_check=bound_check)


def holonomy_derivative_words(
    bundle: FoliatedBundle, xi: BoundaryPoint, alpha: Word, beta: Word
) -> float:
    g_a = bundle.group.evaluate(alpha)
    g_b = bundle.group.evaluate(beta)
    return math.exp(-bundle.delta * busemann_translates(xi, g_b, g_a))


def periodic_orbit(
    bundle: FoliatedBundle,
    w: Word,
    p: CirclePoint,
    *,
    step: float = 0.1,
    refine_crossings: bool = True,
    fixed_point_tol: float = 1e-7,
    start_offset: float = 0.0,
) -> OrbitSegment:
    """One period of the closed orbit over the axis of w at fiber height p.

    p must be fixed by the lifted action of w and sit over one of the two
    boundary fixed points of w; the orbit runs toward f(p) and closes
    after the translation length of w.  ``start_offset`` slides the start
    point along the axis: axes of symmetric words can hit tiling
    vertices exactly, where endpoint tile assignment is ambiguous.
    """
    g = bundle.group.evaluate(w)
    cls = classify_and_fixed_points(g)
    if cls.kind != "hyperbolic":
        raise PeriodicOrbitError(f"{w} evaluates to a {cls.kind} isometry")
    moved = abs(bundle.action.lift(w, p.s) - p.s) % bundle.k
    if min(moved, bundle.k - moved) > fixed_point_tol:
        raise PeriodicOrbitError(f"fiber height {p} is not fixed by {w}")
    xi = bundle.target(p)
    gaps = [abs((xi.theta - f.theta + math.pi) % (2 * math.pi) - math.pi) for f in cls.fixed]
    if min(gaps) > 1e-6:
        raise PeriodicOrbitError("fiber height does not sit over a boundary fixed point of the word")
    x0 = axis_nearest_origin(g)
    if start_offset:
        x0 = flow_toward(x0, xi, start_offset)
    start = bundle.point(x0, p)
    _, seg = flow_phi(
        bundle, start, cls.translation_length, step=step, refine_crossings=refine_crossings
    )
    return seg


def orbit_closure_gap(bundle: FoliatedBundle, seg: OrbitSegment) -> float:
    """Distance between the reduced start and end positions of one period."""
    s, e = seg.start, seg.end
    ys = apply_isometry(bundle.group.evaluate(s.domain_word).inverse(), s.x)
    ye = apply_isometry(bundle.group.evaluate(e.domain_word).inverse(), e.x)
    return hyperbolic_distance(ys, ye)


@dataclass
class FirstReturnData:
    """Sampled first-return map of a fiber transversal along a closed orbit."""

    fiber_center: float
    fiber_window: float
    radius: float
    period: float
    samples: list[tuple[float, float, float]]  # (q, r(q), return time)
    backward_samples: list[tuple[float, float, float]]
    forward_derivative: float  # d r / d q at the fixed point
    backward_derivative: float  # d r^-1 / d q at the fixed point (contracting)
    backward_iterates: list[float]
    shrink_count: int


def first_return(
    bundle: FoliatedBundle,
    w: Word,
    p: CirclePoint,
    *,
    radius: float | None = None,
    fiber_window: float | None = None,
    n_samples: int = 9,
    n_backward_iterates: int = 10,
    max_shrink: int = 10,
) -> FirstReturnData:
    """Sample the first-return map on a transversal through the periodic
    orbit of w at height p, shrinking the transversal on failure.

    The forward return expands the fiber direction; its inverse (the
    backward return) contracts, with derivative equal to the measure
    derivative of w at p.
    """
    from .surface_group import primitive_cyclic_root

    g = bundle.group.evaluate(w)
    cls = classify_and_fixed_points(g)
    if cls.kind != "hyperbolic":
        raise PeriodicOrbitError(f"{w} evaluates to a {cls.kind} isometry")
    # the section's first return happens at the primitive period, whatever
    # power of the root the word is
    root, _ = primitive_cyclic_root(w)
    period = classify_and_fixed_points(bundle.group.evaluate(root)).translation_length
    # section anchor: fundamental-domain representative of an axis point
    # (the raw axis point may lie outside the octagon, where the reduced
    # orbit would never approach it)
    x0, anchor_word = bundle.group.reduce_to_domain(axis_nearest_origin(g))
    p = CirclePoint.of(bundle.action.lift(anchor_word.inverse(), p.s), bundle.k)
    if radius is None:
        radius = 0.3
    if fiber_window is None:
        # the forward return stretches fiber offsets by e^period; keep the
        # returning points inside the section radius
        fiber_window = min(0.005, 0.15 * math.exp(-period) / math.pi)

    shrink = 0
    backward_window = 0.005  # the backward return contracts; a wider
    # window keeps its derivative readout above the bookkeeping noise
    while True:
        try:
            data = _sample_returns(
                bundle, w, p, x0, period, radius, fiber_window, backward_window,
                n_samples, n_backward_iterates,
            )
            data.shrink_count = shrink
            return data
        except TransversalError:
            # leafwise excursion scales with the fiber window, the section
            # radius does not: shrink only the windows
            shrink += 1
            if shrink > max_shrink:
                raise
            fiber_window *= 0.5
            backward_window *= 0.5


def _return_once(bundle, x0, q, sign, period, radius):
    """Flow (x0, q) until the projected orbit returns closest to x0 in the
    quotient; return (fiber coordinate after reduction, |return time|)."""
    pt = bundle.point(x0, q)

    def reduced_gap(bp: BundlePoint) -> float:
        y = apply_isometry(bundle.group.evaluate(bp.domain_word).inverse(), bp.x)
        return hyperbolic_distance(y, x0)

    scan_step = 0.05 * period
    _, seg = flow_phi(
        bundle, pt, sign * 1.6 * period, step=scan_step, refine_crossings=False
    )
    candidates = [(tau, bp) for tau, bp in seg.samples if abs(tau) >= 0.5 * period]
    gaps = [reduced_gap(bp) for _, bp in candidates]
    i_best = min(range(len(gaps)), key=gaps.__getitem__)
    if gaps[i_best] > radius:
        raise TransversalError(f"orbit missed the transversal (gap {gaps[i_best]:.3g})")
    tau_best, bp_best = candidates[i_best]

    def local_gap(dt):
        end, _ = flow_phi(bundle, bp_best, dt, step=scan_step, record_samples=False, refine_crossings=False)
        return reduced_gap(end), end

    a, b = -scan_step, scan_step
    for _ in range(40):
        m1 = a + 0.382 * (b - a)
        m2 = a + 0.618 * (b - a)
        if local_gap(m1)[0] < local_gap(m2)[0]:
            b = m2
        else:
            a = m1
    dt = 0.5 * (a + b)
    gap, end = local_gap(dt)
    if gap > radius:
        raise TransversalError(f"refined return missed the transversal (gap {gap:.3g})")
    q_ret = end.fiber_downstairs(bundle.action)
    return q_ret.s, abs(tau_best + dt)


def _sample_returns(bundle, w, p, x0, period, radius, fiber_window, backward_window, n_samples, n_back):
    k = bundle.k
    qs = [p.s + fiber_window * (2.0 * i / (n_samples - 1) - 1.0) for i in range(n_samples)]
    samples = []
    for q in qs:
        r, t = _return_once(bundle, x0, CirclePoint.of(q, k), +1, period, radius)
        samples.append((q % k, r, t))
    back_samples = []
    for q in [p.s + backward_window * (2.0 * i / (n_samples - 1) - 1.0) for i in range(n_samples)]:
        r, t = _return_once(bundle, x0, CirclePoint.of(q, k), -1, period, radius)
        back_samples.append((q % k, r, t))

    def center_slope(table):
        mid = len(table) // 2
        q_a, r_a, _ = table[mid - 1]
        q_b, r_b, _ = table[mid + 1]
        return ((r_b - r_a + 0.5 * k) % k - 0.5 * k) / (q_b - q_a)

    fwd = center_slope(samples)
    bwd = center_slope(back_samples)

    # backward iterates of a nearby fiber point converge to the fixed
    # point; stop at the resolution floor of the section bookkeeping
    iterates = []
    q = p.s + 0.5 * backward_window
    for _ in range(n_back):
        q, _ = _return_once(bundle, x0, CirclePoint.of(q, k), -1, period, radius)
        q = p.s + ((q - p.s + 0.5 * k) % k - 0.5 * k)
        iterates.append(q)
        if abs(q - p.s) < 1e-10:
            break
    return FirstReturnData(
        fiber_center=p.s,
        fiber_window=fiber_window,
        radius=radius,
        period=period,
        samples=samples,
        backward_samples=back_samples,
        forward_derivative=fwd,
        backward_derivative=bwd,
        backward_iterates=iterates,
        shrink_count=0,
    )
