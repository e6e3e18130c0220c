"""Mollified leafwise vector fields, the perturbed flow, and cone fields.

The generating field of the geodesic-type flow is smooth along leaves
but only continuous transversely once a rough fiber-direction
perturbation is added.  Convolving the fiber dependence with a scaled
bump restores transverse C^1 regularity; the flow of the smoothed field
is integrated leafwise (the fiber height is constant along orbits), and
a cone field around the fiber direction certifies hyperbolicity through
the same measure-theoretic holonomy formulas as the unperturbed flow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .circle_action import CirclePoint
from .flow import BundlePoint, FoliatedBundle
from .geometry import (
    BoundaryPoint,
    Geodesic,
    HyperbolicPoint,
    point_to_geodesic_distance,
)
from .surface_group import Word


class GridTooCoarseError(ValueError):
    """Sample grid cannot resolve the requested mollifier scale."""


class StepSizeError(RuntimeError):
    pass


def bump(t):
    """Smooth even bump supported on [-1/2, 1/2] (unnormalized)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 0.5
    u = t[inside]
    out[inside] = np.exp(-1.0 / (1.0 - 4.0 * u * u))
    return out


def bump_derivative(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 0.5
    u = t[inside]
    s = 1.0 - 4.0 * u * u
    out[inside] = np.exp(-1.0 / s) * (-8.0 * u / (s * s))
    return out


_BUMP_MASS = quad(lambda t: float(bump(t)), -0.5, 0.5, epsabs=1e-14, epsrel=1e-13)[0]


class Mollifier:
    """Unit-mass bump at scale k with fixed Gauss-Legendre quadrature.

    The node weights are renormalized so constants are reproduced exactly
    and the differentiated kernel annihilates constants.
    """

    def __init__(self, k: int, nodes: int = 48):
        if k < 1:
            raise ValueError("mollifier scale k must be >= 1")
        self.k = int(k)
        x, w = np.polynomial.legendre.leggauss(nodes)
        half = 0.5 / self.k
        self.t = x * half  # nodes on [-1/(2k), 1/(2k)]
        gw = w * half
        kw = gw * self.k * bump(self.k * self.t) / _BUMP_MASS
        self.weights = kw / kw.sum()
        dw = gw * self.k * self.k * bump_derivative(self.k * self.t) / _BUMP_MASS
        self.dweights = dw - dw.mean()

    def smooth_function(self, f, y):
        """Mollify a callable of one periodic variable at points y."""
        y = np.asarray(y, dtype=float)
        acc = np.zeros_like(y)
        for tj, wj in zip(self.t, self.weights):
            acc = acc + wj * np.asarray(f(y - tj))
        return acc

    def smooth_function_derivative(self, f, y):
        y = np.asarray(y, dtype=float)
        acc = np.zeros_like(y)
        for tj, wj in zip(self.t, self.dweights):
            acc = acc + wj * np.asarray(f(y - tj))
        return acc


@dataclass
class MollifiedGrid:
    """Mollified samples of a leafwise component on a chart grid."""

    k: int
    y: np.ndarray
    b: np.ndarray  # same shape as the input samples
    db_dy: np.ndarray
    db_dx: np.ndarray | None  # present for 2-d (x, y) grids


def mollify(samples: np.ndarray, k: int, *, period: float = 1.0, nodes: int = 48, x_step: float | None = None) -> MollifiedGrid:
    """Mollify grid samples of a(x, y) in the periodic y direction.

    ``samples`` is (n,) for a(y) or (m, n) for a(x_i, y_j) on uniform
    grids; y spans one period.  The grid must resolve the kernel: at
    least 8 samples per kernel width, else a refinement demand is raised.
    The y-derivative uses the differentiated kernel; for 2-d input the
    x-derivative passes under the integral (central differences of the
    mollified grid).
    """
    a = np.asarray(samples, dtype=float)
    n = a.shape[-1]
    dy = period / n
    if dy > 1.0 / (8.0 * k):
        raise GridTooCoarseError(
            f"grid step {dy:.3g} too coarse for scale k={k}; need <= {1.0/(8.0*k):.3g}"
        )
    y = np.arange(n) * dy
    moll = Mollifier(k, nodes)
    yy = np.concatenate([y, [period]])

    def interp_rows(arr):
        ext = np.concatenate([arr, arr[..., :1]], axis=-1)
        return CubicSpline(yy, ext, axis=-1, bc_type="periodic")

    spline = interp_rows(a)
    b = np.zeros_like(a)
    db = np.zeros_like(a)
    for tj, wj, dwj in zip(moll.t, moll.weights, moll.dweights):
        vals = spline((y - tj) % period)
        b += wj * vals
        db += dwj * vals
    db_dx = None
    if a.ndim == 2:
        if x_step is None:
            x_step = 1.0 / a.shape[0]
        db_dx = np.gradient(b, x_step, axis=0)
    return MollifiedGrid(k=k, y=y, b=b, db_dy=db, db_dx=db_dx)


# -- leafwise vector fields ------------------------------------------------


def triangle_wave(u):
    """Piecewise-linear wave, period 1, range [-1, 1], Lipschitz not C^1."""
    return 4.0 * np.abs(np.mod(u, 1.0) - 0.5) - 1.0


class GeodesicField:
    """Exact generating field: unit velocity toward the boundary image of
    the fiber height.  Vectorized over numpy arrays of disk coordinates."""

    def value(self, x, s):
        x = np.asarray(x, dtype=complex)
        target = np.exp(2j * np.pi * np.asarray(s, dtype=float))
        num = target - x
        den = 1.0 - np.conjugate(x) * target
        u = num / den
        u /= np.abs(u)
        return 0.5 * (1.0 - np.abs(x) ** 2) * u


class PerturbedField:
    """Geodesic field with a rough transverse direction-wobble.

    The wobble angle is amp * cos(omega q(x) + pi tri(m s)) with
    q = -log(1 - |x|^2), which advances at unit rate along orbits: every
    leaf sees the full wobble amplitude (uniform quasigeodesic
    constants), while the transverse dependence enters through the
    triangle-wave phase, Lipschitz but not C^1.
    """

    def __init__(self, amp: float = 0.05, m: int = 3, omega: float = 2.0):
        self.amp = amp
        self.m = m
        self.omega = omega
        self.base = GeodesicField()

    def wobble(self, x, s):
        q = -np.log1p(-np.abs(np.asarray(x, dtype=complex)) ** 2)
        return self.amp * np.cos(self.omega * q + np.pi * triangle_wave(self.m * np.asarray(s)))

    def value(self, x, s):
        return self.base.value(x, s) * np.exp(1j * self.wobble(x, s))


class MollifiedField:
    """Fiber-direction mollification of a leafwise field at the visually
    correct transverse scale.

    A fixed smearing width in the fiber coordinate would open up, seen
    from a point flowing toward its target, like e^t, degenerating the
    averaged field; the chart-level construction on the compact quotient
    effectively convolves at the transverse measure scale instead.  Here
    that means scaling the kernel width by 1/P(x, f(s)) (the visual
    kernel), which contracts like e^-t along orbits and keeps the
    mollified field a uniform perturbation of the base field.  The width
    is capped below half a fiber period so the convolution never wraps.
    """

    def __init__(self, base, k: int, nodes: int = 8, width_cap: float = 0.45):
        self.base = base
        self.k = int(k)
        self.moll = Mollifier(k, nodes)
        self.width_cap = width_cap

    def _scale(self, x, s):
        x = np.asarray(x, dtype=complex)
        target = np.exp(2j * np.pi * (np.asarray(s, dtype=float) % 1.0))
        poisson = (1.0 - np.abs(x) ** 2) / np.abs(x - target) ** 2
        return np.minimum(1.0 / poisson, self.width_cap * 2.0 * self.k)

    def value(self, x, s):
        x = np.asarray(x, dtype=complex)
        s = np.asarray(s, dtype=float)
        sig = self._scale(x, s)
        acc = np.zeros(np.broadcast(x, s).shape, dtype=complex)
        for tj, wj in zip(self.moll.t, self.moll.weights):
            acc = acc + wj * self.base.value(x, s - tj * sig)
        return acc

    def s_derivative(self, x, s, h: float = 1e-6):
        return (self.value(x, np.asarray(s) + h) - self.value(x, np.asarray(s) - h)) / (2.0 * h)


def field_c1_distance(field_a, field_b, xs, ss, h: float = 1e-5) -> float:
    """Sup over samples of leafwise value and first-derivative gaps,
    measured in the leafwise metric scale 2/(1-|x|^2)."""
    xs = np.asarray(xs, dtype=complex)
    ss = np.asarray(ss, dtype=float)
    scale = 2.0 / (1.0 - np.abs(xs) ** 2)
    d0 = np.abs(field_a.value(xs, ss) - field_b.value(xs, ss)) * scale
    gaps = [d0.max()]
    for dz in (h, 1j * h):
        da = (field_a.value(xs + dz, ss) - field_a.value(xs - dz, ss)) / (2 * h)
        db = (field_b.value(xs + dz, ss) - field_b.value(xs - dz, ss)) / (2 * h)
        gaps.append((np.abs(da - db) * scale).max())
    return float(max(gaps))


# -- the perturbed flow ----------------------------------------------------


def flow_psi_batch(field, xs, ss, t: float, *, step: float = 1e-3, checkpoints=()):
    """RK4 the leafwise field for time t over arrays of start states.

    Fiber heights are constant along orbits.  Returns the endpoint array
    and the states at the requested checkpoint times.
    """
    xs = np.array(xs, dtype=complex)
    ss = np.asarray(ss, dtype=float)
    n_steps = max(1, math.ceil(abs(t) / step))
    dt = t / n_steps
    remaining = sorted(checkpoints, key=lambda c: abs(c))
    saved = []
    tau = 0.0
    for i in range(n_steps):
        k1 = field.value(xs, ss)
        k2 = field.value(xs + 0.5 * dt * k1, ss)
        k3 = field.value(xs + 0.5 * dt * k2, ss)
        k4 = field.value(xs + dt * k3, ss)
        xs = xs + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        tau += dt
        while remaining and abs(tau) >= abs(remaining[0]) - 1e-12:
            saved.append((remaining.pop(0), xs.copy()))
    for leftover in remaining:  # rounding guard for checkpoints at t
        saved.append((leftover, xs.copy()))
    return xs, saved


def flow_psi(
    bundle: FoliatedBundle,
    field,
    pt: BundlePoint,
    t: float,
    *,
    step: float = 1e-3,
    error_check: bool = False,
    error_tol: float = 1e-8,
) -> BundlePoint:
    """Flow one bundle point along the mollified field for time t.

    With ``error_check`` a step-doubling estimate guards the local error
    (raises StepSizeError beyond ``error_tol``).
    """
    xs, _ = flow_psi_batch(field, [pt.x.z], [pt.p.s], t, step=step)
    if error_check:
        xs2, _ = flow_psi_batch(field, [pt.x.z], [pt.p.s], t, step=0.5 * step)
        if abs(xs2[0] - xs[0]) / 15.0 > error_tol:
            raise StepSizeError(f"integrator error estimate {abs(xs2[0]-xs[0])/15.0:.3g}")
        xs = xs2
    x_end = HyperbolicPoint.from_complex(complex(xs[0]))
    _, w = bundle.group.reduce_to_domain(x_end)
    return BundlePoint(x_end, pt.p, w)


def orbit_geodesic(bundle: FoliatedBundle, pt: BundlePoint) -> Geodesic:
    """The geodesic the unperturbed orbit of pt follows (both endpoints)."""
    xi = bundle.target(pt.p)
    w = complex(pt.x.z)
    fwd = (xi.z - w) / (1.0 - w.conjugate() * xi.z)
    fwd /= abs(fwd)
    # backward endpoint: the antipodal direction -fwd carried back through
    # the disk translation taking 0 to the base point
    z = (-fwd + w) / (1.0 + w.conjugate() * (-fwd))
    return Geodesic(BoundaryPoint.from_complex(z), xi)


def quasigeodesic_radius(
    bundle: FoliatedBundle,
    field,
    pts: list[BundlePoint],
    t_max: float,
    *,
    step: float = 1e-3,
    n_checks: int = 40,
) -> list[float]:
    """Largest distance from each psi-orbit to the geodesic its
    unperturbed orbit would follow (the fellow-traveling radius R);
    all orbits are integrated in one vectorized sweep."""
    geos = [orbit_geodesic(bundle, pt) for pt in pts]
    checks = [t_max * (i + 1) / n_checks for i in range(n_checks)]
    xs0 = np.array([pt.x.z for pt in pts], dtype=complex)
    ss = np.array([pt.p.s for pt in pts], dtype=float)
    _, saved = flow_psi_batch(field, xs0, ss, t_max, step=step, checkpoints=checks)
    worst = [0.0] * len(pts)
    for _, xs in saved:
        for i, geo in enumerate(geos):
            x = HyperbolicPoint.from_complex(complex(xs[i]))
            worst[i] = max(worst[i], point_to_geodesic_distance(x, geo))
    return worst


# -- cone field -------------------------------------------------------------


@dataclass(frozen=True)
class ConeField:
    """Cone of angle beta around the fiber direction against the leaf
    tangent, measured in the piecewise bundle metric."""

    beta: float

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("cone angle beta must be positive")


@dataclass
class ConeCheckResult:
    contained: bool
    width_ratio: float  # sup over the cone boundary of the image aperture / beta
    fiber_expansion: float  # metric growth of the fiber direction
    t: float
    leaf_contraction: float  # largest leafwise singular value of the Jacobian


def smooth_fiber_density(bundle: FoliatedBundle, x, s):
    """Fiber-direction length density of the smooth comparison metric:
    the visual kernel P(x, f(s))^delta.  It interpolates the piecewise
    tile densities within a factor e^(delta diam D) and is smooth in x,
    which keeps cone apertures and expansion rates continuous along
    orbits; on a closed orbit over one period it reproduces the exact
    holonomy factor e^(delta * translation length)."""
    x = np.asarray(x, dtype=complex)
    target = np.exp(2j * np.pi * (np.asarray(s, dtype=float) % 1.0))
    poisson = (1.0 - np.abs(x) ** 2) / np.abs(x - target) ** 2
    return poisson**bundle.delta


def cone_check(
    bundle: FoliatedBundle,
    field,
    pt: BundlePoint,
    t: float,
    cone: ConeField,
    *,
    step: float = 1e-3,
    fd_step: float = 1e-6,
    n_boundary: int = 32,
) -> ConeCheckResult:
    """Propagate the cone at pt through the time-t map of the field.

    The Jacobian of the leafwise time-t map is taken by central finite
    differences; the fiber direction is flow-invariant with coefficient
    one, so its metric growth is the ratio of fiber densities at the
    endpoint and start of the orbit (the holonomy derivative).
    """
    return _cone_data(
        bundle, field, [pt], [t], step=step, fd_step=fd_step, n_boundary=n_boundary, beta=cone.beta
    )[t][0]


def _cone_data(bundle, field, pts, t_checks, *, step, fd_step, n_boundary, beta):
    """Cone propagation data at several times from a single integration."""
    n = len(pts)
    xs0 = np.array([p.x.z for p in pts], dtype=complex)
    ss = np.array([p.p.s for p in pts], dtype=float)
    h = fd_step
    starts = np.concatenate([xs0, xs0 + h, xs0 - h, xs0 + 1j * h, xs0 - 1j * h, xs0, xs0])
    svars = np.concatenate([ss, ss, ss, ss, ss, ss + h, ss - h])
    t_checks = sorted(t_checks)
    _, saved = flow_psi_batch(field, starts, svars, t_checks[-1], step=step, checkpoints=t_checks)
    phis = np.linspace(0.0, 2.0 * np.pi, n_boundary, endpoint=False)
    dens0 = smooth_fiber_density(bundle, xs0, ss)
    leaf_scale0 = 2.0 / (1.0 - np.abs(xs0) ** 2)
    results: dict[float, list[ConeCheckResult]] = {}
    for t_chk, ends in saved:
        e = ends.reshape(7, n)
        base = e[0]
        j_re = (e[1] - e[2]) / (2 * h)
        j_im = (e[3] - e[4]) / (2 * h)
        j_s = (e[5] - e[6]) / (2 * h)
        densT = smooth_fiber_density(bundle, base, ss)
        leaf_scaleT = 2.0 / (1.0 - np.abs(base) ** 2)
        out = []
        for i in range(n):
            expansion = float(densT[i] / dens0[i])
            # cone boundary: unit fiber component, leaf part of norm beta
            u = 1.0 / dens0[i]
            w0 = (beta / leaf_scale0[i]) * np.exp(1j * phis)
            wT = u * j_s[i] + j_re[i] * w0.real + j_im[i] * w0.imag
            u_norm_T = abs(u) * densT[i]
            width = np.abs(wT) * leaf_scaleT[i] / (beta * u_norm_T)
            m = np.array(
                [[j_re[i].real, j_im[i].real], [j_re[i].imag, j_im[i].imag]]
            ) * (leaf_scaleT[i] / leaf_scale0[i])
            sv = np.linalg.svd(m, compute_uv=False)
            out.append(
                ConeCheckResult(
                    contained=bool(width.max() < 1.0),
                    width_ratio=float(width.max()),
                    fiber_expansion=expansion,
                    t=float(t_chk),
                    leaf_contraction=float(sv[0]),
                )
            )
        results[t_chk] = out
    return results


def cone_sweep(bundle, field, pts, t, beta, *, step=1e-3, fd_step=1e-6, n_boundary=32):
    """Vectorized cone check over many sample points (one integration)."""
    return _cone_data(
        bundle, field, pts, [t], step=step, fd_step=fd_step, n_boundary=n_boundary, beta=beta
    )[t]


def cone_sweep_multi(bundle, field, pts, t_checks, beta, *, step=1e-3, fd_step=1e-6, n_boundary=32):
    """Cone checks at several times sharing one integration sweep."""
    return _cone_data(
        bundle, field, pts, t_checks, step=step, fd_step=fd_step, n_boundary=n_boundary, beta=beta
    )


def fiber_expansion_profile(bundle, field, pts, t_checks, *, step=1e-3):
    """Smooth-metric fiber expansion of each orbit at the checkpoint
    times: the raw material for fitting the expansion constants."""
    xs0 = np.array([p.x.z for p in pts], dtype=complex)
    ss = np.array([p.p.s for p in pts], dtype=float)
    dens0 = smooth_fiber_density(bundle, xs0, ss)
    _, saved = flow_psi_batch(field, xs0, ss, max(t_checks), step=step, checkpoints=list(t_checks))
    profile = []
    for t_chk, xs in saved:
        dens = smooth_fiber_density(bundle, xs, ss)
        profile.append((t_chk, np.asarray(dens / dens0)))
    return profile


def shear_bound(bundle, field, pts, t_checks, *, step=1e-3, fd_step=1e-6):
    """Measured bound c4: metric size of the leafwise shear acquired by a
    unit fiber vector (the w_t of the cone argument), at each checkpoint
    time; one integration for all of them."""
    xs0 = np.array([p.x.z for p in pts], dtype=complex)
    ss = np.array([p.p.s for p in pts], dtype=float)
    h = fd_step
    starts = np.concatenate([xs0, xs0, xs0])
    svars = np.concatenate([ss, ss + h, ss - h])
    t_checks = sorted(t_checks)
    _, saved = flow_psi_batch(field, starts, svars, t_checks[-1], step=step, checkpoints=t_checks)
    dens0 = smooth_fiber_density(bundle, xs0, ss)
    out = []
    for _, ends in saved:
        e = ends.reshape(3, len(pts))
        j_s = (e[1] - e[2]) / (2 * h)
        densT = smooth_fiber_density(bundle, e[0], ss)
        leaf_scaleT = 2.0 / (1.0 - np.abs(e[0]) ** 2)
        out.extend((np.abs(j_s / dens0) * leaf_scaleT / (densT / dens0)).tolist())
    return out
