"""Poincare-disk kernel: points, ideal circle, PSL(2,R) isometries.

Computations run in the upper-half-plane matrix picture (real 2x2,
det 1), conjugated once by a fixed Cayley map to the disk for storage
and rendering.  All closed forms here (distance, Busemann cocycle,
visual densities, geodesic flow) are exact up to floating error; no
ray limits or quadrature.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi

# tolerance tiers: algebraic identities vs composed geometric ones
ATOL_ALG = 1e-12
ATOL_GEO = 1e-9


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class HyperbolicPoint:
    """Point of the hyperbolic plane, unit-disk coordinates (u, v)."""

    u: float
    v: float

    def __post_init__(self):
        if self.u * self.u + self.v * self.v >= 1.0:
            raise GeometryError(f"({self.u}, {self.v}) is not inside the unit disk")

    @property
    def z(self) -> complex:
        return complex(self.u, self.v)

    @staticmethod
    def from_complex(z: complex) -> "HyperbolicPoint":
        return HyperbolicPoint(z.real, z.imag)


ORIGIN = HyperbolicPoint(0.0, 0.0)


@dataclass(frozen=True)
class BoundaryPoint:
    """Ideal point on the circle at infinity, angle in [0, 2*pi)."""

    theta: float

    @staticmethod
    def from_angle(theta: float) -> "BoundaryPoint":
        return BoundaryPoint(theta % TWO_PI)

    @staticmethod
    def from_complex(z: complex) -> "BoundaryPoint":
        return BoundaryPoint(cmath.phase(z) % TWO_PI)

    @property
    def z(self) -> complex:
        return cmath.exp(1j * self.theta)


@dataclass(frozen=True)
class Geodesic:
    """Oriented geodesic, from ideal point ``neg`` to ideal point ``pos``."""

    neg: BoundaryPoint
    pos: BoundaryPoint

    def __post_init__(self):
        gap = (self.pos.theta - self.neg.theta) % TWO_PI
        if min(gap, TWO_PI - gap) < 1e-14:
            raise GeometryError("geodesic endpoints coincide")


def _canonical_sign(a, b, c, d):
    for x in (a, b, c, d):
        if x != 0.0:
            if x < 0.0:
                return -a, -b, -c, -d
            return a, b, c, d
    raise GeometryError("zero matrix is not an isometry")


@dataclass(frozen=True)
class Isometry:
    """Orientation-preserving isometry as an upper-half-plane matrix.

    Entries are kept with det = 1 and sign-canonicalized (first nonzero
    entry positive), identifying M with -M per PSL(2,R).
    """

    a: float
    b: float
    c: float
    d: float

    @staticmethod
    def from_matrix(a: float, b: float, c: float, d: float) -> "Isometry":
        det = a * d - b * c
        if det <= 0:
            raise GeometryError(f"matrix determinant {det} must be positive")
        s = 1.0 / math.sqrt(det)
        return Isometry(*_canonical_sign(a * s, b * s, c * s, d * s))

    @staticmethod
    def identity() -> "Isometry":
        return Isometry(1.0, 0.0, 0.0, 1.0)

    def __matmul__(self, other: "Isometry") -> "Isometry":
        # No determinant renormalization here: reading det off a product
        # with large entries is ill-conditioned and would inject noise,
        # while det-1 factors keep the product det 1 to rounding order.
        return Isometry(
            *_canonical_sign(
                self.a * other.a + self.b * other.c,
                self.a * other.b + self.b * other.d,
                self.c * other.a + self.d * other.c,
                self.c * other.b + self.d * other.d,
            )
        )

    def inverse(self) -> "Isometry":
        return Isometry(*_canonical_sign(self.d, -self.b, -self.c, self.a))

    @property
    def trace(self) -> float:
        return self.a + self.d

    def su11(self) -> tuple[complex, complex]:
        """Disk-model form: z -> (alpha z + beta) / (conj(beta) z + conj(alpha)).

        alpha, beta come from conjugating by the Cayley map z -> (z-i)/(z+i);
        |alpha|^2 - |beta|^2 = 1.
        """
        alpha = complex(0.5 * (self.a + self.d), 0.5 * (self.b - self.c))
        beta = complex(0.5 * (self.a - self.d), -0.5 * (self.b + self.c))
        return alpha, beta

    def is_identity(self, tol: float = 1e-9) -> bool:
        return (
            abs(self.a - 1.0) < tol
            and abs(self.d - 1.0) < tol
            and abs(self.b) < tol
            and abs(self.c) < tol
        )


def apply_isometry(g: Isometry, x: HyperbolicPoint) -> HyperbolicPoint:
    alpha, beta = g.su11()
    w = x.z
    return HyperbolicPoint.from_complex((alpha * w + beta) / (beta.conjugate() * w + alpha.conjugate()))


def apply_boundary(g: Isometry, xi: BoundaryPoint) -> BoundaryPoint:
    alpha, beta = g.su11()
    z = xi.z
    return BoundaryPoint.from_complex((alpha * z + beta) / (beta.conjugate() * z + alpha.conjugate()))


def boundary_derivative(g: Isometry, xi: BoundaryPoint) -> float:
    """|d theta' / d theta| of the boundary circle map of g at xi."""
    alpha, beta = g.su11()
    return 1.0 / abs(beta.conjugate() * xi.z + alpha.conjugate()) ** 2


def hyperbolic_distance(x: HyperbolicPoint, y: HyperbolicPoint) -> float:
    w1, w2 = x.z, y.z
    return 2.0 * math.atanh(abs(w1 - w2) / abs(1.0 - w1.conjugate() * w2))


def _log_poisson(w: complex, xi: complex) -> float:
    # log of (1-|w|^2)/|w-xi|^2, the visual (Poisson) kernel seen from w
    one_minus = (1.0 - abs(w)) * (1.0 + abs(w))
    return math.log(one_minus) - 2.0 * math.log(abs(w - xi))

def busemann(xi: BoundaryPoint, x: HyperbolicPoint, y: HyperbolicPoint) -> float:
    """Signed horospherical distance at xi; positive when y is closer to xi.

    Closed form log(P(y, xi) / P(x, xi)) via the Poisson kernel, so the
    cocycle identity holds to rounding error.
    """
    z = xi.z
    return _log_poisson(y.z, z) - _log_poisson(x.z, z)


def busemann_translates(xi: BoundaryPoint, g: Isometry, h: Isometry) -> float:
    """busemann(xi, g(origin), h(origin)) without cancellation at deep points.

    For a disk-model matrix, 1 - |g(0)|^2 = 1/|alpha|^2 exactly, giving
    log P(g(0), xi) = -2 log |beta - conj(alpha) xi|.
    """
    z = xi.z
    ga, gb = g.su11()
    ha, hb = h.su11()
    return 2.0 * (math.log(abs(gb - ga.conjugate() * z)) - math.log(abs(hb - ha.conjugate() * z)))


def visual_density_ratio(
    x: HyperbolicPoint, y: HyperbolicPoint, xi: BoundaryPoint, delta: float = 1.0
) -> float:
    """d(visual measure at x)/d(visual measure at y) evaluated at xi."""
    return math.exp(-delta * busemann(xi, x, y))


def flow_toward(x: HyperbolicPoint, xi: BoundaryPoint, t: float) -> HyperbolicPoint:
    """Point at signed arc length t from x along the geodesic aimed at xi."""
    w = x.z
    target = (xi.z - w) / (1.0 - w.conjugate() * xi.z)
    target /= abs(target)
    moved = math.tanh(0.5 * t) * target
    return HyperbolicPoint.from_complex((moved + w) / (1.0 + w.conjugate() * moved))


def flow_direction(x: HyperbolicPoint, xi: BoundaryPoint) -> complex:
    """Euclidean velocity at x of the unit-speed flow toward xi."""
    w = x.z
    target = (xi.z - w) / (1.0 - w.conjugate() * xi.z)
    target /= abs(target)
    return 0.5 * (1.0 - abs(w) ** 2) * target


@dataclass(frozen=True)
class IsometryClass:
    kind: str  # "hyperbolic" | "parabolic" | "elliptic" | "identity"
    fixed: tuple[BoundaryPoint, ...]  # ordered (attracting, repelling) if hyperbolic
    translation_length: float


def classify_and_fixed_points(g: Isometry, tol: float = 1e-9) -> IsometryClass:
    if g.is_identity(tol):
        return IsometryClass("identity", (), 0.0)
    tr = abs(g.trace)
    alpha, beta = g.su11()
    if tr > 2.0 + tol:
        # roots of conj(beta) z^2 + (conj(alpha)-alpha) z - beta on |z| = 1
        disc = math.sqrt(tr * tr - 4.0)
        bconj = beta.conjugate()
        ia = alpha - alpha.conjugate()  # purely imaginary
        roots = [(ia + disc) / (2.0 * bconj), (ia - disc) / (2.0 * bconj)]
        roots = [r / abs(r) for r in roots]
        ders = [1.0 / abs(bconj * r + alpha.conjugate()) ** 2 for r in roots]
        if ders[0] > ders[1]:
            roots.reverse()
        return IsometryClass(
            "hyperbolic",
            (BoundaryPoint.from_complex(roots[0]), BoundaryPoint.from_complex(roots[1])),
            2.0 * math.acosh(0.5 * tr),
        )
    if tr > 2.0 - tol:
        root = (alpha - alpha.conjugate()) / (2.0 * beta.conjugate())
        return IsometryClass("parabolic", (BoundaryPoint.from_complex(root / abs(root)),), 0.0)
    return IsometryClass("elliptic", (), 0.0)


def translation_length(g: Isometry) -> float:
    tr = abs(g.trace)
    if tr <= 2.0:
        return 0.0
    return 2.0 * math.acosh(0.5 * tr)


def axis_nearest_origin(g: Isometry) -> HyperbolicPoint:
    """Point on the axis of a hyperbolic g closest to the disk center."""
    cls = classify_and_fixed_points(g)
    if cls.kind != "hyperbolic":
        raise GeometryError(f"{cls.kind} isometry has no axis")
    u, v = cls.fixed[0].z, cls.fixed[1].z
    s = u + v
    if abs(s) < 1e-12:
        return ORIGIN  # axis is a diameter
    e = s / abs(s)
    dot = (u.conjugate() * v).real
    mu = abs(s) / (1.0 + dot)
    return HyperbolicPoint.from_complex((mu - math.sqrt(mu * mu - 1.0)) * e)


def point_to_geodesic_distance(x: HyperbolicPoint, geo: Geodesic) -> float:
    """Distance from x to the full geodesic with the given ideal endpoints."""
    # rotate so that neither endpoint sits near the Cayley pole at angle 0
    for shift in (0.0, 0.25 * math.pi, 0.5 * math.pi, 0.75 * math.pi):
        t1 = (geo.neg.theta + shift) % TWO_PI
        t2 = (geo.pos.theta + shift) % TWO_PI
        if min(t1, TWO_PI - t1) > 0.1 and min(t2, TWO_PI - t2) > 0.1:
            break
    rot = cmath.exp(1j * shift)
    cayley = lambda w: 1j * (1.0 + w) / (1.0 - w)  # disk -> upper half plane
    p = cayley(rot * geo.neg.z).real
    q = cayley(rot * geo.pos.z).real
    z = cayley(rot * x.z)
    zz = (z - p) / (z - q)
    if zz.imag < 0:
        zz = -zz
    return math.asinh(abs(zz.real) / zz.imag)


def foot_on_geodesic(x: HyperbolicPoint, geo: Geodesic) -> HyperbolicPoint:
    """Orthogonal projection of x onto the geodesic."""
    for shift in (0.0, 0.25 * math.pi, 0.5 * math.pi, 0.75 * math.pi):
        t1 = (geo.neg.theta + shift) % TWO_PI
        t2 = (geo.pos.theta + shift) % TWO_PI
        if min(t1, TWO_PI - t1) > 0.1 and min(t2, TWO_PI - t2) > 0.1:
            break
    rot = cmath.exp(1j * shift)
    cayley = lambda w: 1j * (1.0 + w) / (1.0 - w)
    inv_cayley = lambda z: (z - 1j) / (z + 1j)
    p = cayley(rot * geo.neg.z).real
    q = cayley(rot * geo.pos.z).real
    z = cayley(rot * x.z)
    zz = (z - p) / (z - q)
    foot = 1j * abs(zz)
    if zz.imag < 0:
        # the real Mobius z -> (z-p)/(z-q) had negative det; invert its negation
        w = (q * foot + p) / (foot + 1.0)
    else:
        w = (q * foot - p) / (foot - 1.0)
    return HyperbolicPoint.from_complex(inv_cayley(w) / rot)
