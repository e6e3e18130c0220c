"""Deterministic file outputs: CSV tables and disk-model SVG pictures.

All writers emit byte-identical files for identical inputs: fixed float
formatting, fixed column orders, newline-terminated lines.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

from .census import CensusEntry
from .circle_action import CirclePoint
from .flow import FoliatedBundle, OrbitSegment
from .geometry import BoundaryPoint, HyperbolicPoint, flow_toward
from .surface_group import Word

FLOAT_FMT = ".12g"


def _f(x: float) -> str:
    return format(float(x), FLOAT_FMT)


def write_csv(path: Path, header: list[str], rows: list[tuple]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    Path(path).write_text(buf.getvalue())


TRACE_HEADER = ["t", "u", "v", "p", "domain_word", "hol_derivative", "bound_slack"]


def trace_rows(bundle: FoliatedBundle, seg: OrbitSegment) -> list[tuple]:
    from .flow import holonomy_derivative

    rows = []
    start = seg.start
    for t, bp in seg.samples:
        rec = holonomy_derivative(bundle, start, t)
        rows.append(
            (
                _f(t),
                _f(bp.x.u),
                _f(bp.x.v),
                _f(bp.p.s),
                str(bp.domain_word),
                _f(rec.derivative),
                _f(rec.bound_check),
            )
        )
    return rows


def read_trace(path: Path) -> list[tuple[float, float, float, float, Word]]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            out.append(
                (
                    float(row["t"]),
                    float(row["u"]),
                    float(row["v"]),
                    float(row["p"]),
                    Word.parse(row["domain_word"]) if row["domain_word"] != "e" else Word.identity(),
                )
            )
    return out


CENSUS_HEADER = [
    "class",
    "cover",
    "exponent",
    "displacement",
    "translation_length",
    "count",
    "fiber_points",
    "kinds",
    "periods",
    "orbit_classes",
]


def census_rows(entries: list[CensusEntry]) -> list[tuple]:
    rows = []
    for e in sorted(entries, key=lambda e: (e.cover, e.class_key)):
        orbs = sorted(e.orbits, key=lambda o: o.fiber_point.s)
        rows.append(
            (
                str(Word(e.class_key)),
                str(e.cover),
                str(e.exponent),
                str(e.displacement),
                _f(e.translation_length),
                str(e.count),
                ";".join(_f(o.fiber_point.s) for o in orbs),
                ";".join(o.kind for o in orbs),
                ";".join(_f(o.period) for o in orbs),
                ";".join(str(Word(o.class_key)) for o in orbs),
            )
        )
    return rows


ZETA_HEADER = ["s", "zeta"]
RN_HEADER = ["word", "s", "rn_derivative"]


def rn_grid_rows(bundle: FoliatedBundle, words: list[Word], n_grid: int) -> list[tuple]:
    rows = []
    for w in words:
        for i in range(n_grid):
            s = bundle.k * i / n_grid
            rn = bundle.measure.rn_derivative(w, CirclePoint.of(s, bundle.k))
            rows.append((str(w), _f(s), _f(rn)))
    return rows


# -- SVG ---------------------------------------------------------------------

_VIEW = 1000.0
_RADIUS = 470.0


def _xy(z: complex) -> tuple[float, float]:
    return (_VIEW / 2 + _RADIUS * z.real, _VIEW / 2 - _RADIUS * z.imag)


def _polyline(points, stroke, width=1.5, dashed=False) -> str:
    pts = " ".join(f"{x:.3f},{y:.3f}" for x, y in points)
    dash = ' stroke-dasharray="6,4"' if dashed else ""
    return (
        f'<polyline points="{pts}" fill="none" stroke="{stroke}" '
        f'stroke-width="{width}"{dash}/>'
    )


def _geodesic_points(a: HyperbolicPoint, b: HyperbolicPoint, n: int = 24):
    # sample along the geodesic segment between two interior points
    from .geometry import hyperbolic_distance

    d = hyperbolic_distance(a, b)
    if d < 1e-12:
        return [_xy(a.z), _xy(b.z)]
    xi = _boundary_through(a, b)
    return [_xy(flow_toward(a, xi, d * i / n).z) for i in range(n + 1)]


def _boundary_through(a: HyperbolicPoint, b: HyperbolicPoint) -> BoundaryPoint:
    """Forward ideal endpoint of the geodesic from a through b."""
    u = (b.z - a.z) / (1.0 - a.z.conjugate() * b.z)
    u /= abs(u)
    return BoundaryPoint.from_complex((u + a.z) / (1.0 + a.z.conjugate() * u))


def render_disk_svg(
    bundle: FoliatedBundle,
    *,
    orbit: OrbitSegment | None = None,
    target: BoundaryPoint | None = None,
    leaves_at: list[CirclePoint] | None = None,
    n_leaf_geodesics: int = 9,
) -> str:
    """Disk-model picture: ideal circle, the fundamental octagon, optional
    leafwise geodesic fans (the orbit foliation on chosen fiber heights),
    an orbit trace, and its target ideal point."""
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_VIEW:.0f}" height="{_VIEW:.0f}" '
        f'viewBox="0 0 {_VIEW:.0f} {_VIEW:.0f}">',
        f'<rect width="{_VIEW:.0f}" height="{_VIEW:.0f}" fill="white"/>',
        f'<circle cx="{_VIEW/2:.1f}" cy="{_VIEW/2:.1f}" r="{_RADIUS:.1f}" fill="none" '
        f'stroke="black" stroke-width="2"/>',
    ]
    # fundamental octagon
    verts = bundle.group.domain.vertices
    for j in range(8):
        pts = _geodesic_points(verts[j], verts[(j + 1) % 8])
        parts.append(_polyline(pts, "#444444", 1.2))
    # leafwise geodesic fans toward the target of each requested height
    for q in leaves_at or []:
        xi = bundle.target(q)
        for i in range(n_leaf_geodesics):
            theta = xi.theta + math.pi * (i + 1) / (n_leaf_geodesics + 1) + math.pi / 2
            eta = BoundaryPoint.from_angle(theta)
            pts = []
            for j in range(33):
                t = -8.0 + 16.0 * j / 32
                mid = flow_toward(_midpoint_of(eta, xi), xi, t)
                pts.append(_xy(mid.z))
            parts.append(_polyline(pts, "#88aadd", 0.8))
    # orbit trace
    if orbit is not None and orbit.samples:
        pts = [_xy(bp.x.z) for _, bp in orbit.samples]
        parts.append(_polyline(pts, "#cc3333", 2.0))
        x0, y0 = pts[0]
        parts.append(f'<circle cx="{x0:.3f}" cy="{y0:.3f}" r="4" fill="#cc3333"/>')
    if target is not None:
        tx, ty = _xy(target.z)
        parts.append(f'<circle cx="{tx:.3f}" cy="{ty:.3f}" r="6" fill="#ff8800"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _midpoint_of(eta: BoundaryPoint, xi: BoundaryPoint) -> HyperbolicPoint:
    """Point of the geodesic (eta, xi) nearest the disk center."""
    u, v = eta.z, xi.z
    s = u + v
    if abs(s) < 1e-9:
        return HyperbolicPoint(0.0, 0.0)
    e = s / abs(s)
    mu = abs(s) / (1.0 + (u.conjugate() * v).real)
    return HyperbolicPoint.from_complex((mu - math.sqrt(max(mu * mu - 1.0, 0.0))) * e)
