"""Periodic-orbit census across fiberwise covers.

For every conjugacy class of short words the lifted circle map of a
suitable power acquires fixed points on R/kZ, each carrying a closed
orbit of the flow; counting them per free-homotopy class exhibits the
k-fold multiplication that distinguishes the flows on the covers.  The
free-homotopy class of an orbit is read off its tile-crossing word over
one period, and class words and their inverses pair up along the
alternation of attracting and repelling fixed points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .circle_action import CircleAction, CirclePoint
from .flow import FoliatedBundle, orbit_closure_gap, periodic_orbit
from .geometry import TWO_PI, classify_and_fixed_points
from .surface_group import SurfaceGroup, Word, surface_conjugacy_key

CENSUS_MAX_WORD_LEN = 6
CENSUS_MAX_COVER = 8


class CensusBudgetError(ValueError):
    pass


@dataclass
class CensusOrbit:
    fiber_point: CirclePoint
    kind: str  # attracting | repelling (as a fixed point of the lifted map)
    period: float
    class_key: tuple[int, ...]  # free-homotopy class of the closed orbit


@dataclass
class CensusEntry:
    class_key: tuple[int, ...]
    representative: Word
    cover: int
    exponent: int
    displacement: int
    translation_length: float
    count: int
    orbits: list[CensusOrbit] = field(default_factory=list)
    closure_gap: float = 0.0

    def counts_by_class(self) -> dict[tuple[int, ...], int]:
        out: dict[tuple[int, ...], int] = {}
        for orb in self.orbits:
            out[orb.class_key] = out.get(orb.class_key, 0) + 1
        return out


def minimal_exponent(displacement: int, k: int) -> int:
    """Smallest j >= 1 with j * displacement divisible by k."""
    return k // math.gcd(k, abs(displacement) % k) if displacement % k else 1


def orbit_census(
    group: SurfaceGroup,
    k: int,
    max_word_len: int,
    *,
    bundle: FoliatedBundle | None = None,
    flow_step: float = 0.2,
) -> list[CensusEntry]:
    """Census of closed orbits attached to conjugacy classes of words up
    to the length budget, on the k-fold fiberwise cover.

    For each class representative w, the smallest exponent j making the
    lifted displacement divisible by k is found, the fixed points of the
    lifted w^j are located, and one period of the orbit over each is
    assembled; the crossing word determines its free-homotopy class.
    The M-part of each orbit is independent of the fiber lift, so only
    the two base orbits (toward either axis endpoint) are flowed.
    """
    if max_word_len > CENSUS_MAX_WORD_LEN:
        raise CensusBudgetError(f"census word length capped at {CENSUS_MAX_WORD_LEN}")
    if k > CENSUS_MAX_COVER:
        raise CensusBudgetError(f"census cover index capped at {CENSUS_MAX_COVER}")
    if bundle is None:
        bundle = FoliatedBundle(group, k)
    base = FoliatedBundle(group, 1) if k != 1 else bundle
    action = bundle.action

    entries = []
    for w in group.conjugacy_classes(max_word_len):
        cls = classify_and_fixed_points(group.evaluate(w))
        d = base.action.rotation_displacement(w)
        j = minimal_exponent(d, k)
        power = w**j
        fps = action.fixed_points(power, displacement=j * d)
        # one period of the orbit over each boundary fixed point, at k = 1;
        # the start point is slid along the axis so that period endpoints
        # avoid tiling vertices (symmetric axes can run through them)
        angle_att = cls.fixed[0].theta / TWO_PI % 1.0
        angle_rep = cls.fixed[1].theta / TWO_PI % 1.0
        seg_att = periodic_orbit(
            base, w, CirclePoint.of(angle_att, 1),
            step=flow_step, refine_crossings=False, start_offset=0.2309,
        )
        seg_rep = periodic_orbit(
            base, w, CirclePoint.of(angle_rep, 1),
            step=flow_step, refine_crossings=False, start_offset=0.2309,
        )
        gap = max(orbit_closure_gap(base, seg_att), orbit_closure_gap(base, seg_rep))
        key_att = surface_conjugacy_key(seg_att.crossing_word() ** j)
        key_rep = surface_conjugacy_key(seg_rep.crossing_word() ** j)
        # sanity: a crossing word must carry the translation length of the class
        for seg, direction in ((seg_att, "attracting"), (seg_rep, "repelling")):
            tr = abs(group.evaluate(seg.crossing_word()).trace)
            if abs(tr - abs(group.evaluate(w).trace)) > 1e-6 * max(1.0, tr):
                raise CensusBudgetError(
                    f"crossing word of {w} ({direction}) has wrong translation length"
                )
        orbits = []
        for pnt, kind in fps:
            base_angle = pnt.s % 1.0
            toward_att = _circ_gap(base_angle, angle_att) <= _circ_gap(base_angle, angle_rep)
            orbits.append(
                CensusOrbit(
                    fiber_point=pnt,
                    kind=kind,
                    period=j * cls.translation_length,
                    class_key=key_att if toward_att else key_rep,
                )
            )
        entries.append(
            CensusEntry(
                class_key=surface_conjugacy_key(w),
                representative=w,
                cover=k,
                exponent=j,
                displacement=d,
                translation_length=cls.translation_length,
                count=len(orbits),
                orbits=orbits,
                closure_gap=gap,
            )
        )
    return entries


def _circ_gap(a: float, b: float) -> float:
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


@dataclass
class InversePair:
    class_key: tuple[int, ...]
    cover: int
    first: CensusOrbit
    second: CensusOrbit
    keys_inverse: bool


def homotopic_inverse_pairs(entries: list[CensusEntry]) -> list[InversePair]:
    """Pair consecutive fixed points within each census entry and check
    the paired orbits lie in mutually inverse free-homotopy classes."""
    pairs = []
    for e in entries:
        orbs = sorted(e.orbits, key=lambda o: o.fiber_point.s)
        if not orbs:
            continue
        # rotate so the list starts at an attracting point
        start = next((i for i, o in enumerate(orbs) if o.kind == "attracting"), 0)
        orbs = orbs[start:] + orbs[:start]
        for i in range(0, len(orbs) - 1, 2):
            a, b = orbs[i], orbs[i + 1]
            inv = surface_conjugacy_key(Word(a.class_key).inverse())
            pairs.append(
                InversePair(
                    class_key=e.class_key,
                    cover=e.cover,
                    first=a,
                    second=b,
                    keys_inverse=(inv == b.class_key),
                )
            )
    return pairs


@dataclass
class ScalingRow:
    class_key: tuple[int, ...]
    base_count: int
    counts: dict[int, int]
    exact: bool


def census_scaling(group: SurfaceGroup, ks: list[int], max_word_len: int) -> list[ScalingRow]:
    """Join censuses over the covers on the class key and check the
    count-multiplication law count(k) = k * count(1)."""
    censuses = {k: orbit_census(group, k, max_word_len) for k in sorted(set(ks) | {1})}
    base = {e.class_key: e for e in censuses[1]}
    rows = []
    for key, e1 in sorted(base.items()):
        counts = {}
        exact = True
        for k, entries in censuses.items():
            ek = next((e for e in entries if e.class_key == key), None)
            counts[k] = ek.count if ek else 0
            if ek is None or ek.count != k * e1.count:
                exact = False
        rows.append(ScalingRow(class_key=key, base_count=e1.count, counts=counts, exact=exact))
    return rows
