"""Boundary circle action of the surface group and its fiberwise lifts.

The base action is the Mobius action on the ideal circle, in the
coordinate s = angle / 2pi.  Each generator letter gets the monotone
lift of its circle map to R that fixes every integer translate of its
attracting fixed point; words act by composing letter lifts, which is
exact under free reduction because a letter's lift and its inverse
letter's lift are inverse functions.  On R/kZ this gives the k-fold
fiberwise lift; it descends to a group action precisely when the
relator's integer displacement (the Euler number of the action, here
+-2) vanishes mod k.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import BoundaryPoint, TWO_PI, classify_and_fixed_points
from .surface_group import LETTERS, SurfaceGroup, Word, WordError


class CircleActionError(ValueError):
    pass


@dataclass(frozen=True)
class CirclePoint:
    """Point of R/kZ, canonical coordinate s in [0, k)."""

    s: float
    k: int = 1

    @staticmethod
    def of(s: float, k: int = 1) -> "CirclePoint":
        return CirclePoint(s % k, k)


@dataclass(frozen=True)
class EquivariantMap:
    """The k-to-one covering R/kZ -> ideal circle, s -> angle 2 pi (s mod 1)."""

    k: int

    def __call__(self, p: CirclePoint) -> BoundaryPoint:
        return BoundaryPoint.from_angle(TWO_PI * (p.s % 1.0))

    def boundary_coordinate(self, p: CirclePoint) -> float:
        return p.s % 1.0

    def sections(self, xi: BoundaryPoint) -> list[CirclePoint]:
        base = (xi.theta / TWO_PI) % 1.0
        return [CirclePoint.of(base + j, self.k) for j in range(self.k)]


@dataclass
class _LetterLift:
    alpha: complex
    beta: complex
    s0: float  # attracting fixed point of the letter, in [0, 1)

    _SNAP = 1e-10  # window around the anchor where the mod-1 branch may misround

    def raw(self, s: float) -> float:
        z = cmath.exp(2j * math.pi * s)
        w = (self.alpha * z + self.beta) / (self.beta.conjugate() * z + self.alpha.conjugate())
        return (cmath.phase(w) / TWO_PI) % 1.0

    def __call__(self, s: float) -> float:
        # branch anchored at the attracting fixed point: the image offset
        # r = (raw - s0) mod 1 wraps exactly at the anchor lifts, where
        # rounding can flip it by +-1; snap it there (phi ~ 0 forces r ~ 0,
        # a single letter distorts by at most e^len < 10)
        phi = (s - self.s0) % 1.0
        r = (self.raw(s) - self.s0) % 1.0
        if phi < self._SNAP and r > 0.5:
            r -= 1.0
        elif phi > 1.0 - self._SNAP and r < 0.5:
            r += 1.0
        return math.floor(s - self.s0) + self.s0 + r

    def vec(self, s: np.ndarray) -> np.ndarray:
        z = np.exp(2j * np.pi * s)
        w = (self.alpha * z + self.beta) / (np.conjugate(self.beta) * z + np.conjugate(self.alpha))
        phi = (s - self.s0) % 1.0
        r = ((np.angle(w) / TWO_PI) % 1.0 - self.s0) % 1.0
        r = np.where((phi < self._SNAP) & (r > 0.5), r - 1.0, r)
        r = np.where((phi > 1.0 - self._SNAP) & (r < 0.5), r + 1.0, r)
        return np.floor(s - self.s0) + self.s0 + r

    def derivative(self, s: float) -> float:
        z = cmath.exp(2j * math.pi * s)
        return 1.0 / abs(self.beta.conjugate() * z + self.alpha.conjugate()) ** 2


class CircleAction:
    """The boundary action lifted to the k-fold cover R/kZ."""

    def __init__(self, group: SurfaceGroup, k: int = 1):
        if k < 1:
            raise CircleActionError("cover index k must be a positive integer")
        self.group = group
        self.k = int(k)
        self.fmap = EquivariantMap(self.k)
        self.lifts: dict[int, _LetterLift] = {}
        for l in LETTERS:
            g = group.gens[l]
            cls = classify_and_fixed_points(g)
            alpha, beta = g.su11()
            self.lifts[l] = _LetterLift(alpha, beta, (cls.fixed[0].theta / TWO_PI) % 1.0)
        self.relator_displacement = self.rotation_displacement(group.relator)

    @property
    def is_group_action(self) -> bool:
        """True when the lifted letters define an action of the surface
        group on R/kZ, i.e. the relator acts as the identity; fails for
        k not dividing the Euler number of the boundary action."""
        return self.relator_displacement % self.k == 0

    # -- lifts ----------------------------------------------------------

    def lift(self, w: Word, s: float) -> float:
        for l in reversed(w.letters):
            s = self.lifts[l](s)
        return s

    def lift_vec(self, w: Word, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        for l in reversed(w.letters):
            s = self.lifts[l].vec(s)
        return s

    def lift_derivative(self, w: Word, s: float) -> float:
        d = 1.0
        for l in reversed(w.letters):
            d *= self.lifts[l].derivative(s)
            s = self.lifts[l](s)
        return d

    def act(self, w: Word, p: CirclePoint) -> CirclePoint:
        if p.k != self.k:
            raise CircleActionError(f"point lives on R/{p.k}Z, action on R/{self.k}Z")
        return CirclePoint.of(self.lift(w, p.s), self.k)

    # -- displacement and fixed points -----------------------------------

    def rotation_displacement(self, w: Word) -> int:
        """Net integer translation of the word's lift, read off at a fixed
        point of the underlying circle map."""
        if len(w) == 0:
            return 0
        cls = classify_and_fixed_points(self.group.evaluate(w))
        if cls.kind == "identity":
            anchor = 0.0  # lift is a pure integer translation; any anchor works
        elif not cls.fixed:
            raise CircleActionError(f"word {w} acts without boundary fixed points")
        else:
            anchor = (cls.fixed[0].theta / TWO_PI) % 1.0
        shift = self.lift(w, anchor) - anchor
        d = round(shift)
        if abs(shift - d) > 1e-6:
            raise CircleActionError(f"lift displacement {shift} of {w} is not near an integer")
        return int(d)

    def fixed_points(
        self,
        w: Word,
        *,
        displacement: int | None = None,
        grid_per_unit: int = 2048,
        refine: float = 1e-12,
    ) -> list[tuple[CirclePoint, str]]:
        """All fixed points of the lifted word on R/kZ with their kinds,
        located by sign-change bisection of the lift displacement.
        Empty when the integer displacement obstructs fixed points."""
        if len(w) == 0:
            raise CircleActionError("fixed points of the empty word are everywhere")
        d = self.rotation_displacement(w) if displacement is None else displacement
        if d % self.k != 0:
            return []
        n = grid_per_unit * self.k
        grid = np.linspace(0.0, self.k, n, endpoint=False)
        h = self.lift_vec(w, grid) - grid - d
        lo_idx = np.nonzero(np.sign(h) != np.sign(np.roll(h, -1)))[0]
        roots: list[float] = []
        kinds: list[str] = []
        step = self.k / n
        for i in lo_idx:
            a, fa = grid[i], h[i]
            b = a + step
            fb = h[(i + 1) % n]
            if fa == 0.0:
                roots.append(float(a))
                kinds.append("attracting" if fb < 0 else "repelling")
                continue
            for _ in range(64):
                m = 0.5 * (a + b)
                fm = self.lift(w, m) - m - d
                if b - a < refine:
                    break
                if (fm > 0) == (fa > 0):
                    a, fa = m, fm
                else:
                    b, fb = m, fm
            roots.append(0.5 * (a + b) % self.k)
            kinds.append("attracting" if fa > 0 else "repelling")
        # dedupe (wrap duplicates + rounding glitches near a root)
        out: list[tuple[CirclePoint, str]] = []
        for r, kind in sorted(zip(roots, kinds)):
            if out and abs(r - out[-1][0].s) < 1e-9:
                continue
            out.append((CirclePoint.of(r, self.k), kind))
        if len(out) >= 2 and (out[0][0].s + self.k) - out[-1][0].s < 1e-9:
            out.pop()
        return out

    # -- minimality probe -------------------------------------------------

    def minimality_probe(self, p0: CirclePoint, word_len: int, eps: float) -> dict:
        """Largest gap left by the orbit of p0 under all words of length
        <= word_len; a small gap is evidence (not proof) of minimality."""
        if word_len > 8:
            raise WordError("minimality probe capped at word length 8")
        pts = [p0.s % self.k]
        frontier = [((), p0.s)]
        for _ in range(word_len):
            nxt = []
            for tail, s in frontier:
                for l in LETTERS:
                    if tail and tail[0] == -l:
                        continue
                    s2 = self.lifts[l](s) % self.k
                    pts.append(s2)
                    nxt.append(((l,) + tail, s2))
            frontier = nxt
        arr = np.sort(np.asarray(pts))
        if len(arr) == 1:
            max_gap = float(self.k)
        else:
            gaps = np.diff(arr)
            max_gap = float(max(gaps.max(), arr[0] + self.k - arr[-1]))
        return {"max_gap": max_gap, "passed": bool(max_gap < eps), "n_points": len(arr)}
