"""Genus-2 Fuchsian group of the regular hyperbolic octagon.

Side pairings of the regular octagon with interior angles pi/4 generate
a discrete cocompact group with a single relation [a1,b1][a2,b2] = 1.
Words are tuples of nonzero letters in {+-1..+-4} (sign = exponent).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterator

from .geometry import (
    ORIGIN,
    GeometryError,
    HyperbolicPoint,
    Isometry,
    apply_isometry,
    classify_and_fixed_points,
    hyperbolic_distance,
)

N_GENERATORS = 4
LETTERS = (1, 2, 3, 4, -1, -2, -3, -4)
_LETTER_NAMES = {1: "a1", 2: "b1", 3: "a2", 4: "b2", -1: "A1", -2: "B1", -3: "A2", -4: "B2"}
_NAME_LETTERS = {v: k for k, v in _LETTER_NAMES.items()}


class WordError(ValueError):
    pass


class DomainReductionError(RuntimeError):
    """Greedy domain reduction ran out of steps (numeric escape)."""


def _reduce_letters(letters) -> tuple[int, ...]:
    out: list[int] = []
    for l in letters:
        if l == 0 or abs(l) > N_GENERATORS:
            raise WordError(f"bad letter {l}")
        if out and out[-1] == -l:
            out.pop()
        else:
            out.append(l)
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """Freely reduced word in the four generators and their inverses."""

    letters: tuple[int, ...]

    @staticmethod
    def from_letters(letters) -> "Word":
        return Word(_reduce_letters(letters))

    @staticmethod
    def identity() -> "Word":
        return Word(())

    @staticmethod
    def parse(text: str) -> "Word":
        """Parse e.g. "a1 b1 A1 B1" (capitals are inverses)."""
        toks = text.replace(",", " ").split()
        try:
            return Word.from_letters(_NAME_LETTERS[t] for t in toks)
        except KeyError as exc:
            raise WordError(f"unknown generator name {exc}") from exc

    def __mul__(self, other: "Word") -> "Word":
        return Word(_reduce_letters(self.letters + other.letters))

    def inverse(self) -> "Word":
        return Word(tuple(-l for l in reversed(self.letters)))

    def __len__(self) -> int:
        return len(self.letters)

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        w = Word.identity()
        for _ in range(n):
            w = w * self
        return w

    def __str__(self) -> str:
        return " ".join(_LETTER_NAMES[l] for l in self.letters) if self.letters else "e"

    def cyclic_reduce(self) -> "Word":
        ls = list(self.letters)
        while len(ls) >= 2 and ls[0] == -ls[-1]:
            ls = ls[1:-1]
        return Word(tuple(ls))


RELATOR = Word.from_letters((1, 2, -1, -2, 3, 4, -3, -4))


def conjugacy_key(w: Word) -> tuple[int, ...]:
    """Canonical key of the free conjugacy class: lexicographically
    minimal rotation of the cyclic reduction.  Equal keys iff conjugate
    in the free group on the generators; surface-group conjugacy is the
    closure of this under relator moves (see surface_conjugacy_key)."""
    core = w.cyclic_reduce().letters
    if not core:
        return ()
    n = len(core)
    return min(tuple(core[i:] + core[:i]) for i in range(n))


def _relator_rules() -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    # every cyclic piece of the relator (or its inverse) of at least half
    # length may be swapped for the inverse of the complementary piece;
    # the half-length swaps preserve word length, longer pieces shorten
    rel = RELATOR.letters
    n = len(rel)
    half = n // 2
    rules = []
    for letters in (rel, tuple(-x for x in reversed(rel))):
        for r in range(n):
            rot = letters[r:] + letters[:r]
            for m in range(half, n):
                rules.append((rot[:m], tuple(-x for x in reversed(rot[m:]))))
    return rules


_RELATOR_RULES = _relator_rules()


def surface_conjugacy_key(w: Word) -> tuple[int, ...]:
    """Free-homotopy class key: the minimal cyclic word reachable by
    rotations and relator-piece swaps (Dehn moves).

    Distinct cyclic words of length four can already be conjugate in the
    group through a half-relator swap, so the free key alone oversplits;
    this closure is exact for the census budget (length <= 6 after the
    shortening moves normalize non-geodesic words)."""
    core = w.cyclic_reduce().letters
    if not core:
        return ()

    def cyc_key(t):
        return min(tuple(t[i:] + t[:i]) for i in range(len(t)))

    start = cyc_key(core)
    seen = {start}
    frontier = [start]
    while frontier:
        cur = frontier.pop()
        n = len(cur)
        for i in range(n):
            rot = cur[i:] + cur[:i]
            for piece, repl in _RELATOR_RULES:
                m = len(piece)
                if m <= n and rot[:m] == piece:
                    new = Word.from_letters(repl + rot[m:]).cyclic_reduce().letters
                    if new:
                        kk = cyc_key(new)
                        if kk not in seen:
                            seen.add(kk)
                            frontier.append(kk)
    return min(seen, key=lambda t: (len(t), t))


@dataclass(frozen=True)
class FundamentalDomain:
    """Regular octagon (Dirichlet domain at the origin) with its diameter."""

    vertices: tuple[HyperbolicPoint, ...]
    circumradius: float
    diameter: float

    def sampled_diameter(self, n_boundary: int = 256) -> float:
        """Max pairwise distance over sampled boundary points (stability check)."""
        pts = []
        for j in range(8):
            z1 = self.vertices[j].z
            z2 = self.vertices[(j + 1) % 8].z
            for i in range(n_boundary // 8):
                t = i / (n_boundary // 8)
                # chord sampling is enough: the max is attained at vertices
                pts.append(HyperbolicPoint.from_complex(z1 + t * (z2 - z1)))
        best = 0.0
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                best = max(best, hyperbolic_distance(pts[i], pts[j]))
        return best


def _pair_map(p: complex, q: complex, pp: complex, qq: complex) -> Isometry:
    """Unique orientation-preserving isometry with p -> pp, q -> qq."""

    def canon(P, Q):
        lam = 1.0 / math.sqrt(1.0 - abs(P) ** 2)
        a, b = lam, -lam * P
        tq = (a * Q + b) / (b.conjugate() * Q + a.conjugate())
        rot = cmath.exp(-0.5j * cmath.phase(tq))
        return rot * a, rot * b

    a1, b1 = canon(p, q)
    a2, b2 = canon(pp, qq)
    a2i, b2i = a2.conjugate(), -b2
    alpha = a2i * a1 + b2i * b1.conjugate()
    beta = a2i * b1 + b2i * a1.conjugate()
    nrm = abs(alpha) ** 2 - abs(beta) ** 2
    s = 1.0 / math.sqrt(nrm)
    alpha, beta = alpha * s, beta * s
    return Isometry.from_matrix(
        alpha.real + beta.real,
        alpha.imag - beta.imag,
        -alpha.imag - beta.imag,
        alpha.real - beta.real,
    )


class SurfaceGroup:
    """The octagon side-pairing group with words, evaluation, and the
    greedy reduction of points into the fundamental domain."""

    def __init__(self, generators: dict[int, Isometry], domain: FundamentalDomain, name: str):
        self.name = name
        self.gens = dict(generators)
        for i in range(1, N_GENERATORS + 1):
            self.gens[-i] = self.gens[i].inverse()
        self.domain = domain
        self.relator = RELATOR
        # Dirichlet face points: letter translates of the origin
        self._face_pts = {l: apply_isometry(self.gens[l], ORIGIN).z for l in LETTERS}
        rel = self.evaluate(self.relator)
        if not rel.is_identity(1e-8):
            raise GeometryError("side pairings do not satisfy the surface relation")

    @property
    def generators(self) -> list[Isometry]:
        """The 8 side-pairing isometries a1, b1, a2, b2 and inverses."""
        return [self.gens[l] for l in LETTERS]

    def evaluate(self, w: Word) -> Isometry:
        m = Isometry.identity()
        for l in w.letters:
            m = m @ self.gens[l]
        return m

    # -- fundamental domain membership and reduction ------------------

    @staticmethod
    def _q(x: complex, p: complex) -> float:
        # monotone surrogate for hyperbolic distance between x and p
        return abs(x - p) ** 2 / ((1.0 - abs(x) ** 2) * (1.0 - abs(p) ** 2))

    def contains(self, x: HyperbolicPoint, slack: float = 1e-12) -> bool:
        z = x.z
        q0 = self._q(z, 0.0)
        return all(q0 <= self._q(z, p) + slack for p in self._face_pts.values())

    def reduce_step(self, z: complex) -> int | None:
        """Letter moving z strictly closer to the origin, or None if inside."""
        q0 = self._q(z, 0.0)
        best, best_l = q0 * (1.0 - 1e-13), None
        for l in LETTERS:  # fixed order: ties resolved by smallest index
            q = self._q(z, self._face_pts[l])
            if q < best - 1e-15:
                best, best_l = q, l
        return best_l

    def reduce_to_domain(
        self, x: HyperbolicPoint, max_steps: int = 400
    ) -> tuple[HyperbolicPoint, Word]:
        """Return (x', w) with x' = evaluate(w)^-1 x in the closed octagon."""
        z = x.z
        letters: list[int] = []
        for _ in range(max_steps):
            l = self.reduce_step(z)
            if l is None:
                return HyperbolicPoint.from_complex(z), Word.from_letters(letters)
            g = self.gens[-l]
            alpha, beta = g.su11()
            z = (alpha * z + beta) / (beta.conjugate() * z + alpha.conjugate())
            letters.append(l)
        raise DomainReductionError(f"point did not reduce in {max_steps} steps")

    # -- word streams --------------------------------------------------

    def enumerate_words(self, max_len: int) -> Iterator[Word]:
        """All freely reduced words of length <= max_len, shortest first."""
        if max_len > 14:
            raise WordError("word enumeration capped at length 14")
        yield Word.identity()
        frontier = [()]
        for _ in range(max_len):
            nxt = []
            for tail in frontier:
                for l in LETTERS:
                    if tail and tail[-1] == -l:
                        continue
                    word = tail + (l,)
                    yield Word(word)
                    nxt.append(word)
            frontier = nxt

    def conjugacy_classes(self, max_len: int, *, up_to_surface: bool = True) -> list[Word]:
        """One cyclically reduced representative per conjugacy class of
        nonempty words of length <= max_len; by default classes are taken
        in the surface group (free-homotopy classes), otherwise in the
        free group on the generators."""
        keyfn = surface_conjugacy_key if up_to_surface else conjugacy_key
        seen: dict[tuple[int, ...], Word] = {}
        for w in self.enumerate_words(max_len):
            if len(w) == 0 or w.cyclic_reduce() != w:
                continue
            key = keyfn(w)
            if key not in seen:
                seen[key] = Word(key)
        return [seen[k] for k in sorted(seen)]


def standard_genus2() -> SurfaceGroup:
    """Side-pairing group of the regular octagon with pi/4 interior angles.

    Vertices sit at angles -pi/8 + j pi/4; side s_j runs from vertex j to
    vertex j+1.  Generator a1 maps s2 onto s0 reversing the boundary
    orientation, b1 maps s1 onto s3, a2 maps s6 onto s4, b2 maps s5 onto
    s7; the vertex cycle then spells [a1,b1][a2,b2].
    """
    circumradius = math.acosh(1.0 / math.tan(math.pi / 8) ** 2)
    r_e = math.tanh(0.5 * circumradius)
    v = [r_e * cmath.exp(1j * (-math.pi / 8 + j * math.pi / 4)) for j in range(8)]
    gens = {
        1: _pair_map(v[2], v[3], v[1], v[0]),
        2: _pair_map(v[2], v[1], v[3], v[4]),
        3: _pair_map(v[6], v[7], v[5], v[4]),
        4: _pair_map(v[6], v[5], v[7], v[0 % 8]),
    }
    domain = FundamentalDomain(
        vertices=tuple(HyperbolicPoint.from_complex(z) for z in v),
        circumradius=circumradius,
        diameter=2.0 * circumradius,
    )
    return SurfaceGroup(gens, domain, "genus2-octagon")


GROUP_PRESETS = {"genus2-octagon": standard_genus2}


def group_preset(name: str) -> SurfaceGroup:
    try:
        return GROUP_PRESETS[name]()
    except KeyError:
        raise WordError(f"unknown group preset {name!r}; have {sorted(GROUP_PRESETS)}")


def word_translation_length(group: SurfaceGroup, w: Word) -> float:
    cls = classify_and_fixed_points(group.evaluate(w))
    return cls.translation_length


def primitive_cyclic_root(w: Word) -> tuple[Word, int]:
    """Smallest cyclic block of the reduced word and its repeat count."""
    core = w.cyclic_reduce().letters
    n = len(core)
    for m in range(1, n + 1):
        if n % m == 0 and core == core[:m] * (n // m):
            return Word(core[:m]), n // m
    return Word(core), 1
