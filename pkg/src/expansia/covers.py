"""Open covers and their calculus: refinement, join, Lebesgue numbers.

On finite spaces a cover member is a frozenset of point indices. On the
torus a member is a region: a finite union of half-open rational boxes
taken mod 1 (:class:`BoxUnion`) or the exact image of one under a
unimodular matrix (:class:`LinearImage`).
"""
from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import networkx as nx

from . import linalg
from .linalg import ParseError, format_fraction, parse_fraction
from .spaces import FiniteMetricSpace, FiniteTopSpace, Torus, TorusPoint


@dataclass(frozen=True)
class Arc:
    """The half-open arc ``[start, start + width)`` of R/Z; width 1 is the circle."""

    start: Fraction
    width: Fraction

    def __post_init__(self):
        w = Fraction(self.width)
        if w <= 0:
            raise ValueError("arc width must be positive")
        if w >= 1:
            object.__setattr__(self, "start", Fraction(0))
            object.__setattr__(self, "width", Fraction(1))
        else:
            object.__setattr__(self, "start", Fraction(self.start) % 1)
            object.__setattr__(self, "width", w)

    @property
    def full(self) -> bool:
        return self.width == 1

    def contains(self, t: Fraction) -> bool:
        return (t - self.start) % 1 < self.width

    def endpoints(self) -> tuple[Fraction, Fraction]:
        return self.start, (self.start + self.width) % 1

    def intersect(self, other: "Arc") -> list["Arc"]:
        if self.full:
            return [other]
        if other.full:
            return [self]
        out = []
        for k in (-1, 0, 1):
            lo = max(self.start, other.start + k)
            hi = min(self.start + self.width, other.start + k + other.width)
            if lo < hi:
                out.append(Arc(lo, hi - lo))
        return out

    def __str__(self):
        return f"{format_fraction(self.start)}..{format_fraction(self.start + self.width)}"


@dataclass(frozen=True)
class Box:
    arcs: tuple[Arc, ...]

    def contains(self, x: TorusPoint) -> bool:
        return all(a.contains(t) for a, t in zip(self.arcs, x.coords))

    def intersect(self, other: "Box") -> list["Box"]:
        pieces = [a.intersect(b) for a, b in zip(self.arcs, other.arcs)]
        return [Box(combo) for combo in itertools.product(*pieces)]

    @property
    def full(self) -> bool:
        return all(a.full for a in self.arcs)

    def __str__(self):
        return " x ".join(str(a) for a in self.arcs)


class BoxUnion:
    """A finite union of half-open boxes on the torus."""

    def __init__(self, boxes: Iterable[Box]):
        self.boxes = tuple(boxes)

    @classmethod
    def box(cls, *arcs: tuple) -> "BoxUnion":
        """``BoxUnion.box((lo, hi), (lo, hi))`` -- one box from coordinate ranges."""
        return cls([Box(tuple(Arc(Fraction(lo), Fraction(hi) - Fraction(lo)) for lo, hi in arcs))])

    @classmethod
    def parse(cls, text: str) -> "BoxUnion":
        """``"0..1/2 x 1/4..3/4"``; several boxes joined by ``|``."""
        boxes = []
        for part in text.split("|"):
            arcs = []
            for rng in part.replace("×", "x").split("x"):
                if ".." not in rng:
                    raise ParseError(f"expected lo..hi, got {rng.strip()!r}")
                lo, hi = (parse_fraction(v) for v in rng.split(".."))
                if hi <= lo:
                    raise ParseError(f"empty range {rng.strip()!r}")
                arcs.append(Arc(lo, hi - lo))
            boxes.append(Box(tuple(arcs)))
        return cls(boxes)

    def __repr__(self):
        return f"BoxUnion({str(self)!r})"

    def __str__(self):
        return " | ".join(str(b) for b in self.boxes) or "{}"

    def __bool__(self):
        return bool(self.boxes)

    def contains(self, x: TorusPoint) -> bool:
        return any(b.contains(x) for b in self.boxes)

    def intersect(self, other: "BoxUnion") -> "BoxUnion":
        return BoxUnion(p for a in self.boxes for b in other.boxes for p in a.intersect(b))

    @property
    def dim(self) -> int:
        return len(self.boxes[0].arcs) if self.boxes else 0


@dataclass(frozen=True)
class LinearImage:
    """The image ``A(R) mod 1`` of a box union R under a unimodular matrix A.

    Membership is decided exactly through the preimage ``A^-1 x``.
    """

    region: BoxUnion
    matrix: linalg.Matrix

    @property
    def inverse(self) -> linalg.Matrix:
        return linalg.int_inverse(self.matrix)

    def contains(self, x: TorusPoint) -> bool:
        return self.region.contains(TorusPoint(linalg.mat_vec(self.inverse, x.coords)))

    def polygons(self) -> list[list[tuple[Fraction, ...]]]:
        """Rational vertices of each image parallelogram (before reduction mod 1)."""
        out = []
        for box in self.region.boxes:
            corners = itertools.product(*[(a.start, a.start + a.width) for a in box.arcs])
            out.append([linalg.mat_vec(self.matrix, c) for c in corners])
        return out

    def __str__(self):
        return f"{linalg.format_matrix(self.matrix)} * ({self.region})"


def _region_breakpoints(regions: Sequence[BoxUnion], dim: int) -> list[list[Fraction]]:
    pts = [{Fraction(0)} for _ in range(dim)]
    for r in regions:
        for b in r.boxes:
            for i, a in enumerate(b.arcs):
                pts[i].update(a.endpoints())
    return [sorted(p) for p in pts]


def _cells(regions: Sequence[BoxUnion], dim: int) -> Iterable[TorusPoint]:
    """One representative point per elementary cell of the common subdivision.

    Every arc endpoint is a breakpoint, so each cell lies entirely inside or
    entirely outside each region and its lower corner decides which.
    """
    for corner in itertools.product(*_region_breakpoints(regions, dim)):
        yield TorusPoint(corner)


def region_subset(a: BoxUnion, b: BoxUnion, dim: int) -> bool:
    return all(b.contains(c) for c in _cells([a, b], dim) if a.contains(c))


def region_equal(a: BoxUnion, b: BoxUnion, dim: int) -> bool:
    return region_subset(a, b, dim) and region_subset(b, a, dim)


def regions_cover(regions: Sequence[BoxUnion], dim: int) -> bool:
    return all(any(r.contains(c) for r in regions) for c in _cells(regions, dim))


class OpenCover:
    """A finite named family of open sets whose union is the space."""

    def __init__(self, space, members: Sequence, names: Sequence[str] | None = None,
                 check: bool = True):
        self.space = space
        if space.is_finite:
            members = [frozenset(int(p) for p in m) for m in members]
        self.members = tuple(members)
        self.names = tuple(names) if names is not None else tuple(f"U{i + 1}" for i in range(len(self.members)))
        if len(self.names) != len(self.members):
            raise ValueError("one name per member required")
        if check:
            if space.is_finite:
                for name, m in zip(self.names, self.members):
                    if not m <= frozenset(space.points):
                        raise ValueError(f"member {name} has points outside the space")
                    if not space.is_open(m):
                        raise ValueError(f"member {name} = {sorted(m)} is not open")
            if not self.covers_space():
                raise ValueError("the members do not cover the space")

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __repr__(self):
        return f"OpenCover({len(self)} members on {self.space!r})"

    def covers_space(self) -> bool:
        if self.space.is_finite:
            return frozenset().union(*self.members) == frozenset(self.space.points)
        if all(isinstance(m, BoxUnion) for m in self.members):
            return regions_cover(self.members, self.space.dim)
        mats = {m.matrix for m in self.members if isinstance(m, LinearImage)}
        if len(mats) == 1 and all(isinstance(m, LinearImage) for m in self.members):
            # a homeomorphism maps covers to covers
            return regions_cover([m.region for m in self.members], self.space.dim)
        raise NotImplementedError("coverage check for mixed torus regions")

    def member_contains(self, i: int, x) -> bool:
        m = self.members[i]
        return x in m if self.space.is_finite else m.contains(x)

    def format_member(self, i: int) -> str:
        m = self.members[i]
        if self.space.is_finite:
            return ",".join(self.space.format_point(p) for p in sorted(m))
        return str(m)

    @classmethod
    def parse(cls, space, text: str) -> "OpenCover":
        """One member per line, optionally prefixed by ``name:``."""
        members, names = [], []
        for ln in text.splitlines():
            ln = ln.strip()
            if not ln or ln.startswith("#"):
                continue
            name = None
            if ":" in ln:
                name, ln = (s.strip() for s in ln.split(":", 1))
            if space.is_finite:
                members.append(frozenset(space.parse_point(s) for s in ln.split(",")))
            else:
                members.append(BoxUnion.parse(ln))
            names.append(name or f"U{len(names) + 1}")
        return cls(space, members, names)


def prec(points: Iterable, U: OpenCover) -> bool:
    """True iff one member of U contains every given point."""
    pts = list(points)
    return any(all(U.member_contains(i, p) for p in pts) for i in range(len(U)))


def refines(V: OpenCover, U: OpenCover) -> bool:
    """Every member of V sits inside some member of U."""
    if V.space != U.space and V.space is not U.space:
        raise ValueError("covers live on different spaces")
    if V.space.is_finite:
        return all(any(v <= u for u in U.members) for v in V.members)
    if not all(isinstance(m, BoxUnion) for m in V.members + U.members):
        raise NotImplementedError("refinement is decided for box covers only")
    d = V.space.dim
    return all(any(region_subset(v, u, d) for u in U.members) for v in V.members)


def cover_join(U: OpenCover, V: OpenCover) -> OpenCover:
    """All non-empty pairwise intersections, duplicates dropped."""
    members, names = [], []
    seen = set()
    finite = U.space.is_finite
    for (nu, u), (nv, v) in itertools.product(zip(U.names, U.members), zip(V.names, V.members)):
        w = u & v if finite else u.intersect(v)
        if not w:
            continue
        if finite:
            dup = w in seen
            seen.add(w)
        else:
            dup = any(region_equal(w, m, U.space.dim) for m in members)
        if not dup:
            members.append(w)
            names.append(f"{nu}&{nv}")
    return OpenCover(U.space, members, names, check=False)


def dedupe(U: OpenCover) -> OpenCover:
    members, names = [], []
    for n, m in zip(U.names, U.members):
        if m not in members:
            members.append(m)
            names.append(n)
    return OpenCover(U.space, members, names, check=False)


def lebesgue_number(U: OpenCover) -> Fraction:
    """A positive delta such that every set of diameter < delta lies in a member.

    Finite metric spaces: the exact maximum (the smallest diameter of a set
    fitting in no member). Torus box covers: a certified lower bound.
    If a member is the whole space the answer is ``diameter + 1``.
    """
    if not U.covers_space():
        raise ValueError("the members do not cover the space")
    space = U.space
    if isinstance(space, FiniteMetricSpace):
        return _finite_lebesgue(space, U)
    if isinstance(space, Torus):
        return _torus_lebesgue(space, U)
    raise TypeError(f"no metric on {space!r}")


def _finite_lebesgue(space: FiniteMetricSpace, U: OpenCover) -> Fraction:
    full = frozenset(space.points)
    if full in U.members:
        return space.diameter + 1
    graph = nx.Graph()
    graph.add_nodes_from(space.points)
    pairs = sorted(((space.distance(x, y), x, y)
                    for x, y in itertools.combinations(space.points, 2)))
    # sets of diameter < delta are the cliques of {d < delta}; add edges in
    # distance order until some maximal clique fits in no member
    i = 0
    while i < len(pairs):
        d = pairs[i][0]
        while i < len(pairs) and pairs[i][0] == d:
            graph.add_edge(pairs[i][1], pairs[i][2])
            i += 1
        for clique in nx.find_cliques(graph):
            c = frozenset(clique)
            if not any(c <= m for m in U.members):
                return d
    return space.diameter + 1


def _torus_lebesgue(space: Torus, U: OpenCover) -> Fraction:
    if not all(isinstance(m, BoxUnion) for m in U.members):
        raise NotImplementedError("Lebesgue numbers are computed for box covers only")
    if any(b.full for m in U.members for b in m.boxes):
        return space.diameter + 1
    boxes = [b for m in U.members for b in m.boxes]
    # a set of diameter < delta <= 1/3 projects into arcs shorter than delta,
    # so it sits in a box [m, m + delta); that box lies in member box B
    # whenever m lies in B shrunk by delta on the right
    cap = Fraction(1, 3)
    candidates = {cap}
    for i in range(space.dim):
        for p, q in itertools.product(boxes, repeat=2):
            a, b = p.arcs[i], q.arcs[i]
            for v in ((b.start + b.width - a.start) % 1, b.width):
                if 0 < v:
                    candidates.add(min(v, cap))
    for delta in sorted(candidates, reverse=True):
        shrunk = []
        for b in boxes:
            arcs = []
            for a in b.arcs:
                if a.full:
                    arcs.append(a)
                elif a.width > delta:
                    arcs.append(Arc(a.start, a.width - delta))
                else:
                    break
            else:
                shrunk.append(BoxUnion([Box(tuple(arcs))]))
        if shrunk and regions_cover(shrunk, space.dim):
            return delta
    raise ValueError("no positive Lebesgue number could be certified for this cover")
