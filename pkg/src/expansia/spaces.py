"""The concrete spaces: rational torus, finite metric spaces, finite topologies.

Points of a finite space are the integers ``0..n-1``; labels are only for
input and output. Torus points are exact rationals reduced mod 1.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .linalg import ParseError, format_fraction, parse_fraction


@dataclass(frozen=True, order=True)
class TorusPoint:
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(Fraction(c) % 1 for c in self.coords))

    @classmethod
    def of(cls, *coords) -> "TorusPoint":
        return cls(tuple(Fraction(c) for c in coords))

    @classmethod
    def parse(cls, text: str) -> "TorusPoint":
        body = text.strip().strip("()")
        return cls(tuple(parse_fraction(t) for t in body.split(",")))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __str__(self):
        return "(" + ", ".join(format_fraction(c) for c in self.coords) + ")"

    def __add__(self, other: "TorusPoint") -> "TorusPoint":
        return TorusPoint(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "TorusPoint") -> "TorusPoint":
        return TorusPoint(tuple(a - b for a, b in zip(self.coords, other.coords)))


def circle_distance(a: Fraction, b: Fraction) -> Fraction:
    t = (a - b) % 1
    return min(t, 1 - t)


def torus_distance(x: TorusPoint, y: TorusPoint) -> Fraction:
    """Max over coordinates of the circle distance."""
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: {x.dim} vs {y.dim}")
    return max((circle_distance(a, b) for a, b in zip(x.coords, y.coords)), default=Fraction(0))


class Torus:
    """The d-torus R^d / Z^d with the max-of-circle-distances metric."""

    is_finite = False

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("torus dimension must be >= 1")
        self.dim = dim

    def __repr__(self):
        return f"Torus({self.dim})"

    def __eq__(self, other):
        return isinstance(other, Torus) and other.dim == self.dim

    def __hash__(self):
        return hash(("torus", self.dim))

    @property
    def diameter(self) -> Fraction:
        return Fraction(1, 2)

    def distance(self, x: TorusPoint, y: TorusPoint) -> Fraction:
        return torus_distance(x, y)

    def contains(self, x) -> bool:
        return isinstance(x, TorusPoint) and x.dim == self.dim

    def origin(self) -> TorusPoint:
        return TorusPoint((Fraction(0),) * self.dim)

    def format_point(self, x: TorusPoint) -> str:
        return str(x)

    def parse_point(self, text: str) -> TorusPoint:
        x = TorusPoint.parse(text)
        if x.dim != self.dim:
            raise ParseError(f"point {text!r} is not in dimension {self.dim}")
        return x


class RationalGrid:
    """The lattice points ``(1/q) Z^d`` of the torus, in lexicographic order.

    Integer matrices map this set onto itself, so orbits stay on the grid.
    """

    def __init__(self, dim: int, q: int):
        if q < 1:
            raise ValueError("grid denominator must be >= 1")
        self.dim = dim
        self.q = q

    def __repr__(self):
        return f"RationalGrid(dim={self.dim}, q={self.q})"

    def __len__(self):
        return self.q ** self.dim

    def __iter__(self) -> Iterator[TorusPoint]:
        for ks in itertools.product(range(self.q), repeat=self.dim):
            yield TorusPoint(tuple(Fraction(k, self.q) for k in ks))

    def __contains__(self, x) -> bool:
        return isinstance(x, TorusPoint) and x.dim == self.dim and all(
            self.q % c.denominator == 0 for c in x.coords)

    def integer_points(self) -> np.ndarray:
        """Numerators of every grid point, shape (q^d, d), in iteration order."""
        axes = np.meshgrid(*[np.arange(self.q)] * self.dim, indexing="ij")
        return np.stack([a.ravel() for a in axes], axis=1).astype(np.int64)

    def index_of(self, ks: np.ndarray) -> np.ndarray:
        """Flat indices of integer numerator rows (any shape (..., d))."""
        idx = np.zeros(ks.shape[:-1], dtype=np.int64)
        for i in range(self.dim):
            idx = idx * self.q + (ks[..., i] % self.q)
        return idx

    def point(self, ks: Sequence[int]) -> TorusPoint:
        return TorusPoint(tuple(Fraction(int(k), self.q) for k in ks))


class FiniteMetricSpace:
    """Points ``0..n-1`` with an exact rational distance matrix; discrete topology."""

    is_finite = True

    def __init__(self, labels: Sequence[str], dist: Sequence[Sequence]):
        self.labels = tuple(str(s) for s in labels)
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise ValueError("point labels must be distinct")
        self.dist = tuple(tuple(Fraction(v) for v in row) for row in dist)
        if len(self.dist) != n or any(len(row) != n for row in self.dist):
            raise ValueError(f"distance matrix must be {n}x{n}")
        for i in range(n):
            if self.dist[i][i] != 0:
                raise ValueError(f"d({self.labels[i]},{self.labels[i]}) must be 0")
            for j in range(i + 1, n):
                if self.dist[i][j] != self.dist[j][i]:
                    raise ValueError(f"distance not symmetric at ({i},{j})")
                if self.dist[i][j] <= 0:
                    raise ValueError(f"distinct points {i},{j} at distance {self.dist[i][j]}")
        bad = self.triangle_violation()
        if bad is not None:
            warnings.warn(f"triangle inequality fails at {bad}", stacklevel=2)

    @classmethod
    def discrete(cls, n: int, labels: Sequence[str] | None = None) -> "FiniteMetricSpace":
        labels = labels or [str(i) for i in range(n)]
        return cls(labels, [[int(i != j) for j in range(n)] for i in range(n)])

    @classmethod
    def parse(cls, text: str) -> "FiniteMetricSpace":
        """Labels line, then lower-triangular rows ``d(i,0),...,d(i,i-1)``."""
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
        if not lines:
            raise ParseError("empty metric space description")
        labels = [s.strip() for s in lines[0].split(",")]
        n = len(labels)
        rows = lines[1:]
        if rows and len(rows) == n and rows[0] in ("0", ""):
            rows = rows[1:]
        if len(rows) != n - 1:
            raise ParseError(f"expected {n - 1} distance rows for {n} points, got {len(rows)}")
        dist = [[Fraction(0)] * n for _ in range(n)]
        for i, row in enumerate(rows, start=1):
            vals = [parse_fraction(v) for v in row.split(",")]
            if len(vals) == i + 1 and vals[-1] == 0:
                vals = vals[:-1]
            if len(vals) != i:
                raise ParseError(f"row {i} needs {i} entries, got {len(vals)}")
            for j, v in enumerate(vals):
                dist[i][j] = dist[j][i] = v
        return cls(labels, dist)

    def __repr__(self):
        return f"FiniteMetricSpace({list(self.labels)})"

    def __len__(self):
        return len(self.labels)

    @property
    def points(self) -> range:
        return range(len(self.labels))

    @property
    def diameter(self) -> Fraction:
        return max((v for row in self.dist for v in row), default=Fraction(0))

    def distance(self, x: int, y: int) -> Fraction:
        return self.dist[x][y]

    def contains(self, x) -> bool:
        return isinstance(x, (int, np.integer)) and 0 <= x < len(self.labels)

    def is_open(self, subset) -> bool:
        return True

    def triangle_violation(self) -> tuple[int, int, int] | None:
        n = len(self.labels)
        d = self.dist
        for i, j, k in itertools.product(range(n), repeat=3):
            if d[i][k] > d[i][j] + d[j][k]:
                return (i, j, k)
        return None

    def format_point(self, x: int) -> str:
        return self.labels[x]

    def parse_point(self, text: str) -> int:
        try:
            return self.labels.index(text.strip())
        except ValueError:
            raise ParseError(f"unknown point {text.strip()!r}") from None

    def subspace(self, subset: Sequence[int]) -> "FiniteMetricSpace":
        return FiniteMetricSpace([self.labels[i] for i in subset],
                                 [[self.dist[i][j] for j in subset] for i in subset])


class FiniteTopSpace:
    """Points ``0..n-1`` with an explicit family of open sets."""

    is_finite = True

    def __init__(self, labels: Sequence[str], opens: Iterable[Iterable[int]]):
        self.labels = tuple(str(s) for s in labels)
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise ValueError("point labels must be distinct")
        full = frozenset(range(n))
        fam = {frozenset(int(v) for v in U) for U in opens}
        for U in fam:
            if not U <= full:
                raise ValueError(f"open set {sorted(U)} has points outside the space")
        if frozenset() not in fam or full not in fam:
            raise ValueError("a topology must contain the empty set and the whole space")
        for U, V in itertools.combinations(fam, 2):
            if U | V not in fam or U & V not in fam:
                raise ValueError(f"opens {sorted(U)} and {sorted(V)} break union/intersection closure")
        self.opens = frozenset(fam)

    @classmethod
    def generated_by(cls, labels: Sequence[str], subbase: Iterable[Iterable[int]]) -> "FiniteTopSpace":
        n = len(labels)
        fam = {frozenset(), frozenset(range(n))} | {frozenset(U) for U in subbase}
        changed = True
        while changed:
            changed = False
            for U, V in list(itertools.combinations(fam, 2)):
                for W in (U | V, U & V):
                    if W not in fam:
                        fam.add(W)
                        changed = True
        return cls(labels, fam)

    @classmethod
    def discrete(cls, n: int, labels: Sequence[str] | None = None) -> "FiniteTopSpace":
        labels = labels or [str(i) for i in range(n)]
        return cls(labels, [frozenset(s) for r in range(n + 1)
                            for s in itertools.combinations(range(n), r)])

    @classmethod
    def parse(cls, text: str) -> "FiniteTopSpace":
        """Labels line, then one open set per line; empty set and whole space are implied."""
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
        if not lines:
            raise ParseError("empty topology description")
        labels = [s.strip() for s in lines[0].split(",")]
        index = {s: i for i, s in enumerate(labels)}
        opens = [frozenset(), frozenset(range(len(labels)))]
        for ln in lines[1:]:
            if ln in ("{}", "-"):
                continue
            try:
                opens.append(frozenset(index[s.strip()] for s in ln.split(",")))
            except KeyError as exc:
                raise ParseError(f"unknown point {exc.args[0]!r} in open set {ln!r}") from None
        return cls(labels, opens)

    def __repr__(self):
        return f"FiniteTopSpace({list(self.labels)}, {len(self.opens)} opens)"

    def __len__(self):
        return len(self.labels)

    @property
    def points(self) -> range:
        return range(len(self.labels))

    def contains(self, x) -> bool:
        return isinstance(x, (int, np.integer)) and 0 <= x < len(self.labels)

    def is_open(self, subset) -> bool:
        return frozenset(subset) in self.opens

    def minimal_open(self, x: int) -> frozenset[int]:
        out = frozenset(self.points)
        for U in self.opens:
            if x in U:
                out &= U
        return out

    def format_point(self, x: int) -> str:
        return self.labels[x]

    def parse_point(self, text: str) -> int:
        try:
            return self.labels.index(text.strip())
        except ValueError:
            raise ParseError(f"unknown point {text.strip()!r}") from None

    def subspace(self, subset: Sequence[int]) -> "FiniteTopSpace":
        pos = {p: i for i, p in enumerate(subset)}
        Y = frozenset(subset)
        return FiniteTopSpace([self.labels[i] for i in subset],
                              {frozenset(pos[p] for p in U & Y) for U in self.opens})


@dataclass(frozen=True)
class OpenInterval:
    """The non-compact demo space (0, 1) with the usual metric."""

    is_finite = False

    def distance(self, x: Fraction, y: Fraction) -> Fraction:
        return abs(Fraction(x) - Fraction(y))

    def contains(self, x) -> bool:
        return 0 < x < 1


def is_T1(X: FiniteTopSpace) -> bool:
    """Every singleton closed; for a finite space this means discrete."""
    full = frozenset(X.points)
    return all(full - {x} in X.opens for x in X.points)


def hausdorff_violation(X: FiniteTopSpace) -> tuple[int, int] | None:
    """A pair whose minimal neighbourhoods meet (hence no disjoint opens), or None."""
    mins = [X.minimal_open(x) for x in X.points]
    for x, y in itertools.combinations(X.points, 2):
        if mins[x] & mins[y]:
            return (x, y)
    return None


def is_hausdorff(X: FiniteTopSpace) -> bool:
    return hausdorff_violation(X) is None


def property_p_witness(space, eps: Fraction):
    """A compact C with every pair at distance >= eps lying in C x C.

    Compact spaces are their own witness. For the open interval the
    returned pair ``(eps, 1 - eps)`` stands for the closed interval, or
    None when that interval is empty.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if isinstance(space, OpenInterval):
        if eps > Fraction(1, 2):
            return None
        return (eps, 1 - eps)
    if isinstance(space, Torus):
        return space
    return frozenset(space.points)


def property_p_violation(space, C, eps: Fraction, sample: Iterable | None = None):
    """First pair (x, y) with d(x, y) >= eps outside C x C, else None.

    Exhaustive on finite spaces; on the open interval it scans ``sample``.
    """
    eps = Fraction(eps)
    if isinstance(space, OpenInterval):
        lo, hi = C
        pts = sorted(Fraction(t) for t in sample)
        inside = lambda t: lo <= t <= hi
    else:
        pts = list(space.points)
        inside = lambda t: t in C
    for x, y in itertools.combinations(pts, 2):
        if space.distance(x, y) >= eps and not (inside(x) and inside(y)):
            return (x, y)
    return None
