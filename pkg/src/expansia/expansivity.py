"""Metric expansivity: certificates, bounded falsification and estimates.

Separation means ``d(g x, g y) > c``. Infinite spaces are only ever
certified through the eigenvalue criterion for linear toral maps; grid
searches can falsify (a candidate pair) or stay inconclusive.

Finite spaces are decided exactly by closing each pair of points under the
generators: the largest distance a pair reaches along its orbit is the
same as the maximum over the whole image group.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .actions import Action, CoveringMap, MatrixTorusAction, is_finite_model
from .groups import CayleyBall, GroupPresentation, Word, cayley_ball
from .spaces import RationalGrid, TorusPoint
from .verdict import Certified, Falsified, InconclusiveAtDepth, Verdict

NUMERIC_TOLERANCE = 1e-9
DEFAULT_GRID = 12
DEFAULT_DEPTH = 8


# --- hyperbolicity ---------------------------------------------------------

def is_hyperbolic(A: linalg.Matrix) -> tuple[bool, bool]:
    """(no eigenvalue of modulus one, decided numerically?).

    Exact for d <= 2: with det 1 an eigenvalue lies on the unit circle iff
    |trace| <= 2, with det -1 iff trace = 0.
    """
    d = len(A)
    det = int(linalg.det(A))
    if d == 1:
        return abs(A[0][0]) != 1, False
    if d == 2:
        tr = linalg.trace(A)
        if det == 1:
            return abs(tr) > 2, False
        if det == -1:
            return tr != 0, False
        raise ValueError(f"matrix {A} is not unimodular")
    eig = np.linalg.eigvals(np.array(A, dtype=float))
    return bool(np.all(np.abs(np.abs(eig) - 1.0) > NUMERIC_TOLERANCE)), True


def _is_cyclic(G: GroupPresentation) -> bool:
    return len({frozenset((g.id, g.inverse_id)) for g in G.generators}) == 1


def certify_linear(G: GroupPresentation | Sequence, search_depth: int) -> Verdict:
    """Certify a toral action by finding a hyperbolic element in the Cayley ball.

    A cyclic group generated by a non-hyperbolic matrix is falsified by the
    classical criterion for a single toral automorphism.
    """
    if not isinstance(G, GroupPresentation):
        G = GroupPresentation.from_matrices({f"A{i + 1}": m for i, m in enumerate(G)})
    if G.rep.kind != "matrix":
        raise ValueError("certify_linear needs a matrix representation")
    ball = cayley_ball(G, search_depth)
    for elem, w in ball.items():
        hyp, numeric = is_hyperbolic(elem)
        if hyp:
            return Certified(depth=search_depth, numeric=numeric, reason={
                "method": "hyperbolic-element", "word": G.word_names(w),
                "matrix": linalg.format_matrix(elem),
                "trace": linalg.trace(elem), "det": int(linalg.det(elem))})
    if _is_cyclic(G):
        A = G.image(0)
        hyp, numeric = is_hyperbolic(A)
        if not hyp:
            return Falsified(witness=(G.generators[0].name,), depth=search_depth, exact=not numeric,
                             reason={"method": "non-hyperbolic-generator",
                                     "matrix": linalg.format_matrix(A),
                                     "trace": linalg.trace(A), "det": int(linalg.det(A))})
    return InconclusiveAtDepth(search_depth, note="no hyperbolic element in the ball")


# --- separation certificates -----------------------------------------------

@dataclass(frozen=True)
class SeparationCertificate:
    x: object
    y: object
    word: Word
    distance: Fraction
    constant: Fraction

    @classmethod
    def build(cls, a: Action, x, y, word: Sequence[int], c) -> "SeparationCertificate":
        word = tuple(word)
        d = a.distance(a.apply_word(word, x), a.apply_word(word, y))
        if not d > c:
            raise ValueError(f"word {a.group.format_word(word)} only reaches distance {d} <= {c}")
        return cls(x, y, word, d, Fraction(c))

    def replay(self, a: Action) -> bool:
        d = a.distance(a.apply_word(self.word, self.x), a.apply_word(self.word, self.y))
        return d == self.distance and d > self.constant


def find_separating_element(a: Action, x, y, c, depth: int) -> SeparationCertificate | None:
    """First g (shortlex) in the ball with d(g x, g y) > c."""
    if x == y:
        raise ValueError("x and y must differ")
    c = Fraction(c)
    if c <= 0 or depth < 0:
        raise ValueError("need c > 0 and depth >= 0")
    for elem, w in cayley_ball(a.group, depth).items():
        if a.distance(a.act(elem, x), a.act(elem, y)) > c:
            return SeparationCertificate.build(a, x, y, w, c)
    return None


# --- exact pair-orbit machinery for finite spaces --------------------------

def pair_orbits(a: Action, points: Sequence[int] | None = None) -> list[list[tuple[int, int]]]:
    """Orbits of unordered pairs of distinct points under the generators.

    With ``points`` (an invariant set is not required) only the orbits of
    pairs drawn from it are returned, each in full.
    """
    n = len(a.space)
    todo = list(itertools.combinations(points if points is not None else range(n), 2))
    seen: dict[tuple[int, int], int] = {}
    orbits: list[list[tuple[int, int]]] = []
    for start in todo:
        start = tuple(sorted(start))
        if start in seen:
            continue
        seen[start] = len(orbits)
        orb = [start]
        frontier = [start]
        while frontier:
            nxt = []
            for x, y in frontier:
                for s in a.group.ids:
                    gx, gy = a.generator_map(s, x), a.generator_map(s, y)
                    p = (gx, gy) if gx < gy else (gy, gx)
                    if p not in seen:
                        seen[p] = len(orbits)
                        orb.append(p)
                        nxt.append(p)
            frontier = nxt
        orbits.append(orb)
    return orbits


def pair_orbit_max(a: Action, points: Sequence[int] | None = None) -> dict[tuple[int, int], Fraction]:
    """max over the whole group of d(g x, g y), for every pair x < y."""
    out = {}
    for orb in pair_orbits(a, points):
        m = max(a.distance(x, y) for x, y in orb)
        for p in orb:
            out[p] = m
    if points is not None:
        keep = {tuple(sorted(p)) for p in itertools.combinations(points, 2)}
        out = {p: m for p, m in out.items() if p in keep}
    return out


def finite_expansive_sup(a: Action) -> Fraction | None:
    """Exact least upper bound of the expansive constants of a finite model.

    Every c below it is an expansive constant and the bound itself is not.
    None for a one-point space.
    """
    prof = pair_orbit_max(a)
    return min(prof.values()) if prof else None


def _ball_pair_max(a: Action, ball: CayleyBall, pairs: Iterable[tuple]) -> dict[tuple, Fraction]:
    elems = list(ball)
    out = {}
    for x, y in pairs:
        out[(x, y)] = max(a.distance(a.act(g, x), a.act(g, y)) for g in elems)
    return out


# --- linear toral actions on a rational grid -------------------------------

def _ball_mod_q(ball: CayleyBall, q: int) -> np.ndarray:
    return np.array([np.array(m, dtype=np.int64) % q for m in ball], dtype=np.int64)


def _difference_profile(ball: CayleyBall, grid: RationalGrid) -> np.ndarray:
    """Distances ||g v|| in units of 1/q, shape (ball size, q^d), grid order.

    For a linear action d(g x, g y) = ||g (y - x)||, so pairs of grid points
    reduce to their difference vectors.
    """
    q = grid.q
    mats = _ball_mod_q(ball, q)
    pts = grid.integer_points()
    imgs = np.einsum("bij,nj->bni", mats, pts) % q
    return np.minimum(imgs, q - imgs).max(axis=2)


def _le_units(units: np.ndarray, c: Fraction, q: int) -> np.ndarray:
    """Exact test units/q <= c."""
    return units * c.denominator <= c.numerator * q


def _lt_units(units: np.ndarray, c: Fraction, q: int) -> np.ndarray:
    return units * c.denominator < c.numerator * q


def _sample_points(a: Action, sampler):
    if sampler is None:
        return RationalGrid(a.space.dim, DEFAULT_GRID)
    return sampler


# --- falsification ----------------------------------------------------------

def falsify_expansive(a: Action, c, depth: int | None = None, sampler=None,
                      subset: Iterable | None = None) -> Verdict:
    """Search for a distinct pair never separated beyond c.

    Finite spaces: ``depth=None`` decides exactly over the whole image
    group; an integer depth searches that Cayley ball and is exact when the
    ball is the whole group. Torus: pairs come from ``subset`` or
    ``sampler`` (a :class:`RationalGrid` or explicit points) and a survivor
    is reported as a candidate unless the image group is finite.
    """
    c = Fraction(c)
    if c <= 0:
        raise ValueError("c must be positive")
    if is_finite_model(a):
        pts = sorted(set(subset)) if subset is not None else list(a.space.points)
        if depth is None:
            prof = pair_orbit_max(a, pts)
            exhausted = True
        else:
            ball = cayley_ball(a.group, depth)
            prof = _ball_pair_max(a, ball, itertools.combinations(pts, 2))
            exhausted = ball.exhausted
        for pair in itertools.combinations(pts, 2):
            m = prof[pair]
            if m <= c:
                return Falsified(witness=pair, depth=depth, constant=c, max_separation=m,
                                 exact=exhausted)
        if exhausted:
            return Certified(constant=c, depth=depth, reason={
                "method": "exhaustive", "points": len(pts), "subset": subset is not None,
                "min_max_separation": min(prof.values(), default=None)})
        return InconclusiveAtDepth(depth, note="image group not exhausted")

    depth = DEFAULT_DEPTH if depth is None else depth
    ball = cayley_ball(a.group, depth)
    sample = subset if subset is not None else _sample_points(a, sampler)
    if isinstance(a, MatrixTorusAction) and isinstance(sample, RationalGrid):
        q = sample.q
        worst = _difference_profile(ball, sample).max(axis=0)
        hits = np.nonzero(_le_units(worst, c, q))[0]
        hits = hits[hits != 0]
        if hits.size:
            v = sample.integer_points()[hits[0]]
            origin = a.space.origin()
            return Falsified(witness=(origin, sample.point(v)), depth=depth, constant=c,
                             max_separation=Fraction(int(worst[hits[0]]), q),
                             exact=ball.exhausted)
        nonzero = worst[1:]
        note = f"min max-separation {Fraction(int(nonzero.min()), q)}" if nonzero.size else ""
        return InconclusiveAtDepth(depth, note=note)
    pts = list(sample)
    prof = _ball_pair_max(a, ball, itertools.combinations(pts, 2))
    for pair, m in prof.items():
        if m <= c:
            return Falsified(witness=pair, depth=depth, constant=c, max_separation=m,
                             exact=ball.exhausted)
    return InconclusiveAtDepth(depth, note=f"min max-separation {min(prof.values(), default=None)}")


# --- estimating the supremum of expansive constants ------------------------

@dataclass(frozen=True)
class SupEstimate:
    lo: Fraction
    hi: Fraction
    witness: tuple | None
    exact: bool

    def __iter__(self):
        return iter((self.lo, self.hi))


def estimate_sup_constant(a: Action, depth: int, q: int, sampler=None) -> SupEstimate:
    """Bracket the least upper bound of the expansive constants.

    ``hi`` is the smallest max-separation of a sampled pair (every c >= hi
    is refuted by that pair); ``lo`` is the largest multiple of
    diameter/q strictly below ``hi``, found by bisection. On a finite
    space whose image group the ball exhausts, ``hi`` is the exact supremum.
    """
    if depth < 1 or q < 2:
        raise ValueError("need depth >= 1 and q >= 2")
    ball = cayley_ball(a.group, depth)
    diameter = Fraction(a.space.diameter)
    witness = None
    if is_finite_model(a):
        prof = _ball_pair_max(a, ball, itertools.combinations(a.space.points, 2))
        if prof:
            witness, hi = min(prof.items(), key=lambda kv: kv[1])
        else:
            hi = diameter
        exact = ball.exhausted
    else:
        grid = sampler if isinstance(sampler, RationalGrid) else RationalGrid(a.space.dim, q)
        if not isinstance(a, MatrixTorusAction):
            raise NotImplementedError("torus estimates need a linear action")
        worst = _difference_profile(ball, grid).max(axis=0)[1:]
        k = int(np.argmin(worst)) + 1
        hi = Fraction(int(worst[k - 1]), grid.q)
        witness = (a.space.origin(), grid.point(grid.integer_points()[k]))
        exact = False
    lo_j, hi_j = 0, q
    # largest j with j * diameter / q < hi
    while lo_j < hi_j:
        mid = (lo_j + hi_j + 1) // 2
        if mid * diameter / q < hi:
            lo_j = mid
        else:
            hi_j = mid - 1
    return SupEstimate(lo_j * diameter / q, hi, witness, exact)


# --- uniform separation -----------------------------------------------------

@dataclass(frozen=True)
class SeparationBound:
    n: int
    analytic: int | None = None


def uniform_separation_bound(a: Action, c, eps, depth: int, sampler=None) -> SeparationBound | InconclusiveAtDepth:
    """Smallest n such that every sampled pair at distance >= eps separates beyond c in ball(n)."""
    c, eps = Fraction(c), Fraction(eps)
    if c <= 0 or eps <= 0:
        raise ValueError("need c > 0 and eps > 0")
    ball = cayley_ball(a.group, depth)
    lengths = np.array([len(w) for w in ball.values()])
    analytic = _analytic_bound(a, c, eps)
    if is_finite_model(a) or not isinstance(a, MatrixTorusAction):
        pts = list(a.space.points) if is_finite_model(a) else list(_sample_points(a, sampler))
        elems = list(ball)
        need = 0
        for x, y in itertools.combinations(pts, 2):
            if a.distance(x, y) < eps:
                continue
            first = next((len(ball[g]) for g in elems
                          if a.distance(a.act(g, x), a.act(g, y)) > c), None)
            if first is None:
                return InconclusiveAtDepth(depth, note=f"pair {(x, y)} not separated")
            need = max(need, first)
        return SeparationBound(need, analytic)
    grid = _sample_points(a, sampler)
    prof = _difference_profile(ball, grid)
    q = grid.q
    far = ~_lt_units(prof[0], eps, q)
    sep = ~_le_units(prof, c, q)
    need = 0
    for col in np.nonzero(far)[0]:
        hit = np.nonzero(sep[:, col])[0]
        if not hit.size:
            return InconclusiveAtDepth(depth, note=f"difference {grid.point(grid.integer_points()[col])} not separated")
        need = max(need, int(lengths[hit].min()))
    return SeparationBound(need, analytic)


def _analytic_bound(a: Action, c: Fraction, eps: Fraction) -> int | None:
    if not isinstance(a, MatrixTorusAction) or not _is_cyclic(a.group) or a.space.dim != 2:
        return None
    A = a.group.image(0)
    if not is_hyperbolic(A)[0]:
        return None
    lam = float(np.max(np.abs(np.linalg.eigvals(np.array(A, dtype=float)))))
    return max(0, math.ceil(math.log(float(c / eps)) / math.log(lam)))


# --- dynamical balls -------------------------------------------------------

@dataclass(frozen=True)
class DynamicalBallSample:
    center: object
    constant: Fraction
    depth: int
    points: tuple


def dynamical_ball(a: Action, x, c, depth: int, q: int = DEFAULT_GRID) -> DynamicalBallSample:
    """Sample points t with d(g x, g t) < c for every g in ball(depth)."""
    c = Fraction(c)
    if c <= 0:
        raise ValueError("c must be positive")
    ball = cayley_ball(a.group, depth)
    if is_finite_model(a):
        cands = list(a.space.points)
    else:
        grid = RationalGrid(a.space.dim, q)
        if isinstance(a, MatrixTorusAction) and x in grid:
            worst = _difference_profile(ball, grid).max(axis=0)
            inside = np.nonzero(_lt_units(worst, c, q))[0]
            vs = grid.integer_points()[inside]
            pts = sorted(x + grid.point(v) for v in vs)
            return DynamicalBallSample(x, c, depth, tuple(pts))
        cands = list(grid)
    elems = list(ball)
    pts = [t for t in cands
           if all(a.distance(a.act(g, x), a.act(g, t)) < c for g in elems)]
    return DynamicalBallSample(x, c, depth, tuple(pts))


# --- fixed points -----------------------------------------------------------

def fixed_points(a: Action) -> list | InconclusiveAtDepth:
    """All common fixed points.

    Torus: for a generator with det(A - I) != 0 the solutions of
    (A - I) x in Z^d form a group of |det(A - I)| points; the other
    generators then filter that finite candidate set.
    """
    if is_finite_model(a):
        return [x for x in a.space.points
                if all(a.generator_map(s, x) == x for s in a.group.ids)]
    if not isinstance(a, MatrixTorusAction):
        raise NotImplementedError
    for g in a.group.generators:
        M = linalg.minus_identity(a.group.image(g.id))
        if linalg.det(M) != 0:
            cands = CoveringMap(M).kernel()
            return [x for x in cands if all(a.generator_map(s, x) == x for s in a.group.ids)]
    return InconclusiveAtDepth(None, note="every generator has det(A - I) = 0")
