"""Orbit-expansive covers: verification, decision, and the cover constructions.

A pair x != y is *co-bounded* by a cover U when every image pair
``{g x, g y}`` lies inside a single member of U. U is orbit-expansive for
an action when no distinct pair is co-bounded.

On finite spaces the pairs reachable from (x, y) under the generators are
exactly the pairs reachable under the whole image group, so closing pair
orbits decides the question with no depth bound.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from . import linalg
from .actions import Action, MatrixTorusAction, PermAction, TopAction, is_finite_model
from .covers import Arc, Box, BoxUnion, LinearImage, OpenCover, cover_join, dedupe, lebesgue_number, prec
from .expansivity import pair_orbits
from .groups import GroupPresentation, PermRep, cayley_ball
from .spaces import FiniteMetricSpace, FiniteTopSpace, RationalGrid, hausdorff_violation, is_hausdorff, is_T1


@dataclass(frozen=True)
class VerifiedAtDepth:
    """Every sampled distinct pair leaves U somewhere in ball(depth)."""

    depth: int
    pairs: int = 0

    kind = "verified"
    exit_code = 0


@dataclass(frozen=True)
class DecidedExpansiveCover:
    """Exact: no distinct pair is co-bounded under the whole image group."""

    cover: OpenCover = field(repr=False)

    kind = "decided"
    exit_code = 0


@dataclass(frozen=True)
class Refuted:
    """A distinct pair co-bounded by U over the searched elements.

    ``exact`` means the search covered the whole image group.
    """

    witness: tuple
    depth: int | None = None
    exact: bool = True

    kind = "refuted"
    exit_code = 1


OrbitCoverVerdict = Union[VerifiedAtDepth, DecidedExpansiveCover, Refuted]


def _check_cover(a: Action, U: OpenCover) -> None:
    if U.space is not a.space and U.space != a.space:
        raise ValueError("cover and action live on different spaces")
    if not U.covers_space():
        raise ValueError("the members do not cover the space")


def _together_table(U: OpenCover) -> list[list[bool]]:
    """together[x][y]: some member contains both x and y (finite spaces)."""
    n = len(U.space)
    tab = [[False] * n for _ in range(n)]
    for m in U.members:
        for x in m:
            for y in m:
                tab[x][y] = True
    return tab


def cobounded_pairs(a: Action, U: OpenCover) -> list[tuple[int, int]]:
    """All distinct pairs x < y co-bounded by U under the whole image group (finite spaces)."""
    together = _together_table(U)
    bad = []
    for orb in pair_orbits(a):
        if all(together[x][y] for x, y in orb):
            bad.extend(orb)
    return sorted(bad)


def is_orbit_expansive_finite(a: Action, U: OpenCover) -> bool:
    together = _together_table(U)
    return not any(all(together[x][y] for x, y in orb) for orb in pair_orbits(a))


def verify_orbit_expansive(a: Action, U: OpenCover, depth: int | None = None, sampler=None):
    """Decide (finite spaces) or search (torus) for a distinct co-bounded pair.

    On the torus the pairs come from ``sampler`` (default the grid of
    denominator 12) and the group elements from ball(depth).
    """
    _check_cover(a, U)
    if is_finite_model(a):
        bad = cobounded_pairs(a, U)
        if bad:
            return Refuted(bad[0], depth=None, exact=True)
        return DecidedExpansiveCover(U)
    depth = 8 if depth is None else depth
    grid = sampler if sampler is not None else RationalGrid(a.space.dim, 12)
    ball = cayley_ball(a.group, depth)
    if isinstance(a, MatrixTorusAction) and isinstance(grid, RationalGrid):
        return _verify_grid(a, U, ball, grid, depth)
    pts = list(grid)
    elems = list(ball)
    count = 0
    for x, y in itertools.combinations(pts, 2):
        count += 1
        if all(prec((a.act(g, x), a.act(g, y)), U) for g in elems):
            return Refuted((x, y), depth=depth, exact=ball.exhausted)
    return VerifiedAtDepth(depth, count)


def _verify_grid(a: MatrixTorusAction, U: OpenCover, ball, grid: RationalGrid, depth: int):
    q = grid.q
    ks = grid.integer_points()
    pts = list(grid)
    member = np.array([[U.member_contains(i, p) for i in range(len(U))] for p in pts], dtype=np.int32)
    n = len(pts)
    alive = np.ones((n, n), dtype=bool)
    np.fill_diagonal(alive, False)
    for g in ball:
        img = (ks @ np.array(g, dtype=np.int64).T) % q
        Mg = member[grid.index_of(img)]
        alive &= (Mg @ Mg.T) > 0
        if not alive.any():
            break
    hits = np.argwhere(np.triu(alive, 1))
    if hits.size:
        i, j = hits[0]
        return Refuted((pts[i], pts[j]), depth=depth, exact=ball.exhausted)
    return VerifiedAtDepth(depth, n * (n - 1) // 2)


def minimal_open_cover(X: FiniteTopSpace) -> OpenCover:
    """The cover by minimal open neighbourhoods; it refines every open cover."""
    members, names = [], []
    for x in X.points:
        m = X.minimal_open(x)
        if m not in members:
            members.append(m)
            names.append(f"N({X.labels[x]})")
    return OpenCover(X, members, names)


def decide_orbit_expansive_finite(a: Action) -> tuple[bool, OpenCover]:
    """Whether any orbit-expansive cover exists, with the canonical candidate.

    A refinement of an orbit-expansive cover is orbit-expansive and the
    minimal-neighbourhood cover refines every cover, so it alone decides.
    """
    X = a.space
    if isinstance(X, FiniteMetricSpace):
        U = OpenCover(X, [frozenset({x}) for x in X.points], [f"{{{l}}}" for l in X.labels])
    else:
        U = minimal_open_cover(X)
    return is_orbit_expansive_finite(a, U), U


# --- the two directions of the metric equivalence ---------------------------

def cover_from_constant(a: Action, c, q: int | None = None) -> OpenCover:
    """Open balls of radius c/2: around every point, or around the grid (1/q)Z^d.

    On the torus the balls are the half-open boxes ``[k/q - c/2, k/q + c/2)``;
    they cover iff c >= 1/q.
    """
    c = Fraction(c)
    if c <= 0:
        raise ValueError("c must be positive")
    X = a.space
    if isinstance(X, FiniteMetricSpace):
        r = c / 2
        members = [frozenset(y for y in X.points if X.distance(x, y) < r) for x in X.points]
        return OpenCover(X, members, [f"B({l})" for l in X.labels])
    if not hasattr(X, "dim"):
        raise TypeError(f"no metric balls on {X!r}")
    if q is None:
        q = max(2, -(-c.denominator // c.numerator))
    if c < Fraction(1, q):
        raise ValueError(f"grid 1/{q} too coarse for c = {c}: need q >= {-(-c.denominator // c.numerator)}")
    members, names = [], []
    for ks in itertools.product(range(q), repeat=X.dim):
        arcs = tuple(Arc(Fraction(k, q) - c / 2, c) for k in ks)
        members.append(BoxUnion([Box(arcs)]))
        names.append("B(" + ",".join(linalg.format_fraction(Fraction(k, q)) for k in ks) + ")")
    return OpenCover(X, members, names)


def constant_from_cover(U: OpenCover) -> Fraction:
    """delta/3 for the Lebesgue number delta of U (any value in (0, delta/2) works)."""
    return lebesgue_number(U) / 3


# --- images, subgroups, conjugates and traces --------------------------------

def image_cover(a: Action, U: OpenCover, w: Sequence[int]) -> OpenCover:
    """The cover {phi_w(U_i)}; the identity word returns U itself."""
    g = a.group.canonicalize(w)
    if g == a.group.identity():
        return U
    names = [f"{a.group.format_word(w)}({n})" for n in U.names]
    if is_finite_model(a):
        return OpenCover(U.space, [frozenset(a.act(g, p) for p in m) for m in U.members], names)
    members = []
    for m in U.members:
        if isinstance(m, LinearImage):
            members.append(LinearImage(m.region, linalg.mat_mul(g, m.matrix)))
        else:
            members.append(LinearImage(m, g))
    return OpenCover(U.space, members, names, check=False)


def subgroup_cover(U: OpenCover, a: Action, transversal: Sequence[Sequence[int]],
                   combine: str = "join") -> OpenCover:
    """A cover for the restriction to a finite-index subgroup.

    ``combine="join"`` (default) intersects the translates g_i^-1(U) over
    the transversal; this is orbit-expansive for the subgroup whenever U is
    for the whole group. ``combine="union"`` just collects all members
    g_i^-1(U_m); that family need not be orbit-expansive (see the tests).
    """
    if not transversal:
        raise ValueError("transversal must be non-empty")
    if combine not in ("join", "union"):
        raise ValueError("combine is 'join' or 'union'")
    G = a.group
    translates = [image_cover(a, U, G.inverse_word(w)) for w in transversal]
    if combine == "union":
        members = [m for T in translates for m in T.members]
        names = [n for T in translates for n in T.names]
        return OpenCover(U.space, members, names, check=False)
    out = translates[0]
    for T in translates[1:]:
        if is_finite_model(a):
            out = cover_join(out, T)
        else:
            raise NotImplementedError("torus joins are computed for box covers only")
    return dedupe(out)


def trace_cover(U: OpenCover, restricted: PermAction) -> OpenCover:
    """{U_i & Y} on an invariant subset Y, in the restricted action's indices."""
    emb = restricted.embedding
    if emb is None:
        raise ValueError("action carries no embedding; build it with restrict_to_invariant")
    members, names = [], []
    for n, i in zip(U.names, range(len(U))):
        m = frozenset(j for j, p in enumerate(emb) if U.member_contains(i, p))
        if m and m not in members:
            members.append(m)
            names.append(n)
    return OpenCover(restricted.space, members, names)


# --- the doubled fixed point -------------------------------------------------

@dataclass(frozen=True)
class DoubledPoint:
    space: FiniteTopSpace
    action: TopAction
    cover: OpenCover
    x0: int
    x1: int
    t1: bool
    hausdorff: bool
    hausdorff_violation: tuple | None
    orbit_expansive: bool


def doubled_point_example(a: Action, x0: int, U: OpenCover, n: int | None = None) -> DoubledPoint:
    """Add a twin x1 of the fixed point x0 and extend the action and the cover.

    Opens of the new space: opens of X, plus W + {x1} and (W - {x0}) + {x1}
    for every open W containing x0. The twin is fixed by every generator
    and the cover gains (U_n - {x0}) + {x1} for a member U_n containing x0.
    """
    X = a.space
    if not isinstance(X, (FiniteTopSpace, FiniteMetricSpace)):
        raise TypeError("needs a finite space")
    if any(a.generator_map(s, x0) != x0 for s in a.group.ids):
        raise ValueError(f"{X.labels[x0]} is not fixed by every generator")
    _check_cover(a, U)
    if not is_orbit_expansive_finite(a, U):
        raise ValueError("the input cover is not orbit-expansive")
    if n is None:
        n = next(i for i, m in enumerate(U.members) if x0 in m)
    elif x0 not in U.members[n]:
        raise ValueError(f"member {U.names[n]} does not contain {X.labels[x0]}")
    opens = X.opens if isinstance(X, FiniteTopSpace) else [
        frozenset(s) for r in range(len(X) + 1) for s in itertools.combinations(X.points, r)]
    x1 = len(X)
    labels = list(X.labels) + [X.labels[x0] + "'"]
    fam = set(opens)
    for W in opens:
        if x0 in W:
            fam.add(W | {x1})
            fam.add((W - {x0}) | {x1})
    Xb = FiniteTopSpace.generated_by(labels, fam)
    perms = [tuple(a.maps[s]) + (x1,) for s in a.group.ids] if isinstance(a, PermAction) else None
    G = GroupPresentation(a.group.generators, PermRep(perms))
    psi = TopAction(G, Xb)
    members = list(U.members) + [(U.members[n] - {x0}) | {x1}]
    V = OpenCover(Xb, members, list(U.names) + [f"{U.names[n]}'"])
    return DoubledPoint(Xb, psi, V, x0, x1, is_T1(Xb), is_hausdorff(Xb),
                        hausdorff_violation(Xb), is_orbit_expansive_finite(psi, V))
