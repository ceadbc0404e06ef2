"""Group actions on the space families, conjugacy, restriction and covers."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from . import linalg
from .covers import LinearImage, OpenCover
from .groups import GroupPresentation, PermRep, Word, cayley_ball
from .spaces import FiniteMetricSpace, FiniteTopSpace, Torus, TorusPoint, torus_distance


class Action:
    """A group presentation bound to a space, one homeomorphism per generator."""

    group: GroupPresentation
    space: object

    def act(self, element, x):
        """Apply a canonical group element (matrix or permutation) to ``x``."""
        raise NotImplementedError

    def generator_map(self, s: int, x):
        return self.act(self.group.image(s), x)

    def element(self, w: Sequence[int]):
        return self.group.canonicalize(w)

    def apply_word(self, w: Sequence[int], x):
        if not self.space.contains(x):
            raise ValueError(f"point {x!r} is not in {self.space!r}")
        for s in reversed(w):
            x = self.generator_map(s, x)
        return x

    def distance(self, x, y) -> Fraction:
        return self.space.distance(x, y)


class MatrixTorusAction(Action):
    """``x -> A x mod 1`` with A the generator's unimodular matrix."""

    def __init__(self, group: GroupPresentation):
        if group.rep.kind != "matrix":
            raise ValueError("a torus action needs a matrix representation")
        self.group = group
        self.space = Torus(group.rep.dim)

    def __repr__(self):
        return f"MatrixTorusAction({[g.name for g in self.group.generators]})"

    def act(self, element, x: TorusPoint) -> TorusPoint:
        return TorusPoint(linalg.mat_vec(element, x.coords))


class PermAction(Action):
    """A permutation action on a finite metric or topological space.

    ``maps`` overrides the per-generator tables (defaults to the group's
    permutations); it exists to let axiom checks catch inconsistent input.
    On a finite topological space every generator must map opens to opens.
    """

    def __init__(self, group: GroupPresentation, space, maps: Sequence[Sequence[int]] | None = None):
        if group.rep.kind != "perm":
            raise ValueError("a finite-space action needs a permutation representation")
        if group.rep.degree != len(space):
            raise ValueError(f"permutations act on {group.rep.degree} points, space has {len(space)}")
        self.group = group
        self.space = space
        self.maps = tuple(tuple(m) for m in maps) if maps is not None else group.rep.images
        self.embedding: tuple | None = None
        if isinstance(space, FiniteTopSpace):
            for g, perm in zip(group.generators, self.maps):
                for U in space.opens:
                    if frozenset(perm[p] for p in U) not in space.opens:
                        raise ValueError(
                            f"generator {g.name} sends open set {sorted(U)} to a non-open set")

    def __repr__(self):
        return f"{type(self).__name__}({[g.name for g in self.group.generators]}, {self.space!r})"

    def act(self, element, x: int) -> int:
        return element[x]

    def generator_map(self, s: int, x: int) -> int:
        return self.maps[s][x]


class TopAction(PermAction):
    """A permutation action on a finite topological space (opens preserved)."""

    def __init__(self, group: GroupPresentation, space: FiniteTopSpace, maps=None):
        if not isinstance(space, FiniteTopSpace):
            raise TypeError("TopAction needs a FiniteTopSpace")
        super().__init__(group, space, maps)


def finite_action(group: GroupPresentation, space) -> PermAction:
    if isinstance(space, FiniteTopSpace):
        return TopAction(group, space)
    return PermAction(group, space)


def restrict_to_subgroup(a: Action, H) -> Action:
    """The same action, seen as an action of the subgroup H."""
    P = H.presentation()
    if isinstance(a, MatrixTorusAction):
        return MatrixTorusAction(P)
    return finite_action(P, a.space)


def is_finite_model(a: Action) -> bool:
    return bool(getattr(a.space, "is_finite", False))


@dataclass
class AxiomReport:
    checked: int = 0
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_axioms(a: Action, sample_words: Iterable[Sequence[int]], sample_points: Iterable) -> AxiomReport:
    """Check phi(gh, x) = phi(g, phi(h, x)) and phi(e, x) = x on the samples.

    A group element acts through its shortlex normal form, so generator
    tables that disagree with the group law show up as violations.
    """
    words = [tuple(w) for w in sample_words]
    points = list(sample_points)
    radius = 2 * max((len(w) for w in words), default=0)
    ball = cayley_ball(a.group, radius)
    normal = dict(ball)

    def phi(element, x):
        return a.apply_word(normal[element], x)

    report = AxiomReport()
    G = a.group
    e = G.identity()
    for x in points:
        report.checked += 1
        if phi(e, x) != x:
            report.violations.append({"axiom": "identity", "point": x})
    for u, v, x in itertools.product(words, words, points):
        report.checked += 1
        lhs = phi(G.canonicalize(u + v), x)
        rhs = phi(G.canonicalize(u), phi(G.canonicalize(v), x))
        if lhs != rhs:
            report.violations.append({"axiom": "compatibility", "g": G.format_word(u),
                                      "h": G.format_word(v), "point": x, "lhs": lhs, "rhs": rhs})
    return report


class TorusConjugacy:
    """``h(x) = P x mod 1`` for a unimodular integer matrix P."""

    def __init__(self, P):
        self.P = linalg.as_matrix(P)
        self.P_inv = linalg.int_inverse(self.P)

    def __call__(self, x: TorusPoint) -> TorusPoint:
        return TorusPoint(linalg.mat_vec(self.P, x.coords))

    def inverse(self) -> "TorusConjugacy":
        return TorusConjugacy(self.P_inv)

    def map_cover(self, U: OpenCover, target=None) -> OpenCover:
        members = []
        for m in U.members:
            if isinstance(m, LinearImage):
                members.append(LinearImage(m.region, linalg.mat_mul(self.P, m.matrix)))
            else:
                members.append(LinearImage(m, self.P))
        return OpenCover(U.space, members, U.names, check=False)


class FiniteConjugacy:
    """An explicit bijection from a finite space onto ``target``.

    Without a target the structure is pushed forward (relabelled copy).
    """

    def __init__(self, mapping: Sequence[int], source, target=None):
        self.mapping = tuple(int(v) for v in mapping)
        n = len(source)
        if sorted(self.mapping) != list(range(n)):
            raise ValueError("conjugacy must be a bijection")
        self.source = source
        self.target = target if target is not None else _pushforward(source, self.mapping)
        if len(self.target) != n:
            raise ValueError("source and target sizes differ")
        if isinstance(source, FiniteTopSpace):
            image = {frozenset(self.mapping[p] for p in U) for U in source.opens}
            if not isinstance(self.target, FiniteTopSpace) or image != set(self.target.opens):
                raise ValueError("conjugacy is not a homeomorphism of the topologies")

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    def inverse(self) -> "FiniteConjugacy":
        inv = [0] * len(self.mapping)
        for i, v in enumerate(self.mapping):
            inv[v] = i
        return FiniteConjugacy(inv, self.target, self.source)

    def map_cover(self, U: OpenCover, target=None) -> OpenCover:
        return OpenCover(target or self.target,
                         [frozenset(self.mapping[p] for p in m) for m in U.members], U.names)


def _pushforward(space, mapping):
    n = len(mapping)
    inv = [0] * n
    for i, v in enumerate(mapping):
        inv[v] = i
    labels = [space.labels[inv[j]] for j in range(n)]
    if isinstance(space, FiniteMetricSpace):
        return FiniteMetricSpace(labels, [[space.dist[inv[i]][inv[j]] for j in range(n)] for i in range(n)])
    return FiniteTopSpace(labels, [frozenset(mapping[p] for p in U) for U in space.opens])


def conjugate_action(a: Action, h) -> Action:
    """The action psi with psi_s = h . phi_s . h^-1 for every generator s."""
    G = a.group
    if isinstance(a, MatrixTorusAction):
        if not isinstance(h, TorusConjugacy):
            raise TypeError("torus actions are conjugated by a TorusConjugacy")
        images = [linalg.mat_mul(linalg.mat_mul(h.P, A), h.P_inv) for A in G.rep.images]
        return MatrixTorusAction(GroupPresentation(G.generators, G.rep.with_images(images)))
    if not isinstance(h, FiniteConjugacy):
        raise TypeError("finite actions are conjugated by a FiniteConjugacy")
    n = len(h.mapping)
    images = []
    for perm in a.maps:
        new = [0] * n
        for x in range(n):
            new[h.mapping[x]] = h.mapping[perm[x]]
        images.append(tuple(new))
    return finite_action(GroupPresentation(G.generators, PermRep(images)), h.target)


def orbit(a: Action, x, max_size: int = 100_000) -> list:
    """The G-orbit of x in breadth-first order (finite for rational torus points)."""
    seen = {x: None}
    frontier = [x]
    while frontier:
        nxt = []
        for y in frontier:
            for s in a.group.ids:
                z = a.generator_map(s, y)
                if z not in seen:
                    seen[z] = None
                    nxt.append(z)
                    if len(seen) > max_size:
                        raise ValueError(f"orbit exceeds {max_size} points")
        frontier = nxt
    return list(seen)


def restrict_to_invariant(a: Action, Y: Iterable) -> PermAction:
    """The action on an invariant finite subset Y with the induced structure.

    The result is a permutation action; ``embedding`` lists the original
    points in the order of the new indices.
    """
    pts = list(dict.fromkeys(Y))
    if not pts:
        raise ValueError("invariant subset must be non-empty")
    index = {p: i for i, p in enumerate(pts)}
    perms = []
    for s in a.group.ids:
        perm = []
        for p in pts:
            q = a.generator_map(s, p)
            if q not in index:
                g = a.group.generators[s].name
                raise ValueError(f"subset is not invariant: {g} maps {p} to {q}")
            perm.append(index[q])
        perms.append(tuple(perm))
    group = GroupPresentation(a.group.generators, PermRep(perms))
    if isinstance(a, MatrixTorusAction):
        space = FiniteMetricSpace([str(p) for p in pts],
                                  [[torus_distance(p, q) for q in pts] for p in pts])
    else:
        space = a.space.subspace(pts)
    out = finite_action(group, space)
    out.embedding = tuple(pts)
    return out


class CoveringMap:
    """The linear self-cover ``x -> D x mod 1`` of the torus."""

    def __init__(self, D):
        self.D = linalg.as_matrix(D)
        self.det = int(linalg.det(self.D))
        if self.det == 0:
            raise ValueError("covering matrix must be non-singular")
        self.D_inv = linalg.inverse(self.D)

    def __repr__(self):
        return f"CoveringMap({linalg.format_matrix(self.D)})"

    @property
    def dim(self) -> int:
        return len(self.D)

    def __call__(self, x: TorusPoint) -> TorusPoint:
        return TorusPoint(linalg.mat_vec(self.D, x.coords))

    def kernel(self) -> list[TorusPoint]:
        """The |det D| points of D^-1 Z^d / Z^d: closure of the columns of D^-1 mod 1."""
        cols = [TorusPoint(tuple(row[j] for row in self.D_inv)) for j in range(self.dim)]
        zero = TorusPoint((Fraction(0),) * self.dim)
        seen = {zero: None}
        frontier = [zero]
        while frontier:
            nxt = []
            for p in frontier:
                for c in cols:
                    q = p + c
                    if q not in seen:
                        seen[q] = None
                        nxt.append(q)
            frontier = nxt
        return sorted(seen)


def covering_fiber(f: CoveringMap, y: TorusPoint) -> list[TorusPoint]:
    base = TorusPoint(linalg.mat_vec(f.D_inv, y.coords))
    fiber = sorted(base + k for k in f.kernel())
    assert len(fiber) == abs(f.det)
    return fiber


def fiber_separation_beta(f: CoveringMap) -> Fraction:
    """Minimal distance between distinct points of one fiber."""
    if abs(f.det) < 2:
        raise ValueError("|det D| = 1: fibers are single points, no separation to bound")
    zero = TorusPoint((Fraction(0),) * f.dim)
    return min(torus_distance(k, zero) for k in f.kernel() if k != zero)


@dataclass
class SemiconjugacyReport:
    holds: bool
    failures: list[str]


def check_semiconjugacy(f: CoveringMap, phi: MatrixTorusAction, psi: MatrixTorusAction) -> SemiconjugacyReport:
    """Exact test of ``D A_s = A'_s D`` for every generator s."""
    if len(phi.group.generators) != len(psi.group.generators):
        raise ValueError("actions must come from the same generating set")
    if not (f.dim == phi.space.dim == psi.space.dim):
        raise ValueError("dimension mismatch between covering map and actions")
    failures = []
    for g in phi.group.generators:
        A, A2 = phi.group.image(g.id), psi.group.image(g.id)
        if linalg.mat_mul(f.D, A) != linalg.mat_mul(A2, f.D):
            failures.append(g.name)
    return SemiconjugacyReport(not failures, failures)
