"""Seeded random finite models for the property suites."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .actions import FiniteConjugacy, PermAction, TopAction
from .groups import GroupPresentation, Subgroup
from .spaces import FiniteMetricSpace, FiniteTopSpace


def random_permutations(rng: random.Random, n: int, k: int) -> dict[str, tuple[int, ...]]:
    out = {}
    for i in range(k):
        p = list(range(n))
        rng.shuffle(p)
        out[f"s{i + 1}"] = tuple(p)
    return out


def random_metric(rng: random.Random, n: int, max_weight: int = 6, den: int = 2) -> FiniteMetricSpace:
    """Shortest-path metric of a complete graph with random positive rational weights.

    Closing under shortest paths guarantees the triangle inequality.
    """
    d = [[Fraction(0)] * n for _ in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        d[i][j] = d[j][i] = Fraction(rng.randint(1, max_weight), den)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return FiniteMetricSpace([f"p{i}" for i in range(n)], d)


def random_metric_model(rng: random.Random, max_points: int = 8, max_gens: int = 3) -> PermAction:
    n = rng.randint(2, max_points)
    k = rng.randint(1, max_gens)
    G = GroupPresentation.from_permutations(random_permutations(rng, n, k))
    return PermAction(G, random_metric(rng, n))


def random_invariant_topology(rng: random.Random, n: int, perms) -> FiniteTopSpace:
    """Topology generated by random sets together with all their images under ``perms``."""
    sub = set()
    for _ in range(rng.randint(0, 3)):
        size = rng.randint(1, n)
        sub.add(frozenset(rng.sample(range(n), size)))
    if rng.random() < 0.25:
        sub.add(frozenset({rng.randrange(n)}))
    closed = set(sub)
    frontier = list(sub)
    while frontier:
        nxt = []
        for U in frontier:
            for p in perms:
                V = frozenset(p[x] for x in U)
                if V not in closed:
                    closed.add(V)
                    nxt.append(V)
        frontier = nxt
    return FiniteTopSpace.generated_by([f"p{i}" for i in range(n)], closed)


def random_top_model(rng: random.Random, max_points: int = 6, max_gens: int = 2) -> TopAction:
    n = rng.randint(2, max_points)
    k = rng.randint(1, max_gens)
    perms = random_permutations(rng, n, k)
    # bias towards small groups so that non-trivial topologies survive
    if rng.random() < 0.5:
        perms = {name: _power(p, rng.randint(0, 3)) for name, p in perms.items()}
    G = GroupPresentation.from_permutations(perms)
    X = random_invariant_topology(rng, n, list(perms.values()))
    return TopAction(G, X)


def _power(p: tuple[int, ...], e: int) -> tuple[int, ...]:
    out = tuple(range(len(p)))
    for _ in range(e):
        out = tuple(p[i] for i in out)
    return out


def random_subgroup(rng: random.Random, G: GroupPresentation) -> Subgroup:
    """Generated by one or two random short words (possibly trivial)."""
    words = []
    for _ in range(rng.randint(1, 2)):
        words.append(tuple(rng.choice(list(G.ids)) for _ in range(rng.randint(1, 3))))
    return Subgroup(G, tuple(words))


def random_conjugacy(rng: random.Random, space) -> FiniteConjugacy:
    p = list(range(len(space)))
    rng.shuffle(p)
    return FiniteConjugacy(p, space)
