"""Property suites over seeded random models.

Each property is checked on every generated model and reports the first
counterexample. Suites are deterministic given the seed.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import linalg
from .actions import (CoveringMap, MatrixTorusAction, TorusConjugacy, check_semiconjugacy, conjugate_action,
                      orbit, restrict_to_invariant, restrict_to_subgroup)
from .covers import OpenCover, cover_join
from .expansivity import certify_linear, falsify_expansive, finite_expansive_sup, fixed_points, is_hyperbolic
from .groups import GroupPresentation, coset_transversal, enumerate_group
from .models import random_conjugacy, random_metric_model, random_subgroup, random_top_model
from .orbit import (constant_from_cover, cover_from_constant, decide_orbit_expansive_finite, doubled_point_example,
                    image_cover, is_orbit_expansive_finite, subgroup_cover, trace_cover)
from .spaces import FiniteTopSpace, is_T1

MAX_INDEX_GROUP = 720


@dataclass
class PropertyResult:
    name: str
    checked: int = 0
    failures: int = 0
    counterexample: str | None = None

    def record(self, ok: bool, describe: Callable[[], str]) -> None:
        self.checked += 1
        if not ok:
            self.failures += 1
            if self.counterexample is None:
                self.counterexample = describe()

    @property
    def passed(self) -> bool:
        return self.failures == 0


@dataclass
class SuiteResult:
    name: str
    seed: int
    models: int
    properties: list[PropertyResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.properties)


def _describe(a) -> str:
    maps = ";".join(",".join(map(str, m)) for m in a.maps)
    return f"{len(a.space)} points, generators {maps}"


def random_cover(rng: random.Random, a) -> OpenCover:
    """Random open sets topped up by minimal neighbourhoods of uncovered points."""
    X = a.space
    if isinstance(X, FiniteTopSpace):
        opens = sorted((U for U in X.opens if U), key=sorted)
        members = [rng.choice(opens) for _ in range(rng.randint(0, 3))]
        nbhd = X.minimal_open
    else:
        pts = list(X.points)
        members = [frozenset(rng.sample(pts, rng.randint(1, len(pts)))) for _ in range(rng.randint(0, 3))]
        nbhd = lambda x: frozenset({x})  # noqa: E731
    covered = frozenset().union(*members) if members else frozenset()
    for x in X.points:
        if x not in covered:
            members.append(nbhd(x))
            covered |= members[-1]
    return OpenCover(X, list(dict.fromkeys(members)))


def metric_suite(seed: int, models: int = 200) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("metric-finite", seed, models)
    ball_route = PropertyResult("exhaustive-search-matches-ball-search")
    downward = PropertyResult("constants-downward-closed")
    syndetic = PropertyResult("syndetic-subgroup-keeps-expansivity")
    conj = PropertyResult("conjugacy-preserves-constants")
    inv = PropertyResult("invariant-subset-keeps-constant")
    res.properties += [ball_route, downward, syndetic, conj, inv]
    for _ in range(models):
        a = random_metric_model(rng)
        sup = finite_expansive_sup(a)
        order = len(enumerate_group(a.group))
        if order <= MAX_INDEX_GROUP:
            for c in (sup, sup / 2):
                exact = falsify_expansive(a, c).kind
                by_ball = falsify_expansive(a, c, depth=order).kind
                ball_route.record(exact == by_ball, lambda: f"{_describe(a)}, c={c}")
        c = sup / 2
        for k in (1, 2, 3):
            smaller = c * k / 4
            downward.record(falsify_expansive(a, smaller).kind == "certified",
                            lambda: f"{_describe(a)}, c={smaller}")
        if order <= MAX_INDEX_GROUP:
            H = random_subgroup(rng, a.group)
            K = coset_transversal(a.group, H, order)
            ah = restrict_to_subgroup(a, H)
            delta = _syndetic_delta(a, K, c)
            sup_h = finite_expansive_sup(ah)
            syndetic.record(sup_h is not None and sup_h >= delta,
                            lambda: f"{_describe(a)}, H={H.gens}, sup_H={sup_h}, delta={delta}")
        h = random_conjugacy(rng, a.space)
        b = conjugate_action(a, h)
        conj.record(finite_expansive_sup(b) == sup, lambda: _describe(a))
        Y = orbit(a, rng.randrange(len(a.space)))
        if len(Y) >= 2:
            r = restrict_to_invariant(a, Y)
            inv.record(falsify_expansive(r, c).kind == "certified", lambda: f"{_describe(a)}, Y={Y}")
    return res


def _syndetic_delta(a, K, c: Fraction) -> Fraction:
    """min d(u, v) over distinct pairs separated beyond c by some element of K."""
    ks = [a.group.canonicalize(w) for w in K]
    best = None
    for u in a.space.points:
        for v in a.space.points:
            if u < v and any(a.distance(a.act(k, u), a.act(k, v)) > c for k in ks):
                d = a.distance(u, v)
                best = d if best is None or d < best else best
    return best if best is not None else a.space.diameter


def orbit_suite(seed: int, models: int = 200) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("orbit-finite", seed, models)
    forward = PropertyResult("constant-gives-orbit-expansive-cover")
    backward = PropertyResult("orbit-expansive-cover-gives-constant")
    join = PropertyResult("join-and-refinement-closure")
    image = PropertyResult("image-cover-invariance")
    index = PropertyResult("finite-index-subgroup-cover")
    conj = PropertyResult("conjugated-cover-invariance")
    trace = PropertyResult("invariant-subset-trace")
    res.properties += [forward, backward, join, image, index, conj, trace]
    for _ in range(models):
        a = random_metric_model(rng, max_points=7)
        sup = finite_expansive_sup(a)
        c = sup * Fraction(rng.randint(1, 9), 10)
        U = cover_from_constant(a, c)
        forward.record(is_orbit_expansive_finite(a, U), lambda: f"{_describe(a)}, c={c}")
        R = random_cover(rng, a)
        for cover in (U, R):
            if is_orbit_expansive_finite(a, cover):
                cc = constant_from_cover(cover)
                backward.record(falsify_expansive(a, cc).kind == "certified",
                                lambda: f"{_describe(a)}, cover={cover.members}")
        if is_orbit_expansive_finite(a, R):
            W = cover_join(R, random_cover(rng, a))
            join.record(is_orbit_expansive_finite(a, W), lambda: f"{_describe(a)}, cover={R.members}")
        w = tuple(rng.choice(list(a.group.ids)) for _ in range(rng.randint(0, 3)))
        image.record(is_orbit_expansive_finite(a, image_cover(a, R, w)) == is_orbit_expansive_finite(a, R),
                     lambda: f"{_describe(a)}, word={w}")
        order = len(enumerate_group(a.group))
        if order <= MAX_INDEX_GROUP:
            H = random_subgroup(rng, a.group)
            T = coset_transversal(a.group, H, order)
            V = subgroup_cover(U, a, T)
            index.record(is_orbit_expansive_finite(restrict_to_subgroup(a, H), V),
                         lambda: f"{_describe(a)}, H={H.gens}")
        h = random_conjugacy(rng, a.space)
        b = conjugate_action(a, h)
        conj.record(is_orbit_expansive_finite(b, h.map_cover(R)) == is_orbit_expansive_finite(a, R),
                    lambda: f"{_describe(a)}, h={h.mapping}")
        Y = orbit(a, rng.randrange(len(a.space)))
        r = restrict_to_invariant(a, Y)
        if len(Y) >= 2:
            trace.record(is_orbit_expansive_finite(r, trace_cover(U, r)), lambda: f"{_describe(a)}, Y={Y}")
    return res


def topology_suite(seed: int, models: int = 500) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("topology-finite", seed, models)
    t1 = PropertyResult("orbit-expansive-implies-T1")
    conj = PropertyResult("conjugated-cover-invariance")
    doubled = PropertyResult("doubled-point-construction")
    res.properties += [t1, conj, doubled]
    for _ in range(models):
        a = random_top_model(rng)
        ok, U = decide_orbit_expansive_finite(a)
        if ok:
            t1.record(is_T1(a.space), lambda: f"{_describe(a)}, opens={sorted(map(sorted, a.space.opens))}")
        R = random_cover(rng, a)
        h = random_conjugacy(rng, a.space)
        b = conjugate_action(a, h)
        conj.record(is_orbit_expansive_finite(b, h.map_cover(R)) == is_orbit_expansive_finite(a, R),
                    lambda: f"{_describe(a)}, h={h.mapping}")
        fixed = fixed_points(a)
        if ok and fixed:
            D = doubled_point_example(a, fixed[0], U)
            doubled.record(D.t1 and D.orbit_expansive, lambda: _describe(a))
    return res


def random_unimodular(rng: random.Random, entries: int = 3) -> linalg.Matrix:
    while True:
        m = ((rng.randint(-entries, entries), rng.randint(-entries, entries)),
             (rng.randint(-entries, entries), rng.randint(-entries, entries)))
        if abs(linalg.det(m)) == 1:
            return m


def torus_suite(seed: int, models: int = 100) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("torus", seed, models)
    conj = PropertyResult("conjugacy-preserves-linear-verdict")
    fixed = PropertyResult("fixed-point-count")
    semi = PropertyResult("scalar-cover-semiconjugacy")
    res.properties += [conj, fixed, semi]
    for _ in range(models):
        A = random_unimodular(rng)
        P = random_unimodular(rng, 2)
        a = MatrixTorusAction(GroupPresentation.from_matrices({"A": A}))
        b = conjugate_action(a, TorusConjugacy(P))
        conj.record(certify_linear(a.group, 3).kind == certify_linear(b.group, 3).kind,
                    lambda: f"A={A}, P={P}")
        if is_hyperbolic(A)[0]:
            fx = fixed_points(a)
            n = abs(linalg.det(linalg.minus_identity(A)))
            fixed.record(len(fx) == n, lambda: f"A={A}")
        k = rng.randint(2, 4)
        f = CoveringMap(((k, 0), (0, k)))
        semi.record(check_semiconjugacy(f, a, a).holds, lambda: f"A={A}, k={k}")
    return res


SUITES = {
    "metric-finite": metric_suite,
    "orbit-finite": orbit_suite,
    "topology-finite": topology_suite,
    "torus": torus_suite,
}
