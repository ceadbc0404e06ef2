from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from expansia import linalg
from expansia.actions import (CoveringMap, FiniteConjugacy, MatrixTorusAction, PermAction, TopAction,
                              TorusConjugacy, check_axioms, check_semiconjugacy, conjugate_action, covering_fiber,
                              fiber_separation_beta, orbit, restrict_to_invariant)
from expansia.groups import GroupPresentation, cayley_ball
from expansia.models import random_metric_model
from expansia.spaces import FiniteMetricSpace, FiniteTopSpace, TorusPoint

F = Fraction
BC = ((2, 1), (1, 1))


def bc_action():
    return MatrixTorusAction(GroupPresentation.from_matrices({"BC": BC}))


def test_identity_word_fixes_points():
    x = TorusPoint.of(F(1, 5), F(2, 7))
    assert bc_action().apply_word((), x) == x


def test_bc_on_a_fifth():
    assert bc_action().apply_word((0,), TorusPoint.of(F(1, 5), 0)) == TorusPoint.of(F(2, 5), F(1, 5))


def test_three_cycle_has_order_three():
    G = GroupPresentation.from_permutations({"c": (1, 2, 0)})
    a = PermAction(G, FiniteMetricSpace.discrete(3))
    assert all(a.apply_word((0, 0, 0), x) == x for x in range(3))


def test_torus_axioms_hold():
    a = MatrixTorusAction(GroupPresentation.from_matrices({"B": ((-1, 1), (0, 1)), "C": ((-1, 0), (1, 1))}))
    words = list(cayley_ball(a.group, 2).values())
    pts = [TorusPoint.of(F(i, 5), F(j, 3)) for i in range(5) for j in range(3)]
    assert check_axioms(a, words, pts).ok


def test_wrong_inverse_table_is_reported():
    # the table for c^-1 repeats c, so c * c^-1 moves points
    G = GroupPresentation.from_permutations({"c": (1, 2, 0)})
    a = PermAction(G, FiniteMetricSpace.discrete(3), maps=[(1, 2, 0), (1, 2, 0)])
    report = check_axioms(a, [(0,), (1,)], range(3))
    assert not report.ok
    assert any(v["axiom"] == "compatibility" for v in report.violations)


def test_top_action_must_preserve_opens():
    X = FiniteTopSpace(["a", "b"], [(), (0,), (0, 1)])
    G = GroupPresentation.from_permutations({"s": (1, 0)})
    with pytest.raises(ValueError):
        TopAction(G, X)


def test_conjugate_torus_action():
    P = ((1, 1), (0, 1))
    b = conjugate_action(bc_action(), TorusConjugacy(P))
    M = b.group.image(0)
    assert M == linalg.mat_mul(linalg.mat_mul(P, BC), linalg.int_inverse(P))
    assert linalg.trace(M) == 3 and linalg.det(M) == 1


def test_conjugate_by_identity_is_same_action():
    b = conjugate_action(bc_action(), TorusConjugacy(((1, 0), (0, 1))))
    assert b.group.image(0) == BC


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_conjugation_round_trip(seed):
    rng = random.Random(seed)
    a = random_metric_model(rng, max_points=6)
    perm = list(range(len(a.space)))
    rng.shuffle(perm)
    h = FiniteConjugacy(perm, a.space)
    back = conjugate_action(conjugate_action(a, h), h.inverse())
    assert back.maps == a.maps
    assert back.space.dist == a.space.dist


def test_finite_relabelling_preserves_orbits():
    rng = random.Random(1)
    a = random_metric_model(rng, max_points=6)
    h = FiniteConjugacy(list(reversed(range(len(a.space)))), a.space)
    b = conjugate_action(a, h)
    assert sorted(len(orbit(a, x)) for x in a.space.points) == sorted(len(orbit(b, x)) for x in b.space.points)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.lists(st.integers(0, 5), max_size=4), st.lists(st.integers(0, 5), max_size=4))
def test_apply_word_is_an_action(seed, u, v):
    a = random_metric_model(random.Random(seed), max_points=6)
    k = len(a.group.generators)
    u, v = tuple(s % k for s in u), tuple(s % k for s in v)
    for x in a.space.points:
        assert a.apply_word(u + v, x) == a.apply_word(u, a.apply_word(v, x))


def test_restrict_to_fixed_points_gives_identity():
    G = GroupPresentation.from_permutations({"s": (1, 0, 2, 3)})
    a = PermAction(G, FiniteMetricSpace.discrete(4))
    r = restrict_to_invariant(a, [2, 3])
    assert r.maps == ((0, 1),)


def test_restrict_to_torus_orbit():
    a = bc_action()
    Y = orbit(a, TorusPoint.of(F(1, 5), F(1, 5)))
    r = restrict_to_invariant(a, Y)
    assert len(r.space) == len(Y) and r.embedding == tuple(Y)
    with pytest.raises(ValueError):
        restrict_to_invariant(a, Y[:-1])


def test_semiconjugacy_examples():
    phi = bc_action()
    assert check_semiconjugacy(CoveringMap(((2, 0), (0, 2))), phi, phi).holds
    A = MatrixTorusAction(GroupPresentation.from_matrices({"A": ((1, 1), (0, 1))}))
    A2 = MatrixTorusAction(GroupPresentation.from_matrices({"A": ((1, 2), (0, 1))}))
    report = check_semiconjugacy(CoveringMap(((1, 0), (0, 2))), A, A2)
    assert not report.holds and "A" in report.failures
    assert check_semiconjugacy(CoveringMap(((1, 0), (0, 1))), A, A).holds
    assert not check_semiconjugacy(CoveringMap(((1, 0), (0, 1))), A, A2).holds


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.lists(st.sampled_from([0, 1]), max_size=5),
       st.integers(0, 11), st.integers(0, 11))
def test_positive_semiconjugacy_commutes_pointwise(k, w, i, j):
    phi = MatrixTorusAction(GroupPresentation.from_matrices({"BC": BC}))
    f = CoveringMap(((k, 0), (0, k)))
    assert check_semiconjugacy(f, phi, phi).holds
    x = TorusPoint.of(F(i, 12), F(j, 7))
    assert f(phi.apply_word(tuple(w), x)) == phi.apply_word(tuple(w), f(x))


def test_fiber_examples():
    two = CoveringMap(((2, 0), (0, 2)))
    assert covering_fiber(two, TorusPoint.of(0, 0)) == [
        TorusPoint.of(0, 0), TorusPoint.of(0, F(1, 2)), TorusPoint.of(F(1, 2), 0), TorusPoint.of(F(1, 2), F(1, 2))]
    y = TorusPoint.of(F(1, 3), F(2, 5))
    assert covering_fiber(CoveringMap(((1, 0), (0, 1))), y) == [y]
    single = covering_fiber(CoveringMap(BC), y)
    assert len(single) == 1 and CoveringMap(BC)(single[0]) == y


def test_beta_examples():
    assert fiber_separation_beta(CoveringMap(((2, 0), (0, 2)))) == F(1, 2)
    assert fiber_separation_beta(CoveringMap(((3, 0), (0, 3)))) == F(1, 3)
    assert fiber_separation_beta(CoveringMap(((2, 0), (0, 1)))) == F(1, 2)
    with pytest.raises(ValueError):
        fiber_separation_beta(CoveringMap(BC))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([((2, 0), (0, 2)), ((2, 1), (0, 3)), ((1, 2), (3, 1)), ((3, 0), (0, 1))]),
       st.integers(0, 5), st.integers(0, 3))
def test_fiber_maps_onto_y_and_is_separated(D, i, j):
    f = CoveringMap(D)
    y = TorusPoint.of(F(i, 6), F(j, 4))
    fib = covering_fiber(f, y)
    assert len(fib) == abs(f.det)
    assert all(f(x) == y for x in fib)
    beta = fiber_separation_beta(f)
    assert all(oracles.torus_dist(p.coords, q.coords) >= beta for p in fib for q in fib if p != q)
