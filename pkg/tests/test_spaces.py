from __future__ import annotations

import itertools
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expansia import linalg
from expansia.covers import Arc, BoxUnion, OpenCover, cover_join, lebesgue_number, prec, refines
from expansia.linalg import ParseError
from expansia.spaces import (FiniteMetricSpace, FiniteTopSpace, OpenInterval, Torus, TorusPoint, circle_distance,
                             is_hausdorff, is_T1, property_p_violation, property_p_witness, torus_distance)

F = Fraction


# --- linear algebra and parsing ----------------------------------------------

def test_parse_matrix_roundtrip():
    m = linalg.parse_matrix("-1,1;0,1")
    assert m == ((-1, 1), (0, 1))
    assert linalg.format_matrix(m) == "-1,1;0,1"


def test_parse_matrix_reports_column_of_short_row():
    with pytest.raises(ParseError) as exc:
        linalg.parse_matrix("1,2;3")
    assert exc.value.column == 5


def test_parse_matrix_reports_bad_entry():
    with pytest.raises(ParseError) as exc:
        linalg.parse_matrix("1,x;3,4")
    assert exc.value.column == 3


def test_parse_permutation():
    assert linalg.parse_permutation("2,0,1") == (2, 0, 1)
    with pytest.raises(ParseError):
        linalg.parse_permutation("0,0,1")


def test_exact_det_and_inverse():
    A = ((2, 1), (1, 1))
    assert linalg.det(A) == 1
    assert linalg.int_inverse(A) == ((1, -1), (-1, 2))
    assert linalg.det(((1, 2, 3), (0, 1, 4), (5, 6, 0))) == 1
    with pytest.raises(ValueError):
        linalg.int_inverse(((2, 0), (0, 1)))


# --- torus --------------------------------------------------------------------

def test_torus_distance_examples():
    assert torus_distance(TorusPoint.of(F(1, 3), F(1, 2)), TorusPoint.of(F(1, 3), F(1, 2))) == 0
    assert torus_distance(TorusPoint.of(0, 0), TorusPoint.of(F(3, 4), 0)) == F(1, 4)
    assert torus_distance(TorusPoint.of(F(1, 3), F(1, 2)), TorusPoint.of(F(2, 3), F(1, 2))) == F(1, 3)


def test_points_reduce_mod_one():
    p = TorusPoint.of(F(5, 4), F(-1, 3))
    assert p.coords == (F(1, 4), F(2, 3))
    assert TorusPoint.parse("(1/4, 2/3)") == p


rationals = st.fractions(min_value=-3, max_value=3, max_denominator=40)
points = st.tuples(rationals, rationals).map(lambda t: TorusPoint.of(*t))


@settings(max_examples=150, deadline=None)
@given(points, points, points)
def test_torus_distance_is_a_metric(x, y, z):
    assert torus_distance(x, y) == torus_distance(y, x)
    assert (torus_distance(x, y) == 0) == (x == y)
    assert torus_distance(x, z) <= torus_distance(x, y) + torus_distance(y, z)
    assert torus_distance(x, y) <= F(1, 2)


@settings(max_examples=100, deadline=None)
@given(rationals, rationals)
def test_circle_distance_symmetric(a, b):
    assert circle_distance(a, b) == circle_distance(b, a) == circle_distance(a + 1, b - 2)


# --- finite spaces --------------------------------------------------------------

def test_metric_parse_lower_triangle():
    X = FiniteMetricSpace.parse("a,b,c\n1\n2,1\n")
    assert X.distance(0, 2) == 2 and X.distance(2, 1) == 1


def test_metric_triangle_violation_only_warns():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        X = FiniteMetricSpace(["a", "b", "c"], [[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    assert X.triangle_violation() is not None
    assert any("triangle" in str(w.message) for w in caught)


def test_metric_rejects_zero_distance():
    with pytest.raises(ValueError):
        FiniteMetricSpace(["a", "b"], [[0, 0], [0, 0]])


def test_topology_must_be_closed():
    with pytest.raises(ValueError):
        FiniteTopSpace(["a", "b", "c"], [(), (0, 1, 2), (0,), (1,)])


def test_T1_examples():
    assert is_T1(FiniteTopSpace.discrete(3))
    sierpinski = FiniteTopSpace(["a", "b"], [(), (0,), (0, 1)])
    assert not is_T1(sierpinski)


@st.composite
def topologies(draw):
    n = draw(st.integers(1, 4))
    sub = draw(st.lists(st.frozensets(st.integers(0, n - 1)), max_size=4))
    return FiniteTopSpace.generated_by([str(i) for i in range(n)], sub)


@settings(max_examples=80, deadline=None)
@given(topologies())
def test_T1_iff_singletons_closed_iff_discrete(X):
    full = frozenset(X.points)
    closed_points = all(full - {x} in X.opens for x in X.points)
    discrete = len(X.opens) == 2 ** len(X)
    assert is_T1(X) == closed_points == discrete
    if is_T1(X):
        assert is_hausdorff(X)


def test_property_p_examples():
    assert property_p_witness(OpenInterval(), F(1, 4)) == (F(1, 4), F(3, 4))
    assert property_p_witness(Torus(2), F(1, 7)) == Torus(2)
    X = FiniteMetricSpace.discrete(3)
    assert property_p_witness(X, F(1, 2)) == frozenset(X.points)


def test_property_p_on_the_interval_fails_for_off_centre_pairs():
    # (1/10, 1/2) is 2/5 apart yet 1/10 lies outside [1/4, 3/4]
    I = OpenInterval()
    C = property_p_witness(I, F(1, 4))
    assert property_p_violation(I, C, F(1, 4), [F(1, 10), F(1, 2)]) == (F(1, 10), F(1, 2))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5), st.fractions(min_value=F(1, 10), max_value=3))
def test_property_p_identity_on_finite_spaces(n, eps):
    X = FiniteMetricSpace.discrete(n)
    C = property_p_witness(X, eps)
    assert property_p_violation(X, C, eps) is None


# --- covers -----------------------------------------------------------------------

def test_arc_wraps():
    a = Arc(F(3, 4), F(1, 2))
    assert a.contains(F(0)) and a.contains(F(9, 10)) and not a.contains(F(1, 2))


def test_prec_examples():
    T = Torus(2)
    quarters = OpenCover(T, [BoxUnion.box((F(i, 4), F(i + 1, 4)), (F(j, 4), F(j + 1, 4)))
                             for i in range(4) for j in range(4)])
    x = TorusPoint.of(F(1, 3), F(1, 5))
    assert prec([x], quarters)
    assert not prec([TorusPoint.of(0, 0), TorusPoint.of(F(1, 2), F(1, 2))], quarters)
    whole = OpenCover(T, [BoxUnion.box((0, 1), (0, 1))])
    assert prec([TorusPoint.of(0, 0), TorusPoint.of(F(1, 2), F(1, 2))], whole)


def test_refinement_examples():
    X = FiniteTopSpace.discrete(4)
    halves = OpenCover(X, [{0, 1}, {2, 3}])
    singles = OpenCover(X, [{i} for i in range(4)])
    assert refines(halves, halves) and refines(singles, halves) and not refines(halves, singles)


def test_join_with_whole_space_is_identity():
    X = FiniteTopSpace.discrete(4)
    V = OpenCover(X, [{0, 1}, {1, 2, 3}])
    J = cover_join(OpenCover(X, [set(range(4))]), V)
    assert set(J.members) == set(V.members)


def test_join_of_shifted_half_circles():
    S = Torus(1)
    U = OpenCover(S, [BoxUnion.parse("0..1/2"), BoxUnion.parse("1/2..1")])
    V = OpenCover(S, [BoxUnion.parse("1/4..3/4"), BoxUnion.parse("3/4..5/4")])
    J = cover_join(U, V)
    assert len(J) == 4
    arcs = sorted((b.arcs[0].start, b.arcs[0].width) for m in J.members for b in m.boxes)
    assert arcs == [(F(k, 4), F(1, 4)) for k in range(4)]


def test_cover_must_cover():
    with pytest.raises(ValueError):
        OpenCover(FiniteTopSpace.discrete(3), [{0}, {1}])
    with pytest.raises(ValueError):
        OpenCover(Torus(1), [BoxUnion.parse("0..1/2")])


def test_lebesgue_examples():
    X = FiniteMetricSpace.discrete(3)
    assert lebesgue_number(OpenCover(X, [{0, 1, 2}])) == 2
    assert lebesgue_number(OpenCover(X, [{0, 1}, {1, 2}, {0, 2}])) == 1
    S = Torus(1)
    circle = OpenCover(S, [BoxUnion.parse("0..2/3"), BoxUnion.parse("1/2..7/6")])
    assert lebesgue_number(circle) >= F(1, 6)


@st.composite
def finite_covers(draw):
    n = draw(st.integers(2, 5))
    vals = draw(st.lists(st.integers(1, 6), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))
    d = [[F(0)] * n for _ in range(n)]
    for (i, j), v in zip(itertools.combinations(range(n), 2), vals):
        d[i][j] = d[j][i] = F(v, 2)
    for k, i, j in itertools.product(range(n), repeat=3):  # shortest paths keep the triangle inequality
        d[i][j] = min(d[i][j], d[i][k] + d[k][j])
    X = FiniteMetricSpace([str(i) for i in range(n)], d)
    members = draw(st.lists(st.frozensets(st.integers(0, n - 1), min_size=1), max_size=4))
    members += [frozenset({i}) for i in range(n)]
    return X, OpenCover(X, list(dict.fromkeys(members)))


@settings(max_examples=80, deadline=None)
@given(finite_covers())
def test_lebesgue_number_is_valid_and_sharp(case):
    X, U = case
    delta = lebesgue_number(U)
    subsets = [S for r in range(1, len(X) + 1) for S in itertools.combinations(X.points, r)]

    def diam(S):
        return max((X.distance(a, b) for a, b in itertools.combinations(S, 2)), default=F(0))

    assert all(prec(S, U) for S in subsets if diam(S) < delta)
    assert delta > X.diameter or any(not prec(S, U) and diam(S) == delta for S in subsets)


@settings(max_examples=60, deadline=None)
@given(finite_covers(), st.data())
def test_join_refines_both(case, data):
    X, U = case
    members = data.draw(st.lists(st.frozensets(st.integers(0, len(X) - 1), min_size=1), max_size=3))
    V = OpenCover(X, list(dict.fromkeys(members + [frozenset(X.points)])))
    J = cover_join(U, V)
    assert refines(J, U) and refines(J, V) and refines(U, U)
    W = cover_join(J, U)
    assert refines(W, J) and refines(W, U)  # transitivity through J
