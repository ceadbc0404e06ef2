from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expansia import linalg
from expansia.groups import (GroupPresentation, Subgroup, SyndeticWitness, cayley_ball, coset_transversal,
                             enumerate_group, verify_syndetic_witness)
from expansia.linalg import ParseError

B = ((-1, 1), (0, 1))
C = ((-1, 0), (1, 1))


def bc_group():
    return GroupPresentation.from_matrices({"B": B, "C": C})


def cyclic(n):
    return GroupPresentation.from_permutations({"r": tuple((i + 1) % n for i in range(n))})


def test_empty_word_is_identity():
    G = bc_group()
    assert G.canonicalize(()) == ((1, 0), (0, 1))


def test_inverse_cancels():
    G = bc_group()
    b = G.parse_word("B")
    assert G.canonicalize(b + G.inverse_word(b)) == ((1, 0), (0, 1))


def test_product_of_example_matrices():
    G = bc_group()
    assert G.canonicalize(G.parse_word("B*C")) == ((2, 1), (1, 1))


def test_unknown_generator_id_rejected():
    with pytest.raises(ValueError):
        bc_group().canonicalize((7,))


def test_unknown_generator_name_located():
    with pytest.raises(ParseError) as exc:
        bc_group().parse_word("B*X")
    assert exc.value.column == 3


def test_inverses_are_added():
    G = GroupPresentation.from_matrices({"T": ((1, 1), (0, 1))})
    names = [g.name for g in G.generators]
    assert names == ["T", "T^-1"]
    t, tinv = G.generators
    assert t.inverse_id == tinv.id and tinv.inverse_id == t.id
    assert G.image(tinv.id) == ((1, -1), (0, 1))


def test_non_unimodular_generator_rejected():
    with pytest.raises(ValueError):
        GroupPresentation.from_matrices({"A": ((2, 0), (0, 2))})


def test_ball_wraps_on_five_cycle():
    assert len(cayley_ball(cyclic(5), 2)) == 5


def test_ball_of_free_cyclic_group():
    G = GroupPresentation.from_matrices({"T": ((1, 1), (0, 1))})
    ball = cayley_ball(G, 3)
    assert len(ball) == 7
    assert sorted(m[0][1] for m in ball) == list(range(-3, 4))


def test_ball_of_example_involutions():
    G = bc_group()
    assert linalg.mat_mul(B, B) == ((1, 0), (0, 1)) and linalg.mat_mul(C, C) == ((1, 0), (0, 1))
    assert set(cayley_ball(G, 1)) == {((1, 0), (0, 1)), B, C}


def test_ball_words_are_shortlex_least():
    G = cyclic(6)
    ball = cayley_ball(G, 3)
    # r^-1 has id 1; r^3 and r^-3 coincide, r comes first
    assert ball[G.canonicalize((0, 0, 0))] == (0, 0, 0)


def test_enumerate_exhausts():
    ball = enumerate_group(cyclic(6))
    assert ball.exhausted and len(ball) == 6


def test_syndetic_examples():
    G = cyclic(6)
    H = Subgroup(G, ((0, 0),))
    assert verify_syndetic_witness(G, H, SyndeticWitness(((), (0,))), 6).kind == "certified"
    v = verify_syndetic_witness(G, H, SyndeticWitness(((),)), 2)
    assert v.kind == "falsified" and len(v.witness[0]) % 2 == 1


def test_syndetic_matrix_group_never_falsified_without_exact_membership():
    G = bc_group()
    H = Subgroup.parse(G, ["B*C"])
    v = verify_syndetic_witness(G, H, SyndeticWitness.symmetric(G, [(), G.parse_word("B")]), 3)
    assert v.kind in ("certified", "inconclusive")


def test_syndetic_whole_group_always_certified():
    G = cyclic(6)
    K = SyndeticWitness(tuple(cayley_ball(G, 1).values()))
    for depth in range(5):
        assert verify_syndetic_witness(G, Subgroup(G, ((0,),)), K, depth).kind == "certified"


def test_empty_witness_rejected():
    G = cyclic(4)
    with pytest.raises(ValueError):
        verify_syndetic_witness(G, Subgroup(G, ((0,),)), SyndeticWitness(()), 2)


def test_symmetric_witness_closed_under_inversion():
    G = cyclic(6)
    K = SyndeticWitness.symmetric(G, [(0,), (0, 0)])
    images = {G.canonicalize(w) for w in K.K}
    assert all(G.rep.invert(g) in images for g in images)


def test_transversal_examples():
    G = cyclic(6)
    assert coset_transversal(G, Subgroup(G, ((0, 0),)), 6) == [(), (0,)]
    assert coset_transversal(G, Subgroup(G, ((0,),)), 6) == [()]
    assert len(coset_transversal(G, Subgroup(G, ((0, 0, 0),)), 6)) == 3


def test_transversal_needs_exhausted_image():
    G = cyclic(6)
    assert coset_transversal(G, Subgroup(G, ((0, 0),)), 1).kind == "inconclusive"


def test_matrix_transversal_of_infinite_index_is_inconclusive():
    # BC has infinite order, so <B> has infinite index and the coset count never settles
    G = bc_group()
    out = coset_transversal(G, Subgroup.parse(G, ["B"]), 4)
    assert not isinstance(out, list)


words = st.lists(st.integers(0, 2), max_size=6).map(tuple)  # a, a^-1, b (an involution)


@settings(max_examples=60, deadline=None)
@given(words, words)
def test_canonicalize_is_a_homomorphism(u, v):
    G = GroupPresentation.from_permutations({"a": (1, 2, 0, 3), "b": (0, 1, 3, 2)})
    assert G.canonicalize(u + v) == G.rep.compose(G.canonicalize(u), G.canonicalize(v))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 1), max_size=5).map(tuple))
def test_canonical_inverse(w):
    G = bc_group()
    assert G.canonicalize(G.inverse_word(w)) == G.rep.invert(G.canonicalize(w))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 6))
def test_balls_are_nested(n):
    G = GroupPresentation.from_permutations({"a": (1, 2, 0, 3, 4), "b": (0, 1, 2, 4, 3)})
    small, big = cayley_ball(G, n), cayley_ball(G, n + 1)
    assert set(small) <= set(big)
    if len(small) == len(big):
        assert set(cayley_ball(G, n + 3)) == set(small)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(0, 3))
def test_syndetic_iff_cosets_hit(k, shift):
    # certified exactly when every Kg meets H (brute force over the finite image)
    G = cyclic(8)
    H = Subgroup(G, ((0,) * 4,))
    K = SyndeticWitness(tuple((0,) * (shift + j) for j in range(k)))
    elements = list(enumerate_group(G))
    hs = set(enumerate_group(H.presentation()))
    ks = [G.canonicalize(w) for w in K.K]
    kh = all(any(G.rep.compose(kk, g) in hs for kk in ks) for g in elements)
    verdict = verify_syndetic_witness(G, H, K, 8)
    assert (verdict.kind == "certified") == kh
