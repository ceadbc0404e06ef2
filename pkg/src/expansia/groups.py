"""Finitely generated groups given by a faithful matrix or permutation image.

A word is a tuple of generator ids read left to right; it denotes the
product ``s1 s2 ... sn`` and, under a left action, acts on a point by
applying ``sn`` first. Element equality is equality of images.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterator, Mapping, Sequence

from . import linalg
from .verdict import Certified, Falsified, InconclusiveAtDepth, Verdict

Word = tuple[int, ...]
Element = Hashable


@dataclass(frozen=True)
class Generator:
    id: int
    inverse_id: int
    name: str


class Representation:
    """Per-generator images plus the group law of the ambient group."""

    kind = "abstract"

    def __init__(self, images: Sequence):
        self.images = tuple(images)

    def identity(self):
        raise NotImplementedError

    def compose(self, a, b):
        """The product ``a b`` (``a`` after ``b`` as maps)."""
        raise NotImplementedError

    def invert(self, a):
        raise NotImplementedError

    def with_images(self, images: Sequence) -> "Representation":
        return type(self)(images)


class MatrixRep(Representation):
    """Unimodular integer matrices acting by multiplication."""

    kind = "matrix"

    def __init__(self, images: Sequence[linalg.Matrix]):
        images = [linalg.as_matrix(m) for m in images]
        if not images:
            raise ValueError("need at least one generator matrix")
        self.dim = len(images[0])
        for m in images:
            if len(m) != self.dim:
                raise ValueError("all generator matrices must share one dimension")
            if abs(linalg.det(m)) != 1:
                raise ValueError(f"matrix {m} has determinant {linalg.det(m)}, not +-1")
        super().__init__(images)

    def identity(self):
        return linalg.identity(self.dim)

    def compose(self, a, b):
        return linalg.mat_mul(a, b)

    def invert(self, a):
        return linalg.int_inverse(a)


class PermRep(Representation):
    """Permutations of ``range(degree)`` stored as image tuples."""

    kind = "perm"

    def __init__(self, images: Sequence[Sequence[int]]):
        images = [tuple(int(v) for v in p) for p in images]
        if not images:
            raise ValueError("need at least one generator permutation")
        self.degree = len(images[0])
        for p in images:
            if sorted(p) != list(range(self.degree)):
                raise ValueError(f"{p} is not a permutation of 0..{self.degree - 1}")
        super().__init__(images)

    def identity(self):
        return tuple(range(self.degree))

    def compose(self, a, b):
        return tuple(a[i] for i in b)

    def invert(self, a):
        inv = [0] * len(a)
        for i, v in enumerate(a):
            inv[v] = i
        return tuple(inv)


class GroupPresentation:
    """A symmetric generating set with a faithful representation.

    Use :meth:`from_matrices` or :meth:`from_permutations`; inverses are
    added automatically, except for involutions which are their own inverse.
    """

    def __init__(self, generators: Sequence[Generator], rep: Representation):
        self.generators = tuple(generators)
        self.rep = rep
        if len(rep.images) != len(self.generators):
            raise ValueError("one image per generator required")
        for g in self.generators:
            inv = self.generators[g.inverse_id]
            if inv.inverse_id != g.id:
                raise ValueError(f"generator {g.name} has an asymmetric inverse link")
            if rep.compose(rep.images[g.id], rep.images[inv.id]) != rep.identity():
                raise ValueError(f"image of {inv.name} is not the inverse of {g.name}")
        self._by_name = {g.name: g.id for g in self.generators}

    @classmethod
    def from_elements(cls, rep_type: type[Representation],
                      named: Mapping[str, object]) -> "GroupPresentation":
        probe = rep_type(list(named.values()))
        gens: list[Generator] = []
        images: list = []
        for name, image in zip(named, probe.images):
            inv = probe.invert(image)
            gid = len(gens)
            if inv == image:
                gens.append(Generator(gid, gid, name))
                images.append(image)
            else:
                gens.append(Generator(gid, gid + 1, name))
                gens.append(Generator(gid + 1, gid, f"{name}^-1"))
                images.extend([image, inv])
        return cls(gens, rep_type(images))

    @classmethod
    def from_matrices(cls, named: Mapping[str, object]) -> "GroupPresentation":
        return cls.from_elements(MatrixRep, named)

    @classmethod
    def from_permutations(cls, named: Mapping[str, object]) -> "GroupPresentation":
        return cls.from_elements(PermRep, named)

    def __repr__(self):
        return f"GroupPresentation({[g.name for g in self.generators]}, {self.rep.kind})"

    @property
    def ids(self) -> range:
        return range(len(self.generators))

    def image(self, gid: int):
        return self.rep.images[gid]

    def identity(self):
        return self.rep.identity()

    def canonicalize(self, w: Sequence[int]):
        for letter in w:
            if not 0 <= letter < len(self.generators):
                raise ValueError(f"unknown generator id {letter}")
        result = self.rep.identity()
        for letter in w:
            result = self.rep.compose(result, self.rep.images[letter])
        return result

    def inverse_word(self, w: Sequence[int]) -> Word:
        return tuple(self.generators[s].inverse_id for s in reversed(w))

    def parse_word(self, text: str) -> Word:
        """Parse ``"B*C^-1"``; ``"e"`` or an empty string is the identity."""
        text = text.strip()
        if text in ("", "e") and "e" not in self._by_name:
            return ()
        # names may themselves contain '*' (subgroup generators such as "(B*C)"),
        # so match the longest name that ends at a '*' or at the end
        names = sorted(self._by_name, key=len, reverse=True)
        letters = []
        pos = 0
        while True:
            while text[pos:pos + 1].isspace():
                pos += 1
            for name in names:
                for suffix, inverse in (("^-1", True), ("", False)):
                    tok = name + suffix
                    end = pos + len(tok)
                    if text.startswith(tok, pos) and text[end:].lstrip()[:1] in ("", "*"):
                        gid = self._by_name[name]
                        letters.append(self.generators[gid].inverse_id if inverse else gid)
                        break
                else:
                    continue
                break
            else:
                bad = text[pos:].split("*", 1)[0].strip()
                raise linalg.ParseError(f"unknown generator {bad!r} in word {text!r}", pos + 1)
            rest = text[end:].lstrip()
            if not rest:
                return tuple(letters)
            pos = len(text) - len(rest) + 1

    def format_word(self, w: Sequence[int]) -> str:
        return "*".join(self.generators[s].name for s in w) or "e"

    def word_names(self, w: Sequence[int]) -> list[str]:
        return [self.generators[s].name for s in w]


class CayleyBall(Mapping):
    """Distinct elements of word length <= radius, each with its shortlex-least word.

    Iteration follows shortlex order of the witness words. ``exhausted``
    is True when the ball is already the whole group.
    """

    def __init__(self, words: dict, radius: int, exhausted: bool):
        self._words = words
        self.radius = radius
        self.exhausted = exhausted

    def __getitem__(self, element):
        return self._words[element]

    def __iter__(self) -> Iterator:
        return iter(self._words)

    def __len__(self) -> int:
        return len(self._words)

    def __repr__(self):
        return f"CayleyBall(radius={self.radius}, size={len(self)}, exhausted={self.exhausted})"


def cayley_ball(G: GroupPresentation, n: int) -> CayleyBall:
    if n < 0:
        raise ValueError("ball radius must be >= 0")
    rep = G.rep
    e = rep.identity()
    words = {e: ()}
    frontier = [(e, ())]
    for r in range(n + 1):
        nxt = []
        for elem, w in frontier:
            for s in G.ids:
                g = rep.compose(elem, rep.images[s])
                if g in words:
                    continue
                if r == n:
                    return CayleyBall(words, n, exhausted=False)
                words[g] = w + (s,)
                nxt.append((g, w + (s,)))
        if not nxt:
            return CayleyBall(words, n, exhausted=True)
        frontier = nxt
    return CayleyBall(words, n, exhausted=True)


def enumerate_group(G: GroupPresentation, max_size: int = 200_000) -> CayleyBall:
    """The whole (finite) image group; raises if it exceeds ``max_size``."""
    rep = G.rep
    e = rep.identity()
    words = {e: ()}
    frontier = [(e, ())]
    radius = 0
    while frontier:
        nxt = []
        for elem, w in frontier:
            for s in G.ids:
                g = rep.compose(elem, rep.images[s])
                if g not in words:
                    words[g] = w + (s,)
                    nxt.append((g, w + (s,)))
                    if len(words) > max_size:
                        raise ValueError(f"image group has more than {max_size} elements")
        if nxt:
            radius += 1
        frontier = nxt
    return CayleyBall(words, radius, exhausted=True)


@dataclass(frozen=True)
class Subgroup:
    """The subgroup generated by words in the parent's letters."""

    parent: GroupPresentation
    gens: tuple[Word, ...]
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.gens:
            raise ValueError("a subgroup needs at least one generating word")
        object.__setattr__(self, "gens", tuple(tuple(w) for w in self.gens))

    @classmethod
    def parse(cls, parent: GroupPresentation, words: Sequence[str]) -> "Subgroup":
        return cls(parent, tuple(parent.parse_word(w) for w in words))

    @cached_property
    def _presentation(self):
        P = self.parent
        gens: list[Generator] = []
        images: list = []
        parent_words: list[Word] = []
        for w in self.gens:
            image = P.canonicalize(w)
            inv = P.rep.invert(image)
            gid = len(gens)
            name = "(" + P.format_word(w) + ")" if len(w) > 1 else P.format_word(w)
            if inv == image:
                gens.append(Generator(gid, gid, name))
                images.append(image)
                parent_words.append(w)
            else:
                gens.append(Generator(gid, gid + 1, name))
                gens.append(Generator(gid + 1, gid, f"{name}^-1"))
                images.extend([image, inv])
                parent_words.extend([w, P.inverse_word(w)])
        return GroupPresentation(gens, P.rep.with_images(images)), tuple(parent_words)

    def presentation(self) -> GroupPresentation:
        """The subgroup as a group in its own right (letters = generating words)."""
        return self._presentation[0]

    def to_parent_word(self, w: Sequence[int]) -> Word:
        table = self._presentation[1]
        return tuple(letter for s in w for letter in table[s])

    def _elements(self, depth: int | None) -> CayleyBall:
        key = ("ball", depth)
        if key not in self._cache:
            H = self.presentation()
            self._cache[key] = enumerate_group(H) if depth is None else cayley_ball(H, depth)
        return self._cache[key]

    def contains(self, element, depth: int | None = None) -> bool | None:
        """Membership of an image element.

        Exact for permutation images. For matrices, ``depth`` bounds the
        search of the subgroup's Cayley ball; ``None`` is returned when the
        element was not found but the ball was not exhausted.
        """
        if self.parent.rep.kind == "perm":
            return element in self._elements(None)
        ball = self._elements(depth if depth is not None else 8)
        if element in ball:
            return True
        return False if ball.exhausted else None


@dataclass(frozen=True)
class SyndeticWitness:
    """A finite set K of words meant to satisfy ``Kg`` meets ``H`` for every g."""

    K: tuple[Word, ...]

    @classmethod
    def symmetric(cls, G: GroupPresentation, words: Sequence[Sequence[int]]) -> "SyndeticWitness":
        out: list[Word] = []
        seen = set()
        for w in words:
            for v in (tuple(w), G.inverse_word(w)):
                key = G.canonicalize(v)
                if key not in seen:
                    seen.add(key)
                    out.append(v)
        return cls(tuple(out))


def verify_syndetic_witness(G: GroupPresentation, H: Subgroup, K: SyndeticWitness,
                            depth: int, membership_depth: int | None = None) -> Verdict:
    """Check ``Kg ∩ H ≠ ∅`` for every g in the Cayley ball of radius ``depth``."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if not K.K:
        raise ValueError("syndetic witness K must be non-empty")
    if membership_depth is None:
        membership_depth = 2 * depth + 2
    ball = cayley_ball(G, depth)
    ks = [G.canonicalize(k) for k in K.K]
    pending: list[Word] = []
    for g, gw in ball.items():
        undecided = False
        for k in ks:
            inside = H.contains(G.rep.compose(k, g), membership_depth)
            if inside:
                break
            undecided |= inside is None
        else:
            if not undecided:
                return Falsified(witness=(gw,), depth=depth)
            pending.append(gw)
    if pending:
        return InconclusiveAtDepth(depth, note=f"membership undecided for {len(pending)} elements")
    return Certified(depth=depth, reason={"checked": len(ball), "exhausted": ball.exhausted})


def coset_transversal(G: GroupPresentation, H: Subgroup, bound: int,
                      membership_depth: int | None = None) -> list[Word] | InconclusiveAtDepth:
    """Left coset representatives ``g1 = e, g2, ...`` in shortlex order.

    Permutation images: exact once the Cayley ball of radius ``bound``
    exhausts the group. Matrix images: the representative count must stay
    constant over the second half of the radii ``1..bound``; membership is
    searched up to ``membership_depth`` so the count may overshoot.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    rep = G.rep
    if rep.kind == "perm":
        ball = cayley_ball(G, bound)
        if not ball.exhausted:
            return InconclusiveAtDepth(bound, note="image group not exhausted")
        return _perm_transversal(G, H, ball)
    if membership_depth is None:
        membership_depth = 2 * bound
    counts = []
    for r in range(1, bound + 1):
        reps = _transversal_of(G, H, cayley_ball(G, r), membership_depth)
        counts.append(len(reps))
    tail = counts[len(counts) // 2:]
    if bound >= 2 and len(set(tail)) == 1:
        return reps
    return InconclusiveAtDepth(bound, note=f"coset counts by radius: {counts}")


def _perm_transversal(G, H, ball) -> list[Word]:
    # mark each whole coset gH as soon as its shortlex-first element appears
    rep = G.rep
    hs = list(H._elements(None))
    seen = set()
    out: list[Word] = []
    for g, gw in ball.items():
        if g in seen:
            continue
        out.append(gw)
        seen.update(rep.compose(g, h) for h in hs)
    return out


def _transversal_of(G, H, ball, membership_depth) -> list[Word]:
    rep = G.rep
    reps: list[tuple[object, Word]] = []
    for g, gw in ball.items():
        if not any(H.contains(rep.compose(rep.invert(r), g), membership_depth) for r, _ in reps):
            reps.append((g, gw))
    return [w for _, w in reps]
