"""Independent brute-force oracles.

Nothing here imports the package's search code: groups are closed with
numpy, orbits are iterated with plain Fractions over every word, and
subsets are enumerated outright.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np


# --- finite permutation groups --------------------------------------------

def perm_group(perms) -> np.ndarray:
    """All elements of the group generated by ``perms`` as rows of an int array."""
    gens = np.array(perms, dtype=np.int64)
    n = gens.shape[1]
    elems = {tuple(range(n))}
    frontier = np.array([list(range(n))], dtype=np.int64)
    while len(frontier):
        # compose every frontier element with every generator: (s . g)[i] = s[g[i]]
        prods = gens[:, frontier].reshape(-1, n)
        prods = np.unique(prods, axis=0)
        new = [row for row in map(tuple, prods) if row not in elems]
        elems.update(new)
        frontier = np.array(new, dtype=np.int64).reshape(-1, n)
    return np.array(sorted(elems), dtype=np.int64)


def _int_dist(dist) -> tuple[np.ndarray, int]:
    """Distances scaled to integers over their common denominator."""
    fr = [[Fraction(v) for v in row] for row in dist]
    den = int(np.lcm.reduce([v.denominator for row in fr for v in row]))
    return np.array([[int(v * den) for v in row] for row in fr], dtype=np.int64), den


def pair_maxima(perms, dist) -> dict[tuple[int, int], Fraction]:
    """max over the whole group of d(g x, g y) for every pair x < y."""
    G = perm_group(perms)
    D, den = _int_dist(dist)
    n = G.shape[1]
    return {(x, y): Fraction(int(D[G[:, x], G[:, y]].max()), den)
            for x, y in itertools.combinations(range(n), 2)}


def brute_sup(perms, dist) -> Fraction | None:
    """min over distinct pairs of max over the group of d(g x, g y)."""
    return min(pair_maxima(perms, dist).values(), default=None)


def brute_expansive(perms, dist, c, maxima=None) -> bool:
    """Every distinct pair is pushed beyond c by some group element."""
    maxima = pair_maxima(perms, dist) if maxima is None else maxima
    return all(m > c for m in maxima.values())


def brute_orbit_expansive(perms, members) -> bool:
    G = perm_group(perms)
    n = G.shape[1]
    sets = [set(m) for m in members]

    def together(u, v):
        return any(u in s and v in s for s in sets)

    return not any(all(together(g[x], g[y]) for g in G)
                   for x, y in itertools.combinations(range(n), 2))


def brute_lebesgue(dist, members) -> Fraction:
    """Smallest diameter of a set lying in no member (diameter + 1 if none)."""
    n = len(dist)
    sets = [set(m) for m in members]
    best = None
    for r in range(2, n + 1):
        for S in itertools.combinations(range(n), r):
            if any(set(S) <= m for m in sets):
                continue
            diam = max(Fraction(dist[a][b]) for a, b in itertools.combinations(S, 2))
            best = diam if best is None or diam < best else best
    if best is None:
        return max(Fraction(dist[a][b]) for a in range(n) for b in range(n)) + 1
    return best


def is_T1_brute(n, opens) -> bool:
    """For x != y some open set contains x but not y."""
    opens = [set(U) for U in opens]
    return all(any(x in U and y not in U for U in opens)
               for x in range(n) for y in range(n) if x != y)


# --- torus ---------------------------------------------------------------------

def _mod1(v):
    return tuple(Fraction(t) % 1 for t in v)


def _apply(A, v):
    return _mod1(sum(Fraction(A[i][j]) * v[j] for j in range(len(v))) for i in range(len(A)))


def torus_dist(x, y) -> Fraction:
    out = Fraction(0)
    for a, b in zip(x, y):
        t = (Fraction(a) - Fraction(b)) % 1
        out = max(out, min(t, 1 - t))
    return out


def word_images(mats, depth):
    """Every product of at most ``depth`` letters from ``mats`` (with repeats), as exact matrices."""
    dim = len(mats[0])
    ident = tuple(tuple(int(i == j) for j in range(dim)) for i in range(dim))
    layer = {ident}
    seen = {ident}
    for _ in range(depth):
        nxt = set()
        for M in layer:
            for A in mats:
                P = tuple(tuple(sum(A[i][k] * M[k][j] for k in range(dim)) for j in range(dim))
                          for i in range(dim))
                if P not in seen:
                    nxt.add(P)
            seen |= nxt
        layer = nxt
    return seen


def inverse_2x2(A):
    det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
    assert abs(det) == 1
    return ((A[1][1] * det, -A[0][1] * det), (-A[1][0] * det, A[0][0] * det))


def pair_max_over_words(mats, x, y, depth) -> Fraction:
    return max(torus_dist(_apply(M, x), _apply(M, y)) for M in word_images(mats, depth))


def brute_fixed_points(A):
    """Enumerate (k/N) grid for N = |det(A - I)| and keep the fixed points."""
    d = len(A)
    M = [[A[i][j] - (i == j) for j in range(d)] for i in range(d)]
    N = abs(round(np.linalg.det(np.array(M, dtype=float))))
    assert N > 0
    out = []
    for ks in itertools.product(range(N), repeat=d):
        x = tuple(Fraction(k, N) for k in ks)
        if _apply(A, x) == _mod1(x):
            out.append(x)
    return out


def brute_fiber(D, y):
    """All x with D x = y mod 1, found on the grid that must contain them."""
    d = len(D)
    det = abs(round(np.linalg.det(np.array(D, dtype=float))))
    den = det * int(np.lcm.reduce([Fraction(t).denominator for t in y]))
    ks = np.array(list(itertools.product(range(den), repeat=d)), dtype=np.int64)
    target = np.array([int(Fraction(t) * den) for t in y], dtype=np.int64)
    hit = np.all((ks @ np.array(D, dtype=np.int64).T - target) % den == 0, axis=1)
    return [tuple(Fraction(int(k), den) for k in row) for row in ks[hit]]


def has_unit_eigenvalue(A, tol=1e-6) -> bool:
    eig = np.linalg.eigvals(np.array(A, dtype=float))
    return bool(np.any(np.abs(np.abs(eig) - 1) <= tol))
