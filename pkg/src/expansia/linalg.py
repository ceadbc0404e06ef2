"""Exact integer and rational matrix helpers.

Matrices are tuples of row tuples so they can serve directly as hashable
group elements. Nothing here touches floating point.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Matrix = tuple[tuple[int, ...], ...]
RationalMatrix = tuple[tuple[Fraction, ...], ...]


class ParseError(ValueError):
    """Malformed textual input; ``column`` is 1-based when known."""

    def __init__(self, message: str, column: int | None = None):
        super().__init__(message)
        self.column = column


def as_matrix(rows: Iterable[Iterable[int]]) -> Matrix:
    m = tuple(tuple(int(v) for v in row) for row in rows)
    if not m or any(len(row) != len(m) for row in m):
        raise ValueError(f"expected a non-empty square matrix, got {m!r}")
    return m


def identity(d: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(d)) for i in range(d))


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple:
    n, k = len(a), len(b)
    m = len(b[0])
    return tuple(
        tuple(sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m))
        for i in range(n)
    )


def mat_vec(a: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in a)


def trace(a: Matrix) -> int:
    return sum(a[i][i] for i in range(len(a)))


def minus_identity(a: Matrix) -> Matrix:
    return tuple(tuple(v - (i == j) for j, v in enumerate(row)) for i, row in enumerate(a))


def det(a: Sequence[Sequence]) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    m = [[Fraction(v) for v in row] for row in a]
    n = len(m)
    sign = 1
    result = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            sign = -sign
        p = m[col][col]
        result *= p
        for r in range(col + 1, n):
            f = m[r][col] / p
            if f:
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return sign * result


def int_det(a: Matrix) -> int:
    d = det(a)
    assert d.denominator == 1
    return int(d)


def inverse(a: Sequence[Sequence]) -> RationalMatrix:
    """Rational inverse by Gauss-Jordan; raises ValueError if singular."""
    n = len(a)
    m = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise ValueError(f"matrix {tuple(map(tuple, a))} is singular")
        m[col], m[pivot] = m[pivot], m[col]
        p = m[col][col]
        m[col] = [v / p for v in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(tuple(row[n:]) for row in m)


def int_inverse(a: Matrix) -> Matrix:
    """Inverse of a unimodular integer matrix, as an integer matrix."""
    inv = inverse(a)
    if any(v.denominator != 1 for row in inv for v in row):
        raise ValueError(f"matrix {a} is not invertible over the integers (det {det(a)})")
    return tuple(tuple(int(v) for v in row) for row in inv)


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a rational number: {text.strip()!r}") from exc


def format_fraction(x: Fraction | int) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_matrix(text: str) -> Matrix:
    """Parse ``"-1,1;0,1"`` (rows split on ';', entries on ',')."""
    rows = []
    col = 1
    for raw in text.split(";"):
        entries = []
        offset = col
        for item in raw.split(","):
            try:
                entries.append(int(item.strip()))
            except ValueError:
                raise ParseError(f"bad matrix entry {item.strip()!r}", offset) from None
            offset += len(item) + 1
        rows.append(tuple(entries))
        col += len(raw) + 1
    width = len(rows)
    col = 1
    for raw, row in zip(text.split(";"), rows):
        if len(row) != width:
            raise ParseError(
                f"matrix row {row} has {len(row)} entries, expected {width} (square)", col)
        col += len(raw) + 1
    return tuple(rows)


def format_matrix(a: Matrix) -> str:
    return ";".join(",".join(str(v) for v in row) for row in a)


def parse_permutation(text: str) -> tuple[int, ...]:
    """Parse a one-line image list such as ``"2,0,1"``."""
    try:
        perm = tuple(int(v.strip()) for v in text.split(","))
    except ValueError:
        raise ParseError(f"bad permutation {text.strip()!r}") from None
    if sorted(perm) != list(range(len(perm))):
        raise ParseError(f"{perm} is not a permutation of 0..{len(perm) - 1}")
    return perm
