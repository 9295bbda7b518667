"""Small exact linear algebra over the rationals.

Matrices are lists of rows of :class:`fractions.Fraction`.  Sizes here never
exceed a handful of rows, so plain Gaussian elimination is fine.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Vec = tuple
Mat = list


def frac(x) -> Fraction:
    """Coerce ints, Fractions and strings like ``"-1/4"`` to a Fraction.

    Floats are rejected: exact routines never guess a rational.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def to_matrix(rows: Sequence[Sequence]) -> Mat:
    return [[frac(v) for v in row] for row in rows]


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), 0)


def matvec(m: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(dot(row, v) for row in m)


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Mat:
    bt = list(zip(*b))
    return [[dot(row, col) for col in bt] for row in a]


def transpose(m: Sequence[Sequence]) -> Mat:
    return [list(col) for col in zip(*m)]


def rref(m: Sequence[Sequence]) -> tuple[Mat, list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = [list(map(Fraction, row)) for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return [row for row in a[:r]], pivots


def rank(m: Sequence[Sequence]) -> int:
    if not m:
        return 0
    return len(rref(m)[1])


def det(m: Sequence[Sequence]) -> Fraction:
    a = [list(map(Fraction, row)) for row in m]
    n = len(a)
    out = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            out = -out
        out *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return out


def inverse(m: Sequence[Sequence]) -> Mat:
    n = len(m)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(m)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def solve_affine(a: Sequence[Sequence], b: Sequence) -> tuple | None:
    """One solution of ``a x = b`` (free variables set to 0), or None."""
    ncols = len(a[0])
    red, piv = rref([list(row) + [bb] for row, bb in zip(a, b)])
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for row, c in zip(red, piv):
        x[c] = row[-1]
    return tuple(x)


def nullspace(a: Sequence[Sequence], ncols: int | None = None) -> list[tuple]:
    """Basis of {x : a x = 0}."""
    if not a:
        n = ncols or 0
        return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    ncols = len(a[0])
    red, piv = rref(a)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, c in zip(red, piv):
            x[c] = -row[f]
        basis.append(tuple(x))
    return basis


def in_span(v: Sequence, rows: Sequence[Sequence]) -> bool:
    if not rows:
        return all(x == 0 for x in v)
    return rank(list(rows) + [list(v)]) == rank(rows)
