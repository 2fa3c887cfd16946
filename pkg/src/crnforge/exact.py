"""Exact rational linear algebra on arbitrary-precision integers.

solve_exact() uses fraction-free (Bareiss) Gaussian elimination, so all
intermediate values are integers and the results are exact rationals.
The rank/span helpers run ordinary elimination over Fraction entries;
decomposition needs them for function-ness checks and basis extension.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

from .errors import SingularMatrixError

Vec = Sequence[Fraction | int]


def _clear_denominators(matrix: Sequence[Vec], rhs: Vec) -> tuple[list[list[int]], list[int]]:
    rows = []
    out_rhs = []
    for row, b in zip(matrix, rhs):
        fr = [Fraction(x) for x in row] + [Fraction(b)]
        mult = lcm(*(f.denominator for f in fr)) if fr else 1
        ints = [int(f * mult) for f in fr]
        rows.append(ints[:-1])
        out_rhs.append(ints[-1])
    return rows, out_rhs


def solve_exact(matrix: Sequence[Vec], rhs: Vec) -> list[Fraction]:
    """Solve M x = rhs exactly for square nonsingular rational M.

    Fraction-free Gaussian elimination: each row is scaled to integers,
    then Bareiss pivoting keeps every intermediate entry an exact
    integer. Raises SingularMatrixError (carrying the rank) otherwise.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix) or len(rhs) != n:
        raise ValueError("solve_exact needs a square matrix and matching rhs")
    a, b = _clear_denominators(matrix, rhs)
    # Augment and run Bareiss: after step k, a[i][j] holds the minor
    # determinant det(rows 0..k, i ; cols 0..k, j), an exact integer.
    for i in range(n):
        a[i] = a[i] + [b[i]]
    prev = 1
    for k in range(n):
        pivot_row = next((i for i in range(k, n) if a[i][k] != 0), None)
        if pivot_row is None:
            rank = k
            raise SingularMatrixError(f"matrix is singular (rank {rank})", rank)
        if pivot_row != k:
            a[k], a[pivot_row] = a[pivot_row], a[k]
        for i in range(k + 1, n):
            for j in range(k + 1, n + 1):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    x: list[Fraction] = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = Fraction(a[i][n])
        for j in range(i + 1, n):
            s -= a[i][j] * x[j]
        x[i] = s / a[i][i]
    return x


def rank(vectors: Sequence[Vec]) -> int:
    """Rank of the set of vectors (as rows), exact."""
    return len(_row_echelon([list(map(Fraction, v)) for v in vectors]))


def _row_echelon(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """Reduce rows in place; returns the nonzero rows (a row basis)."""
    basis: list[list[Fraction]] = []
    pivots: list[int] = []
    for row in rows:
        row = row[:]
        for b, p in zip(basis, pivots):
            if row[p]:
                factor = row[p] / b[p]
                for j in range(len(row)):
                    row[j] -= factor * b[j]
        p = next((j for j, v in enumerate(row) if v), None)
        if p is not None:
            basis.append(row)
            pivots.append(p)
    return basis


class SpanTracker:
    """Incrementally maintained row space with exact membership tests."""

    def __init__(self, dim: int):
        self.dim = dim
        self._basis: list[list[Fraction]] = []
        self._pivots: list[int] = []

    def _reduce(self, v: Vec) -> list[Fraction]:
        row = [Fraction(x) for x in v]
        for b, p in zip(self._basis, self._pivots):
            if row[p]:
                factor = row[p] / b[p]
                for j in range(self.dim):
                    row[j] -= factor * b[j]
        return row

    def contains(self, v: Vec) -> bool:
        return not any(self._reduce(v))

    def add(self, v: Vec) -> bool:
        """Add v to the span; returns True if the rank grew."""
        row = self._reduce(v)
        p = next((j for j, x in enumerate(row) if x), None)
        if p is None:
            return False
        self._basis.append(row)
        self._pivots.append(p)
        return True

    @property
    def rank(self) -> int:
        return len(self._basis)


def solve_in_span(vectors: Sequence[Vec], target: Vec) -> list[Fraction] | None:
    """Coefficients xi with sum(xi * vectors[i]) == target, or None.

    Free variables are set to zero; exact over Fractions.
    """
    dim = len(target)
    # Row-reduce the transpose [V | target] and back-substitute.
    cols = len(vectors)
    rows = [[Fraction(vectors[j][i]) for j in range(cols)] + [Fraction(target[i])] for i in range(dim)]
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(cols):
        pivot_row = next((i for i in range(r, dim) if rows[i][c]), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        for i in range(dim):
            if i != r and rows[i][c]:
                factor = rows[i][c] / rows[r][c]
                for j in range(c, cols + 1):
                    rows[i][j] -= factor * rows[r][j]
        pivots.append((r, c))
        r += 1
    for i in range(r, dim):
        if rows[i][cols]:
            return None
    x = [Fraction(0)] * cols
    for i, c in pivots:
        x[c] = rows[i][cols] / rows[i][c]
    return x
