"""Independent oracles used by the tests.

Everything here is deliberately naive: dense matrices of Fractions and
textbook Gaussian elimination, sharing no code with the package's sparse
back-substitution.  Slow is fine; independent is the point.
"""

from __future__ import annotations

from fractions import Fraction

from bdlab.algebra import Functional, c_star
from bdlab.universe import Universe

Matrix = list[list[Fraction]]


def dstar_matrix(universe: Universe) -> Matrix:
    """Dense matrix M with M[i][j] = coefficient of e*_j in d*_i.

    Row i is e*_i minus the coding functional of element i, so M is
    unitriangular when ids are ordered by rank (which interning guarantees).
    """
    n = len(universe)
    rows: Matrix = []
    for gid in range(n):
        row = [Fraction(0)] * n
        row[gid] = Fraction(1)
        for h, c in c_star(universe, gid).coords.items():
            row[h] -= c
        rows.append(row)
    return rows


def solve_exact(matrix: Matrix, rhs: list[Fraction]) -> list[Fraction]:
    """Solve matrix * x = rhs by Gaussian elimination with exact pivoting."""
    n = len(matrix)
    aug = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError(f"singular matrix at column {col}")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def transpose(matrix: Matrix) -> Matrix:
    return [list(col) for col in zip(*matrix)]


def functional_column(universe: Universe, f: Functional) -> list[Fraction]:
    col = [Fraction(0)] * len(universe)
    for gid, c in f.coords.items():
        col[gid] = c
    return col


def unit_column(n: int, gid: int) -> list[Fraction]:
    col = [Fraction(0)] * n
    col[gid] = Fraction(1)
    return col
