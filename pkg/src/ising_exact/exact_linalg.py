"""Small exact linear algebra over the rationals."""
from __future__ import annotations

from fractions import Fraction

from .errors import InconsistentSystemError, UnderdeterminedError


def rref(rows, ncols):
    """Row-reduce a list of Fraction rows in place; returns pivot columns."""
    pivots = []
    r = 0
    nrows = len(rows)
    for col in range(ncols):
        piv = None
        for i in range(r, nrows):
            if rows[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [v * inv for v in rows[r]]
        pr = rows[r]
        for i in range(nrows):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    return pivots


def solve_unique(A, b):
    """Unique exact solution of A x = b (A has at least as many rows as columns).

    Raises InconsistentSystemError if no solution exists and
    UnderdeterminedError if the solution is not unique.
    """
    ncols = len(A[0])
    rows = [[Fraction(v) for v in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    pivots = rref(rows, ncols + 1)
    if ncols in pivots:
        raise InconsistentSystemError("linear system has no exact solution")
    if len(pivots) < ncols:
        raise UnderdeterminedError(
            f"linear system has rank {len(pivots)} < {ncols} unknowns")
    return [rows[i][ncols] for i in range(ncols)]
