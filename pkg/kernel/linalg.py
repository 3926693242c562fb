"""Exact Gaussian elimination over the rationals, and fraction-free elimination over polynomials."""
from fractions import Fraction
from typing import Sequence

from .ratpoly import Poly, poly_divide_exact


Matrix = list[list[Fraction]]


def _copy(matrix: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    rows = [[Fraction(v) for v in row] for row in matrix]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if any(len(row) != ncols for row in rows):
        raise ValueError("Matrix rows have inconsistent lengths")
    return rows


def reduced_row_echelon(matrix: Sequence[Sequence], ncols: int | None = None) -> tuple[Matrix, list[int]]:
    """
    Reduced row echelon form and the pivot columns. The input is not modified.
    """
    m = _copy(matrix, ncols)
    n_rows = len(m)
    n_cols = len(m[0]) if m else (ncols or 0)
    pivots: list[int] = []

    pivot_row = 0
    for column in range(n_cols):
        if pivot_row >= n_rows:
            break
        for row in range(pivot_row, n_rows):
            if m[row][column] != 0:
                break
        else:
            continue

        if row != pivot_row:
            m[pivot_row], m[row] = m[row], m[pivot_row]

        pivot = m[pivot_row][column]
        if pivot != 1:
            m[pivot_row] = [v / pivot for v in m[pivot_row]]

        for other in range(n_rows):
            if other == pivot_row:
                continue
            factor = m[other][column]
            if factor == 0:
                continue
            source = m[pivot_row]
            m[other] = [v - factor * s for v, s in zip(m[other], source)]

        pivots.append(column)
        pivot_row += 1

    return m, pivots


def rank(matrix: Sequence[Sequence], ncols: int | None = None) -> int:
    if not matrix:
        return 0
    return len(reduced_row_echelon(matrix, ncols)[1])


def augmented_rank(matrix: Sequence[Sequence], rhs: Sequence) -> int:
    """Rank of `[matrix | rhs]`."""
    if len(matrix) != len(rhs):
        raise ValueError(f"Matrix has {len(matrix)} rows but rhs has {len(rhs)} entries")
    return rank([list(row) + [value] for row, value in zip(matrix, rhs)])


def is_consistent(matrix: Sequence[Sequence], rhs: Sequence) -> bool:
    """Rouche-Capelli: `M x = b` is solvable iff rank M == rank [M | b]."""
    return rank(matrix) == augmented_rank(matrix, rhs)


def null_space(matrix: Sequence[Sequence], ncols: int) -> Matrix:
    """Basis of `{x : M x = 0}`, one vector per free column."""
    if not matrix:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]

    reduced, pivots = reduced_row_echelon(matrix, ncols)
    free = [c for c in range(ncols) if c not in pivots]

    basis = []
    for free_column in free:
        vector = [Fraction(0)] * ncols
        vector[free_column] = Fraction(1)
        for row, pivot_column in enumerate(pivots):
            vector[pivot_column] = -reduced[row][free_column]
        basis.append(vector)
    return basis


def solve(matrix: Sequence[Sequence], rhs: Sequence, ncols: int | None = None) -> list[Fraction] | None:
    """A particular solution of `M x = b` with free variables set to zero, or None if inconsistent."""
    if ncols is None:
        ncols = len(matrix[0]) if matrix else 0
    augmented = [list(row) + [value] for row, value in zip(matrix, rhs)]
    if len(augmented) != len(rhs) or len(matrix) != len(rhs):
        raise ValueError(f"Matrix has {len(matrix)} rows but rhs has {len(rhs)} entries")
    if not augmented:
        return [Fraction(0)] * ncols

    reduced, pivots = reduced_row_echelon(augmented, ncols + 1)
    if ncols in pivots:
        return None

    solution = [Fraction(0)] * ncols
    for row, pivot_column in enumerate(pivots):
        solution[pivot_column] = reduced[row][ncols]
    return solution


def fraction_free_solve(matrix: Sequence[Sequence[Poly]], rhs: Sequence[Poly]) -> tuple[list[Poly], Poly] | None:
    """
    Unique solution of `M x = b` over the rational functions, by fraction-free Gauss-Jordan elimination.
    After step `k` every pivot equals the same leading minor, so each division is exact.

    :returns: `(numerators, denominator)` with `x_i = numerators[i] / denominator`, or None if the system
        is inconsistent.
    :raises ValueError: If the columns of `M` are linearly dependent.
    """
    if len(matrix) != len(rhs):
        raise ValueError(f"Matrix has {len(matrix)} rows but rhs has {len(rhs)} entries")
    if not matrix:
        raise ValueError("Cannot solve an empty system")

    ncols = len(matrix[0])
    m = [list(row) + [value] for row, value in zip(matrix, rhs)]
    previous = Poly.one(rhs[0].nvars)

    for k in range(ncols):
        pivot_row = next((row for row in range(k, len(m)) if not m[row][k].is_zero()), None)
        if pivot_row is None:
            raise ValueError(f"Column {k + 1} depends on the columns before it")
        m[k], m[pivot_row] = m[pivot_row], m[k]

        pivot = m[k][k]
        for row in range(len(m)):
            if row == k:
                continue
            factor = m[row][k]
            m[row] = [poly_divide_exact(pivot * value - factor * source, previous) for value, source in zip(m[row], m[k])]
        previous = pivot

    if any(not m[row][ncols].is_zero() for row in range(ncols, len(m))):
        return None
    return [m[row][ncols] for row in range(ncols)], previous
