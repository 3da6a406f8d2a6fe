"""Exact dense linear algebra over the rationals.

Gaussian elimination with a fixed pivot rule (leftmost column, first
usable row) so that every solve is bitwise reproducible.  Sizes here are
tiny (link complexes and cell-local systems), so no fraction-free tricks
are needed; gmpy2/Fraction arithmetic is exact either way.
"""

from __future__ import annotations

from bubblex.rational import RAT, ZERO


class LinAlgError(Exception):
    pass


class Inconsistent(LinAlgError):
    pass


class Underdetermined(LinAlgError):
    pass


def _to_rows(mat):
    return [[RAT(x) for x in row] for row in mat]


def rref(mat):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    rows = _to_rows(mat)
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def matrix_rank(mat) -> int:
    _, pivots = rref(mat)
    return len(pivots)


def solve_unique(mat, rhs_cols):
    """Solve M x = b for every column b of rhs_cols.

    mat: list of rows; rhs_cols: list of columns (each a list of scalars,
    one entry per row of mat).  Requires the system to be consistent with a
    unique solution; raises Inconsistent / Underdetermined otherwise.
    Returns the list of solution columns.
    """
    nrows = len(mat)
    ncols = len(mat[0]) if nrows else 0
    ncolsB = len(rhs_cols)
    for col in rhs_cols:
        if len(col) != nrows:
            raise LinAlgError("rhs length mismatch")
    aug = [
        [RAT(x) for x in mat[i]] + [RAT(col[i]) for col in rhs_cols]
        for i in range(nrows)
    ]
    rows, pivots = rref(aug) if aug else ([], [])
    main_pivots = [c for c in pivots if c < ncols]
    if any(c >= ncols for c in pivots):
        raise Inconsistent("rhs not in the column space")
    if len(main_pivots) < ncols:
        raise Underdetermined("solution not unique")
    sol_rows = rows[: len(main_pivots)]
    out = []
    for j in range(ncolsB):
        col = [ZERO] * ncols
        for r, c in enumerate(main_pivots):
            col[c] = sol_rows[r][ncols + j]
        out.append(col)
    return out


def solve_with_fallback(mat_primary, mat_gauge, rhs_cols):
    """Solve [primary; gauge] x = [rhs; 0], dropping the gauge rows when they
    over-constrain an already-unique primary system.

    Returns (solutions, branch) with branch one of "gauged" or
    "gauge_dropped".  Raises Inconsistent / Underdetermined when the primary
    system itself has no (unique) solution.
    """
    nrows_g = len(mat_gauge)
    full = list(mat_primary) + list(mat_gauge)
    full_rhs = [list(col) + [ZERO] * nrows_g for col in rhs_cols]
    try:
        return solve_unique(full, full_rhs), "gauged"
    except Inconsistent:
        sols = solve_unique(mat_primary, rhs_cols)
        return sols, "gauge_dropped"
