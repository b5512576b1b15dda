"""Exact linear algebra over the rationals for constraint solving.

Rows are sparse maps column -> coefficient.  Elimination is deterministic:
rows are consumed in the order supplied and the pivot of each reduced row is
its first nonzero column in ascending column order, so identical inputs give
identical reduced systems, nullspace bases, and solutions on every platform.
"""

from __future__ import annotations

from fractions import Fraction

from .poly import Coeff, norm_coeff

Row = dict[int, Coeff]


class RowReducer:
    """Incremental Gaussian elimination over exact rationals.

    Maintains a reduced set of rows, one per pivot column.  Feeding rows one
    at a time lets callers interleave constraint generation with reduction
    and observe the rank as it grows.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivot_rows: dict[int, Row] = {}

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def reduce_row(self, row: Row) -> Row:
        """Reduce a row against the current pivots (the row is not added).

        Every pivot column present in the row is eliminated, not merely the
        leading one; pivot rows contain no other pivot columns, so one pass
        over the initially present pivot columns suffices.
        """
        row = {c: v for c, v in row.items() if v != 0}
        for hit in sorted(set(row) & self.pivot_rows.keys()):
            if hit not in row:
                continue
            piv = self.pivot_rows[hit]
            factor = row[hit]
            for c, v in piv.items():
                s = row.get(c, 0) - factor * v
                if s == 0:
                    row.pop(c, None)
                else:
                    row[c] = norm_coeff(s)
        return row

    def add_row(self, row: Row) -> bool:
        """Add a constraint row; returns True if it increased the rank."""
        red = self.reduce_row(row)
        if not red:
            return False
        lead = min(red)
        inv = Fraction(1, 1) / Fraction(red[lead])
        red = {c: norm_coeff(v * inv) for c, v in red.items()}
        # keep earlier pivot rows fully reduced against the new one
        for prow in self.pivot_rows.values():
            if lead in prow:
                factor = prow[lead]
                for c, v in red.items():
                    s = prow.get(c, 0) - factor * v
                    if s == 0:
                        prow.pop(c, None)
                    else:
                        prow[c] = norm_coeff(s)
        self.pivot_rows[lead] = red
        return True

    def nullspace(self) -> list[list[Coeff]]:
        """Basis of the solution space of (rows) * v = 0, one vector per free column.

        Each basis vector sets its free column to 1 and all other free
        columns to 0; vectors are ordered by free column index.
        """
        basis = []
        for free in range(self.ncols):
            if free in self.pivot_rows:
                continue
            vec: list[Coeff] = [0] * self.ncols
            vec[free] = 1
            for lead, row in self.pivot_rows.items():
                coeff = row.get(free, 0)
                if coeff:
                    vec[lead] = norm_coeff(-coeff)
            basis.append(vec)
        return basis


def nullspace(rows: list[Row], ncols: int) -> list[list[Coeff]]:
    red = RowReducer(ncols)
    for row in rows:
        red.add_row(row)
    return red.nullspace()


def rank_of(vectors: list[list[Coeff]]) -> int:
    if not vectors:
        return 0
    red = RowReducer(len(vectors[0]))
    for v in vectors:
        red.add_row({i: c for i, c in enumerate(v) if c != 0})
    return red.rank


def same_span(a: list[list[Coeff]], b: list[list[Coeff]]) -> bool:
    """Exact equality of the spans of two lists of coordinate vectors."""
    ra, rb = rank_of(a), rank_of(b)
    if ra != rb:
        return False
    return rank_of(a + b) == ra


def in_span(vectors: list[list[Coeff]], target: list[Coeff]) -> bool:
    return rank_of(vectors) == rank_of(vectors + [target])


def solve(rows: list[Row], rhs: list[Coeff], ncols: int) -> list[Coeff] | None:
    """One exact solution of rows * v = rhs, or None if inconsistent.

    Solved by eliminating the augmented system; among solution families the
    one with all free variables set to 0 is returned (deterministic).
    """
    aug = RowReducer(ncols + 1)
    for row, b in zip(rows, rhs):
        full = {c: v for c, v in row.items() if v != 0}
        if b != 0:
            full[ncols] = -b
        aug.add_row(full)
    if ncols in aug.pivot_rows:
        return None
    sol: list[Coeff] = [0] * ncols
    for lead in sorted(aug.pivot_rows, reverse=True):
        row = aug.pivot_rows[lead]
        acc = row.get(ncols, 0)
        for c, v in row.items():
            if c != lead and c != ncols:
                acc += v * sol[c]
        sol[lead] = norm_coeff(-acc)
    return sol
