"""Exact linear algebra over Q with sparse, fraction-free row reduction.

Rows are dictionaries ``{column_key: coefficient}``; column keys only need
to be hashable and mutually orderable (ints or tuples). Internally every row
is scaled to a primitive integer vector, eliminated with integer
cross-multiplication and re-normalised by the gcd of its entries, which
keeps entry growth in check without any rational arithmetic.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

Row = Mapping[Hashable, object]


def _primitive(row: dict) -> dict:
    """Scale an integer row so that gcd = 1 and the leading entry is positive."""
    if not row:
        return row
    g = 0
    for v in row.values():
        g = math.gcd(g, v)
    lead = row[min(row)]
    if lead < 0:
        g = -g
    if g != 1:
        row = {k: v // g for k, v in row.items()}
    return row


def integer_row(row: Row) -> dict:
    """Clear denominators of a rational row; drops zeros."""
    fr = {k: Fraction(v) for k, v in row.items() if v != 0}
    den = 1
    for v in fr.values():
        den = den * v.denominator // math.gcd(den, v.denominator)
    return _primitive({k: int(v * den) for k, v in fr.items()})


def _eliminate(row: dict, pivot_row: dict, col) -> dict:
    a = pivot_row[col]
    b = row[col]
    g = math.gcd(a, b)
    fa, fb = a // g, b // g
    out = {k: fa * v for k, v in row.items()}
    for k, v in pivot_row.items():
        nv = out.get(k, 0) - fb * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return _primitive(out)


class Echelon:
    """Incrementally built echelon basis of a row space.

    >>> e = Echelon()
    >>> e.add({0: 1, 1: 2}), e.add({0: 2, 1: 4}), e.add({1: 1})
    (True, False, True)
    >>> e.rank
    2
    """

    def __init__(self):
        self.pivots: dict = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: Row) -> dict:
        r = integer_row(row)
        while r:
            col = min(r)
            p = self.pivots.get(col)
            if p is None:
                return r
            r = _eliminate(r, p, col)
        return r

    def add(self, row: Row) -> bool:
        r = self.reduce(row)
        if not r:
            return False
        self.pivots[min(r)] = r
        return True

    def contains(self, row: Row) -> bool:
        return not self.reduce(row)

    def reduced_rows(self) -> dict:
        """Fully reduced (RREF up to row scaling) rows keyed by pivot column."""
        rows = dict(self.pivots)
        order = sorted(rows, reverse=True)
        for col in order:
            prow = rows[col]
            for other in order:
                if other < col and col in rows[other]:
                    rows[other] = _eliminate(rows[other], prow, col)
        return rows


def nullspace(rows: Iterable[Row], columns: Sequence[Hashable]) -> list[dict]:
    """Basis of ``{x : row . x = 0 for every row}`` over the given columns.

    Returns rational vectors ``{column: Fraction}``; each basis vector has a
    single free column set to 1.
    """
    ech = Echelon()
    for r in rows:
        ech.add(r)
    reduced = ech.reduced_rows()
    pivot_cols = set(reduced)
    unknown = pivot_cols - set(columns)
    if unknown:
        raise ValueError(f"rows mention columns outside the declared set: {sorted(unknown)[:3]}")
    basis = []
    for f in columns:
        if f in pivot_cols:
            continue
        vec = {f: Fraction(1)}
        for pc, prow in reduced.items():
            coef = prow.get(f)
            if coef:
                vec[pc] = Fraction(-coef, prow[pc])
        basis.append(vec)
    return basis


def solve(rows: Sequence[Row], rhs: Sequence, columns: Sequence[Hashable]) -> dict | None:
    """One solution of ``rows . x = rhs`` (free columns set to 0), or None."""
    marker = ("__rhs__",)
    aug = []
    for r, b in zip(rows, rhs):
        row = {k: v for k, v in r.items()}
        if b != 0:
            row[marker] = b
        aug.append(row)

    # put the rhs column last in the ordering by mapping keys to ranks
    order = {c: i for i, c in enumerate(columns)}
    last = len(columns)
    ech = Echelon()
    for row in aug:
        ech.add({(order[k] if k != marker else last): v for k, v in row.items()})
    if last in ech.pivots:
        return None
    reduced = ech.reduced_rows()
    x = {c: Fraction(0) for c in columns}
    for pc, prow in reduced.items():
        x[columns[pc]] = Fraction(prow.get(last, 0), prow[pc])
    return x


def rank(rows: Iterable[Row]) -> int:
    ech = Echelon()
    for r in rows:
        ech.add(r)
    return ech.rank


def span_basis(vectors: Iterable[Row]) -> list[dict]:
    """Select a linearly independent subset spanning the same space."""
    ech = Echelon()
    chosen = []
    for v in vectors:
        if ech.add(v):
            chosen.append({k: Fraction(x) for k, x in v.items() if x != 0})
    return chosen


# dense helpers for small rational matrices --------------------------------

def matmul(A, B):
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), Fraction(0))
             for j in range(len(B[0]))] for i in range(len(A))]


def transpose(A):
    return [list(r) for r in zip(*A)]


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matrix_nullspace(A, ncols: int | None = None) -> list[list[Fraction]]:
    """Column-vector nullspace of a dense rational matrix."""
    ncols = len(A[0]) if A else ncols
    rows = [{j: v for j, v in enumerate(r) if v != 0} for r in A]
    basis = nullspace(rows, list(range(ncols)))
    return [[vec.get(j, Fraction(0)) for j in range(ncols)] for vec in basis]


def inverse(A):
    """Inverse of a square rational matrix (ValueError if singular)."""
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        M[col] = [x / pv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [row[n:] for row in M]
