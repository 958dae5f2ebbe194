"""Exact integer and rational linear algebra on small dense matrices.

Matrices are lists of rows of Python ints (or Fractions where noted).
Everything here is deterministic: the same input always yields the same
unimodular transform and the same normal form.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence, Tuple

Matrix = List[List[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(rows: Sequence[Sequence[int]], ncols: Optional[int] = None) -> Matrix:
    if not rows:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*rows)]


def _col_swap(m: Matrix, a: int, b: int) -> None:
    for row in m:
        row[a], row[b] = row[b], row[a]


def _col_addmul(m: Matrix, dst: int, src: int, k: int) -> None:
    """column dst += k * column src"""
    if k:
        for row in m:
            row[dst] += k * row[src]


def _col_neg(m: Matrix, c: int) -> None:
    for row in m:
        row[c] = -row[c]


def column_hnf(a: Sequence[Sequence[int]], ncols: int) -> Tuple[Matrix, Matrix, int]:
    """Column-style Hermite normal form.

    Returns ``(H, U, rank)`` with ``A @ U == H``, ``U`` unimodular, and ``H``
    in column echelon form: the first ``rank`` columns carry positive pivots
    on strictly increasing rows, entries left of a pivot are reduced into
    ``[0, pivot)``, and the remaining columns are zero.  The trailing
    ``ncols - rank`` columns of ``U`` are therefore a basis of the integer
    kernel of ``A``.
    """
    h = [list(map(int, row)) for row in a]
    u = identity(ncols)
    p = 0
    for i in range(len(h)):
        if p == ncols:
            break
        row = h[i]
        while True:
            nz = [c for c in range(p, ncols) if row[c] != 0]
            if not nz:
                break
            c_min = min(nz, key=lambda c: (abs(row[c]), c))
            if c_min != p:
                _col_swap(h, p, c_min)
                _col_swap(u, p, c_min)
            if len(nz) == 1:
                break
            for c in range(p + 1, ncols):
                if row[c]:
                    k = row[c] // row[p]
                    _col_addmul(h, c, p, -k)
                    _col_addmul(u, c, p, -k)
        if row[p] == 0:
            continue
        if row[p] < 0:
            _col_neg(h, p)
            _col_neg(u, p)
        for c in range(p):
            k = row[c] // row[p]
            _col_addmul(h, c, p, -k)
            _col_addmul(u, c, p, -k)
        p += 1
    return h, u, p


def integer_kernel(a: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """Basis (as rows) of ``{v in Z^ncols : A v = 0}``; always saturated."""
    _, u, rank = column_hnf(a, ncols)
    return [[u[r][c] for r in range(ncols)] for c in range(rank, ncols)]


def row_hnf(rows: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """Row Hermite normal form of the lattice spanned by ``rows`` (zero rows dropped)."""
    if not rows:
        return []
    h, _, rank = column_hnf(transpose(rows), len(rows))
    t = transpose(h)
    return [t[i] for i in range(rank)]


def solve_integer(a: Sequence[Sequence[int]], ncols: int, rhs: Sequence[int]) -> Optional[List[int]]:
    """One integer solution of ``A v = rhs`` or None.

    The solution returned is the one supported on the pivot columns of the
    column HNF transform, so it is unique whenever ``A`` has trivial kernel.
    """
    h, u, rank = column_hnf(a, ncols)
    w = [0] * rank
    col = 0
    for i, row in enumerate(h):
        acc = rhs[i] - sum(row[q] * w[q] for q in range(col))
        if col < rank and row[col] != 0:
            if acc % row[col]:
                return None
            w[col] = acc // row[col]
            col += 1
        elif acc != 0:
            return None
    return [sum(u[r][q] * w[q] for q in range(rank)) for r in range(ncols)]


def rational_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(rref(rows)[1])


def rref(rows: Sequence[Sequence]) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form over Q. Returns (rows, pivot columns)."""
    m = [[Fraction(x) for x in row] for row in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def solve_rational(a: Sequence[Sequence], rhs: Sequence) -> Optional[List[Fraction]]:
    """A solution of ``A x = rhs`` over Q (free variables set to 0), or None."""
    ncols = len(a[0]) if a else 0
    aug = [list(row) + [b] for row, b in zip(a, rhs)]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, c in zip(red, pivots):
        x[c] = row[-1]
    return x


def lcm_denominator(values: Sequence[Fraction]) -> int:
    d = 1
    for v in values:
        q = Fraction(v).denominator
        d = d * q // gcd(d, q)
    return d
