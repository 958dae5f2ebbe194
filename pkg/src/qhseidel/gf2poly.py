"""Polynomials and rational functions over GF(2) in one variable.

A polynomial is a Python int whose bit k is the coefficient of t^k.
"""

from __future__ import annotations

from typing import Iterator, List, Optional, Sequence, Tuple


def deg(p: int) -> int:
    return p.bit_length() - 1


def mul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def divmod_(a: int, b: int) -> Tuple[int, int]:
    if b == 0:
        raise ZeroDivisionError("polynomial division by zero")
    q = 0
    db = deg(b)
    while a and deg(a) >= db:
        shift = deg(a) - db
        q ^= 1 << shift
        a ^= b << shift
    return q, a


def gcd(a: int, b: int) -> int:
    while b:
        a, b = b, divmod_(a, b)[1]
    return a


def valuation(p: int) -> int:
    """Lowest exponent present (p != 0)."""
    return (p & -p).bit_length() - 1


class RatFunc:
    """Element of GF(2)(t), kept as a reduced fraction num/den."""

    __slots__ = ("num", "den")

    def __init__(self, num: int, den: int = 1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if num == 0:
            den = 1
        else:
            g = gcd(num, den)
            if g != 1:
                num = divmod_(num, g)[0]
                den = divmod_(den, g)[0]
        self.num = num
        self.den = den

    @classmethod
    def laurent(cls, exponents: Sequence[int]) -> "RatFunc":
        """Sum of t^k over the given exponents (repeats cancel mod 2)."""
        if not exponents:
            return cls(0)
        lo = min(exponents)
        num = 0
        for k in exponents:
            num ^= 1 << (k - lo)
        if lo >= 0:
            return cls(num << lo)
        return cls(num, 1 << -lo)

    def __bool__(self):
        return self.num != 0

    def __eq__(self, other):
        return isinstance(other, RatFunc) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other: "RatFunc") -> "RatFunc":
        if self.den == other.den:
            return RatFunc(self.num ^ other.num, self.den)
        return RatFunc(mul(self.num, other.den) ^ mul(other.num, self.den), mul(self.den, other.den))

    __sub__ = __add__

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(mul(self.num, other.num), mul(self.den, other.den))

    def inverse(self) -> "RatFunc":
        if not self.num:
            raise ZeroDivisionError("inverse of zero")
        return RatFunc(self.den, self.num)

    def order(self) -> Optional[int]:
        """t-adic valuation; None for zero."""
        if not self.num:
            return None
        return valuation(self.num) - valuation(self.den)

    def series(self, max_exponent: int) -> Iterator[int]:
        """Exponents of the Laurent expansion in increasing powers of t, up to max_exponent."""
        if not self.num:
            return
        u, s = valuation(self.num), valuation(self.den)
        p, q = self.num >> u, self.den >> s
        k = u - s
        # power series p/q with q(0) = 1
        while k <= max_exponent:
            if p & 1:
                yield k
                p ^= q
            p >>= 1
            k += 1
            if not p:
                return

    def __repr__(self):
        return f"RatFunc({self.num:#b}, {self.den:#b})"


def solve(matrix: List[List[RatFunc]], rhs: List[RatFunc]) -> Optional[List[RatFunc]]:
    """Solve a square system over GF(2)(t); None when the matrix is singular."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix must be square")
    a = [list(row) + [b] for row, b in zip(matrix, rhs)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return None
        a[c], a[piv] = a[piv], a[c]
        inv = a[c][c].inverse()
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x + f * y for x, y in zip(a[r], a[c])]
    return [a[r][n] for r in range(n)]


def rank(matrix: List[List[RatFunc]]) -> int:
    a = [list(row) for row in matrix]
    if not a:
        return 0
    ncols = len(a[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][c].inverse()
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x + f * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == len(a):
            break
    return r
