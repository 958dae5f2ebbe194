"""Units of quantum homology and the calculus of Seidel elements.

Inversion works one degree slice at a time.  Multiplying a homogeneous x of
degree d maps QH_{4n-d} to QH_{2n}, and both are finite-dimensional over the
degree-zero Novikov ring Lambda_0.  Because omega is rational and (omega, c1)
is injective, ker(c1) is cyclic, generated by some t of positive area, so
Lambda_0 is either Z/2 or the Laurent series field Z/2((t)).  The linear
system is solved exactly over GF(2)(t) and the solution is then expanded in
increasing powers of t up to the requested energy.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

from . import gf2poly
from .gf2poly import RatFunc
from .lattice import (
    Coords,
    SectionClass,
    add,
    degree_zero_generator,
    maslov_from_section,
    minimal_chern,
    neg,
    scale,
    section_translate,
)
from .intlin import solve_integer
from .novikov import INF, Energy
from .quantum import (
    ANY_DEGREE,
    NOT_HOMOGENEOUS,
    QhElement,
    RingSpec,
    q_plus_closed,
    qh_degree,
    qh_product,
)


class NotHomogeneous(ValueError):
    pass


class NotInvertibleError(ValueError):
    pass


class LoopDegreeError(ValueError):
    """A loop's Seidel element does not have degree 2n - 2I."""


class CutoffTooSmall(RuntimeError):
    pass


class PreconditionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# classical ring


def classical_product(s: RingSpec, u: FrozenSet[int], v: FrozenSet[int]) -> FrozenSet[int]:
    acc: set = set()
    for i in u:
        for j in v:
            acc ^= set(s.table.classical_product(i, j))
    return frozenset(acc)


def classical_inverse(s: RingSpec, h: FrozenSet[int]) -> FrozenSet[int]:
    """Inverse of a Z/2 vector in the classical intersection ring.

    h = [M] + n with n nilpotent (products of classes below the top degree
    drop degree), so the inverse is the finite sum of the powers of n.
    """
    top = s.basis.fundamental_index
    h = frozenset(h)
    if top not in h:
        raise NotInvertibleError("no [M] component")
    nil = h - {top}
    out = {top}
    power: FrozenSet[int] = frozenset([top])
    for _ in range(2 * s.n + 1):
        power = classical_product(s, power, nil)
        if not power:
            break
        out ^= set(power)
    return frozenset(out)


# ---------------------------------------------------------------------------
# inversion


@dataclass(frozen=True)
class Inverse:
    element: QhElement

    @property
    def cutoff(self) -> Energy:
        return self.element.cutoff


@dataclass(frozen=True)
class NotInvertible:
    level: Fraction
    reason: str


@dataclass(frozen=True)
class Undetermined:
    cutoff: Energy
    reason: str


InvertOutcome = Union[Inverse, NotInvertible, Undetermined]


def degree_slice(s: RingSpec, degree: int) -> List[Tuple[int, Coords]]:
    """Basis of QH_degree over Lambda_0: one (class, reference gamma) per admissible class."""
    g = s.gamma
    out = []
    for i in range(len(s.basis)):
        diff = s.basis.degree(i) - degree
        if diff % 2:
            continue
        m = diff // 2
        if m == 0:
            out.append((i, g.zero))
            continue
        sol = solve_integer([list(g.chern_canonical)], g.canonical_rank, [m]) if g.canonical_rank else None
        if sol is not None:
            out.append((i, tuple(sol)))
    return out


def _exponent(s: RingSpec, t: Optional[Coords], delta: Coords) -> int:
    if t is None:
        assert not any(delta), "term outside the degree slice"
        return 0
    k = s.gamma.omega(delta) / s.gamma.omega(t)
    assert k.denominator == 1 and scale(int(k), t) == delta, "term outside the degree slice"
    return int(k)


def invert(s: RingSpec, x: QhElement, cutoff: Energy) -> InvertOutcome:
    """Inverse of a homogeneous element, certified up to energy ``cutoff``."""
    zero_level = Fraction(0)
    dx = qh_degree(s, x)
    if dx is NOT_HOMOGENEOUS:
        raise NotHomogeneous(f"{x} is not homogeneous")
    exact = x.cutoff == INF
    if dx is ANY_DEGREE:
        if exact:
            return NotInvertible(zero_level, "zero is not invertible")
        return Undetermined(x.cutoff, "element vanishes below its cutoff")
    top = s.basis.fundamental_index
    two_n = 2 * s.n
    source = degree_slice(s, 2 * two_n - dx)
    target = degree_slice(s, two_n)
    if len(source) != len(target):
        return NotInvertible(
            zero_level,
            f"QH_{2 * two_n - dx} has rank {len(source)} but QH_{two_n} has rank {len(target)}",
        )
    x_classes = {i for i, _ in degree_slice(s, dx)}
    if not any(
        top in outs
        for i in x_classes
        for j, _ in source
        for _, _, outs in s._mult.get((i, j), ())
    ):
        return NotInvertible(
            zero_level, "no product from these degrees reaches [M]; e has no preimage"
        )

    t = degree_zero_generator(s.gamma)
    row_of = {i: r for r, (i, _) in enumerate(target)}
    x_exact = QhElement(s, x.terms)
    columns: List[Dict[int, List[int]]] = []
    for j, gj in source:
        prod = qh_product(s, x_exact, QhElement(s, frozenset([(j, gj)])))
        col: Dict[int, List[int]] = {}
        for i, g in prod.terms:
            r = row_of[i]
            col.setdefault(r, []).append(_exponent(s, t, add(g, neg(target[r][1]))))
        columns.append(col)
    n = len(target)
    matrix = [[RatFunc.laurent(columns[c].get(r, [])) for c in range(n)] for r in range(n)]
    rhs = [RatFunc(int(i == top)) for i, _ in target]
    sol = gf2poly.solve(matrix, rhs)
    if sol is None:
        if exact:
            return NotInvertible(
                zero_level, f"multiplication matrix over Lambda_0 has rank {gf2poly.rank(matrix)} < {n}"
            )
        return Undetermined(x.cutoff, "truncated element gives a singular system")

    omega = s.gamma.omega
    step = omega(t) if t is not None else None

    def lowest(c: int) -> Energy:
        order = sol[c].order()
        if order is None:
            return INF
        return omega(source[c][1]) + (order * step if step is not None else 0)

    valuation = min((lowest(c) for c in range(n)), default=INF)
    if exact:
        cut = cutoff
    else:
        # true inverse differs from ours by terms of energy > 2 val(y) + cutoff(x)
        if valuation + x.cutoff < 0:
            return Undetermined(x.cutoff, "cutoff of the input too small to control the error")
        cut = 2 * valuation + x.cutoff
        if cut < cutoff:
            return Undetermined(cut, f"input cutoff certifies the inverse only up to {cut}")
        cut = cutoff
    terms = []
    for c, (j, gj) in enumerate(source):
        if not sol[c]:
            continue
        if step is None:
            terms.append((j, gj))
            continue
        if cut == INF:
            raise ValueError("an infinite cutoff needs a finite inverse; pass a finite cutoff")
        kmax = math.floor((cut - omega(gj)) / step)
        for k in sol[c].series(kmax):
            terms.append((j, add(gj, scale(k, t))))
    return Inverse(s.element(terms, cut))


# ---------------------------------------------------------------------------
# tau and its image


def tau(s: RingSpec, gamma: Coords) -> QhElement:
    return QhElement(s, frozenset([(s.basis.fundamental_index, s.gamma.check(tuple(gamma)))]))


@dataclass(frozen=True)
class TauYes:
    gamma: Coords


@dataclass(frozen=True)
class TauNo:
    reason: str


@dataclass(frozen=True)
class TauUndetermined:
    reason: str


def in_tau_image(s: RingSpec, x: QhElement):
    """Is x = [M] <gamma> for a single gamma?  No-verdicts are conclusive."""
    top = s.basis.fundamental_index
    names = s.basis.names
    off_top = sorted(i for i, _ in x.terms if i != top)
    if off_top:
        return TauNo(f"has a {names[off_top[0]]} component")
    if len(x.terms) >= 2:
        return TauNo(f"{len(x.terms)} monomials on [M]")
    if not x.terms:
        if x.cutoff == INF:
            return TauNo("zero")
        return TauUndetermined(f"vanishes below cutoff {x.cutoff}")
    (_, g), = x.terms
    if x.cutoff == INF or x.cutoff > s.gamma.omega(g):
        return TauYes(g)
    return TauUndetermined("cutoff does not exceed the energy of the only term")


# ---------------------------------------------------------------------------
# Seidel elements of loops


@dataclass(frozen=True, eq=False)
class LoopElement:
    name: str
    ring: RingSpec
    q: QhElement
    maslov: int

    def __post_init__(self):
        d = qh_degree(self.ring, self.q)
        want = 2 * self.ring.n - 2 * self.maslov
        if d is NOT_HOMOGENEOUS or (d is not ANY_DEGREE and d != want):
            raise LoopDegreeError(
                f"loop {self.name}: q has degree {d}, expected 2n - 2I = {want}"
            )

    def __eq__(self, other):
        if not isinstance(other, LoopElement):
            return NotImplemented
        return self.name == other.name and self.q == other.q and self.maslov == other.maslov

    def __hash__(self):
        return hash((self.name, self.q, self.maslov))

    @property
    def degree(self) -> int:
        return qh_degree(self.ring, self.q)


def identity_loop(s: RingSpec, gamma: Coords) -> LoopElement:
    """The constant loop lifted by gamma.

    Its section class is S_id - gamma, giving Maslov index c1(gamma), and its
    Seidel element is tau(gamma).
    """
    g = s.gamma.element(gamma)
    base = SectionClass(0, 0, s.gamma)
    section = section_translate(base, -g)
    label = ",".join(str(c) for c in g.coords)
    return LoopElement(f"id<{label}>", s, tau(s, g.coords), maslov_from_section(section))


def seidel_apply(loop: LoopElement, b: QhElement) -> QhElement:
    return qh_product(loop.ring, loop.q, b)


def compose_loops(l1: LoopElement, l2: LoopElement, name: Optional[str] = None) -> LoopElement:
    if l1.ring is not l2.ring and l1.ring != l2.ring:
        raise ValueError("loops act on different manifolds")
    return LoopElement(
        name or f"{l1.name}*{l2.name}", l1.ring, qh_product(l1.ring, l1.q, l2.q), l1.maslov + l2.maslov
    )


def loop_power(l: LoopElement, m: int, cutoff: Energy) -> LoopElement:
    if m < 1:
        raise ValueError("power must be positive")
    q = l.q.truncate(cutoff)
    acc = q
    for _ in range(m - 1):
        acc = qh_product(l.ring, acc, q).truncate(cutoff)
    return LoopElement(f"{l.name}^{m}", l.ring, acc, m * l.maslov)


def loop_inverse(l: LoopElement, cutoff: Energy) -> LoopElement:
    out = invert(l.ring, l.q, cutoff)
    if not isinstance(out, Inverse):
        raise NotInvertibleError(f"Seidel element of {l.name} not invertible at cutoff {cutoff}: {out}")
    return LoopElement(f"{l.name}^-1", l.ring, out.element, -l.maslov)


@dataclass(frozen=True)
class FirstTauPower:
    k: int
    gamma: Coords


@dataclass(frozen=True)
class NoneUpTo:
    k: int


def order_lower_bound(l: LoopElement, max_power: int, cutoff: Energy):
    """First k <= max_power with q^k in tau(Gamma), or NoneUpTo(max_power).

    NoneUpTo(K) certifies that the loop has order > K in pi_1(Ham).  A
    FirstTauPower(k) result is only consistent with order k.

    An exact q has finitely many terms, so its powers are computed exactly
    and ``cutoff`` is not used: a truncated power can look like a single
    monomial when its other terms sit above the cutoff.
    """
    q = l.q if l.q.cutoff == INF else l.q.truncate(cutoff)
    power = q
    for k in range(1, max_power + 1):
        if k > 1:
            power = qh_product(l.ring, power, q)
            if q.cutoff != INF:
                power = power.truncate(cutoff)
        verdict = in_tau_image(l.ring, power)
        if isinstance(verdict, TauYes):
            return FirstTauPower(k, verdict.gamma)
        if isinstance(verdict, TauUndetermined):
            raise CutoffTooSmall(f"power {k} of {l.name}: {verdict.reason}")
    return NoneUpTo(max_power)


class Obstruction(enum.Enum):
    OBSTRUCTED = "obstructed"
    NOT_OBSTRUCTED = "not-obstructed"


def degree_obstruction(s: RingSpec, x: QhElement) -> Obstruction:
    """Whether the degree of x alone rules out invertibility when Q+ is closed."""
    if not q_plus_closed(s):
        raise PreconditionError(f"{s.name}: Q+ is not closed under the quantum product")
    d = qh_degree(s, x)
    if d is NOT_HOMOGENEOUS or d is ANY_DEGREE:
        raise PreconditionError("degree obstruction needs a nonzero homogeneous element")
    big_n = minimal_chern(s.gamma)
    off = d - 2 * s.n
    blocked = off != 0 if big_n == 0 else off % (2 * big_n) != 0
    return Obstruction.OBSTRUCTED if blocked else Obstruction.NOT_OBSTRUCTED
