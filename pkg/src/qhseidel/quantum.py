"""Quantum homology QH_*(M) with Z/2 Novikov coefficients.

Gromov-Witten data enters as a table of structure constants: for each pair of
homology basis classes the classical intersection product, and for each
sphere class gamma (with positive area) the correction a_i *_gamma a_j.  The
quantum product of a_1 <g_1> and a_2 <g_2> is the sum over gamma of
(a_1 *_gamma a_2) <g_1 + g_2 + gamma>, extended bilinearly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from .lattice import Coords, GammaGroup, GroupMismatch, add, format_coords
from .novikov import (
    INF,
    Energy,
    NovikovSeries,
    format_energy,
    parse_gamma,
    split_cutoff,
)

FUNDAMENTAL = "[M]"

Pair = Tuple[int, int]
Term = Tuple[int, Coords]


class SpecMismatch(ValueError):
    """Elements from different rings were combined."""


@dataclass(frozen=True)
class HomologyBasis:
    classes: Tuple[Tuple[str, int], ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple((str(a), int(d)) for a, d in self.classes))

    def __len__(self):
        return len(self.classes)

    @property
    def names(self) -> List[str]:
        return [name for name, _ in self.classes]

    def degree(self, i: int) -> int:
        return self.classes[i][1]

    def index(self, name: str) -> int:
        for i, (a, _) in enumerate(self.classes):
            if a == name:
                return i
        raise KeyError(f"no basis class named {name!r}")

    @property
    def fundamental_index(self) -> int:
        return self.index(FUNDAMENTAL)

    @property
    def point_index(self) -> Optional[int]:
        pts = [i for i, (_, d) in enumerate(self.classes) if d == 0]
        return pts[0] if len(pts) == 1 else None


@dataclass(frozen=True)
class GWTable:
    """Structure constants; values are sets of output basis indices (a Z/2 vector).

    Entries are stored as given.  A missing (i, j) falls back to (j, i); a pair
    absent in both orders is zero.
    """

    classical: Mapping[Pair, FrozenSet[int]]
    quantum: Mapping[Coords, Mapping[Pair, FrozenSet[int]]] = field(default_factory=dict)

    def lookup(self, entries: Mapping[Pair, FrozenSet[int]], i: int, j: int) -> FrozenSet[int]:
        if (i, j) in entries:
            return entries[(i, j)]
        return entries.get((j, i), frozenset())

    def classical_product(self, i: int, j: int) -> FrozenSet[int]:
        return self.lookup(self.classical, i, j)

    def quantum_product(self, gamma: Coords, i: int, j: int) -> FrozenSet[int]:
        if not any(gamma):
            return self.classical_product(i, j)
        return self.lookup(self.quantum.get(gamma, {}), i, j)


@dataclass(frozen=True)
class RingSpec:
    name: str
    n: int
    gamma: GammaGroup
    basis: HomologyBasis
    table: GWTable
    gamma_names: Mapping[str, Coords] = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, RingSpec):
            return NotImplemented
        return (
            self.name == other.name
            and self.n == other.n
            and self.gamma == other.gamma
            and self.basis == other.basis
            and dict(self.table.classical) == dict(other.table.classical)
            and {g: dict(v) for g, v in self.table.quantum.items()}
            == {g: dict(v) for g, v in other.table.quantum.items()}
            and dict(self.gamma_names) == dict(other.gamma_names)
        )

    def same_ring(self, other: "RingSpec") -> bool:
        """Equal as rings, ignoring the name and gamma labels."""
        return (
            self.n == other.n
            and self.gamma == other.gamma
            and self.basis == other.basis
            and self._mult == other._mult
        )

    __hash__ = object.__hash__

    @cached_property
    def _mult(self) -> Dict[Pair, Tuple[Tuple[Coords, Fraction, Tuple[int, ...]], ...]]:
        """(i, j) -> ((gamma, omega(gamma), outputs), ...) with the symmetric completion applied."""
        k = len(self.basis)
        zero = self.gamma.zero
        out: Dict[Pair, list] = {}
        for i in range(k):
            for j in range(k):
                entries = []
                c = self.table.classical_product(i, j)
                if c:
                    entries.append((zero, Fraction(0), tuple(sorted(c))))
                for g in sorted(self.table.quantum):
                    q = self.table.quantum_product(g, i, j)
                    if q:
                        entries.append((g, self.gamma.omega(g), tuple(sorted(q))))
                if entries:
                    out[(i, j)] = tuple(entries)
        return out

    @cached_property
    def min_table_energy(self) -> Fraction:
        energies = [e for entries in self._mult.values() for _, e, _ in entries]
        return min(energies, default=Fraction(0))

    # element constructors

    def element(self, terms: Iterable[Tuple[int, Coords]], cutoff: Energy = INF) -> "QhElement":
        acc: set = set()
        for i, g in terms:
            acc ^= {(int(i), tuple(g))}
        return QhElement(self, frozenset(acc), cutoff)

    def zero(self, cutoff: Energy = INF) -> "QhElement":
        return QhElement(self, frozenset(), cutoff)

    def unit(self) -> "QhElement":
        return QhElement(self, frozenset([(self.basis.fundamental_index, self.gamma.zero)]))

    def monomial(self, name: str, gamma: Optional[Coords] = None) -> "QhElement":
        g = self.gamma.zero if gamma is None else tuple(gamma)
        return QhElement(self, frozenset([(self.basis.index(name), g)]))

    def parse(self, text: str) -> "QhElement":
        return parse_element(self, text)

    def named_gamma(self, name: str) -> Coords:
        return tuple(self.gamma_names[name])

    def term_degree(self, term: Term) -> int:
        i, g = term
        return self.basis.degree(i) - 2 * self.gamma.chern(g)


class DegreeSentinel:
    def __init__(self, label: str):
        self.label = label

    def __repr__(self):
        return self.label


ANY_DEGREE = DegreeSentinel("ANY_DEGREE")
NOT_HOMOGENEOUS = DegreeSentinel("NOT_HOMOGENEOUS")


@dataclass(frozen=True, eq=False)
class QhElement:
    ring: RingSpec
    terms: FrozenSet[Term]
    cutoff: Energy = INF

    def __post_init__(self):
        terms = frozenset(self.terms)
        if self.cutoff != INF:
            object.__setattr__(self, "cutoff", Fraction(self.cutoff))
            omega = self.ring.gamma.omega
            terms = frozenset(t for t in terms if omega(t[1]) <= self.cutoff)
        object.__setattr__(self, "terms", terms)

    def _check(self, other: "QhElement") -> None:
        if other.ring is not self.ring and other.ring != self.ring:
            raise SpecMismatch(f"elements of {self.ring.name} and {other.ring.name} combined")

    def __eq__(self, other):
        if not isinstance(other, QhElement):
            return NotImplemented
        return (
            (self.ring is other.ring or self.ring == other.ring)
            and self.terms == other.terms
            and self.cutoff == other.cutoff
        )

    def __hash__(self):
        return hash((self.terms, self.cutoff))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    # structure

    def component(self, i: int) -> NovikovSeries:
        return NovikovSeries(
            self.ring.gamma, frozenset(g for j, g in self.terms if j == i), self.cutoff
        )

    def components(self) -> Dict[int, NovikovSeries]:
        return {i: self.component(i) for i in sorted({i for i, _ in self.terms})}

    def valuation(self) -> Energy:
        omega = self.ring.gamma.omega
        return min((omega(g) for _, g in self.terms), default=INF)

    def effective_valuation(self) -> Energy:
        return min(self.valuation(), self.cutoff)

    def is_exact_zero(self) -> bool:
        return not self.terms and self.cutoff == INF

    def truncate(self, cutoff: Energy) -> "QhElement":
        return QhElement(self.ring, self.terms, min(self.cutoff, cutoff))

    def agrees(self, other: "QhElement", cutoff: Optional[Energy] = None) -> bool:
        self._check(other)
        e = min(self.cutoff, other.cutoff)
        if cutoff is not None:
            e = min(e, cutoff)
        return self.truncate(e).terms == other.truncate(e).terms

    # arithmetic

    def __add__(self, other: "QhElement") -> "QhElement":
        self._check(other)
        return QhElement(self.ring, self.terms ^ other.terms, min(self.cutoff, other.cutoff))

    __sub__ = __add__

    def __mul__(self, other):
        if isinstance(other, QhElement):
            return qh_product(self.ring, self, other)
        if isinstance(other, NovikovSeries):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int) -> "QhElement":
        if k < 0:
            raise ValueError("use units.invert for negative powers")
        out = self.ring.unit()
        for _ in range(k):
            out = out * self
        return out

    def shift(self, gamma: Coords) -> "QhElement":
        """Module action of the monomial <gamma>."""
        g = self.ring.gamma.check(tuple(gamma))
        return QhElement(
            self.ring,
            frozenset((i, add(h, g)) for i, h in self.terms),
            self.cutoff + self.ring.gamma.omega(g),
        )

    def scale(self, s: NovikovSeries) -> "QhElement":
        """Module action of a Novikov series."""
        if s.group is not self.ring.gamma and s.group != self.ring.gamma:
            raise GroupMismatch("series over a different group")
        if self.is_exact_zero() or (not s.support and s.cutoff == INF):
            return self.ring.zero()
        cutoff = min(self.cutoff + s.effective_valuation(), s.cutoff + self.effective_valuation())
        acc: set = set()
        for i, h in self.terms:
            for g in s.support:
                acc ^= {(i, add(h, g))}
        return QhElement(self.ring, frozenset(acc), cutoff)

    # display

    def sorted_terms(self) -> List[Term]:
        omega = self.ring.gamma.omega
        return sorted(self.terms, key=lambda t: (t[0], omega(t[1]), t[1]))

    def render(self, with_cutoff: bool = True) -> str:
        names = self.ring.basis.names
        body = " + ".join(names[i] + format_coords(g) for i, g in self.sorted_terms()) or "0"
        if with_cutoff and self.cutoff != INF:
            body += f" @E={format_energy(self.cutoff)}"
        return body

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"QhElement({self.render()})"


def qh_product(s: RingSpec, x: QhElement, y: QhElement) -> QhElement:
    x._check(y)
    if x.ring is not s and x.ring != s:
        raise SpecMismatch("elements do not belong to the given ring")
    if x.is_exact_zero() or y.is_exact_zero():
        return s.zero()
    shift = s.min_table_energy
    cutoff = min(x.cutoff + y.effective_valuation(), y.cutoff + x.effective_valuation()) + shift
    omega = s.gamma.omega
    mult = s._mult
    acc: set = set()
    ys = [(j, h, omega(h)) for j, h in y.terms]
    for i, g in x.terms:
        eg = omega(g)
        for j, h, eh in ys:
            entries = mult.get((i, j))
            if not entries:
                continue
            base = eg + eh
            if base > cutoff:
                continue
            gh = add(g, h)
            for gamma, eq, outs in entries:
                if base + eq > cutoff:
                    continue
                c = add(gh, gamma)
                for k in outs:
                    acc ^= {(k, c)}
    return QhElement(s, frozenset(acc), cutoff)


def qh_degree(s: RingSpec, x: QhElement):
    """Degree k of a homogeneous element, ANY_DEGREE for zero, NOT_HOMOGENEOUS otherwise."""
    degrees = {s.term_degree(t) for t in x.terms}
    if not degrees:
        return ANY_DEGREE
    if len(degrees) > 1:
        return NOT_HOMOGENEOUS
    return degrees.pop()


def classical_pairing(s: RingSpec, u: Iterable[int], v: Iterable[int]) -> int:
    """Intersection number mod 2 of two Z/2 vectors (sets of basis indices)."""
    pt = s.basis.point_index
    if pt is None:
        return 0
    total = 0
    for i in u:
        for j in v:
            if pt in s.table.classical_product(i, j):
                total ^= 1
    return total


def tilde_phi(s: RingSpec, a1: int, a2: int, a3: int, gamma: Coords) -> int:
    """(a1 *_gamma a2) . a3, the three-point invariant in class gamma."""
    out = s.table.quantum_product(tuple(gamma), a1, a2)
    return classical_pairing(s, out, [a3])


def q_plus_closed(s: RingSpec) -> bool:
    """True iff products of classes of degree < 2n never produce [M], for every table entry."""
    top = s.basis.fundamental_index
    low = [i for i in range(len(s.basis)) if s.basis.degree(i) < 2 * s.n]
    for i in low:
        for j in low:
            for _, _, outs in s._mult.get((i, j), ()):
                if top in outs:
                    return False
    return True


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    location: str
    message: str

    def __str__(self):
        return f"{self.location}: {self.message}"


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, location: str, message: str) -> None:
        self.violations.append(Violation(location, message))

    def __str__(self):
        if self.ok:
            return "valid"
        return "\n".join(str(v) for v in self.violations)


def validate_spec(s: RingSpec) -> ValidationReport:
    """Check basis and table invariants; never raises."""
    rep = ValidationReport()
    basis = s.basis
    names = basis.names
    two_n = 2 * s.n
    if s.n <= 0:
        rep.add("n", f"half-dimension must be positive, got {s.n}")
    if len(set(names)) != len(names):
        rep.add("basis", "class names are not unique")
    for i, (name, d) in enumerate(basis.classes):
        if not 0 <= d <= two_n:
            rep.add(f"basis[{i}] {name}", f"degree {d} outside [0, {two_n}]")
    tops = [i for i, (_, d) in enumerate(basis.classes) if d == two_n]
    if FUNDAMENTAL not in names or len(tops) != 1 or names[tops[0]] != FUNDAMENTAL:
        rep.add("basis", f"need exactly one class of degree {two_n}, named {FUNDAMENTAL}")
        return rep
    if sum(1 for _, d in basis.classes if d == 0) != 1:
        rep.add("basis", "need exactly one class of degree 0 (the point)")
    top = basis.fundamental_index
    k = len(basis)

    def check_entries(entries, gamma: Optional[Coords], where: str) -> None:
        c1 = 0 if gamma is None else s.gamma.chern(gamma)
        for (i, j), outs in sorted(entries.items()):
            if not (0 <= i < k and 0 <= j < k) or any(not 0 <= o < k for o in outs):
                rep.add(f"{where} ({i},{j})", "basis index out of range")
                continue
            loc = f"{where} {names[i]}*{names[j]}"
            want = basis.degree(i) + basis.degree(j) - two_n + 2 * c1
            for o in sorted(outs):
                if basis.degree(o) != want:
                    rep.add(loc, f"output {names[o]} has degree {basis.degree(o)}, degree law requires {want}")
            if i != j and (j, i) in entries and entries[(j, i)] != outs:
                rep.add(loc, f"not symmetric: {names[j]}*{names[i]} differs")

    check_entries(s.table.classical, None, "classical")
    for i in range(k):
        got = s.table.classical_product(top, i)
        if got != frozenset([i]):
            rep.add(f"classical {FUNDAMENTAL}*{names[i]}", f"unit row requires {names[i]}")
    for gamma, entries in sorted(s.table.quantum.items()):
        where = f"quantum {format_coords(gamma)}"
        if len(gamma) != s.gamma.canonical_rank:
            rep.add(where, f"gamma has {len(gamma)} coordinates, group rank is {s.gamma.canonical_rank}")
            continue
        if s.gamma.omega(gamma) <= 0:
            rep.add(where, f"positivity: omega(gamma) = {s.gamma.omega(gamma)} must be > 0")
        check_entries(entries, gamma, where)
        for (i, j), outs in sorted(entries.items()):
            if outs and top in (i, j):
                rep.add(f"{where} {names[i]}*{names[j]}", f"unit row: {FUNDAMENTAL} *_gamma a must vanish")
    for label, g in sorted(s.gamma_names.items()):
        if len(g) != s.gamma.canonical_rank:
            rep.add(f"gammas {label}", "wrong number of coordinates")
    return rep


# ---------------------------------------------------------------------------
# element literals


def parse_element(s: RingSpec, text: str) -> QhElement:
    """Parse ``name<coords> + name(x)<coords> + ... [@E=cutoff]`` or ``0``."""
    body, cutoff = split_cutoff(text)
    body = body.strip()
    if body == "0":
        return s.zero(cutoff)
    terms = []
    for raw in _split_terms(body):
        lt = raw.find("<")
        if lt <= 0 or not raw.endswith(">"):
            raise ValueError(f"cannot parse term {raw!r}; expected name<gamma>")
        name = raw[:lt].strip()
        if name.endswith("(x)"):
            name = name[:-3].strip()
        try:
            i = s.basis.index(name)
        except KeyError:
            raise ValueError(f"unknown basis class {name!r} in {raw!r}") from None
        terms.append((i, parse_gamma(raw[lt:], s.gamma, s.gamma_names)))
    return s.element(terms, cutoff)


def _split_terms(body: str) -> List[str]:
    terms, depth, cur = [], 0, []
    for ch in body:
        if ch == "<":
            depth += 1
        elif ch == ">":
            depth -= 1
        if ch == "+" and depth == 0:
            terms.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    terms.append("".join(cur).strip())
    if any(not t for t in terms):
        raise ValueError(f"empty term in {body!r}")
    return terms


# ---------------------------------------------------------------------------
# randomized ring-axiom checks


def random_gamma(group: GammaGroup, rng: random.Random, energy: Energy, span: int = 3) -> Coords:
    """Random gamma with canonical coordinates in [-span, span] and |omega| <= energy."""
    if group.canonical_rank == 0:
        return ()
    for _ in range(1000):
        g = tuple(rng.randint(-span, span) for _ in range(group.canonical_rank))
        if abs(group.omega(g)) <= energy:
            return g
    return group.zero


def random_element(
    s: RingSpec, rng: random.Random, energy: Energy, max_terms: int = 4, homogeneous: bool = False
) -> QhElement:
    """Random element with at most ``max_terms`` terms, all of energy <= ``energy``."""
    k = len(s.basis)
    count = rng.randint(1, max_terms)
    terms = [(rng.randrange(k), random_gamma(s.gamma, rng, energy))]
    if homogeneous:
        d = s.term_degree(terms[0])
        for _ in range(20 * count):
            if len(terms) == count:
                break
            t = (rng.randrange(k), random_gamma(s.gamma, rng, energy))
            if s.term_degree(t) == d:
                terms.append(t)
    else:
        terms += [(rng.randrange(k), random_gamma(s.gamma, rng, energy)) for _ in range(count - 1)]
    return s.element(terms, energy)


@dataclass
class AxiomReport:
    samples: int
    failures: Dict[str, List[str]] = field(default_factory=dict)

    CHECKS = ("unit", "commutativity", "associativity", "degree-law")

    @property
    def ok(self) -> bool:
        return not any(self.failures.values())

    def fail(self, check: str, detail: str) -> None:
        self.failures.setdefault(check, []).append(detail)

    def lines(self) -> List[str]:
        out = []
        for c in self.CHECKS:
            bad = self.failures.get(c, [])
            status = "pass" if not bad else f"FAIL ({len(bad)})"
            out.append(f"{c}: {status}")
        return out


def axiom_suite(s: RingSpec, samples: int, energy: Energy, seed: int) -> AxiomReport:
    """Unit, commutativity, associativity-at-cutoff and degree law on random elements."""
    rng = random.Random(seed)
    rep = AxiomReport(samples)
    e = s.unit()
    two_n = 2 * s.n
    for n in range(samples):
        x, y, z = (random_element(s, rng, energy) for _ in range(3))
        if e * x != x or x * e != x:
            rep.fail("unit", f"sample {n}: e*x != x for x = {x}")
        if x * y != y * x:
            rep.fail("commutativity", f"sample {n}: {x} ; {y}")
        left, right = (x * y) * z, x * (y * z)
        if not left.agrees(right):
            rep.fail("associativity", f"sample {n}: ({x})({y})({z})")
        hx = random_element(s, rng, energy, homogeneous=True)
        hy = random_element(s, rng, energy, homogeneous=True)
        p = hx * hy
        if p:
            dp = qh_degree(s, p)
            want = qh_degree(s, hx) + qh_degree(s, hy) - two_n
            if dp != want:
                rep.fail("degree-law", f"sample {n}: deg({hx} * {hy}) = {dp}, expected {want}")
    return rep
