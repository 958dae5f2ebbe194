"""The group of sphere classes modulo the joint kernel of area and Chern number.

A :class:`SphereClassLattice` lists generators of pi_2 together with their
symplectic areas (exact rationals) and first Chern numbers.  :func:`build_gamma`
divides out every class on which both functionals vanish and fixes a canonical
integer coordinate system on the torsion-free quotient.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Dict, Iterable, Optional, Sequence, Tuple

from . import intlin

Coords = Tuple[int, ...]


class GroupMismatch(ValueError):
    """Raised when elements of two different groups are combined."""


class NoSuchGamma(ValueError):
    """No class of the group has the requested (area, Chern number) pair."""


@dataclass(frozen=True)
class SphereClassLattice:
    omega: Tuple[Fraction, ...]
    chern: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "omega", tuple(Fraction(w) for w in self.omega))
        object.__setattr__(self, "chern", tuple(int(c) for c in self.chern))
        if len(self.omega) != len(self.chern):
            raise ValueError(
                f"omega has {len(self.omega)} entries but chern has {len(self.chern)}"
            )

    @property
    def rank(self) -> int:
        return len(self.omega)


@dataclass(frozen=True)
class GammaGroup:
    source: SphereClassLattice
    kernel_basis: Tuple[Coords, ...]
    projection: Tuple[Coords, ...]  # canonical_rank rows, each of length source.rank
    omega_canonical: Tuple[Fraction, ...]
    chern_canonical: Tuple[int, ...]
    _omega_cache: Dict[Coords, Fraction] = field(
        default_factory=dict, compare=False, repr=False, hash=False
    )

    @property
    def canonical_rank(self) -> int:
        return len(self.omega_canonical)

    @property
    def zero(self) -> Coords:
        return (0,) * self.canonical_rank

    # -- functionals on raw coordinate tuples (hot path) --

    def omega(self, coords: Coords) -> Fraction:
        try:
            return self._omega_cache[coords]
        except KeyError:
            val = sum((w * c for w, c in zip(self.omega_canonical, coords)), Fraction(0))
            self._omega_cache[coords] = val
            return val

    def chern(self, coords: Coords) -> int:
        return sum(c * v for c, v in zip(self.chern_canonical, coords))

    def project(self, raw: Sequence[int]) -> Coords:
        """Canonical coordinates of a vector given on the source generators."""
        if len(raw) != self.source.rank:
            raise ValueError(f"expected {self.source.rank} raw coordinates, got {len(raw)}")
        return tuple(sum(p * r for p, r in zip(row, raw)) for row in self.projection)

    def element(self, coords: Iterable[int]) -> "GammaElement":
        return GammaElement(self, tuple(coords))

    def generator(self, i: int) -> "GammaElement":
        """Image of the i-th source generator."""
        raw = [0] * self.source.rank
        raw[i] = 1
        return self.element(self.project(raw))

    def check(self, coords: Coords) -> Coords:
        if len(coords) != self.canonical_rank:
            raise ValueError(
                f"gamma {list(coords)} has {len(coords)} coordinates, "
                f"group has rank {self.canonical_rank}"
            )
        return coords


@dataclass(frozen=True)
class GammaElement:
    group: GammaGroup
    coords: Coords

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))
        self.group.check(self.coords)

    def _same(self, other: "GammaElement") -> None:
        if other.group is not self.group and other.group != self.group:
            raise GroupMismatch("gamma elements belong to different groups")

    def __add__(self, other: "GammaElement") -> "GammaElement":
        self._same(other)
        return GammaElement(self.group, add(self.coords, other.coords))

    def __neg__(self) -> "GammaElement":
        return GammaElement(self.group, neg(self.coords))

    def __sub__(self, other: "GammaElement") -> "GammaElement":
        return self + (-other)

    def __rmul__(self, k: int) -> "GammaElement":
        return GammaElement(self.group, scale(k, self.coords))

    @property
    def omega(self) -> Fraction:
        return self.group.omega(self.coords)

    @property
    def chern(self) -> int:
        return self.group.chern(self.coords)

    def __str__(self):
        return format_coords(self.coords)


def add(a: Coords, b: Coords) -> Coords:
    return tuple(x + y for x, y in zip(a, b))


def neg(a: Coords) -> Coords:
    return tuple(-x for x in a)


def scale(k: int, a: Coords) -> Coords:
    return tuple(k * x for x in a)


def format_coords(coords: Coords) -> str:
    return "<" + ",".join(str(c) for c in coords) + ">"


def gamma_arithmetic(a: GammaElement, b: Optional[GammaElement], op: str) -> GammaElement:
    if op == "add":
        return a + b
    if op == "negate":
        return -a
    raise ValueError(f"unknown operation {op!r}")


def eval_functionals(a: GammaElement) -> Tuple[Fraction, int]:
    return a.omega, a.chern


def build_gamma(lat: SphereClassLattice) -> GammaGroup:
    """Quotient of the lattice by ker(omega) and ker(chern), in canonical coordinates.

    The projection rows are the Hermite normal form of the annihilator of the
    kernel, so a lattice with trivial kernel keeps its own coordinates.
    """
    r = lat.rank
    denom = intlin.lcm_denominator(lat.omega)
    functionals = [[int(w * denom) for w in lat.omega], list(lat.chern)]
    kernel = intlin.integer_kernel(functionals, r)
    kernel_hnf = intlin.row_hnf(kernel, r)
    if kernel_hnf:
        annihilator = intlin.integer_kernel(kernel_hnf, r)
        projection = intlin.row_hnf(annihilator, r)
    else:
        projection = intlin.identity(r)
    # omega = omega_can . P has a unique solution since P has full row rank
    pt = intlin.transpose(projection, r) if projection else [[] for _ in range(r)]
    if projection:
        omega_can = intlin.solve_rational(pt, list(lat.omega))
        chern_can = intlin.solve_rational(pt, list(lat.chern))
        assert omega_can is not None and chern_can is not None
        assert all(c.denominator == 1 for c in chern_can)
    else:
        omega_can, chern_can = [], []
    return GammaGroup(
        source=lat,
        kernel_basis=tuple(tuple(row) for row in kernel_hnf),
        projection=tuple(tuple(row) for row in projection),
        omega_canonical=tuple(Fraction(w) for w in omega_can),
        chern_canonical=tuple(int(c) for c in chern_can),
    )


def minimal_chern(g: GammaGroup) -> int:
    return reduce(math.gcd, (abs(c) for c in g.chern_canonical), 0)


class WPlus(enum.Enum):
    HOLDS_BY_A = "holds-by-a"
    HOLDS_BY_B = "holds-by-b"
    HOLDS_BY_C = "holds-by-c"
    FAILS = "fails"


def check_wplus(g: GammaGroup, n: int) -> WPlus:
    """Which clause of the semipositivity condition (W+) holds, trying (a), (b), (c) in order."""
    w, c = g.omega_canonical, g.chern_canonical
    nz = [i for i, ci in enumerate(c) if ci != 0]
    if nz:
        lam = w[nz[0]] / c[nz[0]]
        if lam >= 0 and all(wi == lam * ci for wi, ci in zip(w, c)):
            return WPlus.HOLDS_BY_A
    elif all(wi == 0 for wi in w):
        return WPlus.HOLDS_BY_A
    if not nz:
        return WPlus.HOLDS_BY_B
    if minimal_chern(g) >= n - 1:
        return WPlus.HOLDS_BY_C
    return WPlus.FAILS


def solve_functionals(g: GammaGroup, area: Fraction, chern: int) -> Coords:
    """The unique gamma with the given area and Chern number.

    Raises NoSuchGamma when the pair is outside the image of (omega, c1).
    """
    area = Fraction(area)
    denom = intlin.lcm_denominator(list(g.omega_canonical) + [area])
    rows = [[int(w * denom) for w in g.omega_canonical], list(g.chern_canonical)]
    sol = intlin.solve_integer(rows, g.canonical_rank, [int(area * denom), int(chern)])
    if sol is None:
        raise NoSuchGamma(f"no gamma with omega = {area} and c1 = {chern}")
    return tuple(sol)


@dataclass(frozen=True)
class SectionClass:
    """A Gamma-equivalence class of sections, recorded by its area and vertical Chern number."""

    area: Fraction
    chern: int
    group: GammaGroup

    def __post_init__(self):
        object.__setattr__(self, "area", Fraction(self.area))
        object.__setattr__(self, "chern", int(self.chern))


def section_diff(s1: SectionClass, s0: SectionClass) -> GammaElement:
    if s1.group is not s0.group and s1.group != s0.group:
        raise GroupMismatch("section classes over different groups")
    g = s0.group
    return g.element(solve_functionals(g, s1.area - s0.area, s1.chern - s0.chern))


def section_translate(s0: SectionClass, gamma: GammaElement) -> SectionClass:
    if gamma.group is not s0.group and gamma.group != s0.group:
        raise GroupMismatch("gamma and section class over different groups")
    return SectionClass(s0.area + gamma.omega, s0.chern + gamma.chern, s0.group)


def maslov_from_section(s: SectionClass) -> int:
    return -s.chern


def degree_zero_generator(g: GammaGroup) -> Optional[Coords]:
    """Generator of the degree-zero part ker(c1), oriented so its area is positive.

    ker(c1) injects into Q via omega and omega is rational, so this subgroup is
    cyclic; None when it is trivial.
    """
    r = g.canonical_rank
    if r == 0:
        return None
    ker = intlin.integer_kernel([list(g.chern_canonical)], r)
    if not ker:
        return None
    assert len(ker) == 1, "(omega, c1) is not injective on canonical coordinates"
    t = tuple(ker[0])
    if g.omega(t) < 0:
        t = neg(t)
    return t
