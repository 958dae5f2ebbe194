"""Energy-truncated Z/2 Novikov series over a group Gamma.

A :class:`NovikovSeries` is a finite set of group elements (coefficients are
Z/2, so presence means coefficient 1) together with a validity cutoff E: the
series is an exact representative of an infinite sum for every term with
omega <= E and says nothing above E.  Every operation returns the largest
cutoff that the inputs can certify.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Union

from .lattice import Coords, GammaElement, GammaGroup, GroupMismatch, add, format_coords

INF = math.inf
Energy = Union[Fraction, float]  # float only ever for +inf


class NotUnital(ValueError):
    """Series is not of the form <0> + (terms of strictly positive energy)."""


def parse_energy(text: str) -> Energy:
    text = text.strip()
    if text in ("inf", "+inf", "oo"):
        return INF
    return Fraction(text)


def format_energy(e: Energy) -> str:
    return "inf" if e == INF else str(Fraction(e))


def same_group(a: GammaGroup, b: GammaGroup) -> None:
    if a is not b and a != b:
        raise GroupMismatch("operands live over different groups")


@dataclass(frozen=True, eq=False)
class NovikovSeries:
    group: GammaGroup
    support: FrozenSet[Coords]
    cutoff: Energy = INF

    def __post_init__(self):
        support = frozenset(self.support)
        if self.cutoff != INF:
            object.__setattr__(self, "cutoff", Fraction(self.cutoff))
            support = frozenset(g for g in support if self.group.omega(g) <= self.cutoff)
        object.__setattr__(self, "support", support)

    # construction helpers

    @classmethod
    def zero(cls, group: GammaGroup, cutoff: Energy = INF) -> "NovikovSeries":
        return cls(group, frozenset(), cutoff)

    @classmethod
    def one(cls, group: GammaGroup) -> "NovikovSeries":
        return cls(group, frozenset([group.zero]))

    @classmethod
    def monomial(cls, gamma: GammaElement) -> "NovikovSeries":
        return cls(gamma.group, frozenset([gamma.coords]))

    @classmethod
    def from_terms(cls, group: GammaGroup, terms: Iterable[Coords], cutoff: Energy = INF):
        """Build a series from a list of terms, cancelling repeats mod 2."""
        acc: set = set()
        for t in terms:
            acc ^= {tuple(t)}
        return cls(group, frozenset(acc), cutoff)

    # comparison

    def __eq__(self, other):
        if not isinstance(other, NovikovSeries):
            return NotImplemented
        return (
            (self.group is other.group or self.group == other.group)
            and self.support == other.support
            and self.cutoff == other.cutoff
        )

    def __hash__(self):
        return hash((self.support, self.cutoff))

    def agrees(self, other: "NovikovSeries", cutoff: Optional[Energy] = None) -> bool:
        """Equal below the common validity cutoff (or a smaller one if given)."""
        same_group(self.group, other.group)
        e = min(self.cutoff, other.cutoff)
        if cutoff is not None:
            e = min(e, cutoff)
        return self.truncate(e).support == other.truncate(e).support

    def __bool__(self):
        return bool(self.support)

    def __len__(self):
        return len(self.support)

    # arithmetic

    def __add__(self, other: "NovikovSeries") -> "NovikovSeries":
        same_group(self.group, other.group)
        return NovikovSeries(self.group, self.support ^ other.support, min(self.cutoff, other.cutoff))

    __sub__ = __add__

    def __mul__(self, other: "NovikovSeries") -> "NovikovSeries":
        same_group(self.group, other.group)
        cutoff = product_cutoff(self, other)
        omega = self.group.omega
        acc: set = set()
        for a in self.support:
            ea = omega(a)
            for b in other.support:
                c = add(a, b)
                if ea + omega(b) <= cutoff:
                    acc ^= {c}
        return NovikovSeries(self.group, frozenset(acc), cutoff)

    def __pow__(self, k: int) -> "NovikovSeries":
        if k < 0:
            raise ValueError("negative powers need geometric_inverse")
        out = NovikovSeries.one(self.group)
        for _ in range(k):
            out = out * self
        return out

    def shift(self, gamma: Coords) -> "NovikovSeries":
        """Multiply by the monomial <gamma>."""
        g = self.group.check(tuple(gamma))
        return NovikovSeries(
            self.group,
            frozenset(add(s, g) for s in self.support),
            self.cutoff + self.group.omega(g),
        )

    def truncate(self, cutoff: Energy) -> "NovikovSeries":
        return NovikovSeries(self.group, self.support, min(self.cutoff, cutoff))

    def valuation(self) -> Energy:
        if not self.support:
            return INF
        return min(self.group.omega(g) for g in self.support)

    def effective_valuation(self) -> Energy:
        """Lower bound on the valuation of the true (untruncated) series."""
        return min(self.valuation(), self.cutoff)

    def graded(self) -> Dict[int, "NovikovSeries"]:
        """Split by degree -2 c1(gamma)."""
        parts: Dict[int, set] = {}
        for g in self.support:
            parts.setdefault(-2 * self.group.chern(g), set()).add(g)
        return {
            k: NovikovSeries(self.group, frozenset(v), self.cutoff) for k, v in sorted(parts.items())
        }

    def geometric_inverse(self, cutoff: Energy) -> "NovikovSeries":
        """Inverse of <0> + n with val(n) > 0, as sum_k n^k up to energy ``cutoff``."""
        zero = self.group.zero
        if zero not in self.support:
            raise NotUnital("the coefficient of <0> is zero")
        rest = NovikovSeries(self.group, self.support - {zero}, self.cutoff)
        v = rest.effective_valuation()
        if v <= 0:
            raise NotUnital("the non-unit part must have strictly positive valuation")
        e = min(cutoff, self.cutoff)
        out = NovikovSeries.one(self.group).truncate(e)
        if v == INF or e == INF:
            if v == INF:
                return out
            raise ValueError("an infinite geometric series needs a finite cutoff")
        power = out
        for _ in range(int(e / v) + 1):
            power = (power * rest).truncate(e)
            if not power.support and power.cutoff >= e:
                break
            out = out + power
        return out.truncate(e)

    # display

    def sorted_terms(self) -> List[Coords]:
        omega = self.group.omega
        return sorted(self.support, key=lambda g: (omega(g), g))

    def render(self, with_cutoff: bool = True) -> str:
        body = " + ".join(format_coords(g) for g in self.sorted_terms()) or "0"
        if with_cutoff and self.cutoff != INF:
            body += f" @E={format_energy(self.cutoff)}"
        return body

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"NovikovSeries({self.render()})"


def product_cutoff(x: NovikovSeries, y: NovikovSeries, shift: Energy = 0) -> Energy:
    """Best certified cutoff of x*y.

    Missing terms of x sit strictly above x.cutoff and multiply terms of the
    true y, whose energies are bounded below by y's effective valuation (and
    symmetrically), so everything at or below the returned value is exact.
    ``shift`` is a lower bound on any extra energy added by the product.
    """
    vx, vy = x.effective_valuation(), y.effective_valuation()
    if (vx == INF and x.cutoff == INF) or (vy == INF and y.cutoff == INF):
        return INF
    return min(x.cutoff + vy, y.cutoff + vx) + shift


# ---------------------------------------------------------------------------
# text grammar

_GAMMA_RE = re.compile(r"<([^<>]*)>")


def parse_gamma(text: str, group: GammaGroup, names: Optional[Mapping[str, Coords]] = None) -> Coords:
    """Parse ``1,-1``, ``<1,-1>`` or a named gamma like ``x-``; a leading '-' negates a name."""
    t = text.strip()
    if t.startswith("<") and t.endswith(">"):
        t = t[1:-1].strip()
    if names:
        if t in names:
            return group.check(tuple(names[t]))
        if t.startswith("-") and t[1:] in names:
            return tuple(-c for c in names[t[1:]])
    if t == "" or t == "0" and group.canonical_rank != 1:
        return group.zero
    try:
        coords = tuple(int(part) for part in t.split(","))
    except ValueError:
        raise ValueError(f"cannot parse gamma {text!r}") from None
    return group.check(coords)


def parse_series(text: str, group: GammaGroup, names: Optional[Mapping[str, Coords]] = None) -> NovikovSeries:
    """Inverse of :meth:`NovikovSeries.render`."""
    body, cutoff = split_cutoff(text)
    body = body.strip()
    if body == "0":
        return NovikovSeries.zero(group, cutoff)
    terms = []
    pos = 0
    while True:
        m = _GAMMA_RE.match(body, pos)
        if not m:
            raise ValueError(f"expected '<...>' at offset {pos} in {text!r}")
        terms.append(parse_gamma(m.group(1), group, names))
        pos = m.end()
        rest = body[pos:].lstrip()
        if not rest:
            break
        if rest[0] != "+":
            raise ValueError(f"expected '+' at offset {len(body) - len(rest)} in {text!r}")
        pos = len(body) - len(rest[1:].lstrip())
    return NovikovSeries.from_terms(group, terms, cutoff)


def split_cutoff(text: str):
    if "@E=" in text:
        body, _, e = text.rpartition("@E=")
        return body, parse_energy(e)
    return text, INF
