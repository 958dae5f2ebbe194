"""Named verification suites.

Each suite compares library output against a value computed a different way
(closed forms, brute-force enumeration, exact recomputation without
truncation) and returns a :class:`SuiteResult` whose rendering is a pure
function of the seed.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Sequence, Tuple

from .catalog import CatalogEntry, builtin, dump_spec, loads_spec, make_ring
from .lattice import SphereClassLattice, add, build_gamma, minimal_chern, scale
from .novikov import INF, NovikovSeries, parse_series
from .quantum import (
    FUNDAMENTAL,
    QhElement,
    RingSpec,
    axiom_suite,
    parse_element,
    q_plus_closed,
    qh_degree,
    random_element,
    random_gamma,
)
from .units import (
    FirstTauPower,
    Inverse,
    LoopElement,
    NoneUpTo,
    NotInvertible,
    Obstruction,
    compose_loops,
    degree_obstruction,
    identity_loop,
    invert,
    loop_inverse,
    loop_power,
    order_lower_bound,
    tau,
)

DEFAULT_SEED = 0
ALL_BUILTINS = ("cp1", "cp2", "cp1xcp1:2", "f2-as-s2xs2:2")


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class SuiteResult:
    suite: str
    checks: List[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def record(self, name: str, ok: bool, detail: str = "") -> bool:
        self.checks.append(Check(name, bool(ok), detail))
        return bool(ok)

    def first_failure(self):
        return next((c for c in self.checks if not c.ok), None)

    def lines(self) -> List[str]:
        out = []
        for c in self.checks:
            line = f"[{'pass' if c.ok else 'FAIL'}] {self.suite}: {c.name}"
            if c.detail:
                line += f" ({c.detail})"
            out.append(line)
        return out


# ---------------------------------------------------------------------------
# helpers shared by suites and tests


def circle_action(lam=2) -> LoopElement:
    return builtin(f"f2-as-s2xs2:{lam}").loop("circle-action")


def circle_power_closed_form(ring: RingSpec, p: int) -> QhElement:
    """q^p for the circle action, from the closed forms in m = p // 2.

    Even powers: [M] <mb> (<0> + <x->)^m.  Odd powers: (a + b) <mb> (<0> + <x->)^m.
    """
    g = ring.gamma
    b, xm = ring.named_gamma("b"), ring.named_gamma("x-")
    m = p // 2
    series = (NovikovSeries.one(g) + NovikovSeries(g, frozenset([xm]))) ** m
    series = series.shift(scale(m, b))
    if p % 2 == 0:
        base = ring.monomial(FUNDAMENTAL)
    else:
        base = ring.monomial("a") + ring.monomial("b")
    return base.scale(series)


def classical_torus_spec(chern: int = 0) -> RingSpec:
    """Classical-only ring shaped like H_*(T^2 x S^2; Z/2), 2n = 4.

    Gamma is generated by the sphere class with area 1 and Chern number
    ``chern``, and the quantum table is empty, so Q+ is closed.
    """
    top = FUNDAMENTAL
    classes = [
        (top, 4), ("alpha x S2", 3), ("beta x S2", 3), ("f", 2), ("s", 2),
        ("alpha x pt", 1), ("beta x pt", 1), ("pt", 0),
    ]
    products = [(top, c, [c]) for c, _ in classes] + [
        ("s", "f", ["pt"]),
        ("alpha x S2", "beta x S2", ["s"]),
        ("alpha x S2", "f", ["alpha x pt"]),
        ("beta x S2", "f", ["beta x pt"]),
        ("alpha x S2", "beta x pt", ["pt"]),
        ("beta x S2", "alpha x pt", ["pt"]),
    ]
    return make_ring(f"t2xs2-classical:c{chern}", 2, [1], [chern], classes, products)


def _entries() -> Dict[str, CatalogEntry]:
    return {name: builtin(name) for name in ALL_BUILTINS}


# ---------------------------------------------------------------------------
# suites


def suite_quantum_relation(seed: int = DEFAULT_SEED) -> SuiteResult:
    res = SuiteResult("quantum-relation")
    for name in ("f2-as-s2xs2:2", "cp1xcp1:2"):
        ring = builtin(name).ring
        a, b = ring.named_gamma("a"), ring.named_gamma("b")
        xp = ring.monomial("a") + ring.monomial("b")
        square = (xp * xp).truncate(10)
        want = ring.element([(0, a), (0, b)], 10)
        res.record(f"{name}: (a+b)^2 = [M](<a> + <b>) at E=10", square == want, square.render())
        res.record(
            f"{name}: a*a = [M]<b>",
            ring.monomial("a") * ring.monomial("a") == ring.monomial(FUNDAMENTAL, b),
        )
        res.record(
            f"{name}: b*b = [M]<a>",
            ring.monomial("b") * ring.monomial("b") == ring.monomial(FUNDAMENTAL, a),
        )
    f2 = builtin("f2-as-s2xs2:2").ring
    xp, xm = f2.named_gamma("x+"), f2.named_gamma("x-")
    half = [tuple((u - v) // 2 for u, v in zip(xp, xm)), tuple((u + v) // 2 for u, v in zip(xp, xm))]
    res.record(
        "(x+ - x-)/2 = b and (x+ + x-)/2 = a",
        half == [f2.named_gamma("b"), f2.named_gamma("a")],
    )
    res.record(
        "f2-as-s2xs2 and cp1xcp1 define the same ring",
        builtin("f2-as-s2xs2:2").ring.same_ring(builtin("cp1xcp1:2").ring),
    )
    for lam in (Fraction(3, 2), Fraction(2), Fraction(5)):
        g = builtin(f"cp1xcp1:{lam}").ring.gamma
        res.record(f"omega(x-) = lambda - 1 at lambda={lam}", g.omega((1, -1)) == lam - 1)
    return res


def suite_q_powers(seed: int = DEFAULT_SEED) -> SuiteResult:
    res = SuiteResult("q-powers")
    loop = circle_action(2)
    ring = loop.ring
    cutoff = Fraction(12)
    for m in range(1, 7):
        for p in (2 * m, 2 * m + 1):
            got = loop_power(loop, p, cutoff)
            want = circle_power_closed_form(ring, p)
            ok = got.q.cutoff >= cutoff and got.q.agrees(want, cutoff) and got.maslov == p
            res.record(f"q^{p} closed form at E=12", ok, "" if ok else got.q.render())
    return res


def suite_inverse_series(seed: int = DEFAULT_SEED) -> SuiteResult:
    res = SuiteResult("inverse-series")
    ring = circle_action(2).ring
    g = ring.gamma
    b, xm = ring.named_gamma("b"), ring.named_gamma("x-")
    xp = ring.monomial("a") + ring.monomial("b")
    for cutoff in (Fraction(3), Fraction(9, 2), Fraction(8)):
        out = invert(ring, xp, cutoff)
        if not res.record(f"a+b invertible at E={cutoff}", isinstance(out, Inverse), str(out)):
            continue
        inv = out.element
        # (a+b) <-b> (<0> + <x-> + <2x-> + ...), truncated by energy
        terms = [
            (i, add(scale(-1, b), scale(j, xm)))
            for j in range(0, int(cutoff) + 3)
            for i in (1, 2)
        ]
        want = ring.element(terms, cutoff)
        res.record(f"inverse matches the geometric series at E={cutoff}", inv == want, inv.render())
        back = xp * inv
        res.record(f"(a+b) * inverse = e below E={cutoff}", back.agrees(ring.unit(), cutoff))
        listed = [ring.element([(i, add(scale(-1, b), scale(j, xm)))]) for j in range(5) for i in (1, 2)]
        if cutoff == Fraction(9, 2):
            res.record(
                "terms <-b + j x-> for j = 0..4 are present",
                all(t.terms <= inv.terms for t in listed),
            )
    # Novikov geometric inverses
    one = NovikovSeries.one(g)
    u = one + NovikovSeries(g, frozenset([xm]))
    got = u.geometric_inverse(Fraction(5, 2))
    want = parse_series("<0,0> + <1,-1> + <2,-2>", g).truncate(Fraction(5, 2))
    res.record("(<0> + <x->)^-1 at E=5/2", got == want, got.render())
    u = parse_series("<0,0> + <1,0> + <0,1>", g)
    got = u.geometric_inverse(Fraction(2))
    want = parse_series("<0,0> + <0,1> + <0,2> + <1,0>", g).truncate(Fraction(2))
    res.record("(<0> + <a> + <b>)^-1 at E=2", got == want, got.render())
    res.record("u * u^-1 = <0> below E=2", (u * got).agrees(one, Fraction(2)))
    return res


def suite_grassmannian(seed: int = DEFAULT_SEED) -> SuiteResult:
    res = SuiteResult("grassmannian")
    for name, k in (("cp1", 2), ("cp2", 3)):
        entry = builtin(name)
        loop = entry.loop("rotation")
        ring = entry.ring
        gen = ring.named_gamma("L")
        power = loop.q ** k
        res.record(f"{name}: q^{k} = tau(L)", power == tau(ring, gen), power.render())
        res.record(f"{name}: L is the generator of Gamma", gen == (1,) and ring.gamma.canonical_rank == 1)
        res.record(f"{name}: Maslov index of the rotation is 1", loop.maslov == 1)
        res.record(f"{name}: deg q = 2n - 2", qh_degree(ring, loop.q) == 2 * ring.n - 2)
    return res


def suite_infinite_order(seed: int = DEFAULT_SEED) -> SuiteResult:
    res = SuiteResult("infinite-order")
    out = order_lower_bound(circle_action(2), 20, Fraction(25))
    res.record("circle action: no tau power up to 20 at E=25", out == NoneUpTo(20), repr(out))
    cp1 = builtin("cp1")
    out = order_lower_bound(cp1.loop("rotation"), 5, Fraction(6))
    res.record(
        "cp1 rotation: first tau power at k=2, gamma=L",
        out == FirstTauPower(2, cp1.ring.named_gamma("L")),
        repr(out),
    )
    cp2 = builtin("cp2")
    out = order_lower_bound(cp2.loop("rotation"), 5, Fraction(6))
    res.record(
        "cp2 rotation: first tau power at k=3, gamma=L",
        out == FirstTauPower(3, cp2.ring.named_gamma("L")),
        repr(out),
    )
    return res


def suite_grading(seed: int = DEFAULT_SEED, compositions: int = 100) -> SuiteResult:
    res = SuiteResult("grading")
    rng = random.Random(seed)
    entries = _entries()
    pools: Dict[str, List[LoopElement]] = {}
    for name, entry in entries.items():
        ring = entry.ring
        for loop in entry.loops.values():
            res.record(
                f"{name}/{loop.name}: deg q = 2n - 2I",
                qh_degree(ring, loop.q) == 2 * ring.n - 2 * loop.maslov,
            )
        pool = list(entry.loops.values())
        pool += [identity_loop(ring, random_gamma(ring.gamma, rng, 2, span=2)) for _ in range(3)]
        if entry.loops:
            pool.append(loop_inverse(next(iter(entry.loops.values())), Fraction(4)))
        pools[name] = pool
    bad = []
    names = sorted(pools)
    for i in range(compositions):
        name = names[i % len(names)]
        pool = pools[name]
        chain = [rng.choice(pool) for _ in range(rng.randint(2, 3))]
        acc = chain[0]
        for nxt in chain[1:]:
            acc = compose_loops(acc, nxt)
        ring = acc.ring
        d = qh_degree(ring, acc.q)
        if acc.maslov != sum(l.maslov for l in chain) or d != 2 * ring.n - 2 * acc.maslov:
            bad.append(f"{name}:{acc.name}")
    res.record(f"{compositions} random compositions keep deg q = 2n - 2I", not bad, ", ".join(bad[:3]))
    return res


def suite_identity_loop(seed: int = DEFAULT_SEED, loops: int = 50, pairs: int = 100) -> SuiteResult:
    res = SuiteResult("identity-loop")
    rng = random.Random(seed)
    for name, entry in _entries().items():
        ring = entry.ring
        g = ring.gamma
        bad = []
        for _ in range(loops):
            gamma = random_gamma(g, rng, 6)
            loop = identity_loop(ring, gamma)
            if loop.q != tau(ring, gamma) or loop.maslov != g.chern(gamma):
                bad.append(str(gamma))
        res.record(f"{name}: q(Id, gamma) = tau(gamma) for {loops} gammas", not bad, ", ".join(bad[:3]))
        hom, inj = [], []
        for _ in range(pairs):
            u, v = random_gamma(g, rng, 6), random_gamma(g, rng, 6)
            if tau(ring, u) * tau(ring, v) != tau(ring, add(u, v)):
                hom.append(f"{u},{v}")
            if (tau(ring, u) == tau(ring, v)) != (u == v):
                inj.append(f"{u},{v}")
        res.record(f"{name}: tau is a homomorphism on {pairs} pairs", not hom, ", ".join(hom[:3]))
        res.record(f"{name}: tau is injective on {pairs} pairs", not inj, ", ".join(inj[:3]))
    return res


def suite_obstruction(seed: int = DEFAULT_SEED, samples: int = 50) -> SuiteResult:
    res = SuiteResult("obstruction")
    rng = random.Random(seed)
    for chern in (0, 2):
        ring = classical_torus_spec(chern)
        big_n = minimal_chern(ring.gamma)
        res.record(f"{ring.name}: Q+ closed", q_plus_closed(ring))
        allowed = lambda d: d == 2 * ring.n if big_n == 0 else (d - 2 * ring.n) % (2 * big_n) == 0
        seen = bad = 0
        details = []
        while seen < samples:
            x = random_element(ring, rng, 3, homogeneous=True)
            x = QhElement(ring, x.terms)
            if not x:
                continue
            d = qh_degree(ring, x)
            if allowed(d):
                continue
            seen += 1
            out = invert(ring, x, Fraction(6))
            if (
                not isinstance(out, NotInvertible)
                or out.level != 0
                or degree_obstruction(ring, x) is not Obstruction.OBSTRUCTED
            ):
                bad += 1
                details.append(f"{x.render()} -> {out}")
        res.record(
            f"{ring.name}: {samples} elements of obstructed degree are not invertible, witness at level 0",
            not bad,
            "; ".join(details[:2]),
        )
        e = ring.unit()
        res.record(f"{ring.name}: e is invertible", isinstance(invert(ring, e, 3), Inverse))
    return res


def suite_axioms(seed: int = DEFAULT_SEED, samples: int = 200, energy=Fraction(6)) -> SuiteResult:
    res = SuiteResult("axioms")
    for name in ALL_BUILTINS:
        rep = axiom_suite(builtin(name).ring, samples, energy, seed)
        for line in rep.lines():
            check, _, status = line.partition(": ")
            res.record(f"{name}: {check} ({samples} samples, E={energy})", status == "pass")
    return res


# lattice oracle -------------------------------------------------------------


def _det(rows: Sequence[Sequence[int]]) -> Fraction:
    m = [[Fraction(x) for x in row] for row in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det


def rational_rank(rows: Sequence[Sequence]) -> int:
    m = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    width = len(m[0]) if m else 0
    for c in range(width):
        piv = next((r for r in range(rank, len(m)) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(rank + 1, len(m)):
            if m[r][c]:
                f = m[r][c] / m[rank][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


def _minor_gcd(rows: Sequence[Sequence[int]]) -> int:
    k, width = len(rows), len(rows[0])
    g = 0
    for cs in itertools.combinations(range(width), k):
        g = math.gcd(g, int(_det([[row[c] for c in cs] for row in rows])))
    return g


def random_lattice(rng: random.Random, max_rank: int = 4) -> SphereClassLattice:
    r = rng.randint(1, max_rank)
    omega = tuple(Fraction(rng.choice((-1, 0, 1, 1, 2)), rng.choice((1, 1, 2, 3))) for _ in range(r))
    chern = tuple(rng.choice((-1, 0, 1, 1, 2)) for _ in range(r))
    return SphereClassLattice(omega, chern)


def expected_kernel_rank(lat: SphereClassLattice) -> int:
    return lat.rank - rational_rank([list(lat.omega), list(lat.chern)])


def brute_kernel(lat: SphereClassLattice, box: int = 3) -> List[Tuple[int, ...]]:
    """All nonzero kernel vectors with coordinates in [-box, box]."""
    denom = math.lcm(*(w.denominator for w in lat.omega))
    w_int = [int(w * denom) for w in lat.omega]
    return [
        v for v in itertools.product(range(-box, box + 1), repeat=lat.rank)
        if any(v)
        and sum(w * x for w, x in zip(w_int, v)) == 0
        and sum(c * x for c, x in zip(lat.chern, v)) == 0
    ]


def lattice_oracle(lat: SphereClassLattice, box: int = 3, brute=None) -> List[str]:
    """Problems found comparing build_gamma with brute-force enumeration in [-box, box]^r."""
    r = lat.rank
    problems = []
    g = build_gamma(lat)
    kernel = [list(v) for v in g.kernel_basis]

    def in_kernel(v):
        return sum(w * x for w, x in zip(lat.omega, v)) == 0 and sum(c * x for c, x in zip(lat.chern, v)) == 0

    if brute is None:
        brute = brute_kernel(lat, box)
    want_rank = expected_kernel_rank(lat)
    brute_rank = rational_rank(brute) if brute else 0
    if not all(in_kernel(v) for v in kernel):
        problems.append("a kernel basis vector is not in the kernel")
    if len(kernel) != want_rank:
        problems.append(f"kernel rank {len(kernel)}, expected {want_rank}")
    if brute_rank != want_rank:
        problems.append(f"brute-force vectors span rank {brute_rank}, expected {want_rank}")
    if kernel and _minor_gcd(kernel) != 1:
        problems.append("kernel basis is not saturated")
    if brute and rational_rank(kernel + [list(v) for v in brute]) != len(kernel):
        problems.append("a brute-force vector lies outside the span of the kernel basis")
    # the quotient map kills the kernel, is onto, and carries both functionals
    proj = [list(row) for row in g.projection]
    if any(sum(p * x for p, x in zip(row, v)) for row in proj for v in kernel):
        problems.append("projection does not kill the kernel")
    if proj and _minor_gcd(proj) != 1:
        problems.append("projection is not onto Z^k")
    for i in range(r):
        img = [row[i] for row in proj]
        if sum(w * x for w, x in zip(g.omega_canonical, img)) != lat.omega[i]:
            problems.append("omega does not factor through the projection")
            break
        if sum(c * x for c, x in zip(g.chern_canonical, img)) != lat.chern[i]:
            problems.append("chern does not factor through the projection")
            break
    return problems


def suite_lattice_oracle(seed: int = DEFAULT_SEED, lattices: int = 100) -> SuiteResult:
    res = SuiteResult("lattice-oracle")
    rng = random.Random(seed)
    bad = []
    checked = redrawn = 0
    while checked < lattices:
        lat = random_lattice(rng)
        brute = brute_kernel(lat)
        if (rational_rank(brute) if brute else 0) != expected_kernel_rank(lat):
            # the box is too small to see the whole kernel
            redrawn += 1
            continue
        checked += 1
        problems = lattice_oracle(lat, brute=brute)
        if problems:
            bad.append(f"omega={[str(w) for w in lat.omega]} chern={list(lat.chern)}: {problems[0]}")
    detail = "; ".join(bad[:2]) or f"{redrawn} lattices redrawn: kernel not visible in the box"
    res.record(f"{lattices} random lattices of rank <= 4 match brute force", not bad, detail)
    return res


# truncation -----------------------------------------------------------------


def random_series(group, rng: random.Random, size: int = 6, energy: int = 3) -> NovikovSeries:
    terms = [random_gamma(group, rng, energy) for _ in range(rng.randint(0, size))]
    return NovikovSeries.from_terms(group, terms)


def suite_truncation(seed: int = DEFAULT_SEED, samples: int = 500) -> SuiteResult:
    res = SuiteResult("truncation")
    rng = random.Random(seed)
    groups = [
        builtin("cp1xcp1:2").ring.gamma,
        build_gamma(SphereClassLattice((Fraction(1), Fraction(1, 2), Fraction(3)), (2, 1, 0))),
    ]
    levels = [Fraction(k, 2) for k in range(-6, 7)]
    bad = []
    for n in range(samples):
        g = groups[n % len(groups)]
        x, y = random_series(g, rng), random_series(g, rng)
        ex, ey = rng.choice(levels + [INF]), rng.choice(levels)
        tx, ty = x.truncate(ex), y.truncate(ey)
        prod = tx * ty
        exact = x * y
        if not prod.agrees(exact):
            bad.append(f"sample {n}: {tx} * {ty}")
    res.record(f"{samples} truncated Novikov products agree with exact below cutoff", not bad, "; ".join(bad[:2]))

    bad = []
    ring = builtin("cp1xcp1:2").ring
    for n in range(samples // 5):
        x = QhElement(ring, random_element(ring, rng, 3).terms)
        y = QhElement(ring, random_element(ring, rng, 3).terms)
        ex, ey = rng.choice(levels), rng.choice(levels)
        if not (x.truncate(ex) * y.truncate(ey)).agrees(x * y):
            bad.append(f"sample {n}")
    res.record(f"{samples // 5} truncated quantum products agree with exact below cutoff", not bad, ", ".join(bad[:3]))

    bad_frob, bad_grade = [], []
    for n in range(100):
        g = groups[n % len(groups)]
        x, y = random_series(g, rng), random_series(g, rng)
        if (x * x).support != frozenset(scale(2, t) for t in x.support):
            bad_frob.append(str(x))
        gx, gy, gxy = x.graded(), y.graded(), (x * y).graded()
        for k in set(gxy) | {a + b for a in gx for b in gy}:
            want = NovikovSeries.zero(g)
            for a, sa in gx.items():
                if k - a in gy:
                    want = want + sa * gy[k - a]
            if gxy.get(k, NovikovSeries.zero(g)) != want:
                bad_grade.append(f"{x} ; {y} @ {k}")
    res.record("Frobenius: x*x is supported on doubled terms", not bad_frob, "; ".join(bad_frob[:2]))
    res.record("grading is multiplicative", not bad_grade, "; ".join(bad_grade[:2]))
    return res


def suite_roundtrip(seed: int = DEFAULT_SEED) -> SuiteResult:
    res = SuiteResult("roundtrip")
    rng = random.Random(seed)
    for name in ALL_BUILTINS:
        entry = builtin(name)
        text = dump_spec(entry)
        again = loads_spec(text)
        res.record(f"{name}: serialize -> parse -> serialize is byte-identical", dump_spec(again) == text)
        res.record(f"{name}: parsed spec equals the builtin", again.ring == entry.ring)
        ring = entry.ring
        bad = []
        for _ in range(50):
            x = random_element(ring, rng, 4)
            if rng.random() < 0.5:
                x = QhElement(ring, x.terms)
            if parse_element(ring, x.render()) != x:
                bad.append(x.render())
        res.record(f"{name}: element render -> parse round-trip", not bad, "; ".join(bad[:2]))
    return res


SUITES: Dict[str, Callable[..., SuiteResult]] = {
    "quantum-relation": suite_quantum_relation,
    "q-powers": suite_q_powers,
    "inverse-series": suite_inverse_series,
    "grassmannian": suite_grassmannian,
    "infinite-order": suite_infinite_order,
    "grading": suite_grading,
    "identity-loop": suite_identity_loop,
    "obstruction": suite_obstruction,
    "axioms": suite_axioms,
    "lattice-oracle": suite_lattice_oracle,
    "truncation": suite_truncation,
    "roundtrip": suite_roundtrip,
}


def run_suite(name: str, seed: int = DEFAULT_SEED) -> List[SuiteResult]:
    """Run one suite, or every suite for ``all``."""
    if name == "all":
        return [fn(seed) for fn in SUITES.values()]
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(SUITES)}, all")
    return [SUITES[name](seed)]
