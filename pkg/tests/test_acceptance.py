"""Acceptance criteria, one test each.

Every test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line with the elapsed
time and its limit, then asserts both the result and the time bound.
"""

import io
import random
import time
from fractions import Fraction

from qhseidel.catalog import builtin, dump_spec, loads_spec
from qhseidel.cli import main
from qhseidel.lattice import SphereClassLattice, add, build_gamma, minimal_chern, scale
from qhseidel.novikov import INF, NovikovSeries
from qhseidel.quantum import QhElement, axiom_suite, q_plus_closed, qh_degree, random_element, random_gamma
from qhseidel.units import (
    FirstTauPower,
    Inverse,
    NoneUpTo,
    NotInvertible,
    compose_loops,
    identity_loop,
    invert,
    loop_inverse,
    loop_power,
    order_lower_bound,
    tau,
)
from qhseidel.verify import (
    ALL_BUILTINS,
    rational_rank,
    brute_kernel,
    circle_action,
    circle_power_closed_form,
    classical_torus_spec,
    expected_kernel_rank,
    lattice_oracle,
    random_lattice,
    random_series,
)


def report(number, title, limit, fn):
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    in_time = elapsed < limit
    status = "PASS" if ok and in_time else "FAIL"
    line = f"ACCEPTANCE {number:>2} {status}: {title} [{elapsed:.2f}s / limit {limit}s]"
    if detail and not ok:
        line += f" -- {detail}"
    print(line)
    assert ok, detail
    assert in_time, f"took {elapsed:.2f}s, limit {limit}s"


def test_01_quantum_relation():
    def run():
        ring = builtin("cp1xcp1:2").ring
        f2 = builtin("f2-as-s2xs2:2").ring
        xp = ring.monomial("a") + ring.monomial("b")
        square = (xp.truncate(10) * xp.truncate(10)).truncate(10)
        # [M] (<(x+ - x-)/2> + <(x+ + x-)/2>) with x+ = (1,1), x- = (1,-1)
        want = ring.element([(0, (0, 1)), (0, (1, 0))], 10)
        named = f2.parse("[M]<b> + [M]<a> @E=10")
        return square == want and want.render() == named.render(), square.render()

    report(1, "cp1xcp1(2): (a+b)^2 = [M](<b> + <a>) at E=10", 1, run)


def test_02_q_power_closed_forms():
    def run():
        loop = circle_action(2)
        bad = []
        for m in range(1, 7):
            for p in (2 * m, 2 * m + 1):
                got = loop_power(loop, p, 12).q
                want = circle_power_closed_form(loop.ring, p)
                if not (got.cutoff == 12 and got.agrees(want, 12)):
                    bad.append(p)
        return not bad, f"powers {bad}"

    report(2, "circle action q^(2m), q^(2m+1) closed forms, m=1..6, E=12", 1, run)


def test_03_geometric_series_inverse():
    def run():
        loop = circle_action(2)
        ring = loop.ring
        e = Fraction(9, 2)
        out = invert(ring, loop.q, e)
        if not isinstance(out, Inverse):
            return False, repr(out)
        b, xm = ring.named_gamma("b"), ring.named_gamma("x-")
        series = NovikovSeries.from_terms(
            ring.gamma, [add(scale(-1, b), scale(j, xm)) for j in range(12)]
        )
        want = loop.q.scale(series).truncate(e)
        listed = [add(scale(-1, b), scale(j, xm)) for j in range(5)]
        has_listed = all((i, g) in out.element.terms for g in listed for i in (1, 2))
        back = (loop.q * out.element).agrees(ring.unit(), e)
        return out.element == want and has_listed and back, out.element.render()

    report(3, "inverse of a+b at E=4.5 is (a+b)<-b>(<0> + <x-> + ...), product = e", 1, run)


def test_04_grassmannian_relations():
    def run():
        cp1, cp2 = builtin("cp1"), builtin("cp2")
        one = cp1.loop("rotation").q ** 2 == tau(cp1.ring, cp1.ring.named_gamma("L"))
        two = cp2.loop("rotation").q ** 3 == tau(cp2.ring, cp2.ring.named_gamma("L"))
        gen = cp1.ring.named_gamma("L") == (1,) == cp2.ring.named_gamma("L")
        return one and two and gen, f"cp1 {one}, cp2 {two}"

    report(4, "(pt)^2 = tau(L) on cp1, (line)^3 = tau(L) on cp2", 1, run)


def test_05_infinite_order_detection():
    def run():
        a = order_lower_bound(circle_action(2), 20, 25)
        cp1 = builtin("cp1")
        b = order_lower_bound(cp1.loop("rotation"), 5, 6)
        return a == NoneUpTo(20) and b == FirstTauPower(2, cp1.ring.named_gamma("L")), f"{a}, {b}"

    report(5, "circle action NoneUpTo(20) at E=25; cp1 rotation FirstTauPower(2, L)", 5, run)


def test_06_grading():
    def run():
        rng = random.Random(6)
        pools = {}
        for name in ALL_BUILTINS:
            entry = builtin(name)
            for loop in entry.loops.values():
                if qh_degree(entry.ring, loop.q) != 2 * entry.ring.n - 2 * loop.maslov:
                    return False, f"{name}/{loop.name}"
            pool = list(entry.loops.values())
            pool += [loop_inverse(l, 4) for l in entry.loops.values()]
            pool += [identity_loop(entry.ring, random_gamma(entry.ring.gamma, rng, 2, span=2)) for _ in range(3)]
            pools[name] = pool
        names = sorted(pools)
        for i in range(100):
            pool = pools[names[i % len(names)]]
            l1, l2 = rng.choice(pool), rng.choice(pool)
            c = compose_loops(l1, l2)
            if c.maslov != l1.maslov + l2.maslov:
                return False, c.name
            if qh_degree(c.ring, c.q) != 2 * c.ring.n - 2 * c.maslov:
                return False, c.name
        return True, ""

    report(6, "deg q = 2n - 2I for catalog loops and 100 random compositions", 1, run)


def test_07_tau_and_identity_loop():
    def run():
        rng = random.Random(7)
        ring = builtin("cp1xcp1:2").ring
        g = ring.gamma
        for _ in range(50):
            gamma = random_gamma(g, rng, 8)
            if identity_loop(ring, gamma).q != tau(ring, gamma):
                return False, f"q(Id, {gamma})"
        for _ in range(100):
            u, v = random_gamma(g, rng, 8), random_gamma(g, rng, 8)
            if tau(ring, u) * tau(ring, v) != tau(ring, add(u, v)):
                return False, f"tau({u}) tau({v})"
            if (tau(ring, u) == tau(ring, v)) != (u == v):
                return False, f"injectivity at {u}, {v}"
        return tau(ring, g.zero) == ring.unit(), ""

    report(7, "q(Id, gamma) = tau(gamma) x50; tau homomorphism and injective x100", 1, run)


def test_08_degree_obstruction():
    def run():
        ring = classical_torus_spec(0)
        if not (q_plus_closed(ring) and minimal_chern(ring.gamma) == 0 and not ring.table.quantum):
            return False, "spec preconditions"
        rng = random.Random(8)
        seen = 0
        while seen < 50:
            x = QhElement(ring, random_element(ring, rng, 3, homogeneous=True).terms)
            if not x or qh_degree(ring, x) == 2 * ring.n:
                continue
            seen += 1
            out = invert(ring, x, 6)
            if not (isinstance(out, NotInvertible) and out.level == 0):
                return False, f"{x.render()} -> {out}"
        return True, ""

    report(8, "classical-only T2xS2-like spec: 50 obstructed elements NotInvertible at level 0", 1, run)


def test_09_ring_axioms():
    def run():
        bad = []
        for name in ALL_BUILTINS:
            rep = axiom_suite(builtin(name).ring, 200, Fraction(6), seed=9)
            if not rep.ok:
                bad.append(f"{name}: {sorted(k for k, v in rep.failures.items() if v)}")
        return not bad, "; ".join(bad)

    report(9, "unit, commutativity, associativity, degree law on all builtins, 200 samples, E=6", 10, run)


def test_10_lattice_oracle():
    def run():
        rng = random.Random(10)
        checked = 0
        while checked < 100:
            lat = random_lattice(rng)
            brute = brute_kernel(lat)
            if (rational_rank(brute) if brute else 0) != expected_kernel_rank(lat):
                continue
            checked += 1
            problems = lattice_oracle(lat, brute=brute)
            if problems:
                return False, f"{lat}: {problems[0]}"
        return True, ""

    report(10, "build_gamma kernels match brute force on 100 random lattices, rank <= 4", 10, run)


def test_11_truncation_soundness():
    def run():
        rng = random.Random(11)
        groups = [
            builtin("cp1xcp1:2").ring.gamma,
            build_gamma(SphereClassLattice((Fraction(1), Fraction(1, 2), Fraction(3)), (2, 1, 0))),
        ]
        levels = [Fraction(k, 2) for k in range(-6, 7)] + [INF]
        for n in range(500):
            g = groups[n % 2]
            x, y = random_series(g, rng), random_series(g, rng)
            tx, ty = x.truncate(rng.choice(levels)), y.truncate(rng.choice(levels))
            prod = tx * ty
            if not prod.agrees(x * y):
                return False, f"{tx} * {ty}"
            # any smaller E' also agrees
            if prod.cutoff != INF and not prod.truncate(prod.cutoff - 1).agrees(x * y):
                return False, f"{tx} * {ty} below E'"
        return True, ""

    report(11, "cutoff propagation sound on 500 seeded truncated multiplications", 5, run)


def test_12_cli_determinism_and_round_trip():
    def run():
        for name in ("cp1", "cp2", "cp1xcp1", "f2-as-s2xs2"):
            text = dump_spec(builtin(name))
            if dump_spec(loads_spec(text)) != text:
                return False, name
        outputs = []
        for _ in range(2):
            out, err = io.StringIO(), io.StringIO()
            code = main(["--seed", "12", "verify", "all"], stdout=out, stderr=err)
            outputs.append((code, out.getvalue(), err.getvalue()))
        same = outputs[0] == outputs[1]
        return same and outputs[0][0] == 0, "verify output differs between runs" if not same else outputs[0][1][-200:]

    report(12, "serialize/parse/serialize byte-identical; repeated verify runs byte-identical", 5, run)
