import itertools
from fractions import Fraction

import pytest

from qhseidel.catalog import builtin, make_ring
from qhseidel.quantum import (
    ANY_DEGREE,
    FUNDAMENTAL,
    NOT_HOMOGENEOUS,
    axiom_suite,
    classical_pairing,
    parse_element,
    q_plus_closed,
    qh_degree,
    tilde_phi,
    validate_spec,
)
from qhseidel.verify import classical_torus_spec


@pytest.fixture(scope="module")
def s2():
    return builtin("cp1xcp1:2").ring


def test_quantum_relation(s2):
    a, b = s2.monomial("a"), s2.monomial("b")
    assert a * a == s2.parse("[M]<0,1>")
    assert b * b == s2.parse("[M]<1,0>")
    assert (a + b) * (a + b) == s2.parse("[M]<1,0> + [M]<0,1>")
    assert a * b == s2.parse("pt<0,0>")
    pt = s2.monomial("pt")
    assert pt * pt == s2.parse("[M]<1,1>")
    assert a * pt == s2.parse("b<0,1>")


def test_unit(s2):
    e = s2.unit()
    x = s2.parse("a<1,-1> + pt<0,2> @E=5")
    assert e * x == x


def test_full_table_is_associative(s2):
    # exhaustive over basis monomials with gamma = 0
    monos = [s2.monomial(n) for n in s2.basis.names]
    for x, y, z in itertools.product(monos, repeat=3):
        assert (x * y) * z == x * (y * z)


def test_degrees(s2):
    assert qh_degree(s2, s2.parse("a<0,0>")) == 2
    assert qh_degree(s2, s2.parse("[M]<1,-1>")) == 4
    assert qh_degree(s2, s2.parse("pt<0,0> + [M]<0,1>")) == 0
    assert qh_degree(s2, s2.parse("a<0,0> + [M]<0,0>")) is NOT_HOMOGENEOUS
    assert qh_degree(s2, s2.zero()) is ANY_DEGREE


def test_render_orders_by_class_then_energy(s2):
    x = s2.parse("pt<0,0> + a<0,1> + a<0,0> + [M]<3,0>")
    assert x.render() == "[M]<3,0> + a<0,0> + a<0,1> + pt<0,0>"
    assert s2.zero().render() == "0"
    assert parse_element(s2, "a(x)<0,0>") == s2.monomial("a")


def test_named_gamma_literals():
    f2 = builtin("f2-as-s2xs2:2").ring
    assert f2.parse("[M]<x->") == f2.parse("[M]<1,-1>")
    assert f2.parse("a<x+> + b<-x->") == f2.parse("a<1,1> + b<-1,1>")


def test_truncated_product_cutoff(s2):
    x = s2.parse("a<0,0> @E=3")
    y = s2.parse("a<0,0>")
    p = x * y
    assert p.cutoff == 3
    assert p == s2.parse("[M]<0,1> @E=3")


def test_pairing_and_gw(s2):
    a, b, pt, top = (s2.basis.index(n) for n in ("a", "b", "pt", FUNDAMENTAL))
    assert classical_pairing(s2, [a], [b]) == 1
    assert classical_pairing(s2, [a], [a]) == 0
    assert classical_pairing(s2, [pt], [top]) == 1
    # the line class b is hit by one a-curve through a, pt and the dual of b
    assert tilde_phi(s2, a, pt, a, (0, 1)) == 1


def test_q_plus_closed():
    assert not q_plus_closed(builtin("cp1xcp1:2").ring)
    assert not q_plus_closed(builtin("cp1").ring)
    assert q_plus_closed(classical_torus_spec(0))


def test_validate_builtins():
    for name in ("cp1", "cp2", "cp1xcp1:2", "f2-as-s2xs2:3"):
        assert validate_spec(builtin(name).ring).ok


def _bad(**changes):
    args = dict(
        name="bad",
        n=1,
        omega=[1],
        chern=[2],
        basis=[(FUNDAMENTAL, 2), ("pt", 0)],
        classical=[(FUNDAMENTAL, FUNDAMENTAL, [FUNDAMENTAL]), (FUNDAMENTAL, "pt", ["pt"])],
        quantum=[((1,), "pt", "pt", [FUNDAMENTAL])],
    )
    args.update(changes)
    return validate_spec(make_ring(**args))


def test_validate_catches_faults():
    assert _bad().ok
    rep = _bad(quantum=[((1,), "pt", "pt", ["pt"])])
    assert any("degree" in str(v) for v in rep.violations)
    rep = _bad(omega=[0, 1], chern=[2, 2], quantum=[((1, 0), "pt", "pt", [FUNDAMENTAL])])
    assert any("positiv" in str(v) for v in rep.violations)
    rep = _bad(classical=[(FUNDAMENTAL, FUNDAMENTAL, [FUNDAMENTAL])])
    assert any("unit" in str(v) for v in rep.violations)
    rep = _bad(basis=[(FUNDAMENTAL, 2), ("pt", 0), ("pt2", 0)])
    assert not rep.ok


def test_axiom_suite_all_builtins():
    for name in ("cp1", "cp2", "cp1xcp1:2", "f2-as-s2xs2:2"):
        rep = axiom_suite(builtin(name).ring, 40, Fraction(6), seed=3)
        assert rep.ok, rep.failures


def test_axiom_suite_catches_non_associative_table():
    # the CP^2 table with the pt*pt entry removed is not associative
    bad = make_ring(
        "cp2-broken", 2, [1], [3],
        [(FUNDAMENTAL, 4), ("line", 2), ("pt", 0)],
        [(FUNDAMENTAL, c, [c]) for c in (FUNDAMENTAL, "line", "pt")] + [("line", "line", ["pt"])],
        [((1,), "line", "pt", [FUNDAMENTAL])],
    )
    assert validate_spec(bad).ok
    rep = axiom_suite(bad, 100, Fraction(6), seed=0)
    assert rep.failures.get("associativity")
