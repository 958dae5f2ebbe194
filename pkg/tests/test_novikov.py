from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhseidel.lattice import GroupMismatch, SphereClassLattice, build_gamma
from qhseidel.novikov import INF, NotUnital, NovikovSeries, parse_series

G = build_gamma(SphereClassLattice((Fraction(2), Fraction(1)), (2, 2)))  # omega(a)=2, omega(b)=1
H = build_gamma(SphereClassLattice((Fraction(1),), (2,)))


def S(text):
    return parse_series(text, G)


def test_render_and_parse():
    x = S("<1,-1> + <0,0> + <0,2> @E=3")
    assert x.render() == "<0,0> + <1,-1> + <0,2> @E=3"
    assert parse_series(x.render(), G) == x
    assert NovikovSeries.zero(G).render() == "0"
    assert S("0") == NovikovSeries.zero(G)


def test_named_gammas():
    names = {"x-": (1, -1)}
    assert parse_series("<0,0> + <x->", G, names) == S("<0,0> + <1,-1>")


def test_truncation_drops_high_terms():
    x = S("<0,0> + <1,0> + <0,3>").truncate(2)
    assert x.support == {(0, 0), (1, 0)}
    assert x.cutoff == 2


def test_char_two_cancellation():
    x = S("<1,0>")
    assert x + x == NovikovSeries.zero(G)
    assert NovikovSeries.from_terms(G, [(1, 0), (1, 0), (0, 1)]) == S("<0,1>")


def test_product_cutoff_uses_valuations():
    x = S("<0,0> + <0,1>").truncate(3)
    y = S("<1,0>")
    assert (x * y).cutoff == 5
    z = S("<-1,0>").truncate(1)
    assert (x * z).cutoff == 1


def test_zero_is_exact():
    assert NovikovSeries.zero(G).cutoff == INF
    assert (NovikovSeries.zero(G) * S("<1,0>").truncate(2)).cutoff == INF


def test_geometric_inverse_examples():
    one = NovikovSeries.one(G)
    assert one.geometric_inverse(5) == one.truncate(5)
    u = S("<0,0> + <1,-1>")
    assert u.geometric_inverse(Fraction(5, 2)) == S("<0,0> + <1,-1> + <2,-2> @E=5/2")
    u = S("<0,0> + <1,0> + <0,1>")
    assert u.geometric_inverse(2) == S("<0,0> + <0,1> + <0,2> + <1,0> @E=2")


def test_geometric_inverse_preconditions():
    with pytest.raises(NotUnital):
        S("<1,0>").geometric_inverse(3)
    with pytest.raises(NotUnital):
        S("<0,0> + <-1,1>").geometric_inverse(3)


def test_group_mismatch():
    with pytest.raises(GroupMismatch):
        S("<0,0>") + NovikovSeries.one(H)


def test_shift_moves_cutoff():
    x = S("<0,0> @E=2").shift((0, 1))
    assert x == S("<0,1> @E=3")


def test_graded_pieces():
    parts = S("<0,0> + <1,-1> + <1,0>").graded()
    assert set(parts) == {0, -4}
    assert parts[0].support == {(0, 0), (1, -1)}


gammas = st.tuples(st.integers(-2, 2), st.integers(-3, 3))
series = st.builds(lambda ts: NovikovSeries.from_terms(G, ts), st.lists(gammas, max_size=6))
levels = st.fractions(min_value=-3, max_value=6, max_denominator=2)


@settings(max_examples=150, deadline=None)
@given(series, series, levels, levels)
def test_cutoff_soundness(x, y, ex, ey):
    tx, ty = x.truncate(ex), y.truncate(ey)
    assert (tx * ty).agrees(x * y)


@settings(max_examples=100, deadline=None)
@given(series, series, series, levels)
def test_ring_axioms_at_cutoff(x, y, z, e):
    x = x.truncate(e)
    assert ((x * y) * z).agrees(x * (y * z))
    assert (x * (y + z)).agrees(x * y + x * z)
    assert x * y == y * x


@settings(max_examples=100, deadline=None)
@given(series)
def test_frobenius(x):
    assert (x * x).support == {(2 * a, 2 * b) for a, b in x.support}


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(-1, 2)).filter(lambda g: 2 * g[0] + g[1] > 0), max_size=4), levels)
def test_geometric_inverse_round_trip(tail, e):
    e = max(e, Fraction(1, 2))
    u = NovikovSeries.one(G) + NovikovSeries.from_terms(G, tail)
    if (0, 0) not in u.support:
        return
    inv = u.geometric_inverse(e)
    assert (u * inv).agrees(NovikovSeries.one(G), e)
