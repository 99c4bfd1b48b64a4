from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from cartierlab.scalars import (
    GaussRat,
    HPoly,
    I,
    NonUnitError,
    OrderMismatchError,
    scalar_add,
    scalar_invert,
    scalar_mul,
)

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
gauss = st.builds(GaussRat, fractions, fractions)


@st.composite
def hpolys(draw, order=None):
    N = draw(st.integers(0, 3)) if order is None else order
    return HPoly([draw(gauss) for _ in range(N + 1)], order=N)


@st.composite
def hpoly_triples(draw):
    N = draw(st.integers(0, 3))
    return tuple(draw(hpolys(order=N)) for _ in range(3))


@given(gauss, gauss, gauss)
def test_gaussrat_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == GaussRat(0)
    if not a.is_zero():
        assert a * a.inverse() == GaussRat(1)


@given(gauss)
def test_gaussrat_parse_round_trip(a):
    assert GaussRat.parse(a.to_string()) == a


@pytest.mark.parametrize("text, value", [
    ("3", GaussRat(3)), ("-1/2", GaussRat(Fraction(-1, 2))), ("i", I),
    ("-i", -I), ("2/3i", GaussRat(0, Fraction(2, 3))), ("1/2+3/4i", GaussRat(Fraction(1, 2), Fraction(3, 4))),
    ("1-i", GaussRat(1, -1)),
])
def test_gaussrat_parse_examples(text, value):
    assert GaussRat.parse(text) == value


@pytest.mark.parametrize("text", ["", "abc", "1/0", "1//2", "2 3"])
def test_gaussrat_parse_rejects(text):
    with pytest.raises((ValueError, ZeroDivisionError)):
        GaussRat.parse(text)


def test_i_squared():
    assert I * I == GaussRat(-1)
    assert I ** 3 == -I
    assert (GaussRat(1) + I) * (GaussRat(1) - I) == GaussRat(2)


@given(hpoly_triples())
def test_hpoly_ring_axioms(t):
    a, b, c = t
    assert scalar_add(scalar_add(a, b), c) == scalar_add(a, scalar_add(b, c))
    assert scalar_mul(a, scalar_add(b, c)) == scalar_add(scalar_mul(a, b), scalar_mul(a, c))
    assert scalar_mul(scalar_mul(a, b), c) == scalar_mul(a, scalar_mul(b, c))
    assert a * b == b * a


@given(hpoly_triples())
def test_degree0_is_a_ring_homomorphism(t):
    a, b, _ = t
    assert (a * b).degree0() == a.degree0() * b.degree0()
    assert (a + b).degree0() == a.degree0() + b.degree0()


@given(st.integers(0, 3).flatmap(lambda N: hpolys(order=N)))
def test_invert_units(a):
    assume(not a.degree0().is_zero())
    assert scalar_invert(a) * a == HPoly.one(a.truncation_order)


def test_invert_non_unit():
    with pytest.raises(NonUnitError):
        scalar_invert(HPoly.hbar(2))


@given(hpoly_triples())
def test_truncation_consistency(t):
    a, b, c = (p.with_order(3) for p in t)
    lhs = (a * b + c).with_order(1)
    rhs = a.with_order(1) * b.with_order(1) + c.with_order(1)
    assert lhs == rhs


def test_order_mismatch():
    with pytest.raises(OrderMismatchError):
        HPoly.one(1) + HPoly.one(2)


def test_hbar_nilpotent():
    h = HPoly.hbar(2)
    assert not (h * h).is_zero()
    assert (h * h * h).is_zero()
    assert (h * h).valuation() == 2


@given(hpolys())
def test_hpoly_json_round_trip(a):
    assert HPoly.from_json(a.to_json()) == a


def test_canonical_zero():
    assert HPoly([0, 0, 0], order=2) == HPoly.zero(2)
    assert (HPoly([1, 2], order=1) - HPoly([1, 2], order=1)).is_zero()
    assert hash(HPoly([Fraction(2, 4)], order=0)) == hash(HPoly([Fraction(1, 2)], order=0))
