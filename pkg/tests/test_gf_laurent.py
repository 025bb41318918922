from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hecke2d.errors import FloorViolation, ParseError
from hecke2d.gf import GF, factor_prime_power
from hecke2d.laurent import GuardedFamily, LaurentX, Monomial, lx_guarded_sum, parse_laurent, render

ORDERS = [2, 3, 4, 5, 8, 9, 16, 27, 49, 512]


def test_factor_prime_power():
    assert factor_prime_power(8) == (2, 3)
    assert factor_prime_power(49) == (7, 2)
    with pytest.raises(ValueError):
        factor_prime_power(6)


@pytest.mark.parametrize("q", ORDERS)
def test_gf_multiplicative_group(q):
    gf = GF(q)
    units = list(gf.units())
    assert len(units) == q - 1
    for a in units:
        assert gf.mul(a, gf.inv(a)) == 1


@given(st.sampled_from(ORDERS), st.data())
def test_gf_field_axioms(q, data):
    gf = GF(q)
    a, b, c = (data.draw(st.integers(0, q - 1)) for _ in range(3))
    assert gf.add(a, b) == gf.add(b, a)
    assert gf.mul(a, b) == gf.mul(b, a)
    assert gf.mul(a, gf.add(b, c)) == gf.add(gf.mul(a, b), gf.mul(a, c))
    assert gf.add(a, gf.neg(a)) == 0
    assert gf.sub(gf.add(a, b), b) == a


def test_gf_large_order_has_no_tables():
    gf = GF(512)
    assert gf.mul_table is None
    assert gf.mul(gf.inv(3), 3) == 1


laurents = st.dictionaries(
    st.integers(-4, 4), st.fractions(min_value=-50, max_value=50, max_denominator=9), max_size=4
).map(LaurentX)


@given(laurents, laurents, laurents)
def test_laurent_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == LaurentX.zero()


@given(laurents)
def test_render_round_trip(a):
    assert parse_laurent(render(a)) == a


def test_render_examples():
    assert render(LaurentX({2: Fraction(1, 8)})) == "(1/8)*X^2"
    assert render(LaurentX({0: 1, -1: -3})) == "-3*X^-1 + 1"
    assert render(LaurentX({-1: 1, 0: -1, 2: Fraction(-1, 2)})) == "X^-1 - 1 - (1/2)*X^2"
    assert render(LaurentX.zero()) == "0"


def test_parse_rejects_garbage():
    with pytest.raises(ParseError):
        parse_laurent("X^^2")


def test_monomial_evaluates():
    m = Monomial(2, 3)
    assert m.to_laurent(2) == LaurentX({2: Fraction(1, 8)})
    assert (m * m.inverse()).to_laurent(5) == LaurentX.one()


def test_guarded_sum_respects_floor():
    fam = GuardedFamily([LaurentX({0: 1}), LaurentX({1: 2})], 0)
    assert lx_guarded_sum(fam) == LaurentX({0: 1, 1: 2})
    with pytest.raises(FloorViolation):
        lx_guarded_sum(GuardedFamily([LaurentX({-1: 1})], 0))
