import random

import pytest
from hypothesis import given, strategies as st

from hecke2d.errors import DivisionByZero, ParseError, PrecisionExhausted
from hecke2d.field import FElem, FieldConfig, parse_felem, random_felem
from hecke2d.laurent import Monomial

CONFIGS = [FieldConfig(2), FieldConfig(3), FieldConfig(4)]


def felems(nonzero=False):
    return st.tuples(st.sampled_from(CONFIGS), st.integers(0, 2**32), st.integers(0, 3)).map(
        lambda t: random_felem(t[0], random.Random(t[1]), -2, 2, -2, 3, nonzero=nonzero)
    )


@given(st.sampled_from(CONFIGS), st.integers(0, 2**32))
def test_exact_ring_laws(cfg, seed):
    rng = random.Random(seed)
    a, b, c = (random_felem(cfg, rng, -2, 2, -2, 3) for _ in range(3))
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - b) + b == a


@given(felems(nonzero=True))
def test_inverse_to_working_precision(a):
    one = FElem.one(a.cfg)
    assert (a * a.inverse() - one).is_approx_zero()


@given(felems(nonzero=True), felems(nonzero=True))
def test_absolute_value_is_multiplicative(a, b):
    if a.cfg != b.cfg:
        return
    assert (a * b).abs() == a.abs() * b.abs()


@given(felems())
def test_format_parse_round_trip(a):
    assert parse_felem(a.cfg, str(a)) == a


def test_unit_decompose(cfg):
    a = cfg.parse("t2^-1*t1^2*(1+t1) + t2^3")
    v2, v1, u = a.unit_decompose()
    assert (v2, v1) == (-1, 2)
    assert u.is_O_unit()
    assert a.abs() == Monomial(-1, 2)


def test_ball_membership(cfg):
    x = cfg.parse("t2*t1^2 + t2^2*t1^-5")
    assert x.in_radius(1, 2)
    assert not x.in_radius(1, 3)
    assert x.in_calO()
    assert not x.in_radius(2, -10)


def test_zero_errors(cfg):
    with pytest.raises(DivisionByZero):
        cfg.zero().inverse()
    with pytest.raises(PrecisionExhausted):
        FElem(cfg, {}, 3).valuation2()


@pytest.mark.parametrize("text", ["t3", "t1^", "1 +", "(t1"])
def test_parse_errors(cfg, text):
    with pytest.raises(ParseError):
        parse_felem(cfg, text)


def test_large_residue_field_arithmetic():
    cfg = FieldConfig(512)
    a = cfg.parse("300 + t1*7")
    assert (a * a.inverse() - cfg.one()).is_approx_zero()
