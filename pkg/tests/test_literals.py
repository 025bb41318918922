import random

import pytest
from hypothesis import given, strategies as st

from hecke2d.cosets import GLCongCoset
from hecke2d.errors import ParseError
from hecke2d.field import FieldConfig
from hecke2d.hecke import BasicFn, HeckeElem
from hecke2d.literals import format_class, function_literal, parse_class, parse_coeff, parse_function, parse_set
from hecke2d.samples import random_basic
from hecke2d.sets import Ball, Box, DistinguishedSet, SetExpr


def test_set_literals(cfg):
    assert parse_set(cfg, "dist(t2^-1 + t1; 1, 2)") == DistinguishedSet(cfg.parse("t2^-1 + t1"), 1, 2)
    assert parse_set(cfg, "ball(0; 3)") == Ball(cfg.zero(), 3)
    assert isinstance(parse_set(cfg, "box[ball(0; 1); ball(1; 0)]"), Box)
    prod = parse_set(cfg, "prod[dist(0; 0, 0); dist(0; 1, 1)]")
    assert isinstance(prod, tuple) and len(prod) == 2
    assert isinstance(parse_set(cfg, "(dist(0;0,0) | dist(t1^-1;0,0)) - dist(0;0,1)"), SetExpr)


def test_coset_literal(cfg2):
    C = parse_set(cfg2, "coset([[1, 0], [0, 1]]; [[1, 1], [1, 1]]; {[0,1,0,0]} @ 1)")
    assert isinstance(C, GLCongCoset)
    assert C.level == 1 and len(C.classes) == 1
    full = parse_set(cfg2, "coset([[t2]]; [[2]]; full @ 0)")
    assert full.is_full
    wide = parse_set(cfg2, "coset([[1]]; [[2]]; {[1.0]; [0.1]} @ -1..1)")
    assert wide.lo == -1 and len(wide.classes) == 2


@pytest.mark.parametrize("text,pos", [
    ("dist(0; 2 3)", 10),
    ("dist(0; 1, 0", 12),
    ("ball(0; 1) | ball(1; 1)", 11),
    ("cube(0)", 0),
])
def test_parse_error_positions(cfg2, text, pos):
    with pytest.raises(ParseError) as err:
        parse_set(cfg2, text)
    assert err.value.position == pos


def test_digit_range_is_checked(cfg2):
    with pytest.raises(ParseError):
        parse_set(cfg2, "coset([[1]]; [[1]]; {[2]} @ 1)")


@given(st.lists(st.lists(st.integers(0, 2), max_size=3), min_size=1, max_size=4))
def test_class_round_trip(digits):
    cfg = FieldConfig(3)
    key = tuple(tuple(d) for d in digits)
    assert parse_class(cfg, format_class(key)) == key


def test_coefficients():
    assert str(parse_coeff(3)) == "3"
    assert str(parse_coeff("X^-1 + 1/2")) == "X^-1 + 1/2"
    with pytest.raises(ParseError):
        parse_coeff(1.5)


@given(st.sampled_from([1, 2]), st.integers(0, 2**32))
def test_function_literal_round_trip(n, seed):
    rng = random.Random(seed)
    cfg = FieldConfig(2)
    f = random_basic(cfg, n, rng)
    g = parse_function(cfg, function_literal(f))
    assert HeckeElem.from_basic(g) == HeckeElem.from_basic(f)


def test_sum_literal(cfg2):
    e = {"basic": "unit", "A": [["1"]], "level": 0, "value": 1}
    h = parse_function(cfg2, {"sum": [[2, e], ["-1", e]]})
    assert h == HeckeElem.from_basic(parse_function(cfg2, e))


def test_char_literal_needs_coset(cfg2):
    assert isinstance(parse_function(cfg2, "coset([[1]]; [[1]]; {[1]} @ 1)"), BasicFn)
    with pytest.raises(ParseError):
        parse_function(cfg2, {"char": "dist(0; 0, 0)"})
    with pytest.raises(ParseError):
        parse_function(cfg2, {"basic": "other", "A": [["1"]]})
