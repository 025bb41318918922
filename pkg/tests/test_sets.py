import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hecke2d.errors import NotNormalized, UnsupportedByOracle
from hecke2d.field import FElem, FieldConfig, random_felem
from hecke2d.laurent import LaurentX
from hecke2d.literals import parse_set
from hecke2d.oracle import oracle_integral, oracle_measure
from hecke2d.sets import (
    EMPTY, Ball, Box, DistinguishedSet, Leaf, ball_affine_image, ball_intersect, ball_minkowski_sum, box_intersect,
    dist_measure, ring_normalize,
)
from hecke2d.verify import random_expr


def measure(cfg, text):
    return dist_measure(ring_normalize(parse_set(cfg, text)))


@pytest.mark.parametrize("text,want", [
    ("dist(0; 0, 0)", {0: 1}),
    ("dist(0; 0, 1)", {0: Fraction(1, 3)}),
    ("dist(0; 0, -1)", {0: 3}),
    ("dist(0; 1, 0)", {1: 1}),
    ("dist(0; 0, 0) - dist(0; 0, 1)", {0: Fraction(2, 3)}),
    ("dist(0; 0, 0) | dist(t1^-1; 0, 0)", {0: 2}),
    ("dist(0; -1, 0) - dist(0; 0, 0)", {-1: 1, 0: -1}),
    ("dist(0; 0, 0) & dist(t1; 0, 1)", {0: Fraction(1, 3)}),
    ("dist(0; 0, 0) & dist(t1^-1; 0, 0)", {}),
])
def test_hand_computed_measures(text, want):
    cfg = FieldConfig(3)
    assert measure(cfg, text) == LaurentX(want)
    assert oracle_measure(parse_set(cfg, text)) == LaurentX(want)


def test_children_partition(cfg):
    D = DistinguishedSet(cfg.parse("t2^-1 + t1"), -1, 2)
    kids = D.children()
    assert len(kids) == cfg.q
    total = sum((k.measure() for k in kids), LaurentX.zero())
    assert total == D.measure()


def test_ball_operations(cfg):
    b1 = Ball(cfg.zero(), 0)
    b2 = Ball(cfg.t2(), 1)
    b3 = Ball(cfg.t2(-1), 0)
    assert ball_intersect(b1, b2) == b2
    assert ball_intersect(b1, b3) is EMPTY
    img = ball_affine_image(cfg.t2(2), cfg.one(), b1)
    assert img == Ball(cfg.one(), 2)
    assert ball_minkowski_sum(b2, b3).gamma == 0
    B = box_intersect(Box([b1, b1]), Box([b2, b1]))
    assert B == Box([b2, b1])
    assert box_intersect(Box([b1]), Box([b3])) is EMPTY


def test_difference_needs_normalization(cfg):
    e = parse_set(cfg, "dist(0; 0, 0) - dist(0; 1, 0)")
    with pytest.raises(NotNormalized):
        dist_measure(e)
    assert dist_measure(ring_normalize(e)) == LaurentX({0: 1, 1: -1})


@given(st.sampled_from([2, 3]), st.integers(0, 2**32))
def test_engine_matches_oracle(q, seed):
    cfg, rng = FieldConfig(q), random.Random(seed)
    e = random_expr(cfg, rng)
    assert dist_measure(ring_normalize(e)) == oracle_measure(e)


@given(st.sampled_from([2, 3]), st.integers(0, 2**32))
def test_inclusion_exclusion(q, seed):
    cfg, rng = FieldConfig(q), random.Random(seed)
    a, b = random_expr(cfg, rng, 2), random_expr(cfg, rng, 2)
    mu = lambda e: dist_measure(ring_normalize(e))
    assert mu(a | b) + mu(a & b) == mu(a) + mu(b)


@given(st.sampled_from([2, 3]), st.integers(0, 2**32))
def test_normal_form_has_same_points(q, seed):
    cfg, rng = FieldConfig(q), random.Random(seed)
    e = random_expr(cfg, rng)
    R = ring_normalize(e)
    for _ in range(20):
        x = random_felem(cfg, rng, 0, 4, 0, 4)
        assert R.contains(x) == e.contains(x)


def test_oracle_integral_linear(cfg):
    A = Leaf(DistinguishedSet(cfg.zero(), 0, 0))
    B = Leaf(DistinguishedSet(cfg.zero(), 0, 1))
    got = oracle_integral([(2, A), (-1, B)])
    assert got == LaurentX({0: 2 - Fraction(1, cfg.q)})


def test_oracle_rejects_other_operands(cfg):
    with pytest.raises(UnsupportedByOracle):
        oracle_integral([(1, Ball(cfg.zero(), 0))])


def test_product_measure(cfg):
    S = (DistinguishedSet(cfg.zero(), 1, 0), DistinguishedSet(cfg.zero(), 0, 2))
    assert dist_measure(S) == oracle_measure(S) == LaurentX({1: Fraction(1, cfg.q**2)})
