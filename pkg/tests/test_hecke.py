import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hecke2d.cosets import GLCongCoset, glcoset_intersect
from hecke2d.errors import LevelMismatch, NotAdmissible
from hecke2d.field import FieldConfig
from hecke2d.hecke import BasicFn, HeckeElem, basic_product, convolve, translate_flip
from hecke2d.integration import integrate_GLn
from hecke2d.laurent import LaurentX
from hecke2d.linalg import MatF
from hecke2d.samples import nice_base, random_basic, random_cong_basic
from hecke2d.sets import EMPTY
from hecke2d.verify import random_product_pair, unit_char

seeds = st.integers(0, 2**32)


def points_of(*fns, rng, count=40):
    atoms = [a for f in fns if f for a, _ in f.atoms()]
    return [atoms[rng.randrange(len(atoms))].random_point(rng) for _ in range(count)]


@pytest.mark.parametrize("q", [2, 3])
def test_identity_idempotent_up_to_volume(q):
    cfg = FieldConfig(q)
    e = unit_char(cfg, 0, 0)
    assert convolve(e, e) == HeckeElem.from_basic(e).scale(LaurentX.const(1 - Fraction(1, q)))


@given(st.sampled_from([2, 3]), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3))
def test_graded_law(q, a1, b1, a2, b2):
    cfg = FieldConfig(q)
    got = convolve(unit_char(cfg, a1, b1), unit_char(cfg, a2, b2))
    want = HeckeElem.from_basic(unit_char(cfg, a1 + a2, b1 + b2)).scale(LaurentX.const(1 - Fraction(1, q)))
    assert got == want


@given(st.sampled_from([1, 2]), seeds)
def test_pointwise_product(n, seed):
    rng = random.Random(seed)
    cfg = FieldConfig(2 if n == 2 else rng.choice((2, 3)))
    f1, f2 = random_product_pair(cfg, n, rng)
    p = basic_product(f1, f2)
    for x in points_of(f1, f2, p, rng=rng):
        got = p(x) if p else LaurentX.zero()
        assert got == f1(x) * f2(x)


def test_product_level_mismatch():
    cfg, rng = FieldConfig(2), random.Random(0)
    f1 = random_cong_basic(cfg, 1, rng, level=1)
    f2 = random_cong_basic(cfg, 1, rng, level=2, base=f1.A)
    with pytest.raises(LevelMismatch):
        basic_product(f1, f2)


def test_gamma_must_be_positive(cfg2):
    with pytest.raises(NotAdmissible):
        BasicFn.cong(MatF.identity(cfg2, 1), ((0,),), 1, {})


@given(st.sampled_from([1, 2]), seeds)
def test_raise_level_keeps_function(n, seed):
    rng = random.Random(seed)
    cfg = FieldConfig(2)
    f = random_basic(cfg, n, rng, level=1)
    g = f.raise_level(2)
    assert integrate_GLn(g) == integrate_GLn(f)
    for x in points_of(f, rng=rng, count=10):
        assert g(x) == f(x)


@given(st.sampled_from([1, 2]), seeds)
def test_translate_flip(n, seed):
    rng = random.Random(seed)
    cfg = FieldConfig(2 if n == 2 else rng.choice((2, 3)))
    f = random_basic(cfg, n, rng, level=1)
    y = nice_base(cfg, n, rng)
    g = translate_flip(f, y)
    for x in points_of(g, rng=rng, count=15):
        assert g(x) == f(y * x.inverse())


@given(st.sampled_from([2, 3]), seeds)
def test_associativity_rank_one(q, seed):
    rng = random.Random(seed)
    cfg = FieldConfig(q)
    f1, f2, f3 = (random_basic(cfg, 1, rng, level=1) for _ in range(3))
    assert convolve(convolve(f1, f2), f3) == convolve(f1, convolve(f2, f3))


def test_convolution_is_bilinear():
    cfg, rng = FieldConfig(3), random.Random(5)
    f1, f2, g = (random_basic(cfg, 1, rng) for _ in range(3))
    s = HeckeElem.from_basic(f1) + HeckeElem.from_basic(f2).scale(LaurentX.const(2))
    assert convolve(s, g) == convolve(f1, g) + convolve(f2, g).scale(LaurentX.const(2))


def test_hecke_elem_cancellation():
    cfg, rng = FieldConfig(2), random.Random(2)
    h = HeckeElem.from_basic(random_basic(cfg, 2, rng))
    assert (h + h - h.scale(LaurentX.const(2))).is_zero()


@given(seeds)
def test_coset_intersection_membership(seed):
    rng = random.Random(seed)
    cfg = FieldConfig(2)
    f1 = random_cong_basic(cfg, 2, rng, level=1, uniform=False)
    f2 = random_cong_basic(cfg, 2, rng, level=1, base=f1.A, uniform=False)
    C1, C2 = f1.support(), f2.support()
    C = glcoset_intersect(C1, C2)
    for x in points_of(f1, f2, rng=rng, count=20):
        inside = C1.contains(x) and C2.contains(x)
        assert (C is not EMPTY and C.contains(x)) == inside


def test_full_coset_membership(cfg2):
    ident = MatF.identity(cfg2, 1)
    C = GLCongCoset(ident, ((1,),))
    assert C.is_full
    assert C.contains(MatF(cfg2, [[cfg2.parse("1 + t2*t1^-4")]]))
    assert not C.contains(MatF(cfg2, [[cfg2.parse("1 + t1")]]))
