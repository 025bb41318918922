import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hecke2d.efunction import EFunction
from hecke2d.errors import DimensionMismatch, UnsupportedImageClass
from hecke2d.field import FElem, FieldConfig, random_felem
from hecke2d.hecke import BasicFn
from hecke2d.integration import (
    SimpleFn, abs_det, fubini_values, integrate_F, integrate_Fn, integrate_GLn, integrate_GLn_E, transform_linear,
)
from hecke2d.laurent import LaurentX
from hecke2d.linalg import MatF, congruence_enumerate
from hecke2d.oracle import oracle_measure
from hecke2d.sets import DistinguishedSet
from hecke2d.verify import random_monomial_matrix, random_simple


def test_char_ball_volume(cfg):
    assert EFunction.char_ball(cfg, 2, 1).haar() == LaurentX.const(Fraction(1, cfg.q**2))
    assert EFunction.char_ball(cfg, 1, -2).haar() == LaurentX.const(cfg.q**2)


def test_lift_of_indicator_is_a_distinguished_set(cfg):
    a = cfg.parse("t2^-1*t1")
    g = EFunction.indicator(cfg, (0,), (2,), [((1, 0),)])
    f = SimpleFn.lift(g, [a], [1])
    D = DistinguishedSet(a + cfg.parse("t2"), 1, 2)
    assert integrate_F(f) == D.measure() == oracle_measure(D)
    x = a + cfg.parse("t2 + t2*t1^2 + t2^3")
    assert f([x]) == LaurentX.one()
    assert f([x + cfg.t2()]) == LaurentX.zero()


@given(st.sampled_from([2, 3]), st.integers(2, 3), st.integers(0, 2**32))
def test_fubini(q, n, seed):
    cfg, rng = FieldConfig(q), random.Random(seed)
    f = random_simple(cfg, rng, n, 2)
    assert len(set(fubini_values(f).values())) == 1


@given(st.sampled_from([2, 3]), st.integers(1, 2), st.integers(0, 2**32))
def test_monomial_change_of_variables(q, n, seed):
    cfg, rng = FieldConfig(q), random.Random(seed)
    f = random_simple(cfg, rng, n)
    tau = random_monomial_matrix(cfg, rng, n)
    g, val = transform_linear(f, tau)
    assert val == abs_det(tau).inverse().to_laurent(q) * integrate_Fn(f)
    for _ in range(10):
        x = [random_felem(cfg, rng, -2, 3, -2, 3) for _ in range(n)]
        tx = [sum((tau[i, j] * x[j] for j in range(n)), FElem.zero(cfg)) for i in range(n)]
        assert g(x) == f(tx)


def test_shear_has_no_symbolic_image(cfg):
    rng = random.Random(3)
    f = random_simple(cfg, rng, 2)
    shear = MatF(cfg, [[cfg.one(), cfg.t1()], [cfg.zero(), cfg.one()]])
    with pytest.raises(UnsupportedImageClass):
        transform_linear(f, shear)
    _, val = transform_linear(f, shear, symbolic=False)
    assert val == integrate_Fn(f)


def test_point_masses_are_dropped(cfg):
    f = SimpleFn.lift(EFunction.char_ball(cfg, 1), [cfg.zero()], [0])
    f.points.append((LaurentX.const(5), (cfg.one(),)))
    assert integrate_F(f) == LaurentX.one()


def test_dimension_checks(cfg):
    with pytest.raises(DimensionMismatch):
        SimpleFn.lift(EFunction.char_ball(cfg, 2), [cfg.zero()], [0])
    with pytest.raises(ValueError):
        integrate_Fn(random_simple(cfg, random.Random(0), 2), (0, 0))


@pytest.mark.parametrize("n", [1, 2])
def test_unit_group_volume(cfg, n):
    q = cfg.q
    want = Fraction(1)
    for k in range(n):
        want *= 1 - Fraction(1, q ** (n - k))
    assert integrate_GLn(BasicFn.char_unit_group(cfg, n)) == LaurentX.const(want)


@pytest.mark.parametrize("n", [1, 2])
def test_bridge_to_residue_group(n):
    cfg = FieldConfig(2)
    rng = random.Random(n)
    for _ in range(5):
        classes = list(congruence_enumerate(cfg, n, 1))
        table = {k: rng.choice((1, 2, -1)) for k in classes if rng.random() < 0.5} or {classes[0]: 1}
        f = BasicFn.unit(MatF.identity(cfg, n), 1, table)
        assert integrate_GLn(f) == integrate_GLn_E(cfg, n, 1, table)
