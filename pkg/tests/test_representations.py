import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hecke2d.errors import LevelMismatch, NotAdmissible
from hecke2d.field import FieldConfig
from hecke2d.hecke import BasicFn, HeckeElem
from hecke2d.integration import integrate_GLn
from hecke2d.laurent import LaurentX
from hecke2d.linalg import MatF, congruence_enumerate
from hecke2d.representations import (
    SubgroupDescriptor, as_vector, bi_invariance_group, double_coset_decompose, hecke_action, sample_points,
    stabilizer, stabilizer_search, translate_action,
)
from hecke2d.samples import nice_base, random_basic, random_bi_invariant, random_cong_basic, random_unit_basic
from hecke2d.verify import unit_char

seeds = st.integers(0, 2**32)


@given(st.sampled_from([1, 2]), seeds)
def test_translation_action_is_left_shift(n, seed):
    rng = random.Random(seed)
    cfg = FieldConfig(2)
    v = random_basic(cfg, n, rng)
    h = nice_base(cfg, n, rng)
    moved = translate_action(h, as_vector(v))
    for x in sample_points(v.translate(h), rng, 10):
        got = sum((val for atom, val in moved.atom_values() if atom.contains(x)), LaurentX.zero())
        assert got == v(h.inverse() * x)


def test_identity_acts_by_volume():
    cfg = FieldConfig(2)
    e = unit_char(cfg, 0, 0)
    assert hecke_action(e, as_vector(e)) == as_vector(e).scale(LaurentX.const(Fraction(1, 2)))


@given(seeds)
def test_action_is_multiplicative(seed):
    rng = random.Random(seed)
    cfg = FieldConfig(rng.choice((2, 3)))
    f1, f2, v = (random_basic(cfg, 1, rng) for _ in range(3))
    from hecke2d.hecke import convolve
    assert hecke_action(convolve(f1, f2), v) == hecke_action(f1, hecke_action(f2, v))


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("kind", ["cong", "unit"])
def test_stabilizer_matches_search(n, kind):
    cfg = FieldConfig(2)
    rng = random.Random(n * 7 + len(kind))
    ident = MatF.identity(cfg, n)
    for _ in range(4):
        if kind == "cong":
            v = random_cong_basic(cfg, n, rng, base=ident)
        else:
            v = random_unit_basic(cfg, n, rng, base=ident)
        S = stabilizer(v)
        assert S.H == stabilizer_search(v)
        assert S.is_group()


def test_full_support_is_fixed_by_everything():
    cfg = FieldConfig(2)
    ident = MatF.identity(cfg, 1)
    keys = [((a,),) for a in range(2)]
    v = BasicFn.cong(ident, ((1,),), 1, {k: 1 for k in keys})
    assert len(stabilizer(v).H) == 2
    w = BasicFn.cong(ident, ((1,),), 1, {((0,),): 1})
    assert len(stabilizer(w).H) == 1


def test_stabilizer_away_from_identity_is_conjugate():
    cfg, rng = FieldConfig(2), random.Random(4)
    A = nice_base(cfg, 1, rng)
    v = random_cong_basic(cfg, 1, rng, base=A)
    S = stabilizer(v)
    vec = as_vector(v)
    for _ in range(5):
        h = S.random_element(rng)
        assert S.contains(h)
        assert (translate_action(h, vec) - vec).is_zero()


def test_descriptor_json_round_trip():
    cfg, rng = FieldConfig(2), random.Random(1)
    v = random_unit_basic(cfg, 2, rng, base=MatF.identity(cfg, 2), density=1.0)
    S = stabilizer(v)
    assert SubgroupDescriptor.from_json(cfg, S.to_json()) == S
    assert integrate_GLn(S.indicator()) == S.measure()


@pytest.mark.parametrize("kind,level", [("cong", 1), ("unit", 2)])
def test_double_coset_reconstruction(kind, level):
    cfg, rng = FieldConfig(2), random.Random(11)
    v = random_bi_invariant(cfg, 1, rng, level=level, kind=kind)
    M = bi_invariance_group(v)
    D = double_coset_decompose(v, M)
    for x in sample_points(v, rng, 100):
        if D.within_bound(x):
            assert D.reconstruct(x) == v(x)


def test_indicator_of_group_is_one_double_coset():
    cfg = FieldConfig(2)
    n = 1
    keys = list(congruence_enumerate(cfg, n, 1))
    v = BasicFn.unit(MatF.identity(cfg, n), 1, {k: 1 for k in keys})
    M = bi_invariance_group(v)
    D = double_coset_decompose(v, M)
    assert len(D.terms) == 1
    assert D.terms[0][1] == LaurentX.one()


def test_zero_vector_has_no_double_cosets():
    cfg = FieldConfig(2)
    v = BasicFn.unit(MatF.identity(cfg, 1), 1, {((1,),): 1})
    M = bi_invariance_group(v)
    assert double_coset_decompose(HeckeElem.zero(cfg, 1), M).terms == []


def test_decomposition_preconditions():
    cfg, rng = FieldConfig(2), random.Random(3)
    A = nice_base(cfg, 1, rng)
    while A.is_identity():
        A = nice_base(cfg, 1, rng)
    with pytest.raises(NotAdmissible):
        bi_invariance_group(random_cong_basic(cfg, 1, rng, base=A))
    v = random_bi_invariant(cfg, 1, rng, level=1, kind="cong")
    w = random_bi_invariant(cfg, 1, rng, level=2, kind="unit")
    with pytest.raises(LevelMismatch):
        double_coset_decompose(v, bi_invariance_group(w))
