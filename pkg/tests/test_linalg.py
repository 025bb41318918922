import random

import pytest
from hypothesis import given, strategies as st

from hecke2d.errors import BudgetExceeded, SingularAtPrecision
from hecke2d.field import FElem, FieldConfig, random_felem
from hecke2d.linalg import (
    MatF, congruence_enumerate, gl_order, in_gl_calO, resmat_identity, resmat_inv, resmat_mul, smith_form,
)


def random_matrix(cfg, rng, n):
    return MatF(cfg, [[random_felem(cfg, rng, -1, 2, -1, 2) for _ in range(n)] for _ in range(n)])


def random_invertible(cfg, rng, n):
    while True:
        A = random_matrix(cfg, rng, n)
        if not A.det().is_approx_zero():
            return A


@given(st.sampled_from([2, 3]), st.integers(1, 3), st.integers(0, 2**32))
def test_det_is_multiplicative(q, n, seed):
    cfg, rng = FieldConfig(q), random.Random(seed)
    A, B = random_matrix(cfg, rng, n), random_matrix(cfg, rng, n)
    assert (A * B).det() == A.det() * B.det()


@given(st.sampled_from([2, 3]), st.integers(1, 3), st.integers(0, 2**32))
def test_inverse(q, n, seed):
    cfg, rng = FieldConfig(q), random.Random(seed)
    A = random_invertible(cfg, rng, n)
    assert (A * A.inverse()).approx_equal(MatF.identity(cfg, n))


@given(st.sampled_from([2, 3]), st.integers(1, 3), st.integers(0, 2**32))
def test_smith_form(q, n, seed):
    cfg, rng = FieldConfig(q), random.Random(seed)
    A = random_invertible(cfg, rng, n)
    U, D, V = smith_form(A)
    assert in_gl_calO(U) and in_gl_calO(V)
    assert (U * D * V).approx_equal(A)
    exps = [D[i, i].valuation2() for i in range(n)]
    assert exps == sorted(exps)
    assert sum(exps) == A.det().valuation2()


def test_singular_matrix():
    cfg = FieldConfig(2)
    A = MatF(cfg, [[cfg.one(), cfg.one()], [cfg.one(), cfg.one()]])
    with pytest.raises(SingularAtPrecision):
        smith_form(A)


@pytest.mark.parametrize("q,n,m", [(2, 1, 1), (2, 1, 3), (3, 1, 2), (2, 2, 1), (3, 2, 1), (2, 2, 2)])
def test_enumeration_matches_group_order(q, n, m):
    cfg = FieldConfig(q)
    elems = list(congruence_enumerate(cfg, n, m))
    assert len(elems) == len(set(elems)) == gl_order(n, q, m)


def test_gl2_f2_order():
    assert gl_order(2, 2) == 6
    assert gl_order(2, 3) == 48


def test_enumeration_budget():
    with pytest.raises(BudgetExceeded):
        list(congruence_enumerate(FieldConfig(3), 2, 3, budget=1000))


def test_residue_group_laws():
    cfg, n, m = FieldConfig(3), 2, 2
    elems = list(congruence_enumerate(cfg, n, m))
    rng = random.Random(1)
    one = resmat_identity(n, m)
    for _ in range(30):
        a, b, c = (rng.choice(elems) for _ in range(3))
        assert resmat_mul(cfg, n, a, resmat_inv(cfg, n, a, m), m) == one
        left = resmat_mul(cfg, n, resmat_mul(cfg, n, a, b, m), c, m)
        assert left == resmat_mul(cfg, n, a, resmat_mul(cfg, n, b, c, m), m)


def test_smith_form_with_cancellation():
    # a non-monomial pivot used to leave an undecidable zero t2-digit
    cfg = FieldConfig(2)
    A = MatF.parse(cfg, [
        ["t2^-1*t1", "t2", "0"],
        ["t2^-1", "t2*(t1^-1 + 1 + t1)", "0"],
        ["t2^-1*(t1^-1 + t1) + t1", "t1^-1 + 1 + t2*t1^-1", "t2"],
    ])
    U, D, V = smith_form(A)
    assert [D[i, i].valuation2() for i in range(3)] == [-1, 0, 2]
    assert (U * D * V).approx_equal(A)
