"""Seeded random generators for test data and verification suites."""

from itertools import product

from .cosets import gl_fq_matrices
from .field import FElem
from .hecke import BasicFn
from .linalg import MatF, congruence_enumerate


def scalar(cfg, a, b, c=1):
    return FElem.monomial(cfg, a, b, c)


def nice_base(cfg, n, rng, spread=2, perturb=True):
    """``t2^a t1^b * u * (I + t2 N)`` with ``u`` in GL_n(F_q): a scalar times GL_n(O)."""
    fq = gl_fq_matrices(cfg, n)
    u = fq[rng.randrange(len(fq))]
    s = scalar(cfg, rng.randint(-spread, spread), rng.randint(-spread, spread))
    A = u * s
    if perturb:
        N = MatF(cfg, [
            [FElem.monomial(cfg, 1, rng.randint(-1, 1), rng.randrange(cfg.q)) for _ in range(n)]
            for _ in range(n)
        ])
        A = A * (MatF.identity(cfg, n) + N)
    return A


def random_values(rng, keys, density=0.5, values=(1, 1, 2, -1)):
    out = {}
    for k in keys:
        if rng.random() < density:
            out[k] = rng.choice(values)
    if not out and keys:
        out[keys[rng.randrange(len(keys))]] = 1
    return out


def random_cong_basic(cfg, n, rng, level=1, lo=0, gamma=None, base=None, density=0.4, uniform=True):
    if gamma is None:
        if uniform:
            g = rng.randint(1, 2)
            gamma = tuple(tuple(g for _ in range(n)) for _ in range(n))
        else:
            gamma = tuple(tuple(rng.randint(1, 2) for _ in range(n)) for _ in range(n))
    base = nice_base(cfg, n, rng) if base is None else base
    keys = list(product(product(range(cfg.q), repeat=level - lo), repeat=n * n))
    return BasicFn.cong(base, gamma, level, random_values(rng, keys, density), lo)


def random_unit_basic(cfg, n, rng, level=1, base=None, density=0.5):
    base = nice_base(cfg, n, rng, perturb=False) if base is None else base
    if level == 0:
        return BasicFn.unit(base, 0, {((),) * (n * n): rng.choice((1, 2, -1))})
    keys = list(congruence_enumerate(cfg, n, level))
    return BasicFn.unit(base, level, random_values(rng, keys, density))


def random_basic(cfg, n, rng, level=1, unit_share=0.3):
    if rng.random() < unit_share:
        return random_unit_basic(cfg, n, rng, level=rng.choice((0, level)))
    return random_cong_basic(cfg, n, rng, level=level)


def random_bi_invariant(cfg, n, rng, level=1, kind="cong", lo=0, density=0.6, gens=1):
    """A basic function at the identity that is constant on the double cosets
    of a random residue subgroup."""
    from .representations import ResidueGroup
    gamma = None if kind == "unit" else tuple((1,) * n for _ in range(n))
    rg = ResidueGroup(cfg, n, gamma, level, lo)
    elems = rg.elements()
    H = rg.closure(elems[rng.randrange(len(elems))] for _ in range(gens))
    values, seen = {}, set()
    for k in elems:
        if k in seen:
            continue
        orbit = {rg.mul(rg.mul(a, k), b) for a in H for b in H}
        seen |= orbit
        if rng.random() < density:
            v = rng.choice((1, 1, 2, -1))
            values.update((o, v) for o in orbit)
    ident = MatF.identity(cfg, n)
    if kind == "unit":
        return BasicFn.unit(ident, level, values)
    return BasicFn.cong(ident, gamma, level, values, lo)
