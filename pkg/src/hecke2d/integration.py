"""Exact integration on E, F, F^n and GL_n(F).

A lift ``g^{a,gamma}`` on F^n is supported on the box
``prod (a_i + t2^gamma_i calO)`` and takes the value
``g(res((x - a) t2^-gamma))``; its integral is
``(integral of g over E^n) * X^(sum gamma)``.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

from .efunction import EFunction
from .errors import DimensionMismatch, UnsupportedImageClass
from .field import FElem
from .laurent import LaurentX, Monomial
from .linalg import MatF, congruence_enumerate, gl_order, mat_det
from .sets import Ball, Box

log = logging.getLogger(__name__)


def _lx(c):
    return c if isinstance(c, LaurentX) else LaurentX.const(Fraction(c))


def haar_E(f):
    """Haar integral on E^d with ``mu(O_E^d) = 1``."""
    return f.haar()


@dataclass(frozen=True)
class LiftTerm:
    coef: LaurentX
    a: tuple
    gamma: tuple
    g: EFunction

    @property
    def n(self):
        return len(self.a)

    def box(self):
        return Box([Ball(a, g) for a, g in zip(self.a, self.gamma)])

    def __call__(self, x):
        pts = []
        for xi, ai, gi in zip(x, self.a, self.gamma):
            d = xi - ai
            if not d.in_t2_ideal(gi):
                return LaurentX.zero()
            pts.append(d.shift2(-gi).residue())
        return self.coef * self.g(tuple(pts))


@dataclass
class SimpleFn:
    """Finite sum of lifts on F^n; ``points`` are ignored point masses."""

    n: int
    terms: list = field(default_factory=list)
    points: list = field(default_factory=list)

    @classmethod
    def lift(cls, g, a, gamma, coef=1, shift=0):
        a = tuple(a) if isinstance(a, (tuple, list)) else (a,)
        gamma = tuple(gamma) if isinstance(gamma, (tuple, list)) else (gamma,)
        if not (len(a) == len(gamma) == g.dim):
            raise DimensionMismatch("center, gamma and E-function disagree in dimension")
        c = _lx(coef) * LaurentX.monomial(shift)
        return cls(len(a), [LiftTerm(c, a, gamma, g)])

    def __add__(self, other):
        if self.n != other.n:
            raise DimensionMismatch("simple functions on different spaces")
        return SimpleFn(self.n, self.terms + other.terms, self.points + other.points)

    def scale(self, c):
        c = _lx(c)
        return SimpleFn(self.n, [LiftTerm(t.coef * c, t.a, t.gamma, t.g) for t in self.terms], list(self.points))

    def __call__(self, x):
        x = tuple(x) if isinstance(x, (tuple, list)) else (x,)
        total = LaurentX.zero()
        for t in self.terms:
            total = total + t(x)
        for coef, p in self.points:
            if all((xi - pi).is_zero() for xi, pi in zip(x, p)):
                total = total + coef
        return total


def integrate_Fn(f, order=None):
    """Iterated integral over F^n, one coordinate at a time in ``order``."""
    order = tuple(range(f.n)) if order is None else tuple(order)
    if sorted(order) != list(range(f.n)):
        raise ValueError(f"{order} is not a permutation of 0..{f.n - 1}")
    if f.points:
        log.info("dropping %d point masses (measure zero)", len(f.points))
    total = LaurentX.zero()
    for t in f.terms:
        h = t.g
        remaining = list(range(f.n))
        xpow = 0
        for coord in order:
            pos = remaining.index(coord)
            h = h.integrate_out(pos)
            remaining.pop(pos)
            xpow += t.gamma[coord]
        total = total + t.coef * h.total() * LaurentX.monomial(xpow)
    return total


def integrate_F(f):
    if f.n != 1:
        raise DimensionMismatch("integrate_F expects a function on F")
    return integrate_Fn(f, (0,))


def fubini_values(f):
    """Integral in every coordinate order."""
    return {order: integrate_Fn(f, order) for order in permutations(range(f.n))}


# ---------------------------------------------------------------------------
# linear change of variables


def monomial_pattern(tau):
    """``perm`` with ``tau[i][perm[i]]`` the only nonzero entry of row i, or None."""
    n = tau.n
    perm = []
    for i in range(n):
        nz = [j for j in range(n) if not tau[i, j].is_zero()]
        if len(nz) != 1:
            return None
        perm.append(nz[0])
    return perm if sorted(perm) == list(range(n)) else None


def abs_det(tau):
    return mat_det(tau).abs()


def transform_linear(f, tau, shift=None, symbolic=True):
    """The function ``x -> f(tau x + shift)`` and its integral.

    Returns ``(SimpleFn or None, integral)``.  The symbolic form exists for
    monomial ``tau`` (diagonal and permutation matrices included); for other
    ``tau`` only the integral ``|det tau|^-1 * integral(f)`` is available."""
    if tau.n != f.n:
        raise DimensionMismatch("matrix and function dimensions differ")
    cfg = tau.cfg
    shift = tuple(shift) if shift is not None else tuple(FElem.zero(cfg) for _ in range(f.n))
    perm = monomial_pattern(tau)
    if perm is None:
        if symbolic:
            raise UnsupportedImageClass("symbolic pullback needs a monomial matrix")
        scale = abs_det(tau).inverse().to_laurent(cfg.q)
        return None, scale * integrate_Fn(f)
    n = f.n
    terms = []
    for t in f.terms:
        centers, gammas, lo, hi, units = [None] * n, [None] * n, [None] * n, [None] * n, [None] * n
        for i in range(n):
            d = tau[i, perm[i]]
            v2 = d.valuation2()
            w = d.shift2(-v2).residue()
            k = w.valuation()
            j = perm[i]
            gammas[j] = t.gamma[i] - v2
            centers[j] = ((t.a[i] - shift[i]) * d.inverse()).truncate2(gammas[j] + 1)
            lo[j] = t.g.lo[i] - k
            hi[j] = t.g.hi[i] - k
            units[i] = w
        g = t.g
        pulled = g.pullback(
            lambda z, units=units: tuple(units[i] * z[perm[i]] for i in range(n)), lo, hi
        )
        terms.append(LiftTerm(t.coef, tuple(centers), tuple(gammas), pulled))
    out = SimpleFn(n, terms, [])
    if f.points:
        log.info("dropping %d point masses under change of variables", len(f.points))
    return out, integrate_Fn(out)


# ---------------------------------------------------------------------------
# GL_n


def _basic_integral(fn):
    """Integral of ``fn(x) |det x|^-n`` over GL_n(F) for one basic function."""
    cfg, n = fn.cfg, fn.n
    q = cfg.q
    if fn.gamma is not None:
        lo, hi = fn.lo, fn.level
        ef = EFunction(cfg, (lo,) * n * n, (hi,) * n * n, fn.values)
        return haar_E(ef) * LaurentX.monomial(sum(sum(r) for r in fn.gamma))
    if fn.level == 0:
        vol = LaurentX.const(Fraction(gl_order(n, q, 1), q ** (n * n)))
        return fn.values.get(fn.unit_key(), LaurentX.zero()) * vol
    # each class c is the coset c K(m) of additive volume q^(-m n^2), |det| = 1
    cell = LaurentX.const(Fraction(1, q ** (fn.level * n * n)))
    total = LaurentX.zero()
    for v in fn.values.values():
        total = total + v * cell
    return total


def integrate_GLn(phi):
    """``integral over GL_n(F) of phi(x) |det x|^-n dx``.

    ``phi`` is a basic function, a Hecke element, or a list of
    ``(coefficient, basic function)`` pairs."""
    if hasattr(phi, "atom_values"):
        total = LaurentX.zero()
        for atom, v in phi.atom_values():
            total = total + v * atom.volume(atom.base.cfg.q)
        return total
    if hasattr(phi, "gamma") and hasattr(phi, "values"):
        return _basic_integral(phi)
    total = LaurentX.zero()
    for coef, fn in phi:
        total = total + _lx(coef) * _basic_integral(fn)
    return total


def integrate_GLn_E(cfg, n, level, table):
    """``integral over GL_n(E) of g(x) |det x|^-n dx`` for ``g`` given on
    GL_n(O_E / t1^level) classes, computed as a Haar integral on E^(n*n)."""
    allowed = set(congruence_enumerate(cfg, n, level))
    for key in table:
        if key not in allowed:
            raise ValueError(f"{key} is not a class of GL_{n}(O_E/t1^{level})")
    ef = EFunction(cfg, (0,) * n * n, (level,) * n * n, table)
    return haar_E(ef)
