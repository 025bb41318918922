"""Locally constant, compactly supported functions on E^d.

A function is a table over residue classes: coordinate ``i`` ranges over
``t1^lo[i] O_E / t1^hi[i] O_E`` and a class is the tuple of its t1-digits.
Values are exact LaurentX; classes not stored are zero and everything outside
``prod t1^lo[i] O_E`` is zero.
"""

from fractions import Fraction
from itertools import product

from .errors import BudgetExceeded, DimensionMismatch
from .field import EElem
from .laurent import LaurentX


def _lx(v):
    return v if isinstance(v, LaurentX) else LaurentX.const(Fraction(v))


class EFunction:
    __slots__ = ("cfg", "lo", "hi", "values")

    def __init__(self, cfg, lo, hi, values):
        self.cfg = cfg
        self.lo = tuple(lo)
        self.hi = tuple(hi)
        if len(self.lo) != len(self.hi):
            raise DimensionMismatch("window bounds differ in length")
        if any(h < l for l, h in zip(self.lo, self.hi)):
            raise ValueError("empty residue window")
        clean = {}
        for key, v in values.items():
            v = _lx(v)
            if v.is_zero():
                continue
            key = tuple(tuple(d) for d in key)
            if len(key) != len(self.lo) or any(len(d) != h - l for d, l, h in zip(key, self.lo, self.hi)):
                raise DimensionMismatch(f"class {key} does not fit window {self.lo}..{self.hi}")
            clean[key] = clean.get(key, LaurentX.zero()) + v
        self.values = {k: v for k, v in sorted(clean.items()) if not v.is_zero()}

    @property
    def dim(self):
        return len(self.lo)

    # constructors -----------------------------------------------------------
    @classmethod
    def uniform_window(cls, cfg, d, lo, hi, values):
        return cls(cfg, (lo,) * d, (hi,) * d, values)

    @classmethod
    def indicator(cls, cfg, lo, hi, classes, value=1):
        return cls(cfg, lo, hi, {k: value for k in classes})

    @classmethod
    def char_ball(cls, cfg, d, k=0):
        """Characteristic function of ``(t1^k O_E)^d``."""
        key = tuple(() for _ in range(d))
        return cls(cfg, (k,) * d, (k,) * d, {key: 1})

    @classmethod
    def from_predicate(cls, cfg, lo, hi, pred, budget=1_000_000):
        total = 1
        for l, h in zip(lo, hi):
            total *= cfg.q ** (h - l)
        if total > budget:
            raise BudgetExceeded(f"table of {total} classes exceeds budget {budget}")
        vals = {}
        for key in product(*[product(range(cfg.q), repeat=h - l) for l, h in zip(lo, hi)]):
            v = pred(key)
            if v:
                vals[key] = v
        return cls(cfg, lo, hi, vals)

    # evaluation ---------------------------------------------------------------
    def class_of(self, point):
        """Residue class of a point of E^d, or None when outside the window."""
        key = []
        for e, l, h in zip(point, self.lo, self.hi):
            if not e.in_ideal(l):
                return None
            key.append(e.digits(l, h))
        return tuple(key)

    def __call__(self, point):
        if len(point) != self.dim:
            raise DimensionMismatch(f"expected {self.dim} coordinates")
        key = self.class_of(point)
        if key is None:
            return LaurentX.zero()
        return self.values.get(key, LaurentX.zero())

    def lift(self, key):
        """A representative point of a residue class."""
        return tuple(EElem.from_digits(self.cfg, d, l) for d, l in zip(key, self.lo))

    def cell_volume(self):
        q = Fraction(self.cfg.q)
        vol = Fraction(1)
        for h in self.hi:
            vol /= q**h
        return vol

    def haar(self):
        """Integral against Haar measure with ``mu(O_E^d) = 1``."""
        total = LaurentX.zero()
        for v in self.values.values():
            total = total + v
        return total * self.cell_volume()

    def integrate_out(self, i):
        """Integrate coordinate ``i`` away, leaving a function of the others."""
        if not 0 <= i < self.dim:
            raise DimensionMismatch(f"no coordinate {i} in dimension {self.dim}")
        cell = Fraction(self.cfg.q) ** -self.hi[i]
        out = {}
        for key, v in self.values.items():
            rest = key[:i] + key[i + 1:]
            out[rest] = out.get(rest, LaurentX.zero()) + v * cell
        drop = lambda t: t[:i] + t[i + 1:]
        return EFunction(self.cfg, drop(self.lo), drop(self.hi), out)

    def total(self):
        """Value of a zero-dimensional function."""
        if self.dim:
            raise DimensionMismatch("function still has free coordinates")
        return self.values.get((), LaurentX.zero())

    def is_zero(self):
        return not self.values

    # window changes ------------------------------------------------------------
    def refine(self, lo, hi, budget=1_000_000):
        """Same function on a finer/wider window (``lo`` lower, ``hi`` higher)."""
        lo, hi = tuple(lo), tuple(hi)
        if any(nl > ol or nh < oh for nl, nh, ol, oh in zip(lo, hi, self.lo, self.hi)):
            raise ValueError("refine may only widen the window")
        extra = 1
        for nl, nh, ol, oh in zip(lo, hi, self.lo, self.hi):
            extra *= self.cfg.q ** (nh - oh)
        if extra * max(1, len(self.values)) > budget:
            raise BudgetExceeded("refinement exceeds budget")
        out = {}
        for key, v in self.values.items():
            parts = []
            for d, nl, nh, ol, oh in zip(key, lo, hi, self.lo, self.hi):
                pre = (0,) * (ol - nl)
                parts.append([pre + d + tail for tail in product(range(self.cfg.q), repeat=nh - oh)])
            for newkey in product(*parts):
                out[newkey] = v
        return EFunction(self.cfg, lo, hi, out)

    def common_window(self, other):
        lo = tuple(min(a, b) for a, b in zip(self.lo, other.lo))
        hi = tuple(max(a, b) for a, b in zip(self.hi, other.hi))
        return lo, hi

    # algebra -------------------------------------------------------------------------
    def _combine(self, other, op):
        if self.dim != other.dim:
            raise DimensionMismatch("EFunctions of different dimension")
        lo, hi = self.common_window(other)
        a, b = self.refine(lo, hi), other.refine(lo, hi)
        keys = set(a.values) | set(b.values)
        zero = LaurentX.zero()
        return EFunction(self.cfg, lo, hi, {k: op(a.values.get(k, zero), b.values.get(k, zero)) for k in keys})

    def __add__(self, other):
        return self._combine(other, lambda x, y: x + y)

    def __sub__(self, other):
        return self._combine(other, lambda x, y: x - y)

    def __mul__(self, other):
        if isinstance(other, EFunction):
            return self._combine(other, lambda x, y: x * y)
        c = _lx(other)
        return EFunction(self.cfg, self.lo, self.hi, {k: v * c for k, v in self.values.items()})

    __rmul__ = __mul__

    def pullback(self, fn, lo, hi):
        """The function ``z -> self(fn(z))`` tabulated on the window ``lo..hi``.

        ``fn`` maps a representative point (tuple of EElem) to a point; it must
        be constant on classes of the new window."""
        out = {}
        for key in product(*[product(range(self.cfg.q), repeat=h - l) for l, h in zip(lo, hi)]):
            pt = tuple(EElem.from_digits(self.cfg, d, l) for d, l in zip(key, lo))
            v = self(fn(pt))
            if not v.is_zero():
                out[key] = v
        return EFunction(self.cfg, lo, hi, out)

    def __eq__(self, other):
        if not isinstance(other, EFunction):
            return NotImplemented
        if self.dim != other.dim:
            return False
        lo, hi = self.common_window(other)
        return self.refine(lo, hi).values == other.refine(lo, hi).values

    def __hash__(self):
        return hash((self.dim, len(self.values)))

    def __repr__(self):
        return f"EFunction(lo={self.lo}, hi={self.hi}, {len(self.values)} classes)"
