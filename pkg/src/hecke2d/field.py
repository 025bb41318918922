"""Truncated arithmetic in E = F_q((t1)) and F = E((t2)).

Every element carries an absolute precision: an :class:`EElem` is known
modulo ``t1**prec`` and an :class:`FElem` modulo ``t2**prec``; ``prec=None``
marks an exact (finite) element.  Operations shrink precision pessimistically
and raise :class:`PrecisionExhausted` rather than invent digits.
"""

import math
from dataclasses import dataclass
from functools import cached_property

from .errors import DivisionByZero, NotIntegral, ParseError, PrecisionExhausted
from .gf import factor_prime_power, get_field
from .laurent import Monomial

INF = math.inf


@dataclass(frozen=True)
class FieldConfig:
    q: int
    t1_prec: int = 12
    t2_prec: int = 8

    def __post_init__(self):
        factor_prime_power(self.q)
        if self.t1_prec < 1 or self.t2_prec < 1:
            raise ValueError("precisions must be >= 1")

    @cached_property
    def gf(self):
        return get_field(self.q)

    # convenience constructors
    def E(self, coeffs=None, prec=None):
        return EElem(self, coeffs or {}, prec)

    def F(self, coeffs=None, prec=None):
        return FElem(self, coeffs or {}, prec)

    def one(self):
        return FElem.one(self)

    def zero(self):
        return FElem.zero(self)

    def t1(self, k=1):
        return FElem.monomial(self, 0, k)

    def t2(self, k=1):
        return FElem.monomial(self, k, 0)

    def parse(self, text):
        return parse_felem(self, text)


def _pmin(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _as_inf(p):
    return INF if p is None else p


def _from_inf(p):
    return None if p == INF else int(p)


class EElem:
    """Element of F_q((t1)) known modulo ``t1**prec``."""

    __slots__ = ("cfg", "c", "prec", "_hash")

    def __init__(self, cfg, coeffs, prec=None):
        self.cfg = cfg
        self.prec = prec
        self.c = {k: v for k, v in sorted(coeffs.items()) if v}
        if prec is not None:
            self.c = {k: v for k, v in self.c.items() if k < prec}
        self._hash = None

    @classmethod
    def zero(cls, cfg):
        return cls(cfg, {})

    @classmethod
    def one(cls, cfg):
        return cls(cfg, {0: 1})

    @classmethod
    def const(cls, cfg, a):
        return cls(cfg, {0: a})

    @classmethod
    def from_digits(cls, cfg, digits, lo=0):
        return cls(cfg, {lo + i: d for i, d in enumerate(digits) if d})

    # predicates -----------------------------------------------------------
    def is_exact(self):
        return self.prec is None

    def is_zero(self):
        """True only for the exact zero."""
        return not self.c and self.prec is None

    def is_nonzero(self):
        return bool(self.c)

    def lower_val(self):
        if self.c:
            return next(iter(self.c))
        return _as_inf(self.prec)

    def valuation(self):
        if self.c:
            return next(iter(self.c))
        if self.prec is None:
            raise DivisionByZero("valuation of zero")
        raise PrecisionExhausted(f"cannot decide t1-valuation of O(t1^{self.prec})")

    def in_ideal(self, k):
        """Decide membership in ``t1**k O_E``."""
        if self.c and next(iter(self.c)) < k:
            return False
        if self.prec is not None and self.prec < k:
            raise PrecisionExhausted(f"need t1-precision {k}, have {self.prec}")
        return True

    # arithmetic -------------------------------------------------------------
    def _check(self, other):
        if self.cfg.q != other.cfg.q:
            raise ValueError("elements over different residue fields")

    def __add__(self, other):
        if isinstance(other, int):
            other = EElem.const(self.cfg, self.cfg.gf.from_int(other))
        self._check(other)
        gf = self.cfg.gf
        out = dict(self.c)
        for k, v in other.c.items():
            out[k] = gf.add(out.get(k, 0), v)
        return EElem(self.cfg, out, _pmin(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        gf = self.cfg.gf
        return EElem(self.cfg, {k: gf.neg(v) for k, v in self.c.items()}, self.prec)

    def __sub__(self, other):
        if isinstance(other, int):
            other = EElem.const(self.cfg, self.cfg.gf.from_int(other))
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(self.cfg.gf.from_int(other))
        self._check(other)
        gf = self.cfg.gf
        prec = min(
            self.lower_val() + _as_inf(other.prec),
            other.lower_val() + _as_inf(self.prec),
        )
        out = {}
        oc = other.c
        if gf.add_table is None:
            for k1, v1 in self.c.items():
                for k2, v2 in oc.items():
                    k = k1 + k2
                    if k >= prec:
                        break
                    out[k] = gf.add(out.get(k, 0), gf.mul(v1, v2))
            return EElem(self.cfg, out, _from_inf(prec))
        addt, mult = gf.add_table, gf.mul_table
        get = out.get
        for k1, v1 in self.c.items():
            row = mult[v1]
            for k2, v2 in oc.items():
                k = k1 + k2
                if k >= prec:
                    break
                out[k] = addt[get(k, 0)][row[v2]]
        return EElem(self.cfg, out, _from_inf(prec))

    __rmul__ = __mul__

    def scale(self, s):
        gf = self.cfg.gf
        if s == 0:
            return EElem(self.cfg, {}, self.prec)
        return EElem(self.cfg, {k: gf.mul(v, s) for k, v in self.c.items()}, self.prec)

    def shift(self, k):
        """Multiply by ``t1**k``."""
        prec = None if self.prec is None else self.prec + k
        return EElem(self.cfg, {e + k: v for e, v in self.c.items()}, prec)

    def inverse(self):
        v = self.valuation()
        gf = self.cfg.gf
        if len(self.c) == 1 and self.prec is None:
            return EElem(self.cfg, {-v: gf.inv(self.c[v])})
        rp = self.cfg.t1_prec
        if self.prec is not None:
            rp = min(rp, self.prec - v)
        if rp <= 0:
            raise PrecisionExhausted("no t1-digits left to invert")
        u = [self.c.get(v + k, 0) for k in range(rp)]
        u0inv = gf.inv(u[0])
        d = [u0inv]
        for k in range(1, rp):
            acc = 0
            for j in range(1, k + 1):
                if u[j]:
                    acc = gf.add(acc, gf.mul(u[j], d[k - j]))
            d.append(gf.neg(gf.mul(u0inv, acc)))
        return EElem(self.cfg, {k - v: x for k, x in enumerate(d)}, rp - v)

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = EElem.one(self.cfg)
        for _ in range(n):
            out = out * self
        return out

    # residues ---------------------------------------------------------------
    def truncate(self, k):
        """Exact representative of the class modulo ``t1**k``."""
        if self.prec is not None and self.prec < k:
            raise PrecisionExhausted(f"need t1-precision {k}, have {self.prec}")
        return EElem(self.cfg, {e: v for e, v in self.c.items() if e < k})

    def digits(self, lo, hi):
        """Coefficients of ``t1**lo .. t1**(hi-1)``; the element must lie in
        ``t1**lo O_E``."""
        if self.c and next(iter(self.c)) < lo:
            raise ValueError(f"{self} is not in t1^{lo} O_E")
        if self.prec is not None and self.prec < hi:
            raise PrecisionExhausted(f"need t1-precision {hi}, have {self.prec}")
        return tuple(self.c.get(k, 0) for k in range(lo, hi))

    # comparisons --------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, int):
            other = EElem.const(self.cfg, self.cfg.gf.from_int(other))
        if not isinstance(other, EElem):
            return NotImplemented
        return self.cfg.q == other.cfg.q and self.c == other.c and self.prec == other.prec

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.cfg.q, tuple(self.c.items()), self.prec))
        return self._hash

    def __repr__(self):
        return f"EElem({self})"

    def __str__(self):
        return format_eelem(self)


def _fmt_coeff(cfg, v):
    gf = cfg.gf
    return str(v) if v < gf.p else "{" + str(v) + "}"


def format_eelem(e):
    parts = []
    for k, v in e.c.items():
        if k == 0:
            parts.append(_fmt_coeff(e.cfg, v))
            continue
        mono = "t1" if k == 1 else f"t1^{k}"
        parts.append(mono if v == 1 else f"{_fmt_coeff(e.cfg, v)}*{mono}")
    if e.prec is not None:
        parts.append(f"O(t1^{e.prec})")
    return "+".join(parts) if parts else "0"


class FElem:
    """Element of E((t2)) known modulo ``t2**prec``."""

    __slots__ = ("cfg", "c", "prec", "_hash")

    def __init__(self, cfg, coeffs, prec=None):
        self.cfg = cfg
        self.prec = prec
        self.c = {
            j: e
            for j, e in sorted(coeffs.items())
            if not e.is_zero() and (prec is None or j < prec)
        }
        self._hash = None

    @classmethod
    def zero(cls, cfg):
        return cls(cfg, {})

    @classmethod
    def one(cls, cfg):
        return cls(cfg, {0: EElem.one(cfg)})

    @classmethod
    def from_e(cls, e):
        return cls(e.cfg, {0: e})

    @classmethod
    def monomial(cls, cfg, j, k, a=1):
        return cls(cfg, {j: EElem(cfg, {k: a})})

    @classmethod
    def const(cls, cfg, a):
        return cls(cfg, {0: EElem.const(cfg, a)})

    # predicates ---------------------------------------------------------------
    def is_exact(self):
        return self.prec is None and all(e.prec is None for e in self.c.values())

    def is_zero(self):
        return not self.c and self.prec is None

    def lower_val(self):
        if self.c:
            return next(iter(self.c))
        return _as_inf(self.prec)

    def valuation2(self):
        for j, e in self.c.items():
            if e.is_nonzero():
                return j
            raise PrecisionExhausted(f"t2^{j}-coefficient is an unresolved zero")
        if self.prec is None:
            raise DivisionByZero("valuation of zero")
        raise PrecisionExhausted(f"cannot decide t2-valuation of O(t2^{self.prec})")

    def coeff(self, j):
        if j in self.c:
            return self.c[j]
        if self.prec is not None and j >= self.prec:
            raise PrecisionExhausted(f"t2^{j}-coefficient beyond precision {self.prec}")
        return EElem.zero(self.cfg)

    def in_t2_ideal(self, g):
        """Decide membership in ``t2**g * calO`` (rank-one integers)."""
        for j, e in self.c.items():
            if j >= g:
                break
            if e.is_nonzero():
                return False
            raise PrecisionExhausted(f"t2^{j}-coefficient is an unresolved zero")
        if self.prec is not None and self.prec < g:
            raise PrecisionExhausted(f"need t2-precision {g}, have {self.prec}")
        return True

    def in_radius(self, g, m):
        """Decide membership in ``t2**g t1**m O`` (rank-two ball)."""
        if not self.in_t2_ideal(g):
            return False
        return self.coeff(g).in_ideal(m)

    def in_calO(self):
        return self.in_t2_ideal(0)

    def in_O(self):
        return self.in_radius(0, 0)

    def is_approx_zero(self):
        """No nonzero digit is known (exact zero or zero to working precision)."""
        return all(not e.c for e in self.c.values())

    def is_O_unit(self):
        return self.valuation2() == 0 and self.c[0].valuation() == 0

    # arithmetic ------------------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, FElem):
            if other.cfg.q != self.cfg.q:
                raise ValueError("elements over different residue fields")
            return other
        if isinstance(other, EElem):
            return FElem.from_e(other)
        if isinstance(other, int):
            return FElem.const(self.cfg, self.cfg.gf.from_int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = dict(self.c)
        for j, e in other.c.items():
            out[j] = out[j] + e if j in out else e
        return FElem(self.cfg, out, _pmin(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        return FElem(self.cfg, {j: -e for j, e in self.c.items()}, self.prec)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        prec = min(
            self.lower_val() + _as_inf(other.prec),
            other.lower_val() + _as_inf(self.prec),
        )
        out = {}
        for j1, e1 in self.c.items():
            for j2, e2 in other.c.items():
                j = j1 + j2
                if j < prec:
                    p = e1 * e2
                    out[j] = out[j] + p if j in out else p
        return FElem(self.cfg, out, _from_inf(prec))

    __rmul__ = __mul__

    def mul_upto(self, other, bound):
        """Product known only modulo ``t2**bound`` (skips higher terms)."""
        prec = min(
            self.lower_val() + _as_inf(other.prec),
            other.lower_val() + _as_inf(self.prec),
            bound,
        )
        out = {}
        for j1, e1 in self.c.items():
            if j1 + other.lower_val() >= prec:
                break
            for j2, e2 in other.c.items():
                j = j1 + j2
                if j >= prec:
                    break
                p = e1 * e2
                out[j] = out[j] + p if j in out else p
        return FElem(self.cfg, out, _from_inf(prec))

    def scale_e(self, e):
        return self * FElem.from_e(e)

    def shift2(self, k):
        prec = None if self.prec is None else self.prec + k
        return FElem(self.cfg, {j + k: e for j, e in self.c.items()}, prec)

    def shift1(self, k):
        return FElem(self.cfg, {j: e.shift(k) for j, e in self.c.items()}, self.prec)

    def inverse(self):
        v = self.valuation2()
        a0inv = self.c[v].inverse()
        if len(self.c) == 1 and self.prec is None:
            return FElem(self.cfg, {-v: a0inv})
        rp = self.cfg.t2_prec
        if self.prec is not None:
            rp = min(rp, self.prec - v)
        if rp <= 0:
            raise PrecisionExhausted("no t2-digits left to invert")
        b = [None] + [self.coeff(v + j) * a0inv for j in range(1, rp)]
        d = [EElem.one(self.cfg)]
        for k in range(1, rp):
            acc = EElem.zero(self.cfg)
            for j in range(1, k + 1):
                if b[j].c or b[j].prec is not None:
                    acc = acc + b[j] * d[k - j]
            d.append(-acc)
        series = FElem(self.cfg, {k: x for k, x in enumerate(d)}, rp)
        return series.scale_e(a0inv).shift2(-v)

    def __truediv__(self, other):
        other = self._lift(other)
        return self * other.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = FElem.one(self.cfg)
        for _ in range(n):
            out = out * self
        return out

    # structure ------------------------------------------------------------------
    def unit_decompose(self):
        """Return ``(v2, v1, u)`` with ``self = t2**v2 t1**v1 u`` and ``u`` a unit of O."""
        v2 = self.valuation2()
        v1 = self.c[v2].valuation()
        return v2, v1, self.shift2(-v2).shift1(-v1)

    def abs(self):
        v2, v1, _ = self.unit_decompose()
        return Monomial(x_exp=v2, q_exp=v1)

    def residue(self):
        """The t2^0 coefficient of an element of calO."""
        for j, e in self.c.items():
            if j >= 0:
                break
            if e.is_nonzero():
                raise NotIntegral(f"{self} has negative t2-valuation")
            raise PrecisionExhausted(f"t2^{j}-coefficient is an unresolved zero")
        return self.coeff(0)

    def truncate_radius(self, g, m):
        """Canonical representative modulo ``t2**g t1**m O``."""
        out = {j: e for j, e in self.c.items() if j < g}
        out[g] = self.coeff(g).truncate(m)
        return FElem(self.cfg, out)

    def truncate2(self, g):
        """Representative modulo ``t2**g calO``."""
        if self.prec is not None and self.prec < g:
            raise PrecisionExhausted(f"need t2-precision {g}, have {self.prec}")
        return FElem(self.cfg, {j: e for j, e in self.c.items() if j < g})

    def __eq__(self, other):
        if isinstance(other, int):
            other = FElem.const(self.cfg, self.cfg.gf.from_int(other))
        if not isinstance(other, FElem):
            return NotImplemented
        return self.cfg.q == other.cfg.q and self.c == other.c and self.prec == other.prec

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.cfg.q, tuple(self.c.items()), self.prec))
        return self._hash

    def __repr__(self):
        return f"FElem({self})"

    def __str__(self):
        return format_felem(self)


def format_felem(a):
    parts = [f"t2^{j}*({format_eelem(e)})" for j, e in a.c.items()]
    if a.prec is not None:
        parts.append(f"O(t2^{a.prec})")
    return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# parsing

class _Parser:
    def __init__(self, cfg, text):
        self.cfg = cfg
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise ParseError(msg, self.pos, self.text)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def eat(self, s):
        self.skip()
        if self.text.startswith(s, self.pos):
            self.pos += len(s)
            return True
        return False

    def expect(self, s):
        if not self.eat(s):
            self.error(f"expected {s!r}")

    def integer(self, signed=False):
        self.skip()
        start = self.pos
        if signed and self.peek() == "-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start or self.text[start:self.pos] == "-":
            self.pos = start
            self.error("expected integer")
        return int(self.text[start:self.pos])

    def parse(self):
        val = self.expr()
        self.skip()
        if self.pos != len(self.text):
            self.error("trailing input")
        return val

    def expr(self):
        neg = self.eat("-")
        val = self.term()
        if neg:
            val = -val
        while True:
            if self.eat("+"):
                val = val + self.term()
            elif self.eat("-"):
                val = val - self.term()
            else:
                return val

    def term(self):
        val = self.factor()
        while self.eat("*"):
            val = val * self.factor()
        return val

    def exponent(self):
        if self.eat("^"):
            return self.integer(signed=True)
        return 1

    def factor(self):
        cfg = self.cfg
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            val = self.expr()
            self.expect(")")
            return val
        if ch == "{":
            self.pos += 1
            n = self.integer()
            self.expect("}")
            if not 0 <= n < cfg.q:
                self.error(f"field element code {n} out of range")
            return FElem.const(cfg, n)
        if ch.isdigit():
            return FElem.const(cfg, cfg.gf.from_int(self.integer()))
        if self.eat("t1"):
            return FElem.monomial(cfg, 0, self.exponent())
        if self.eat("t2"):
            return FElem.monomial(cfg, self.exponent(), 0)
        if self.eat("O("):
            if self.eat("t1"):
                k = self.exponent()
                self.expect(")")
                return FElem(cfg, {0: EElem(cfg, {}, k)})
            if self.eat("t2"):
                k = self.exponent()
                self.expect(")")
                return FElem(cfg, {}, k)
            self.error("expected t1 or t2 inside O(...)")
        self.error("unexpected token")


def parse_felem(cfg, text):
    return _Parser(cfg, text).parse()


def random_eelem(cfg, rng, lo, hi, density=0.5):
    gf = cfg.gf
    return EElem(cfg, {k: rng.randrange(1, gf.q) for k in range(lo, hi) if rng.random() < density})


def random_felem(cfg, rng, v2lo=0, v2hi=2, v1lo=0, v1hi=3, density=0.5, nonzero=False):
    while True:
        out = {}
        for j in range(v2lo, v2hi):
            if rng.random() < density:
                e = random_eelem(cfg, rng, v1lo, v1hi, density)
                if e.c:
                    out[j] = e
        a = FElem(cfg, out)
        if a.c or not nonzero:
            return a


def fe_mul(a, b):
    return a * b


def fe_inv(a):
    return a.inverse()


def fe_unit_decompose(a):
    return a.unit_decompose()


def fe_abs(a):
    return a.abs()


def fe_residue(a):
    return a.residue()
