"""Exact values in C((X)): finite Laurent polynomials in ``X`` with rational
coefficients, monomial absolute values ``q^-b X^a`` and guarded sums."""

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import FloorViolation, ParseError


def _coerce(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"unsupported coefficient {c!r}")


class LaurentX:
    """Immutable finite Laurent polynomial ``sum c_k X^k``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for k, c in items:
                c = _coerce(c)
                if c:
                    clean[int(k)] = clean.get(int(k), 0) + c
        self._terms = {k: c for k, c in sorted(clean.items()) if c}
        self._hash = None

    @classmethod
    def const(cls, c):
        return cls({0: c})

    @classmethod
    def monomial(cls, exp, coeff=1):
        return cls({exp: coeff})

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({0: 1})

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, k):
        return self._terms.get(k, Fraction(0))

    def is_zero(self):
        return not self._terms

    def valuation(self):
        if not self._terms:
            raise ValueError("valuation of zero LaurentX")
        return min(self._terms)

    def _lift(self, other):
        if isinstance(other, LaurentX):
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentX.const(other)
        if isinstance(other, Monomial):
            raise TypeError("embed a Monomial with .to_laurent(q) first")
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return LaurentX(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentX({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return LaurentX({k: c * other for k, c in self._terms.items()})
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + c1 * c2
        return LaurentX(out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            if len(self._terms) != 1:
                raise ValueError("only monomials have Laurent inverses")
            (k, c), = self._terms.items()
            return LaurentX({k * n: c**n})
        out = LaurentX.one()
        for _ in range(n):
            out = out * self
        return out

    def shift(self, k):
        """Multiply by ``X**k``."""
        return LaurentX({e + k: c for e, c in self._terms.items()})

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return False
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        return f"LaurentX({render(self)!r})"

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Monomial:
    """The absolute value ``q**(-q_exp) * X**x_exp``."""

    x_exp: int = 0
    q_exp: int = 0

    def __mul__(self, other):
        return Monomial(self.x_exp + other.x_exp, self.q_exp + other.q_exp)

    def inverse(self):
        return Monomial(-self.x_exp, -self.q_exp)

    def __pow__(self, n):
        return Monomial(self.x_exp * n, self.q_exp * n)

    def to_laurent(self, q):
        return LaurentX({self.x_exp: Fraction(1, q) ** self.q_exp})


@dataclass(frozen=True)
class GuardedFamily:
    """A finite family of values whose X-exponents must stay above ``floor``."""

    values: tuple
    floor: int

    def __init__(self, values, floor):
        object.__setattr__(self, "values", tuple(values))
        object.__setattr__(self, "floor", floor)


def lx_add(a, b):
    return a + b


def lx_mul(a, b):
    return a * b


def lx_guarded_sum(fam):
    total = {}
    for i, v in enumerate(fam.values):
        if not isinstance(v, LaurentX):
            v = LaurentX.const(v)
        for k, c in v.items():
            if k < fam.floor:
                raise FloorViolation(
                    f"term {i} has X-exponent {k} below floor {fam.floor}"
                )
            total[k] = total.get(k, 0) + c
    return LaurentX(total)


def _render_coeff(c, with_x):
    if not with_x:
        return str(c)
    if c == 1:
        return ""
    if c == -1:
        return "-"
    if c.denominator == 1:
        return f"{c}*"
    return f"({c})*"


def _render_term(k, c):
    if k == 0:
        return _render_coeff(c, False)
    xs = "X" if k == 1 else f"X^{k}"
    return _render_coeff(c, True) + xs


def render(a):
    if a.is_zero():
        return "0"
    out = ""
    for k, c in a.items():
        if not out:
            out = _render_term(k, c)
        elif c < 0:
            out += " - " + _render_term(k, -c)
        else:
            out += " + " + _render_term(k, c)
    return out


lx_render = render

_TERM = re.compile(
    r"""^(?:
        (?P<const>-?\d+(?:/\d+)?)
      | (?P<coef>-?\d+|\(-?\d+/\d+\))?\*?(?P<neg>-)?X(?:\^(?P<exp>-?\d+))?
    )$""",
    re.VERBOSE,
)


def parse_laurent(text):
    """Inverse of :func:`render`."""
    text = text.strip()
    if text == "0":
        return LaurentX()
    pieces = re.split(r" ([+-]) ", text)
    chunks = [("+", pieces[0])] + list(zip(pieces[1::2], pieces[2::2]))
    terms = {}
    pos = 0
    for sign, chunk in chunks:
        m = _TERM.match(chunk.strip())
        if not m:
            raise ParseError(f"bad LaurentX term {chunk!r}", pos, text)
        if m.group("const") is not None:
            k, c = 0, Fraction(m.group("const"))
        else:
            raw = m.group("coef")
            if raw is None:
                c = Fraction(-1) if m.group("neg") else Fraction(1)
            else:
                c = Fraction(raw.strip("()"))
            k = int(m.group("exp") or 1)
        if sign == "-":
            c = -c
        terms[k] = terms.get(k, 0) + c
        pos += len(chunk) + 3
    return LaurentX(terms)
