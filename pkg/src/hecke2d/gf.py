"""Arithmetic in GF(q) through exp/log tables.

Elements are the integers ``0 .. q-1``; for ``q = p**k`` the integer's base-p
digits are the coefficients of a polynomial modulo a fixed primitive
polynomial of degree ``k``.
"""

from functools import lru_cache
from itertools import product

MAX_Q = 1 << 16
TABLE_Q = 256


def factor_prime_power(q):
    """Return ``(p, k)`` with ``q == p**k`` or raise ValueError."""
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    k, rest = 0, q
    while rest % p == 0:
        rest //= p
        k += 1
    if rest != 1:
        raise ValueError(f"q = {q} is not a prime power")
    return p, k


def _to_digits(x, p, k):
    out = []
    for _ in range(k):
        x, r = divmod(x, p)
        out.append(r)
    return out


def _from_digits(ds, p):
    x = 0
    for d in reversed(ds):
        x = x * p + d
    return x


def _times_x(digits, poly, p):
    # multiply by x modulo the monic polynomial with low coefficients `poly`
    k = len(digits)
    top = digits[-1]
    shifted = [0] + digits[:-1]
    return [(shifted[i] - top * poly[i]) % p for i in range(k)]


def _find_primitive_poly(p, k):
    q = p**k
    for low in product(range(p), repeat=k):
        poly = list(low)
        if poly[0] == 0:
            continue
        cur = [0] * k
        cur[0] = 1
        seen = 1
        x = _times_x(cur, poly, p)
        while x != cur and seen < q:
            x = _times_x(x, poly, p)
            seen += 1
        if seen == q - 1:
            return poly
    raise RuntimeError(f"no primitive polynomial of degree {k} over F_{p}")


class GF:
    """The finite field with ``q`` elements."""

    def __init__(self, q):
        if q > MAX_Q:
            raise ValueError(f"q = {q} exceeds table limit {MAX_Q}")
        self.q = q
        self.p, self.k = factor_prime_power(q)
        p, k = self.p, self.k
        self.exp = [0] * (2 * (q - 1))
        self.log = [0] * q
        if k == 1:
            g = next(g for g in range(1, p) if self._order_mod_p(g) == p - 1)
            x = 1
            for i in range(q - 1):
                self.exp[i] = x
                self.log[x] = i
                x = x * g % p
            self.poly = None
        else:
            self.poly = _find_primitive_poly(p, k)
            cur = [1] + [0] * (k - 1)
            for i in range(q - 1):
                x = _from_digits(cur, p)
                self.exp[i] = x
                self.log[x] = i
                cur = _times_x(cur, self.poly, p)
        for i in range(q - 1, 2 * (q - 1)):
            self.exp[i] = self.exp[i - (q - 1)]
        if k > 1:
            self._digits = [_to_digits(x, p, k) for x in range(q)]
        self.add_table = self.mul_table = None
        if q <= TABLE_Q:
            self.add_table = [[self.add(a, b) for b in range(q)] for a in range(q)]
            self.mul_table = [[self.mul(a, b) for b in range(q)] for a in range(q)]

    def _order_mod_p(self, g):
        x, n = g, 1
        while x != 1:
            x = x * g % self.p
            n += 1
        return n

    def __repr__(self):
        return f"GF({self.q})"

    def add(self, a, b):
        if self.k == 1:
            return (a + b) % self.p
        da, db = self._digits[a], self._digits[b]
        return _from_digits([(x + y) % self.p for x, y in zip(da, db)], self.p)

    def neg(self, a):
        if self.k == 1:
            return -a % self.p
        return _from_digits([-x % self.p for x in self._digits[a]], self.p)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self.exp[self.log[a] + self.log[b]]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in GF(q)")
        return self.exp[(self.q - 1 - self.log[a]) % (self.q - 1)]

    def from_int(self, n):
        """Image of the integer ``n`` in the prime subfield."""
        return n % self.p

    def elements(self):
        return range(self.q)

    def units(self):
        return range(1, self.q)


@lru_cache(maxsize=None)
def get_field(q):
    return GF(q)
