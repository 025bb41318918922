"""Matrices over F and over the finite rings O_E / t1^m.

``MatF`` stores entries row-major; the identification of M_n(F) with
F^(n*n) used everywhere else is exactly this row-major flattening.
"""

from dataclasses import dataclass
from itertools import permutations, product

from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    PrecisionExhausted,
    SingularAtPrecision,
)
from .field import EElem, FElem

DEFAULT_BUDGET = 200_000


def _perm_sign(p):
    sign, seen = 1, [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


class MatF:
    """Square matrix over F."""

    __slots__ = ("cfg", "n", "rows", "_hash")

    def __init__(self, cfg, rows):
        self.cfg = cfg
        self.rows = tuple(tuple(r) for r in rows)
        self.n = len(self.rows)
        if any(len(r) != self.n for r in self.rows):
            raise DimensionMismatch("matrix must be square")
        self._hash = None

    @classmethod
    def identity(cls, cfg, n):
        one, zero = FElem.one(cfg), FElem.zero(cfg)
        return cls(cfg, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, cfg, n):
        z = FElem.zero(cfg)
        return cls(cfg, [[z] * n for _ in range(n)])

    @classmethod
    def diag(cls, cfg, entries):
        n = len(entries)
        z = FElem.zero(cfg)
        return cls(cfg, [[entries[i] if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def scalar(cls, cfg, n, a):
        return cls.diag(cfg, [a] * n)

    @classmethod
    def parse(cls, cfg, literal):
        """Nested list of field-element strings."""
        return cls(cfg, [[cfg.parse(x) if isinstance(x, str) else x for x in row] for row in literal])

    def to_literal(self):
        return [[str(x) for x in row] for row in self.rows]

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def flatten(self):
        return [x for row in self.rows for x in row]

    @classmethod
    def unflatten(cls, cfg, n, entries):
        return cls(cfg, [entries[i * n:(i + 1) * n] for i in range(n)])

    def _check(self, other):
        if self.n != other.n:
            raise DimensionMismatch(f"{self.n}x{self.n} vs {other.n}x{other.n}")

    def __add__(self, other):
        self._check(other)
        return MatF(self.cfg, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        self._check(other)
        return MatF(self.cfg, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return MatF(self.cfg, [[-a for a in r] for r in self.rows])

    def __mul__(self, other):
        if isinstance(other, FElem):
            return MatF(self.cfg, [[a * other for a in r] for r in self.rows])
        self._check(other)
        n = self.n
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = FElem.zero(self.cfg)
                for k in range(n):
                    a, b = self.rows[i][k], other.rows[k][j]
                    if a.is_zero() or b.is_zero():
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return MatF(self.cfg, out)

    def transpose(self):
        return MatF(self.cfg, list(zip(*self.rows)))

    def map(self, fn):
        return MatF(self.cfg, [[fn(x) for x in r] for r in self.rows])

    def hadamard_t2(self, gamma):
        """Entrywise multiplication by ``t2**gamma[i][j]``."""
        return MatF(self.cfg, [
            [x.shift2(gamma[i][j]) for j, x in enumerate(r)] for i, r in enumerate(self.rows)
        ])

    def det(self):
        return mat_det(self)

    def inverse(self):
        return mat_inv(self)

    def is_identity(self):
        return all(
            (x - (1 if i == j else 0)).is_zero() for i, r in enumerate(self.rows) for j, x in enumerate(r)
        )

    def approx_equal(self, other):
        d = self - other
        return all(x.is_approx_zero() for r in d.rows for x in r)

    def __eq__(self, other):
        if not isinstance(other, MatF):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self):
        return f"MatF({self.to_literal()})"


def mat_det(A):
    n = A.n
    if n <= 4:
        total = FElem.zero(A.cfg)
        for p in permutations(range(n)):
            term = FElem.one(A.cfg)
            for i in range(n):
                term = term * A.rows[i][p[i]]
                if term.is_zero():
                    break
            if term.is_zero():
                continue
            total = total + term if _perm_sign(p) > 0 else total - term
        return total
    M = [list(r) for r in A.rows]
    det = FElem.one(A.cfg)
    for k in range(n):
        piv = _choose_pivot(M, k, range(k, n), [k])
        if piv is None:
            raise SingularAtPrecision("no certified pivot")
        i, _ = piv
        if i != k:
            M[k], M[i] = M[i], M[k]
            det = -det
        det = det * M[k][k]
        inv = M[k][k].inverse()
        for r in range(k + 1, n):
            f = M[r][k] * inv
            M[r] = [M[r][c] - f * M[k][c] for c in range(n)]
    return det


def _minor(A, i, j):
    rows = [r[:j] + r[j + 1:] for k, r in enumerate(A.rows) if k != i]
    return MatF(A.cfg, rows)


def adjugate(A):
    """Classical adjoint; division free, so exact on exact input."""
    n = A.n
    if n == 1:
        return MatF.identity(A.cfg, 1)
    cof = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            d = mat_det(_minor(A, i, j))
            cof[j][i] = d if (i + j) % 2 == 0 else -d
    return MatF(A.cfg, cof)


def _pivot_key(x):
    """Minimal t2-valuation first; among those prefer short exact entries,
    whose inverses stay exact, then minimal t1-valuation."""
    v2, v1, _ = x.unit_decompose()
    size = sum(len(e.c) for e in x.c.values()) if x.is_exact() else float("inf")
    return (v2, size, v1)


def _choose_pivot(M, k, rows, cols):
    best = None
    for j in cols:
        for i in rows:
            x = M[i][j]
            if x.is_approx_zero():
                continue
            try:
                key = (_pivot_key(x), i, j)
            except PrecisionExhausted:
                continue
            if best is None or key < best:
                best = key
    return None if best is None else best[1:]


def neumann_inverse(A, terms=None):
    """Inverse of ``I + N`` with ``N`` in t2 M_n(calO) by truncated Neumann series."""
    cfg, n = A.cfg, A.n
    terms = terms or cfg.t2_prec
    N = A - MatF.identity(cfg, n)
    out = MatF.identity(cfg, n)
    power = MatF.identity(cfg, n)
    for _ in range(1, terms):
        power = -(power * N)
        out = out + power
    tail = FElem(cfg, {}, terms)
    return out.map(lambda x: x + tail)


def _near_identity(A):
    try:
        return all(
            (x - (1 if i == j else 0)).in_t2_ideal(1)
            for i, r in enumerate(A.rows) for j, x in enumerate(r)
        )
    except PrecisionExhausted:
        return False


def mat_inv(A):
    cfg, n = A.cfg, A.n
    if all(x.is_zero() for i, r in enumerate(A.rows) for j, x in enumerate(r) if i != j):
        try:
            return MatF.diag(cfg, [A.rows[i][i].inverse() for i in range(n)])
        except (PrecisionExhausted, ZeroDivisionError) as exc:
            raise SingularAtPrecision(str(exc)) from exc
    if _near_identity(A):
        return neumann_inverse(A)
    if n <= 4:
        d = mat_det(A)
        if d.is_approx_zero():
            raise SingularAtPrecision("determinant vanishes at working precision")
        try:
            dinv = d.inverse()
        except (PrecisionExhausted, ZeroDivisionError) as exc:
            raise SingularAtPrecision(str(exc)) from exc
        return adjugate(A) * dinv
    M = [list(r) for r in A.rows]
    inv = [list(r) for r in MatF.identity(cfg, n).rows]
    for k in range(n):
        piv = _choose_pivot(M, k, range(k, n), [k])
        if piv is None:
            raise SingularAtPrecision(f"column {k} has no certified pivot")
        i, _ = piv
        M[k], M[i] = M[i], M[k]
        inv[k], inv[i] = inv[i], inv[k]
        p = M[k][k].inverse()
        M[k] = [x * p for x in M[k]]
        inv[k] = [x * p for x in inv[k]]
        for r in range(n):
            if r == k or M[r][k].is_zero():
                continue
            f = M[r][k]
            M[r] = [a - f * b for a, b in zip(M[r], M[k])]
            inv[r] = [a - f * b for a, b in zip(inv[r], inv[k])]
    return MatF(cfg, inv)


def in_gl_calO(A):
    """Membership in GL_n(calO): integral entries and unit determinant."""
    if not all(x.in_calO() for r in A.rows for x in r):
        return False
    d = A.det()
    return d.valuation2() == 0


def in_gl_O(A):
    """Membership in GL_n(O): entries in O and determinant a unit of O."""
    if not all(x.in_O() for r in A.rows for x in r):
        return False
    return A.det().is_O_unit()


def smith_form(A):
    """Return ``(U, D, V)`` with ``A = U D V``, ``U, V`` in GL_n(calO) and
    ``D = diag(t2^m1, ..., t2^mn)`` with ``m1 <= ... <= mn``.

    Elimination is fraction free: with pivot ``p = t2^v u`` a row becomes
    ``u * row - (entry / t2^v) * pivot_row``, so exact input stays exact and
    the exponents are decided without truncation.  Only ``U`` and ``V``
    carry the truncated inverse of ``u``."""
    cfg, n = A.cfg, A.n
    M = [list(r) for r in A.rows]
    Linv = [list(r) for r in MatF.identity(cfg, n).rows]
    Rinv = [list(r) for r in MatF.identity(cfg, n).rows]
    zero = FElem.zero(cfg)
    for k in range(n):
        piv = _choose_pivot(M, k, range(k, n), range(k, n))
        if piv is None:
            raise SingularAtPrecision("matrix is singular at working precision")
        i, j = piv
        if i != k:
            M[k], M[i] = M[i], M[k]
            for r in Linv:
                r[k], r[i] = r[i], r[k]
        if j != k:
            for r in M:
                r[k], r[j] = r[j], r[k]
            Rinv[k], Rinv[j] = Rinv[j], Rinv[k]
        v = M[k][k].valuation2()
        u = M[k][k].shift2(-v)
        uinv = None
        for r in range(k + 1, n):
            if M[r][k].is_zero():
                continue
            c = M[r][k].shift2(-v)
            M[r] = [u * a - c * b for a, b in zip(M[r], M[k])]
            M[r][k] = zero
            uinv = uinv or u.inverse()
            for row in Linv:
                row[k] = row[k] + c * uinv * row[r]
                row[r] = uinv * row[r]
        for col in range(k + 1, n):
            if M[k][col].is_zero():
                continue
            c = M[k][col].shift2(-v)
            for row in M:
                row[col] = u * row[col] - c * row[k]
            M[k][col] = zero
            uinv = uinv or u.inverse()
            Rinv[k] = [a + c * uinv * b for a, b in zip(Rinv[k], Rinv[col])]
            Rinv[col] = [uinv * b for b in Rinv[col]]
    exps, units = [], []
    for k in range(n):
        v = M[k][k].valuation2()
        exps.append(v)
        units.append(M[k][k].shift2(-v))
    U = MatF(cfg, Linv) * MatF.diag(cfg, units)
    D = MatF.diag(cfg, [FElem.monomial(cfg, m, 0) for m in exps])
    return U, D, MatF(cfg, Rinv)


# ---------------------------------------------------------------------------
# finite level: matrices over O_E / t1^m, stored as tuples of n*n digit tuples

@dataclass(frozen=True)
class CongLevel:
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("congruence level must be >= 1")


def gl_order(n, q, m=1):
    order = q ** ((m - 1) * n * n)
    for k in range(n):
        order *= q**n - q**k
    return order


def _det_mod_p(gf, mat, n):
    M = [list(mat[i * n:(i + 1) * n]) for i in range(n)]
    det = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if M[i][k]), None)
        if piv is None:
            return 0
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
            det = gf.neg(det)
        det = gf.mul(det, M[k][k])
        inv = gf.inv(M[k][k])
        for r in range(k + 1, n):
            if M[r][k]:
                f = gf.mul(M[r][k], inv)
                M[r] = [gf.sub(a, gf.mul(f, b)) for a, b in zip(M[r], M[k])]
    return det


def residue_gl_fq(cfg, n):
    """All of GL_n(F_q) as tuples of n*n field elements."""
    gf = cfg.gf
    for entries in product(range(gf.q), repeat=n * n):
        if _det_mod_p(gf, entries, n):
            yield entries


def congruence_enumerate(cfg, n, level, budget=DEFAULT_BUDGET):
    """Stream canonical representatives of GL_n(O_E / t1^m)."""
    m = level.m if isinstance(level, CongLevel) else int(level)
    q = cfg.q
    if q ** (m * n * n) > budget:
        raise BudgetExceeded(f"q^(m n^2) = {q}^{m * n * n} exceeds budget {budget}")
    higher = list(product(range(q), repeat=(m - 1) * n * n)) if m > 1 else [()]
    for base in residue_gl_fq(cfg, n):
        for hi in higher:
            yield tuple(
                (base[e],) + tuple(hi[e * (m - 1):(e + 1) * (m - 1)]) for e in range(n * n)
            )


def resmat_to_matf(cfg, n, rm, lo=0):
    """Lift a residue matrix (digit tuples starting at t1^lo) to an exact MatF."""
    return MatF.unflatten(cfg, n, [FElem.from_e(EElem.from_digits(cfg, d, lo)) for d in rm])


def resmat_mul(cfg, n, a, b, m):
    ea = [EElem.from_digits(cfg, d) for d in a]
    eb = [EElem.from_digits(cfg, d) for d in b]
    out = []
    for i in range(n):
        for j in range(n):
            acc = EElem.zero(cfg)
            for k in range(n):
                acc = acc + ea[i * n + k] * eb[k * n + j]
            out.append(acc.digits(0, m))
    return tuple(out)


def resmat_identity(n, m):
    return tuple((1 if i == j else 0,) + (0,) * (m - 1) for i in range(n) for j in range(n))


def resmat_inv(cfg, n, a, m):
    """Inverse in GL_n(O_E / t1^m) by Hensel lifting the residue inverse."""
    gf = cfg.gf
    base = tuple(d[0] for d in a)
    if not _det_mod_p(gf, base, n):
        raise SingularAtPrecision("residue matrix not invertible")
    M = [[base[i * n + j] for j in range(n)] + [1 if i == j else 0 for j in range(n)] for i in range(n)]
    for k in range(n):
        piv = next(i for i in range(k, n) if M[i][k])
        M[k], M[piv] = M[piv], M[k]
        inv = gf.inv(M[k][k])
        M[k] = [gf.mul(x, inv) for x in M[k]]
        for r in range(n):
            if r != k and M[r][k]:
                f = M[r][k]
                M[r] = [gf.sub(x, gf.mul(f, y)) for x, y in zip(M[r], M[k])]
    x = tuple((M[i][n + j],) + (0,) * (m - 1) for i in range(n) for j in range(n))
    ident = resmat_identity(n, m)
    # Newton iteration x <- x (2 - a x) doubles t1-adic accuracy
    for _ in range(max(1, m.bit_length())):
        ax = resmat_mul(cfg, n, a, x, m)
        two = gf.from_int(2)
        two_minus = tuple(
            tuple(gf.sub(two if (k == 0 and i == j) else 0, ax[i * n + j][k]) for k in range(m))
            for i in range(n) for j in range(n)
        )
        x = resmat_mul(cfg, n, x, two_minus, m)
    if resmat_mul(cfg, n, a, x, m) != ident:
        raise SingularAtPrecision("Hensel lift failed")
    return x
