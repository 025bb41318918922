"""Congruence groups, their cosets in GL_n(F), and coset intersection.

A radius matrix ``R`` (entries are lexicographic pairs ``(g, m)``) defines

    K(R) = { I + N : N_ij in t2^g_ij t1^m_ij O }.

``m`` may be ``None`` meaning "no t1 condition" (the ball ``t2^g calO``).
``UNIT`` stands for GL_n(O).  Left cosets ``P K`` are called atoms; every
basic function on GL_n(F) is a finite combination of atom indicators.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DimensionMismatch, LevelMismatch, NotAdmissible, PrecisionExhausted
from .field import EElem, FElem, random_eelem
from .laurent import LaurentX
from .linalg import MatF, adjugate, gl_order, mat_det, mat_inv
from .sets import EMPTY

NO_T1 = None
MAX_INTERSECT_STEPS = 64


def _key(r):
    """Sort key for a radius; ``None`` in the t1 slot is minus infinity."""
    g, m = r
    return (g, float("-inf") if m is None else m)


def radius_lt(a, b):
    return _key(a) < _key(b)


def radius_max(a, b):
    return b if radius_lt(a, b) else a


def radius_min(a, b):
    return a if radius_lt(a, b) else b


def radius_add(a, b):
    m = None if a[1] is None or b[1] is None else a[1] + b[1]
    return (a[0] + b[0], m)


def in_ball(x, r):
    g, m = r
    if m is None:
        return x.in_t2_ideal(g)
    return x.in_radius(g, m)


def random_in_ball(cfg, rng, r, depth=1, spread=2):
    """A random element of ``t2^g t1^m O`` (or ``t2^g calO``)."""
    g, m = r
    low = -spread if m is None else m
    coeffs = {g: random_eelem(cfg, rng, low, low + spread + 1)}
    for j in range(1, depth + 1):
        coeffs[g + j] = random_eelem(cfg, rng, -spread, spread)
    return FElem(cfg, coeffs)


@dataclass(frozen=True)
class CongruenceGroup:
    """K(R) for a radius matrix, or GL_n(O) when ``radii`` is None."""

    n: int
    radii: tuple = None

    def __post_init__(self):
        if self.radii is None:
            return
        R = tuple(tuple((int(g), None if m is None else int(m)) for g, m in row) for row in self.radii)
        if len(R) != self.n or any(len(row) != self.n for row in R):
            raise DimensionMismatch("radius matrix has the wrong shape")
        object.__setattr__(self, "radii", R)
        for row in R:
            for r in row:
                if radius_lt(r, (0, 1)):
                    raise NotAdmissible(f"radius {r} does not lie in the maximal ideal")
        n = self.n
        for i in range(n):
            for k in range(n):
                for j in range(n):
                    if radius_lt(radius_add(R[i][k], R[k][j]), R[i][j]):
                        raise NotAdmissible(f"K(R) is not closed: R[{i}][{k}] + R[{k}][{j}] < R[{i}][{j}]")

    # constructors ---------------------------------------------------------------
    @classmethod
    def unit(cls, n):
        return cls(n, None)

    @classmethod
    def uniform(cls, n, g, m):
        return cls(n, tuple(tuple((g, m) for _ in range(n)) for _ in range(n)))

    @classmethod
    def from_gamma(cls, gamma, m):
        n = len(gamma)
        return cls(n, tuple(tuple((gamma[i][j], m) for j in range(n)) for i in range(n)))

    # structure ---------------------------------------------------------------------
    @property
    def is_unit(self):
        return self.radii is None

    @property
    def is_uniform(self):
        if self.radii is None:
            return True
        first = self.radii[0][0]
        return all(r == first for row in self.radii for r in row)

    @property
    def is_finite_volume(self):
        return self.radii is None or all(m is not None for row in self.radii for _, m in row)

    def contains(self, x):
        if self.radii is None:
            from .linalg import in_gl_O
            return in_gl_O(x)
        n = self.n
        for i in range(n):
            for j in range(n):
                e = x[i, j] - 1 if i == j else x[i, j]
                if not in_ball(e, self.radii[i][j]):
                    return False
        return True

    def issubset(self, other):
        if other.radii is None:
            return True
        if self.radii is None:
            return False
        return all(
            not radius_lt(a, b) for ra, rb in zip(self.radii, other.radii) for a, b in zip(ra, rb)
        )

    def meet(self, other):
        """The intersection, again a congruence group."""
        if self.n != other.n:
            raise DimensionMismatch("groups of different size")
        if self.radii is None:
            return other
        if other.radii is None:
            return self
        return CongruenceGroup(self.n, tuple(
            tuple(radius_max(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(self.radii, other.radii)
        ))

    def join_radii(self, other):
        """Entrywise minimum radius; used for the coset-compatibility test."""
        if self.radii is None or other.radii is None:
            return None
        return tuple(tuple(radius_min(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(self.radii, other.radii))

    def volume(self, q):
        """Additive Haar volume of K as a subset of M_n(F) (= GL_n-volume)."""
        n = self.n
        if self.radii is None:
            return LaurentX.const(Fraction(gl_order(n, q, 1), q ** (n * n)))
        if not self.is_finite_volume:
            raise ValueError("group has infinite volume")
        out = LaurentX.one()
        for row in self.radii:
            for g, m in row:
                out = out * LaurentX.monomial(g, Fraction(q) ** -m)
        return out

    def index_in(self, bigger, q):
        """``[bigger : self]`` when finite and computable by refinement, else None."""
        if not self.issubset(bigger) or not self.is_uniform or self.radii is None:
            return 1 if self == bigger else None
        g, m = self.radii[0][0]
        n2 = self.n * self.n
        if bigger.radii is None:
            if g != 0:
                return None
            return gl_order(self.n, q, 1) * q ** ((m - 1) * n2)
        if not bigger.is_uniform:
            return None
        gb, mb = bigger.radii[0][0]
        if gb != g or mb is None:
            return None
        return q ** ((m - mb) * n2)

    def coset_reps_in(self, bigger, cfg):
        """Representatives ``r`` with ``bigger = disjoint union of r K``."""
        from itertools import product
        from .linalg import congruence_enumerate, resmat_to_matf
        n = self.n
        if self.index_in(bigger, cfg.q) is None:
            raise ValueError("index is infinite or not computable")
        if self == bigger:
            return [MatF.identity(cfg, n)]
        g, m = self.radii[0][0]
        if bigger.radii is None:
            return [resmat_to_matf(cfg, n, rm) for rm in congruence_enumerate(cfg, n, m)]
        _, mb = bigger.radii[0][0]
        reps = []
        ident = MatF.identity(cfg, n)
        for digits in product(product(range(cfg.q), repeat=m - mb), repeat=n * n):
            entries = [FElem.from_e(EElem.from_digits(cfg, d, mb)).shift2(g) for d in digits]
            reps.append(ident + MatF.unflatten(cfg, n, entries))
        return reps

    def describe(self):
        if self.radii is None:
            return "GL_n(O)"
        if self.is_uniform:
            g, m = self.radii[0][0]
            return f"K({g},{'*' if m is None else m})"
        return "K(" + ";".join(",".join(f"{g}:{'*' if m is None else m}" for g, m in row) for row in self.radii) + ")"


# ---------------------------------------------------------------------------
# frames: everything about a base point that membership tests need


class Frame:
    """Cached data of an invertible base matrix ``P``.

    Membership ``x in P K(R)`` is decided without inverting ``P``:
    ``(adj(P) x - det(P) I)_ij`` must lie in ``t2^(g+v2) t1^(m+v1) O``
    where ``det P = t2^v2 t1^v1 u``.
    """

    def __init__(self, P):
        self.P = P
        self.n = P.n
        self.cfg = P.cfg
        self.adj = adjugate(P)
        self.det = mat_det(P)
        self.v2, self.v1, self.u = self.det.unit_decompose()
        self._ubar_inv = None

    @property
    def ubar_inv(self):
        if self._ubar_inv is None:
            self._ubar_inv = self.u.coeff(0).inverse()
        return self._ubar_inv

    def product(self, x, bound):
        """``adj(P) x`` modulo ``t2**bound`` entrywise."""
        n, cfg = self.n, self.cfg
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = FElem.zero(cfg)
                for k in range(n):
                    a, b = self.adj[i, k], x[k, j]
                    if a.is_zero() or b.is_zero():
                        continue
                    acc = acc + a.mul_upto(b, bound)
                row.append(acc if acc.prec is not None else FElem(cfg, acc.c, bound))
            rows.append(row)
        return MatF(cfg, rows)

    def offset(self, x, bound):
        Y = self.product(x, bound)
        d = self.det
        return MatF(self.cfg, [
            [Y[i, j] - d if i == j else Y[i, j] for j in range(self.n)] for i in range(self.n)
        ])

    def _bound(self, gamma_max):
        return gamma_max + self.v2 + 1

    def in_coset(self, x, group):
        if group.radii is None:
            Y = self.product(x, self._bound(0))
            shift = (self.v2, self.v1)
            if not all(in_ball(Y[i, j], shift) for i in range(self.n) for j in range(self.n)):
                return False
            v2, v1, _ = mat_det(x).unit_decompose()
            return (v2, v1) == (self.v2, self.v1)
        Y = self.offset(x, self._bound(max(g for row in group.radii for g, _ in row)))
        shift = (self.v2, self.v1)
        return all(
            in_ball(Y[i, j], radius_add(group.radii[i][j], shift))
            for i in range(self.n) for j in range(self.n)
        )

    def _scaled_residue(self, y, g):
        """Residue of ``y / (det P) * t2^-g`` as an element of E."""
        z = y.shift2(-(g + self.v2)).shift1(-self.v1)
        return z.residue() * self.ubar_inv

    def residue_elems(self, x, gamma):
        """Residues of ``(P^-1 x - I) t2^-gamma`` entrywise (row-major)."""
        Y = self.offset(x, self._bound(max(max(r) for r in gamma)))
        return [self._scaled_residue(Y[i, j], gamma[i][j]) for i in range(self.n) for j in range(self.n)]

    def unit_residue_elems(self, x):
        """Residues of ``P^-1 x`` for ``x`` in ``P GL_n(O)`` (row-major)."""
        Y = self.product(x, self._bound(0))
        return [self._scaled_residue(Y[i, j], 0) for i in range(self.n) for j in range(self.n)]


@lru_cache(maxsize=None)
def gl_fq_matrices(cfg, n):
    """GL_n(F_q) as constant matrices over F."""
    from .linalg import congruence_enumerate, resmat_to_matf
    return tuple(resmat_to_matf(cfg, n, rm) for rm in congruence_enumerate(cfg, n, 1))


@lru_cache(maxsize=8192)
def frame_of(P):
    return Frame(P)


def lift_residue(cfg, n, key, lo):
    """Matrix over F (constant in t2) lifting a row-major residue class."""
    entries = [FElem.from_e(EElem.from_digits(cfg, d, lo)) for d in key]
    return MatF.unflatten(cfg, n, entries)


# ---------------------------------------------------------------------------
# atoms


@dataclass(frozen=True)
class Atom:
    """The left coset ``base * group``."""

    base: MatF
    group: CongruenceGroup

    def contains(self, x):
        return frame_of(self.base).in_coset(x, self.group)

    def same_as(self, other):
        return self.group == other.group and self.contains(other.base)

    def volume(self, q):
        return self.group.volume(q)

    def random_point(self, rng, depth=1):
        cfg = self.base.cfg
        n = self.group.n
        if self.group.radii is None:
            fq = gl_fq_matrices(cfg, n)
            k = fq[rng.randrange(len(fq))]
            N = MatF(cfg, [[random_in_ball(cfg, rng, (0, 1), depth) for _ in range(n)] for _ in range(n)])
            return self.base * (k + k * N)
        N = MatF(cfg, [
            [random_in_ball(cfg, rng, self.group.radii[i][j], depth) for j in range(n)] for i in range(n)
        ])
        return self.base * (MatF.identity(cfg, n) + N)

    def translate(self, h):
        return Atom(h * self.base, self.group)

    def __str__(self):
        return f"{self.base.to_literal()}*{self.group.describe()}"


def atom_intersect(a, b):
    """``a ∩ b`` as an atom, or EMPTY."""
    if a.group.n != b.group.n:
        raise DimensionMismatch("atoms of different size")
    if a.group.radii is None or b.group.radii is None:
        big, small = (a, b) if a.group.radii is None else (b, a)
        if small.group.radii is None:
            return small if big.contains(small.base) else EMPTY
        return small if big.contains(small.base) else EMPTY
    both = a.group.meet(b.group)
    if a.contains(b.base):
        return Atom(b.base, both)
    if b.contains(a.base):
        return Atom(a.base, both)
    low = CongruenceGroup(a.group.n, a.group.join_radii(b.group))
    D = mat_inv(a.base) * b.base
    if not low.contains(D):
        return EMPTY
    cfg, n = D.cfg, D.n
    mask = [[radius_lt(a.group.radii[i][j], b.group.radii[i][j]) for j in range(n)] for i in range(n)]
    k1 = MatF.identity(cfg, n)
    E = D
    for _ in range(MAX_INTERSECT_STEPS):
        if b.group.contains(E):
            return Atom(a.base * k1, both)
        zero = FElem.zero(cfg)
        c = MatF(cfg, [
            [(E[i, j] if mask[i][j] else (FElem.one(cfg) if i == j else zero)) for j in range(n)]
            for i in range(n)
        ])
        k1 = k1 * c
        E = mat_inv(c) * E
    raise PrecisionExhausted("coset intersection did not stabilize")


# ---------------------------------------------------------------------------
# congruence cosets with residue data


def _check_gamma(gamma):
    n = len(gamma)
    g = tuple(tuple(int(x) for x in row) for row in gamma)
    if any(len(row) != n for row in g):
        raise DimensionMismatch("Gamma must be square")
    if any(x < 1 for row in g for x in row):
        raise NotAdmissible("Gamma must be entrywise >= 1")
    return g


@dataclass(frozen=True)
class GLCongCoset:
    """``A (I + t2^Gamma p^-1(V))``.

    ``V`` is a set of residue classes of M_n(E) in the window
    ``t1^lo .. t1^level`` (row-major digit tuples), or every residue when
    ``level`` is None.
    """

    A: MatF
    gamma: tuple
    level: int = None
    lo: int = 0
    classes: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "gamma", _check_gamma(self.gamma))
        object.__setattr__(self, "classes", frozenset(tuple(tuple(d) for d in k) for k in self.classes))
        if self.level is not None:
            CongruenceGroup.from_gamma(self.gamma, self.level)
            for key in self.classes:
                if len(key) != self.A.n ** 2 or any(len(d) != self.level - self.lo for d in key):
                    raise DimensionMismatch(f"class {key} does not fit the window")

    @property
    def n(self):
        return self.A.n

    @property
    def is_full(self):
        return self.level is None

    def frame_group(self):
        return CongruenceGroup.from_gamma(self.gamma, None)

    def group(self):
        if self.level is None:
            return self.frame_group()
        return CongruenceGroup.from_gamma(self.gamma, self.level)

    def residue_key(self, x):
        """Residue class of ``x`` (assumed in the frame), or None off-window."""
        elems = frame_of(self.A).residue_elems(x, self.gamma)
        if not all(e.in_ideal(self.lo) for e in elems):
            return None
        return tuple(e.digits(self.lo, self.level) for e in elems)

    def contains(self, x):
        if not frame_of(self.A).in_coset(x, self.frame_group()):
            return False
        if self.level is None:
            return True
        return self.residue_key(x) in self.classes

    def atoms(self):
        if self.level is None:
            return [Atom(self.A, self.frame_group())]
        cfg, n = self.A.cfg, self.n
        K = self.group()
        ident = MatF.identity(cfg, n)
        return [
            Atom(self.A * (ident + lift_residue(cfg, n, key, self.lo).hadamard_t2(self.gamma)), K)
            for key in sorted(self.classes)
        ]

    def random_point(self, rng):
        atoms = self.atoms()
        return atoms[rng.randrange(len(atoms))].random_point(rng)

    def __str__(self):
        lvl = "full" if self.level is None else f"{len(self.classes)} classes@{self.lo}..{self.level}"
        return f"coset({self.A.to_literal()}; {[list(r) for r in self.gamma]}; {lvl})"


def rebase(D, theta, atoms, level, lo_hint=0):
    """Express atoms of K(theta, level) inside ``D K(theta, *)`` as residue data.

    Returns ``(lo, {key: atom})``."""
    fr = frame_of(D)
    elems = [(fr.residue_elems(a.base, theta), a) for a in atoms]
    lo = min(lo_hint, level)
    for es, _ in elems:
        for e in es:
            if e.c:
                lo = min(lo, e.valuation())
    return lo, {tuple(e.digits(lo, level) for e in es): a for es, a in elems}


def glcoset_intersect(C1, C2):
    """Intersection of two congruence cosets: EMPTY or a GLCongCoset."""
    if C1.n != C2.n:
        raise DimensionMismatch("cosets of different size")
    if C1.level is not None and C2.level is not None and C1.level != C2.level:
        raise LevelMismatch(f"levels {C1.level} and {C2.level}")
    frame = atom_intersect(Atom(C1.A, C1.frame_group()), Atom(C2.A, C2.frame_group()))
    if not frame:
        return EMPTY
    theta = tuple(tuple(max(a, b) for a, b in zip(r1, r2)) for r1, r2 in zip(C1.gamma, C2.gamma))
    D = frame.base
    if C1.level is None and C2.level is None:
        return GLCongCoset(D, theta)
    level = C1.level if C1.level is not None else C2.level
    found = []
    for a in C1.atoms():
        for b in C2.atoms():
            c = atom_intersect(a, b)
            if c:
                found.append(c)
    if not found:
        return EMPTY
    target = CongruenceGroup.from_gamma(theta, level)
    if any(c.group != target for c in found):
        raise LevelMismatch("a full-residue coset meets a level coset in a non-congruence set")
    lo, table = rebase(D, theta, found, level, min(C1.lo, C2.lo))
    return GLCongCoset(D, theta, level, lo, frozenset(table))
