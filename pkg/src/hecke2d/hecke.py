"""Basic functions on GL_n(F), their products, and convolution.

Two shapes of basic function are supported:

* congruence type ``g^{A,Gamma}``: supported on ``A (I + t2^Gamma M_n(calO))``
  with value ``g(res((A^-1 x - I) t2^-Gamma))``; ``g`` is a table over
  residue classes of M_n(E) in the window ``t1^lo .. t1^level``.
* unit type ``g^{0,0}`` (optionally translated to base ``A``): supported on
  ``A GL_n(O)`` with value ``g(res(A^-1 x))``; ``g`` is a table over
  GL_n(O_E / t1^level).  Level 0 means the single class GL_n(O).

Every basic function is a finite combination of atom indicators (see
``cosets``), which is the normal form used by ``HeckeElem``.
"""

from fractions import Fraction

from .cosets import (
    Atom,
    CongruenceGroup,
    GLCongCoset,
    atom_intersect,
    frame_of,
    lift_residue,
    radius_lt,
    rebase,
)
from .errors import (
    DimensionMismatch,
    LevelMismatch,
    NotAdmissible,
    UnsupportedConvolution,
)
from .field import FElem
from .integration import integrate_GLn
from .laurent import LaurentX
from .linalg import MatF, _det_mod_p, in_gl_O, mat_det, mat_inv, resmat_inv, resmat_mul


def _lx(c):
    return c if isinstance(c, LaurentX) else LaurentX.const(Fraction(c))


class _Zero:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __bool__(self):
        return False

    def __repr__(self):
        return "Zero"


ZERO = _Zero()


def _window_ok(gamma, lo, level):
    """Atoms of a window starting below 0 still form cosets of K(Gamma, level)."""
    n = len(gamma)
    for i in range(n):
        for k in range(n):
            for j in range(n):
                a = (gamma[i][k] + gamma[k][j], lo + level)
                if radius_lt(a, (gamma[i][j], level)):
                    return False
    return True


class BasicFn:
    __slots__ = ("A", "gamma", "level", "lo", "values")

    def __init__(self, A, gamma, level, values, lo=0):
        self.A = A
        n = A.n
        self.level = int(level)
        if self.level < 0:
            raise ValueError("level must be >= 0")
        if gamma is None:
            self.gamma = None
            self.lo = 0
        else:
            g = tuple(tuple(int(x) for x in row) for row in gamma)
            if len(g) != n or any(len(r) != n for r in g):
                raise DimensionMismatch("Gamma must be n x n")
            if any(x < 1 for r in g for x in r):
                raise NotAdmissible("Gamma must be entrywise >= 1")
            CongruenceGroup.from_gamma(g, self.level)
            self.gamma = g
            self.lo = int(lo)
            if self.lo > self.level:
                raise ValueError("window start above level")
            if not _window_ok(g, self.lo, self.level):
                raise NotAdmissible("residue window too wide for this Gamma")
        width = self.level - self.lo
        clean = {}
        gf = A.cfg.gf
        for key, v in values.items():
            v = _lx(v)
            if v.is_zero():
                continue
            key = tuple(tuple(d) for d in key)
            if len(key) != n * n or any(len(d) != width for d in key):
                raise DimensionMismatch(f"class {key} does not fit the window")
            if gamma is None and self.level > 0 and not _det_mod_p(gf, [d[0] for d in key], n):
                raise ValueError(f"class {key} is not invertible")
            clean[key] = v
        self.values = dict(sorted(clean.items()))

    # constructors ---------------------------------------------------------------
    @classmethod
    def cong(cls, A, gamma, level, values, lo=0):
        return cls(A, gamma, level, values, lo)

    @classmethod
    def unit(cls, A, level, values):
        return cls(A, None, level, values)

    @classmethod
    def char_unit_group(cls, cfg, n, A=None, level=0):
        """Indicator of ``A GL_n(O)``."""
        A = MatF.identity(cfg, n) if A is None else A
        if level == 0:
            return cls(A, None, 0, {((),) * (n * n): 1})
        from .linalg import congruence_enumerate
        return cls(A, None, level, {k: 1 for k in congruence_enumerate(cfg, n, level)})

    @classmethod
    def char_coset(cls, C, value=1):
        """Indicator of a congruence coset with finite residue data."""
        if C.level is None:
            raise ValueError("a full-residue coset has infinite volume")
        return cls(C.A, C.gamma, C.level, {k: value for k in C.classes}, C.lo)

    # structure --------------------------------------------------------------------
    @property
    def cfg(self):
        return self.A.cfg

    @property
    def n(self):
        return self.A.n

    @property
    def kind(self):
        return "unit" if self.gamma is None else "cong"

    def unit_key(self):
        return ((),) * (self.n * self.n)

    def group(self):
        if self.gamma is not None:
            return CongruenceGroup.from_gamma(self.gamma, self.level)
        if self.level == 0:
            return CongruenceGroup.unit(self.n)
        return CongruenceGroup.uniform(self.n, 0, self.level)

    def frame_group(self):
        if self.gamma is None:
            return CongruenceGroup.unit(self.n)
        return CongruenceGroup.from_gamma(self.gamma, None)

    def atoms(self):
        """``[(Atom, value)]`` with pairwise disjoint atoms."""
        cfg, n = self.cfg, self.n
        K = self.group()
        if self.gamma is None:
            if self.level == 0:
                return [(Atom(self.A, K), v) for v in self.values.values()]
            return [(Atom(self.A * lift_residue(cfg, n, key, 0), K), v) for key, v in self.values.items()]
        ident = MatF.identity(cfg, n)
        return [
            (Atom(self.A * (ident + lift_residue(cfg, n, key, self.lo).hadamard_t2(self.gamma)), K), v)
            for key, v in self.values.items()
        ]

    def support(self):
        if self.gamma is None:
            return [a for a, _ in self.atoms()]
        return GLCongCoset(self.A, self.gamma, self.level, self.lo, frozenset(self.values))

    def contains(self, x):
        return not basic_eval(self, x).is_zero()

    def __call__(self, x):
        return basic_eval(self, x)

    def scale(self, c):
        c = _lx(c)
        return BasicFn(self.A, self.gamma, self.level, {k: v * c for k, v in self.values.items()}, self.lo)

    def translate(self, h):
        """``x -> self(h^-1 x)``: the base point moves to ``h A``."""
        return BasicFn(h * self.A, self.gamma, self.level, self.values, self.lo)

    def raise_level(self, m):
        """The same function described at the finer level ``m``."""
        from itertools import product
        if m < self.level:
            raise ValueError("cannot lower the level")
        if m == self.level:
            return self
        q, n = self.cfg.q, self.n
        extra = m - self.level
        tails = list(product(range(q), repeat=extra))
        out = {}
        if self.gamma is None and self.level == 0:
            from .linalg import congruence_enumerate
            v = self.values.get(self.unit_key())
            return BasicFn(self.A, None, m, {k: v for k in congruence_enumerate(self.cfg, n, m)} if v else {})
        for key, v in self.values.items():
            for combo in product(tails, repeat=n * n):
                out[tuple(d + t for d, t in zip(key, combo))] = v
        return BasicFn(self.A, self.gamma, m, out, self.lo)

    def __repr__(self):
        if self.gamma is None:
            return f"BasicFn(unit, A={self.A.to_literal()}, level={self.level}, {len(self.values)} classes)"
        return (f"BasicFn(A={self.A.to_literal()}, Gamma={[list(r) for r in self.gamma]}, "
                f"window={self.lo}..{self.level}, {len(self.values)} classes)")


def basic_eval(f, x):
    """Value of a basic function at an invertible matrix."""
    fr = frame_of(f.A)
    if f.gamma is None:
        if not fr.in_coset(x, f.frame_group()):
            return LaurentX.zero()
        if f.level == 0:
            return f.values.get(f.unit_key(), LaurentX.zero())
        key = tuple(e.digits(0, f.level) for e in fr.unit_residue_elems(x))
        return f.values.get(key, LaurentX.zero())
    if not fr.in_coset(x, f.frame_group()):
        return LaurentX.zero()
    elems = fr.residue_elems(x, f.gamma)
    if not all(e.in_ideal(f.lo) for e in elems):
        return LaurentX.zero()
    return f.values.get(tuple(e.digits(f.lo, f.level) for e in elems), LaurentX.zero())


def _from_atoms(found, like1, like2):
    """Package disjoint atoms of one group as a basic function."""
    cfg, n = like1.cfg, like1.n
    if like1.gamma is None and like2.gamma is None:
        base = like1.A
        level = max(like1.level, like2.level)
        fr = frame_of(base)
        if level == 0:
            return BasicFn(base, None, 0, {like1.unit_key(): found[0][1]})
        table = {}
        for atom, v in found:
            table[tuple(e.digits(0, level) for e in fr.unit_residue_elems(atom.base))] = v
        return BasicFn(base, None, level, table)
    gammas = [f.gamma for f in (like1, like2) if f.gamma is not None]
    theta = tuple(tuple(max(col) for col in zip(*rows)) for rows in zip(*gammas))
    level = like1.level if like1.gamma is not None else like2.level
    frame = atom_intersect(Atom(like1.A, like1.frame_group()), Atom(like2.A, like2.frame_group()))
    target = CongruenceGroup.from_gamma(theta, level)
    if any(a.group != target for a, _ in found):
        raise LevelMismatch("product atoms are not cosets of a single congruence group")
    lo_hint = min(f.lo for f in (like1, like2) if f.gamma is not None)
    lo, table = rebase(frame.base, theta, [a for a, _ in found], level, lo_hint)
    vals = {a: v for a, v in found}
    return BasicFn(frame.base, theta, level, {k: vals[a] for k, a in table.items()}, lo)


def basic_product(f1, f2):
    """Pointwise product of two basic functions: a basic function or ZERO."""
    if f1.n != f2.n:
        raise DimensionMismatch("basic functions of different size")
    if f1.kind == f2.kind and f1.level != f2.level:
        raise LevelMismatch(f"levels {f1.level} and {f2.level}")
    K1, K2 = f1.group(), f2.group()
    found = []
    if K2.issubset(K1):
        for a, v in f2.atoms():
            w = f1(a.base)
            if not w.is_zero():
                found.append((a, v * w))
    elif K1.issubset(K2):
        for a, v in f1.atoms():
            w = f2(a.base)
            if not w.is_zero():
                found.append((a, v * w))
    else:
        for a, v in f1.atoms():
            for b, w in f2.atoms():
                c = atom_intersect(a, b)
                if c:
                    found.append((c, v * w))
    if not found:
        return ZERO
    return _from_atoms(found, f1, f2)


# ---------------------------------------------------------------------------
# translate-flip


def split_scalar_unit(W):
    """``W = s u`` with ``s = t2^a t1^b`` scalar and ``u`` in GL_n(O)."""
    n = W.n
    v2, v1, _ = mat_det(W).unit_decompose()
    if v2 % n or v1 % n:
        raise UnsupportedConvolution("base point is not a scalar times GL_n(O)")
    a, b = v2 // n, v1 // n
    u = W.map(lambda e: e.shift2(-a).shift1(-b))
    if not in_gl_O(u):
        raise UnsupportedConvolution("base point is not a scalar times GL_n(O)")
    return FElem.monomial(W.cfg, a, b), u


def _conjugation_ok(gamma, u):
    n = len(gamma)
    for i in range(n):
        for k in range(n):
            for j in range(n):
                if gamma[i][k] + gamma[k][j] <= gamma[i][j]:
                    return False
    if all(x == gamma[0][0] for r in gamma for x in r):
        return True
    return all(u[i, j].is_zero() for i in range(n) for j in range(n) if i != j)


def translate_flip(f, y):
    """The basic function ``x -> f(y x^-1)``.

    With ``W = A^-1 y = s u`` (scalar times GL_n(O)) the result is based at
    ``W``: for congruence type its residue data is ``Z -> g(-u Z u^-1)``
    (reduced mod t1), for unit type ``k -> g(u k^-1 u^-1)``."""
    cfg, n = f.cfg, f.n
    W = mat_inv(f.A) * y
    _, u = split_scalar_unit(W)
    ubar = MatF(cfg, [[FElem.from_e(u[i, j].coeff(0)) for j in range(n)] for i in range(n)])
    if f.gamma is None:
        if f.level == 0:
            return BasicFn(W, None, 0, f.values)
        m = f.level
        ures = tuple(u[i, j].coeff(0).digits(0, m) for i in range(n) for j in range(n))
        uinv = resmat_inv(cfg, n, ures, m)
        out = {}
        for key, v in f.values.items():
            kinv = resmat_inv(cfg, n, key, m)
            out[resmat_mul(cfg, n, resmat_mul(cfg, n, uinv, kinv, m), ures, m)] = v
        return BasicFn(W, None, m, out)
    if not _conjugation_ok(f.gamma, u):
        raise UnsupportedConvolution("conjugation does not preserve this congruence shape")
    ubar_inv = mat_inv(ubar)
    out = {}
    for key, v in f.values.items():
        Y = lift_residue(cfg, n, key, f.lo)
        Z = -(ubar_inv * Y * ubar)
        out[tuple(Z[i, j].coeff(0).digits(f.lo, f.level) for i in range(n) for j in range(n))] = v
    return BasicFn(W, f.gamma, f.level, out, f.lo)


# ---------------------------------------------------------------------------
# Hecke elements


def _group_kind(K):
    """``(gamma or None, level)`` describing the basic-function shape of K."""
    if K.radii is None:
        return None, 0
    ms = {m for row in K.radii for _, m in row}
    gs = tuple(tuple(g for g, _ in row) for row in K.radii)
    if len(ms) != 1 or None in ms:
        raise ValueError(f"{K.describe()} is not a level group")
    m = ms.pop()
    if all(g == 0 for row in gs for g in row):
        return None, m
    return gs, m


class HeckeElem:
    """Finite combination of atom indicators with LaurentX values."""

    __slots__ = ("cfg", "n", "atoms")

    def __init__(self, cfg, n, atoms=()):
        self.cfg = cfg
        self.n = n
        self.atoms = [(a, _lx(v)) for a, v in atoms]

    @classmethod
    def zero(cls, cfg, n):
        return cls(cfg, n, [])

    @classmethod
    def from_basic(cls, f, coef=1):
        c = _lx(coef)
        return cls(f.cfg, f.n, [(a, v * c) for a, v in f.atoms()])

    @classmethod
    def from_terms(cls, terms, cfg=None, n=None):
        out = []
        for coef, f in terms:
            cfg, n = f.cfg, f.n
            out.extend((a, v * _lx(coef)) for a, v in f.atoms())
        return cls(cfg, n, out)

    def atom_values(self):
        return list(self.atoms)

    def __call__(self, x):
        total = LaurentX.zero()
        for a, v in self.atoms:
            if a.contains(x):
                total = total + v
        return total

    def __add__(self, other):
        if self.n != other.n:
            raise DimensionMismatch("Hecke elements of different size")
        return HeckeElem(self.cfg, self.n, self.atoms + other.atoms)

    def __neg__(self):
        return HeckeElem(self.cfg, self.n, [(a, -v) for a, v in self.atoms])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = _lx(c)
        return HeckeElem(self.cfg, self.n, [(a, v * c) for a, v in self.atoms])

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def translate(self, h):
        return HeckeElem(self.cfg, self.n, [(a.translate(h), v) for a, v in self.atoms])

    def normalize(self):
        """Refine nested cosets of finite index, merge equal cosets, drop zeros."""
        q = self.cfg.q
        atoms = list(self.atoms)
        groups = []
        for a, _ in atoms:
            if a.group not in groups:
                groups.append(a.group)
        finest = {}
        for G in groups:
            best, best_index = G, 1
            for K in groups:
                if K == G:
                    continue
                idx = K.index_in(G, q)
                if idx is not None and (idx > best_index or best == G):
                    best, best_index = K, idx
            finest[G] = best
        refined = []
        for a, v in atoms:
            K = finest[a.group]
            if K == a.group:
                refined.append((a, v))
            else:
                refined.extend((Atom(a.base * r, K), v) for r in K.coset_reps_in(a.group, self.cfg))
        buckets = {}
        for a, v in refined:
            bucket = buckets.setdefault(a.group, [])
            for entry in bucket:
                if entry[0].contains(a.base):
                    entry[1] = entry[1] + v
                    break
            else:
                bucket.append([a, v])
        out = [(a, v) for bucket in buckets.values() for a, v in bucket if not v.is_zero()]
        return HeckeElem(self.cfg, self.n, out)

    def is_zero(self):
        return not self.normalize().atoms

    def __eq__(self, other):
        if not isinstance(other, HeckeElem):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def basic_terms(self):
        """Group atoms into basic functions (one per congruence frame)."""
        frames = []
        for a, v in self.normalize().atoms:
            gamma, level = _group_kind(a.group)
            frame_group = CongruenceGroup.unit(self.n) if gamma is None else CongruenceGroup.from_gamma(gamma, None)
            for fr in frames:
                if fr["gamma"] == gamma and fr["level"] == level and frame_of(fr["base"]).in_coset(a.base, frame_group):
                    fr["atoms"].append((a, v))
                    break
            else:
                frames.append({"gamma": gamma, "level": level, "base": a.base, "atoms": [(a, v)]})
        out = []
        for fr in frames:
            base, gamma, level = fr["base"], fr["gamma"], fr["level"]
            if gamma is None:
                if level == 0:
                    out.append(BasicFn(base, None, 0, {((),) * (self.n ** 2): fr["atoms"][0][1]}))
                    continue
                f = frame_of(base)
                table = {tuple(e.digits(0, level) for e in f.unit_residue_elems(a.base)): v for a, v in fr["atoms"]}
                out.append(BasicFn(base, None, level, table))
            else:
                lo, table = rebase(base, gamma, [a for a, _ in fr["atoms"]], level)
                vals = dict(fr["atoms"])
                out.append(BasicFn(base, gamma, level, {k: vals[a] for k, a in table.items()}, lo))
        return out

    def __repr__(self):
        return f"HeckeElem({len(self.atoms)} atoms)"

    def describe(self):
        return [(str(v), str(a)) for a, v in self.normalize().atoms]


# ---------------------------------------------------------------------------
# convolution


def _as_basic_terms(f):
    if isinstance(f, BasicFn):
        return [f]
    if isinstance(f, HeckeElem):
        return f.basic_terms()
    raise TypeError(f"cannot convolve {type(f).__name__}")


def _prepare(b1, b2):
    if b1.n != b2.n:
        raise DimensionMismatch("basic functions of different size")
    for b in (b1, b2):
        if not b.group().is_uniform:
            raise UnsupportedConvolution("convolution needs a uniform congruence shape")
        split_scalar_unit(b.A)
    if b1.kind == b2.kind and b1.level != b2.level:
        m = max(b1.level, b2.level)
        b1, b2 = b1.raise_level(m), b2.raise_level(m)
    return b1, b2


def class_value(b1, b2, y):
    """``(b1 * b2)(y)`` via the flipped product: the integral over x of
    ``b1(y x^-1) b2(x)``."""
    h = translate_flip(b1, y)
    p = basic_product(h, b2)
    if not p:
        return LaurentX.zero()
    return integrate_GLn(p)


def convolution_classes(b1, b2):
    """Cosets ``y M`` on which ``b1 * b2`` is constant and may be nonzero."""
    b1, b2 = _prepare(b1, b2)
    K1, K2 = b1.group(), b2.group()
    M = K1 if K2.issubset(K1) else K2
    classes = []
    for a, _ in b1.atoms():
        for c, _ in b2.atoms():
            y = a.base * c.base
            if not any(cl.contains(y) for cl in classes):
                classes.append(Atom(y, M))
    return b1, b2, classes


def convolve_basic(b1, b2):
    b1, b2, classes = convolution_classes(b1, b2)
    out = []
    for cl in classes:
        v = class_value(b1, b2, cl.base)
        if not v.is_zero():
            out.append((cl, v))
    return HeckeElem(b1.cfg, b1.n, out)


def convolve(f1, f2):
    """Convolution ``(f1 * f2)(y) = integral of f1(y g^-1) f2(g) dg``."""
    terms1, terms2 = _as_basic_terms(f1), _as_basic_terms(f2)
    cfg = (terms1 or terms2)[0].cfg if (terms1 or terms2) else None
    n = f1.n
    total = HeckeElem(cfg, n, [])
    for b1 in terms1:
        for b2 in terms2:
            total = total + convolve_basic(b1, b2)
    return total.normalize()


def class_values_at(b1, b2, rng, reps=10):
    """For each convolution class, the value at ``reps`` random representatives."""
    b1, b2, classes = convolution_classes(b1, b2)
    out = []
    for cl in classes:
        ys = [cl.base] + [cl.random_point(rng) for _ in range(reps - 1)]
        out.append((cl, [class_value(b1, b2, y) for y in ys]))
    return out


def _divide(a, b):
    """``a / b`` for a single-term divisor ``b``; None otherwise."""
    items = list(b.items())
    if len(items) != 1:
        return None
    e, c = items[0]
    return LaurentX({k - e: v / c for k, v in a.items()})


def hecke_structure_constants(basis):
    """Table ``T[i][j] = (coefficients, remainder)`` with
    ``basis[i] * basis[j] = sum_k coefficients[k] basis[k] + remainder``."""
    basis = [b if isinstance(b, HeckeElem) else HeckeElem.from_basic(b) for b in basis]
    table = []
    for bi in basis:
        row = []
        for bj in basis:
            prod = convolve(bi, bj)
            coeffs = []
            rest = prod
            for bk in basis:
                atoms = bk.normalize().atoms
                ratios = {_divide(prod(a.base), v) for a, v in atoms}
                c = ratios.pop() if len(ratios) == 1 else None
                if c is None or c.is_zero():
                    coeffs.append(LaurentX.zero())
                else:
                    coeffs.append(c)
                    rest = rest - bk.scale(c)
            row.append((coeffs, rest.normalize()))
        table.append(row)
    return table
