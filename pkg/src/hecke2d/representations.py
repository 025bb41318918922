"""The left-translation representation of GL_n(F) on Hecke elements.

A vector is a ``HeckeElem`` (a ``BasicFn`` is accepted wherever a vector is).
GL_n(F) acts by ``(h . f)(x) = f(h^-1 x)`` and a Hecke element ``phi`` acts by
convolution.  Stabilizers and bi-invariance groups of a single basic term are
computed at its congruence level: they have the shape
``I + t2^Gamma p^-1(H)`` (congruence type) or ``p^-1(H)`` inside GL_n(O) (unit
type), where ``H`` is a subgroup of the finite residue group of the term.
"""

import random
from dataclasses import dataclass, field
from itertools import product

from .cosets import Atom, CongruenceGroup, frame_of, lift_residue
from .errors import BudgetExceeded, LevelMismatch, NotAdmissible, UnsupportedImageClass
from .field import EElem
from .hecke import BasicFn, HeckeElem, convolve
from .integration import integrate_GLn
from .laurent import LaurentX
from .linalg import DEFAULT_BUDGET, MatF, congruence_enumerate, resmat_mul

# ---------------------------------------------------------------------------
# vectors and actions


def as_vector(v):
    if isinstance(v, HeckeElem):
        return v
    if isinstance(v, BasicFn):
        return HeckeElem.from_basic(v)
    raise TypeError(f"{type(v).__name__} is not a vector of the representation")


def translate_action(h, v):
    """``h . v``; base points move from ``A`` to ``h A``."""
    return v.translate(h)


def hecke_action(phi, v):
    """``pi(phi) v``: in the left-translation model this is ``phi * v``."""
    return convolve(phi, v)


def single_term(v):
    if isinstance(v, BasicFn):
        return v
    terms = as_vector(v).basic_terms()
    if len(terms) != 1:
        raise NotAdmissible(f"expected a single basic term, found {len(terms)}")
    return terms[0]


# ---------------------------------------------------------------------------
# finite residue groups


class ResidueGroup:
    """The finite group of residue classes ``K / K_level`` of one term shape.

    Congruence type: classes of ``I + t2^Gamma X`` keyed by the digits of
    ``res(X)`` in ``t1^lo .. t1^level``.  Unit type: GL_n(O_E / t1^level)."""

    def __init__(self, cfg, n, gamma, level, lo=0):
        self.cfg, self.n, self.gamma, self.level, self.lo = cfg, n, gamma, level, lo
        if gamma is not None:
            # products X_ik Y_kj survive in the residue only where Gamma is additive
            self.links = {
                (i, j): [k for k in range(n) if gamma[i][k] + gamma[k][j] == gamma[i][j]]
                for i in range(n) for j in range(n)
            }

    @classmethod
    def of(cls, f):
        return cls(f.cfg, f.n, f.gamma, f.level, f.lo)

    @property
    def width(self):
        return self.level - self.lo

    def identity(self):
        n = self.n
        if self.gamma is None:
            if self.level == 0:
                return ((),) * (n * n)
            return tuple((1 if i == j else 0,) + (0,) * (self.level - 1) for i in range(n) for j in range(n))
        return ((0,) * self.width,) * (n * n)

    def size(self):
        q, n = self.cfg.q, self.n
        if self.gamma is None:
            from .linalg import gl_order
            return gl_order(n, q, self.level) if self.level else 1
        return q ** (self.width * n * n)

    def elements(self, budget=DEFAULT_BUDGET):
        if self.size() > budget:
            raise BudgetExceeded(f"residue group of order {self.size()} exceeds budget {budget}")
        if self.gamma is None:
            if self.level == 0:
                return [self.identity()]
            return list(congruence_enumerate(self.cfg, self.n, self.level, budget))
        return list(product(product(range(self.cfg.q), repeat=self.width), repeat=self.n * self.n))

    def mul(self, a, b):
        cfg, n = self.cfg, self.n
        if self.gamma is None:
            if self.level == 0:
                return a
            return resmat_mul(cfg, n, a, b, self.level)
        add = cfg.gf.add
        out = []
        for i in range(n):
            for j in range(n):
                e = tuple(add(x, y) for x, y in zip(a[i * n + j], b[i * n + j]))
                ks = self.links[i, j]
                if ks:
                    acc = EElem.from_digits(cfg, e, self.lo)
                    for k in ks:
                        acc = acc + EElem.from_digits(cfg, a[i * n + k], self.lo) * EElem.from_digits(cfg, b[k * n + j], self.lo)
                    e = acc.digits(self.lo, self.level)
                out.append(e)
        return tuple(out)

    def lift(self, key):
        """A matrix of GL_n(F) in the class ``key``."""
        cfg, n = self.cfg, self.n
        if self.gamma is None:
            return MatF.identity(cfg, n) if self.level == 0 else lift_residue(cfg, n, key, 0)
        return MatF.identity(cfg, n) + lift_residue(cfg, n, key, self.lo).hadamard_t2(self.gamma)

    def frame_group(self):
        if self.gamma is None:
            return CongruenceGroup.unit(self.n)
        return CongruenceGroup.from_gamma(self.gamma, None)

    def kernel_group(self):
        if self.gamma is None:
            if self.level == 0:
                return CongruenceGroup.unit(self.n)
            return CongruenceGroup.uniform(self.n, 0, self.level)
        return CongruenceGroup.from_gamma(self.gamma, self.level)

    def key_in_coset(self, P, x):
        """The class of ``P^-1 x``, or None when ``P^-1 x`` is outside the frame."""
        fr = frame_of(P)
        if not fr.in_coset(x, self.frame_group()):
            return None
        if self.gamma is None:
            if self.level == 0:
                return self.identity()
            return tuple(e.digits(0, self.level) for e in fr.unit_residue_elems(x))
        elems = fr.residue_elems(x, self.gamma)
        if not all(e.in_ideal(self.lo) for e in elems):
            return None
        return tuple(e.digits(self.lo, self.level) for e in elems)

    def closure(self, gens):
        """Subgroup generated by ``gens``."""
        out = {self.identity()}
        frontier = list(out)
        gens = list(gens)
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    c = self.mul(a, g)
                    if c not in out:
                        out.add(c)
                        nxt.append(c)
            frontier = nxt
        return frozenset(out)


def _key_valuation(key, lo):
    """Smallest t1-exponent present in a congruence class (None for zero)."""
    best = None
    for d in key:
        for i, x in enumerate(d):
            if x:
                best = lo + i if best is None else min(best, lo + i)
                break
    return best


# ---------------------------------------------------------------------------
# subgroup descriptors


@dataclass(frozen=True)
class SubgroupDescriptor:
    """``{I}`` or ``conj * P * conj^-1`` with ``P`` the preimage of ``H``.

    ``kind`` is ``trivial``, ``congruence`` (``I + t2^Gamma p^-1(H)``) or
    ``unit`` (``p^-1(H)`` inside GL_n(O)); ``conj`` None means the identity."""

    n: int
    kind: str
    gamma: tuple = None
    level: int = 0
    lo: int = 0
    H: frozenset = frozenset()
    conj: MatF = None
    cfg: object = field(default=None, compare=False)

    @classmethod
    def trivial(cls, cfg, n):
        return cls(n, "trivial", cfg=cfg)

    @classmethod
    def from_residues(cls, group, H, conj=None):
        kind = "unit" if group.gamma is None else "congruence"
        if conj is not None and conj.is_identity():
            conj = None
        return cls(group.n, kind, group.gamma, group.level, group.lo, frozenset(H), conj, group.cfg)

    @property
    def is_trivial(self):
        return self.kind == "trivial"

    def residue_group(self):
        if self.is_trivial:
            raise ValueError("the trivial group has no residue description")
        return ResidueGroup(self.cfg, self.n, self.gamma, self.level, self.lo)

    def order_of_H(self):
        return len(self.H)

    # membership -------------------------------------------------------------
    def coset_contains(self, P, x):
        """``x in P * S`` for the unconjugated group ``S``."""
        if self.is_trivial:
            return x == P
        key = self.residue_group().key_in_coset(P, x)
        return key is not None and key in self.H

    def contains(self, x):
        if self.is_trivial:
            return x.is_identity()
        if self.conj is None:
            return self.coset_contains(MatF.identity(self.cfg, self.n), x)
        return self.coset_contains(self.conj, x * self.conj)

    def double_coset_contains(self, g, x):
        """``x in S g S`` (unconjugated); the kernel of ``p`` is normal in the
        frame, so it is enough to try one lift per element of ``H``."""
        rg = self.residue_group()
        return any(self.coset_contains(rg.lift(h) * g, x) for h in self.H)

    # structure --------------------------------------------------------------------
    def is_group(self):
        """Closure of ``H`` under the residue law (inverses follow by finiteness)."""
        if self.is_trivial:
            return True
        rg = self.residue_group()
        if rg.identity() not in self.H:
            return False
        return all(rg.mul(a, b) in self.H for a in self.H for b in self.H)

    def generators(self):
        if self.is_trivial:
            return []
        rg = self.residue_group()
        gens, span = [], frozenset({rg.identity()})
        for h in sorted(self.H):
            if h not in span:
                gens.append(h)
                span = rg.closure(gens)
        return gens

    def random_element(self, rng):
        if self.is_trivial:
            return MatF.identity(self.cfg, self.n)
        rg = self.residue_group()
        h = sorted(self.H)[rng.randrange(len(self.H))]
        x = Atom(rg.lift(h), rg.kernel_group()).random_point(rng)
        if self.conj is not None:
            x = self.conj * x * self.conj.inverse()
        return x

    def indicator(self):
        """Indicator of the unconjugated group as a Hecke element."""
        if self.is_trivial:
            return HeckeElem.zero(self.cfg, self.n)
        rg = self.residue_group()
        K = rg.kernel_group()
        return HeckeElem(self.cfg, self.n, [(Atom(rg.lift(h), K), 1) for h in sorted(self.H)])

    def measure(self):
        """Haar measure (``|det|^-n`` weighted); conjugation does not change it."""
        return integrate_GLn(self.indicator())

    def describe(self):
        if self.is_trivial:
            return "{I}"
        shape = "I + t2^Gamma p^-1(H)" if self.kind == "congruence" else "p^-1(H) in GL_n(O)"
        text = f"{shape}, Gamma={self.gamma and [list(r) for r in self.gamma]}, level={self.level}, |H|={len(self.H)}"
        if self.conj is not None:
            text = f"conjugate by {self.conj.to_literal()} of {text}"
        return text

    def to_json(self):
        if self.is_trivial:
            return {"kind": "trivial", "n": self.n}
        n = self.n
        gens = [[[list(g[i * n + j]) for j in range(n)] for i in range(n)] for g in self.generators()]
        gamma = [[0] * n for _ in range(n)] if self.gamma is None else [list(r) for r in self.gamma]
        return {
            "kind": self.kind,
            "Gamma": gamma,
            "level": self.level,
            "lo": self.lo,
            "H": gens,
            "order": len(self.H),
            "conjugator": None if self.conj is None else self.conj.to_literal(),
        }

    @classmethod
    def from_json(cls, cfg, doc):
        n = doc.get("n") or len(doc["Gamma"])
        if doc["kind"] == "trivial":
            return cls.trivial(cfg, n)
        gamma = None if doc["kind"] == "unit" else tuple(tuple(r) for r in doc["Gamma"])
        rg = ResidueGroup(cfg, n, gamma, doc["level"], doc.get("lo", 0))
        gens = [tuple(tuple(e) for row in g for e in row) for g in doc["H"]]
        conj = doc.get("conjugator")
        conj = MatF.parse(cfg, conj) if conj else None
        return cls.from_residues(rg, rg.closure(gens), conj)


# ---------------------------------------------------------------------------
# stabilizers


def _periods(f, side, budget):
    """Residue classes ``h`` with ``g(h k) = g(k)`` (left) or ``g(k h) = g(k)``
    (right) for every class ``k``.  Checking the support suffices: the map is
    a bijection of the finite residue group."""
    rg = ResidueGroup.of(f)
    table = f.values
    out = []
    for h in rg.elements(budget):
        ok = True
        for k, v in table.items():
            moved = rg.mul(h, k) if side == "left" else rg.mul(k, h)
            if table.get(moved) != v:
                ok = False
                break
        if ok:
            out.append(h)
    return rg, frozenset(out)


def stabilizer(v, budget=DEFAULT_BUDGET):
    """``{h : h . v = v}`` for a single basic term, at the term's level.

    For a term based at ``A`` this is ``A * Stab(term at I) * A^-1``."""
    f = single_term(v)
    rg, H = _periods(BasicFn(MatF.identity(f.cfg, f.n), f.gamma, f.level, f.values, f.lo), "left", budget)
    return SubgroupDescriptor.from_residues(rg, H, conj=f.A)


def stabilizer_search(v, budget=DEFAULT_BUDGET):
    """Exhaustive search over level-m lifts ``h`` (conjugated by the base
    point) keeping those with ``h . v = v`` as Hecke elements."""
    f = single_term(v)
    rg = ResidueGroup.of(f)
    vec = as_vector(f)
    Ainv = f.A.inverse()
    found = []
    for key in rg.elements(budget):
        h = f.A * rg.lift(key) * Ainv
        if (translate_action(h, vec) - vec).is_zero():
            found.append(key)
    return frozenset(found)


def bi_invariance_group(v, budget=DEFAULT_BUDGET, samples=16, seed=0):
    """Largest ``M = I + t2^Gamma p^-1(H)`` (or ``p^-1(H)``) with ``v`` left
    and right M-invariant; ``H = H_left meet H_right`` at the term's level.

    The result is spot-checked at ``samples`` random points."""
    f = single_term(v)
    if not f.A.is_identity():
        raise NotAdmissible("bi-invariance search needs a term based at the identity")
    rg, left = _periods(f, "left", budget)
    _, right = _periods(f, "right", budget)
    M = SubgroupDescriptor.from_residues(rg, left & right)
    bad = check_bi_invariance(f, M, random.Random(seed), samples)
    if bad is not None:
        raise NotAdmissible(f"bi-invariance fails at {bad[0].to_literal()} with {bad[1].to_literal()}")
    return M


def sample_points(f, rng, count):
    """Points in the support of ``f`` and in its frame, mixed."""
    atoms = [a for a, _ in f.atoms()]
    rg = ResidueGroup.of(f)
    frame = Atom(f.A, rg.frame_group())
    pts = []
    for i in range(count):
        if atoms and i % 2 == 0:
            pts.append(atoms[rng.randrange(len(atoms))].random_point(rng))
        else:
            pts.append(frame.random_point(rng))
    return pts


def check_bi_invariance(f, M, rng, samples):
    """``(x, m)`` with ``f(m x) != f(x)`` or ``f(x m) != f(x)``, or None."""
    for x in sample_points(f, rng, samples):
        m = M.random_element(rng)
        fx = f(x)
        if f(m * x) != fx or f(x * m) != fx:
            return x, m
    return None


# ---------------------------------------------------------------------------
# double cosets


@dataclass
class DoubleCosetDecomposition:
    """``v = sum c_i char(M g_i M)`` on the points within ``bound``."""

    M: SubgroupDescriptor
    terms: list
    orbits: list
    bound: int
    truncated: bool
    skipped: int

    def reconstruct(self, x):
        total = LaurentX.zero()
        for g, c in self.terms:
            if self.M.double_coset_contains(g, x):
                total = total + c
        return total

    def within_bound(self, x):
        """Points whose residue class has t1-valuation at least ``-bound``;
        points outside the frame count as inside (both sides vanish there)."""
        rg = self.M.residue_group()
        key = rg.key_in_coset(MatF.identity(rg.cfg, rg.n), x)
        if key is None or rg.gamma is None:
            return True
        val = _key_valuation(key, rg.lo)
        return val is None or val >= -self.bound


def double_coset_decompose(v, M, bound=0):
    """Representatives of the double cosets ``M g M`` meeting the support of
    ``v`` with coefficients ``v(g)``.  Double cosets whose most integral
    representative has t1-valuation below ``-bound`` are skipped and reported."""
    if isinstance(v, HeckeElem) and v.is_zero():
        return DoubleCosetDecomposition(M, [], [], bound, False, 0)
    f = single_term(v)
    if M.is_trivial:
        raise UnsupportedImageClass("decomposition over the trivial group is the pointwise support")
    if not f.A.is_identity():
        raise NotAdmissible("decomposition needs a term based at the identity")
    if (f.gamma, f.level, f.lo) != (M.gamma, M.level, M.lo):
        raise LevelMismatch("vector and group have different residue shapes")
    rg = M.residue_group()
    H = sorted(M.H)
    seen = set()
    terms, orbits, skipped = [], [], 0
    for k in sorted(f.values):
        if k in seen:
            continue
        orbit = {rg.mul(rg.mul(a, k), b) for a in H for b in H}
        seen |= orbit
        c = f.values[k]
        if any(f.values.get(o) != c for o in orbit):
            raise NotAdmissible("vector is not bi-invariant under this group")
        if rg.gamma is None:
            rep = min(orbit)
        else:
            # the most integral member; the zero class counts as infinitely integral
            ranked = sorted(orbit, key=lambda o: (-(_key_valuation(o, rg.lo) if o != rg.identity() else 10**9), o))
            rep = ranked[0]
            val = _key_valuation(rep, rg.lo)
            if val is not None and val < -bound:
                skipped += 1
                continue
        terms.append((rg.lift(rep), c))
        orbits.append(frozenset(orbit))
    return DoubleCosetDecomposition(M, terms, orbits, bound, skipped > 0, skipped)

