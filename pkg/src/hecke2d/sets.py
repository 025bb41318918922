"""Balls, distinguished sets and the ring they generate.

Rank-two balls ``t2^g t1^d O`` are ordered by the lexicographic radius
``(g, d)``: a larger radius means a smaller ball, and two balls are always
nested or disjoint.  Rank-one balls ``a + t2^g calO`` are the coordinate
supports of simple functions.
"""

from dataclasses import dataclass, field

from .errors import BudgetExceeded, DimensionMismatch, DivisionByZero, NotNormalized
from .field import FElem
from .laurent import LaurentX, Monomial


class _Empty:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __bool__(self):
        return False

    def __repr__(self):
        return "Empty"


EMPTY = _Empty()


# ---------------------------------------------------------------------------
# rank-one balls and boxes

@dataclass(frozen=True)
class Ball:
    """``a + t2^gamma calO``; the center is kept reduced."""

    a: FElem
    gamma: int

    def __post_init__(self):
        object.__setattr__(self, "a", self.a.truncate2(self.gamma))

    def contains(self, x):
        return (x - self.a).in_t2_ideal(self.gamma)

    def __str__(self):
        return f"ball({self.a}; {self.gamma})"


def ball_intersect(b1, b2):
    if b1.gamma > b2.gamma:
        b1, b2 = b2, b1
    return b2 if b1.contains(b2.a) else EMPTY


def ball_affine_image(g, c, b):
    """Image of ``b`` under ``x -> g x + c``."""
    if g.is_zero():
        raise DivisionByZero("affine image under g = 0")
    v2 = g.valuation2()
    return Ball(g * b.a + c, b.gamma + v2)


def ball_minkowski_sum(b1, b2):
    if isinstance(b2, FElem):
        return Ball(b1.a + b2, b1.gamma)
    if isinstance(b1, FElem):
        return Ball(b2.a + b1, b2.gamma)
    return Ball(b1.a + b2.a, min(b1.gamma, b2.gamma))


@dataclass(frozen=True)
class Box:
    balls: tuple

    def __init__(self, balls):
        object.__setattr__(self, "balls", tuple(balls))

    @property
    def n(self):
        return len(self.balls)

    def contains(self, xs):
        return all(b.contains(x) for b, x in zip(self.balls, xs))

    def __str__(self):
        return "box[" + ", ".join(str(b) for b in self.balls) + "]"


def box_intersect(B1, B2):
    if B1.n != B2.n:
        raise DimensionMismatch(f"boxes in F^{B1.n} and F^{B2.n}")
    out = []
    for b1, b2 in zip(B1.balls, B2.balls):
        b = ball_intersect(b1, b2)
        if not b:
            return EMPTY
        out.append(b)
    return Box(out)


# ---------------------------------------------------------------------------
# distinguished sets

@dataclass(frozen=True)
class DistinguishedSet:
    """``a + t2^gamma t1^delta O`` with a reduced center."""

    a: FElem
    gamma: int
    delta: int

    def __post_init__(self):
        object.__setattr__(self, "a", self.a.truncate_radius(self.gamma, self.delta))

    @property
    def radius(self):
        return (self.gamma, self.delta)

    @property
    def q(self):
        return self.a.cfg.q

    def contains(self, x):
        return (x - self.a).in_radius(self.gamma, self.delta)

    def contains_set(self, other):
        return other.radius >= self.radius and self.contains(other.a)

    def meets(self, other):
        small, big = (self, other) if self.radius >= other.radius else (other, self)
        return big.contains(small.a)

    def monomial(self):
        return Monomial(x_exp=self.gamma, q_exp=self.delta)

    def measure(self):
        return self.monomial().to_laurent(self.q)

    def children(self):
        """The ``q`` balls of radius ``(gamma, delta + 1)`` partitioning this one."""
        cfg = self.a.cfg
        return [
            DistinguishedSet(self.a + FElem.monomial(cfg, self.gamma, self.delta, c), self.gamma, self.delta + 1)
            for c in cfg.gf.elements()
        ]

    def translate(self, b):
        return DistinguishedSet(self.a + b, self.gamma, self.delta)

    def scale(self, g):
        v2, v1, _ = g.unit_decompose()
        return DistinguishedSet(g * self.a, self.gamma + v2, self.delta + v1)

    def __str__(self):
        return f"dist({self.a}; {self.gamma}, {self.delta})"


def dist_translate(S, b):
    return S.translate(b)


def dist_scale(S, g):
    return S.scale(g)


# ---------------------------------------------------------------------------
# set expressions and the normalized ring element

class SetExpr:
    def __or__(self, other):
        return Union((self, other))

    def __sub__(self, other):
        return Difference(self, other)

    def __and__(self, other):
        return Intersection((self, other))


@dataclass(frozen=True)
class Leaf(SetExpr):
    ball: DistinguishedSet

    def contains(self, x):
        return self.ball.contains(x)

    def leaves(self):
        return [self.ball]

    def generic(self, value_of):
        return value_of(self.ball)


@dataclass(frozen=True)
class Union(SetExpr):
    parts: tuple

    def contains(self, x):
        return any(p.contains(x) for p in self.parts)

    def leaves(self):
        return [b for p in self.parts for b in p.leaves()]

    def generic(self, value_of):
        return any(p.generic(value_of) for p in self.parts)


@dataclass(frozen=True)
class Intersection(SetExpr):
    parts: tuple

    def contains(self, x):
        return all(p.contains(x) for p in self.parts)

    def leaves(self):
        return [b for p in self.parts for b in p.leaves()]

    def generic(self, value_of):
        return all(p.generic(value_of) for p in self.parts)


@dataclass(frozen=True)
class Difference(SetExpr):
    left: SetExpr
    right: SetExpr

    def contains(self, x):
        return self.left.contains(x) and not self.right.contains(x)

    def leaves(self):
        return self.left.leaves() + self.right.leaves()

    def generic(self, value_of):
        return self.left.generic(value_of) and not self.right.generic(value_of)


def as_expr(obj):
    if isinstance(obj, SetExpr):
        return obj
    if isinstance(obj, DistinguishedSet):
        return Leaf(obj)
    if isinstance(obj, SetRingElem):
        return obj.to_expr()
    raise TypeError(f"not a set expression: {obj!r}")


@dataclass(frozen=True)
class Component:
    """``outer`` minus the pairwise disjoint ``holes`` (all strictly inside)."""

    outer: DistinguishedSet
    holes: tuple = ()

    def contains(self, x):
        return self.outer.contains(x) and not any(h.contains(x) for h in self.holes)

    def measure(self):
        total = self.outer.measure()
        for h in self.holes:
            total = total - h.measure()
        return total

    def __str__(self):
        if not self.holes:
            return str(self.outer)
        return str(self.outer) + " \\ {" + ", ".join(str(h) for h in self.holes) + "}"


@dataclass(frozen=True)
class SetRingElem:
    components: tuple = ()
    normalized: bool = field(default=True, compare=False)

    def contains(self, x):
        return any(c.contains(x) for c in self.components)

    def is_empty(self):
        return not self.components

    def to_expr(self):
        parts = []
        for c in self.components:
            e = Leaf(c.outer)
            for h in c.holes:
                e = Difference(e, Leaf(h))
            parts.append(e)
        return Union(tuple(parts))

    def translate(self, b):
        return SetRingElem(tuple(
            Component(c.outer.translate(b), tuple(h.translate(b) for h in c.holes)) for c in self.components
        ))

    def scale(self, g):
        return SetRingElem(tuple(
            Component(c.outer.scale(g), tuple(h.scale(g) for h in c.holes)) for c in self.components
        ))

    def __str__(self):
        if not self.components:
            return "Empty"
        return " | ".join(str(c) for c in self.components)


def _dedup(balls):
    seen = {}
    for b in balls:
        seen.setdefault((b.a, b.gamma, b.delta), b)
    return list(seen.values())


def _forest(balls):
    """Parent links for a family of nested-or-disjoint balls."""
    balls = sorted(balls, key=lambda b: b.radius)
    parent = {}
    for i, b in enumerate(balls):
        best = None
        for c in balls[:i]:
            if c.radius < b.radius and c.contains(b.a):
                if best is None or c.radius > best.radius:
                    best = c
        parent[b] = best
    children = {b: [] for b in balls}
    roots = []
    for b in balls:
        (roots if parent[b] is None else children[parent[b]]).append(b)
    return roots, children


def _split_same_level(comp, budget, out):
    holes = [h for h in comp.holes if h.gamma == comp.outer.gamma]
    if not holes:
        out.append(comp)
        return
    for child in comp.outer.children():
        inner = [h for h in comp.holes if child.contains_set(h)]
        if any(h.radius == child.radius for h in inner):
            continue
        _split_same_level(Component(child, tuple(inner)), budget, out)
        if len(out) > budget:
            raise BudgetExceeded(f"normalization needs more than {budget} components")


def ring_normalize(expr, budget=100_000):
    """Rewrite a union/difference/intersection of distinguished sets as
    pairwise disjoint components.  Holes at the outer ball's own t2-level are
    resolved by splitting; deeper holes have infinite index and are kept."""
    expr = as_expr(expr)
    balls = _dedup(expr.leaves())
    if not balls:
        return SetRingElem(())
    roots, children = _forest(balls)
    if expr.generic(lambda leaf: False):
        raise ValueError("expression is not contained in a finite union of balls")
    value = {b: expr.generic(lambda leaf, b=b: leaf.contains_set(b)) for b in balls}

    comps = []

    def start(b):
        if value[b]:
            holes = []
            collect(b, holes)
            comps.append(Component(b, tuple(holes)))
        else:
            for c in children[b]:
                start(c)

    def collect(b, holes):
        for c in children[b]:
            if value[c]:
                collect(c, holes)
            else:
                holes.append(c)
                for d in children[c]:
                    start(d)

    for r in roots:
        start(r)
    out = []
    for comp in comps:
        _split_same_level(comp, budget, out)
    return SetRingElem(tuple(out))


def dist_measure(S):
    """Measure of a distinguished set, a normalized ring element, or a
    product of distinguished sets (a tuple, one per coordinate of F^n)."""
    if isinstance(S, DistinguishedSet):
        return S.measure()
    if isinstance(S, tuple):
        total = LaurentX.one()
        for D in S:
            total = total * D.measure()
        return total
    if isinstance(S, SetRingElem):
        if not S.normalized:
            raise NotNormalized("run ring_normalize first")
        total = LaurentX.zero()
        for c in S.components:
            total = total + c.measure()
        return total
    raise NotNormalized(f"cannot measure {type(S).__name__}; run ring_normalize first")
