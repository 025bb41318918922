"""Independent counting oracle for measures and integrals on F.

The oracle never looks at normalized components.  It recurses over balls:
on a ball whose interior meets no smaller leaf ball the integrand is
constant, so it contributes ``value * q^-d X^g``; inner balls at the same
t2-level are resolved by enumerating the q residues of the next t1-digit;
inner balls at deeper t2-strata only change the integrand on themselves,
so they contribute a correction measured by recursion.
"""

from fractions import Fraction

from .errors import UnsupportedByOracle
from .field import FElem
from .laurent import LaurentX
from .sets import DistinguishedSet, SetExpr, SetRingElem, as_expr


def _strictly_inside(inner, outer):
    return inner.radius > outer.radius and outer.contains(inner.a)


def _generic_point(ball, leaves):
    """A point of ``ball`` outside every leaf lying at a deeper t2-level."""
    cfg = ball.a.cfg
    top = ball.delta + 1
    for leaf in leaves:
        e = leaf.a.coeff(ball.gamma) if leaf.a.c else None
        if e is not None and e.c:
            top = max(top, max(e.c) + 1)
    return ball.a + FElem.monomial(cfg, ball.gamma, max(top, ball.delta))


def _value(terms, x):
    total = LaurentX.zero()
    for coef, expr in terms:
        if expr.contains(x):
            total = total + coef
    return total


def _integrate_on(ball, leaves, terms):
    inner = [b for b in leaves if _strictly_inside(b, ball)]
    point = _generic_point(ball, inner)
    if not inner:
        return _value(terms, point) * ball.measure()
    if any(b.gamma == ball.gamma for b in inner):
        total = LaurentX.zero()
        for child in ball.children():
            total = total + _integrate_on(child, inner, terms)
        return total
    generic = _value(terms, point)
    total = generic * ball.measure()
    maximal = [b for b in inner if not any(_strictly_inside(b, c) for c in inner)]
    seen = []
    for m in maximal:
        if any(m.radius == s.radius and s.contains(m.a) for s in seen):
            continue
        seen.append(m)
        total = total + _integrate_on(m, inner, terms) - generic * m.measure()
    return total


def _check_operand(obj):
    if isinstance(obj, (SetExpr, DistinguishedSet, SetRingElem)):
        return as_expr(obj)
    raise UnsupportedByOracle(f"oracle only handles distinguished-set operands, got {type(obj).__name__}")


def oracle_integral(terms):
    """Integral of ``sum coef * char(expr)`` over F."""
    terms = [(c if isinstance(c, LaurentX) else LaurentX.const(Fraction(c)), _check_operand(e)) for c, e in terms]
    leaves = []
    for _, expr in terms:
        for b in expr.leaves():
            if not any(b.radius == s.radius and s.contains(b.a) for s in leaves):
                leaves.append(b)
    if not leaves:
        return LaurentX.zero()
    roots = [b for b in leaves if not any(_strictly_inside(b, c) for c in leaves)]
    level = min(b.gamma for b in roots) - 1
    low = min([0] + [min(b.a.coeff(level).c, default=0) for b in roots])
    far = FElem.monomial(roots[0].a.cfg, level, low - 1)
    if not _value(terms, far).is_zero():
        raise UnsupportedByOracle("integrand does not have bounded support")
    total = LaurentX.zero()
    for r in roots:
        total = total + _integrate_on(r, leaves, terms)
    return total


def oracle_measure(S):
    if isinstance(S, tuple):
        total = LaurentX.one()
        for part in S:
            total = total * oracle_measure(part)
        return total
    return oracle_integral([(1, S)])
