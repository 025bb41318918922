"""Property suites: seeded random cases checked against exact expectations.

Every case draws from its own generator seeded by ``(suite, seed, index)`` so a
single failing case can be replayed alone and cases may run in any order.
"""

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .efunction import EFunction
from .errors import UnknownSuite
from .field import FElem, FieldConfig, random_felem
from .hecke import BasicFn, HeckeElem, basic_product, class_values_at, convolve
from .integration import SimpleFn, abs_det, fubini_values, integrate_Fn, integrate_GLn, integrate_GLn_E, transform_linear
from .laurent import LaurentX
from .linalg import MatF, congruence_enumerate
from .oracle import oracle_integral, oracle_measure
from .representations import (
    as_vector,
    bi_invariance_group,
    double_coset_decompose,
    hecke_action,
    sample_points,
    stabilizer,
    stabilizer_search,
    translate_action,
)
from .samples import nice_base, random_basic, random_bi_invariant, random_cong_basic, random_unit_basic
from .sets import DistinguishedSet, Difference, Intersection, Leaf, Union, dist_measure, ring_normalize


@dataclass
class CaseResult:
    index: int
    ok: bool
    detail: str = ""
    data: dict = field(default_factory=dict)


@dataclass
class SuiteReport:
    suite: str
    seed: int
    params: dict
    cases: list
    elapsed: float = 0.0

    @property
    def passed(self):
        return sum(c.ok for c in self.cases)

    @property
    def failed(self):
        return [c for c in self.cases if not c.ok]

    @property
    def ok(self):
        return not self.failed

    def replay_job(self, case):
        return {"op": "verify", "suite": self.suite, "seed": self.seed, "params": self.params, "only": [case.index]}

    def to_json(self):
        return {
            "suite": self.suite,
            "seed": self.seed,
            "params": self.params,
            "passed": self.passed,
            "total": len(self.cases),
            "failures": [
                {"case": c.index, "detail": c.detail, "replay": self.replay_job(c)} for c in self.failed
            ],
            "cases": [{"case": c.index, "ok": c.ok, "detail": c.detail, **c.data} for c in self.cases],
        }


def _lx(c):
    return c if isinstance(c, LaurentX) else LaurentX.const(Fraction(c))


def _cfg(params, rng, default=(2, 3)):
    q = params.get("q")
    return FieldConfig(q if q else rng.choice(default))


# ---------------------------------------------------------------------------
# measures on F


def expected_measure(q, i, j):
    """``q^-j X^i`` written directly."""
    return LaurentX({i: Fraction(q) ** -j})


def case_measure_formula(params, rng, index):
    qs = params.get("qs") or ([params["q"]] if params.get("q") else [2, 3])
    q = qs[(index // 49) % len(qs)]
    i, j = divmod(index % 49, 7)
    i, j = i - 3, j - 3
    cfg = FieldConfig(q)
    D = DistinguishedSet(FElem.zero(cfg), i, j)
    want = expected_measure(q, i, j)
    got, orc = dist_measure(D), oracle_measure(D)
    ok = got == want == orc
    return CaseResult(index, ok, f"q={q} t2^{i} t1^{j} O: engine {got}, oracle {orc}, expected {want}")


def random_ball_inside(cfg, rng, D, deeper):
    """A distinguished set strictly inside ``D``; ``deeper`` moves down a t2-stratum."""
    if deeper:
        g = D.gamma + rng.randint(1, 2)
        d = rng.randint(-2, 2)
        a = D.a + random_felem(cfg, rng, D.gamma, g, D.delta, D.delta + 2) if D.gamma < g else D.a
        # the centre must stay inside D
        a = D.a + FElem.monomial(cfg, D.gamma, D.delta, rng.randrange(cfg.q)) if not D.contains(a) else a
        return DistinguishedSet(a, g, d)
    d = D.delta + rng.randint(1, 2)
    a = D.a + FElem.monomial(cfg, D.gamma, D.delta, rng.randrange(cfg.q))
    a = a + FElem.monomial(cfg, D.gamma, d - 1, rng.randrange(cfg.q))
    return DistinguishedSet(a, D.gamma, d)


def case_additivity(params, rng, index):
    cfg = _cfg(params, rng)
    parent = DistinguishedSet(FElem.zero(cfg), 0, 0) if index % 2 == 0 else DistinguishedSet(
        random_felem(cfg, rng, -1, 1, -1, 2), rng.randint(-2, 2), rng.randint(-2, 2))
    pieces = [Leaf(parent)]
    for _ in range(rng.randint(1, 4)):
        k = rng.randrange(len(pieces))
        piece = pieces[k]
        if not isinstance(piece, Leaf):
            continue
        D = piece.ball
        if rng.random() < 0.5:
            pieces[k:k + 1] = [Leaf(c) for c in D.children()]
        else:
            B = random_ball_inside(cfg, rng, D, deeper=True)
            pieces[k:k + 1] = [Difference(piece, Leaf(B)), Leaf(B)]
    total = LaurentX.zero()
    ok = True
    for p in pieces:
        m = dist_measure(ring_normalize(p))
        if m != oracle_measure(p):
            ok = False
        total = total + m
    want = parent.measure()
    ok = ok and total == want
    for _ in range(10):
        x = parent.a + random_felem(cfg, rng, parent.gamma, parent.gamma + 3, parent.delta, parent.delta + 3)
        if sum(p.contains(x) for p in pieces) != parent.contains(x):
            ok = False
    return CaseResult(index, ok, f"{len(pieces)} pieces of {parent}: sum {total}, parent {want}")


def random_expr(cfg, rng, count=None):
    balls = []
    for _ in range(count or rng.randint(1, 4)):
        balls.append(DistinguishedSet(random_felem(cfg, rng, 0, 3, 0, 3), rng.randint(0, 2), rng.randint(0, 2)))
    e = Leaf(balls[0])
    for b in balls[1:]:
        op = rng.choice("udi")
        e = e | Leaf(b) if op == "u" else (e - Leaf(b) if op == "d" else e & Leaf(b))
    return e


def map_expr(e, fn):
    """Apply ``fn`` to every distinguished set of an expression."""
    if isinstance(e, Leaf):
        return Leaf(fn(e.ball))
    if isinstance(e, Union):
        return Union(tuple(map_expr(p, fn) for p in e.parts))
    if isinstance(e, Intersection):
        return Intersection(tuple(map_expr(p, fn) for p in e.parts))
    if isinstance(e, Difference):
        return Difference(map_expr(e.left, fn), map_expr(e.right, fn))
    raise TypeError(type(e).__name__)


def case_invariance(params, rng, index):
    cfg = _cfg(params, rng)
    e = random_expr(cfg, rng)
    base = dist_measure(ring_normalize(e))
    a = random_felem(cfg, rng, -2, 3, -2, 3)
    moved = map_expr(e, lambda D: D.translate(a))
    g = random_felem(cfg, rng, -2, 3, -2, 3, nonzero=True)
    scaled = map_expr(e, lambda D: D.scale(g))
    factor = g.abs().to_laurent(cfg.q)
    t_eng, t_orc = dist_measure(ring_normalize(moved)), oracle_measure(moved)
    s_eng, s_orc = dist_measure(ring_normalize(scaled)), oracle_measure(scaled)
    ok = t_eng == t_orc == base and s_eng == s_orc == factor * base
    pts_ok = True
    for _ in range(5):
        x = random_felem(cfg, rng, 0, 3, 0, 3)
        if moved.contains(x + a) != e.contains(x) or scaled.contains(g * x) != e.contains(x):
            pts_ok = False
    return CaseResult(index, ok and pts_ok, f"mu(S)={base}, mu(a+S)={t_eng}/{t_orc}, mu(gS)={s_eng}/{s_orc}, |g|={factor}")


def case_oracle(params, rng, index):
    cfg = _cfg(params, rng)
    if index % 2 == 0:
        e = random_expr(cfg, rng)
        eng, orc = dist_measure(ring_normalize(e)), oracle_measure(e)
        return CaseResult(index, eng == orc, f"measure {eng} vs oracle {orc}")
    terms = [(rng.choice((1, 2, -1, Fraction(1, 2))), random_expr(cfg, rng, rng.randint(1, 3))) for _ in range(rng.randint(1, 3))]
    eng = LaurentX.zero()
    for c, e in terms:
        eng = eng + _lx(c) * dist_measure(ring_normalize(e))
    orc = oracle_integral(terms)
    return CaseResult(index, eng == orc, f"integral {eng} vs oracle {orc}")


# ---------------------------------------------------------------------------
# integration on F^n


def random_efunction(cfg, rng, d):
    lo = tuple(rng.randint(-1, 1) for _ in range(d))
    hi = tuple(l + rng.randint(0, 2) for l in lo)
    return EFunction.from_predicate(cfg, lo, hi, lambda k: rng.choice((0, 0, 1, 2, -1)))


def random_simple(cfg, rng, n, terms=2):
    f = SimpleFn(n)
    for _ in range(terms):
        g = random_efunction(cfg, rng, n)
        a = [random_felem(cfg, rng, -1, 2, -1, 2) for _ in range(n)]
        gam = [rng.randint(-1, 2) for _ in range(n)]
        f = f + SimpleFn.lift(g, a, gam, coef=rng.randint(1, 3))
    return f


def case_fubini(params, rng, index):
    cfg = _cfg(params, rng)
    n = params.get("n") or 2
    f = random_simple(cfg, rng, n, rng.randint(1, 3))
    vals = fubini_values(f)
    distinct = {str(v) for v in vals.values()}
    return CaseResult(index, len(distinct) == 1, f"n={n}: {len(vals)} orders, values {sorted(distinct)}")


def random_monomial_matrix(cfg, rng, n, diagonal=False):
    perm = list(range(n))
    if not diagonal:
        rng.shuffle(perm)
    rows = [[FElem.zero(cfg)] * n for _ in range(n)]
    for i in range(n):
        rows[i][perm[i]] = FElem.monomial(cfg, rng.randint(-1, 1), rng.randint(-1, 1), rng.randrange(1, cfg.q))
    return MatF(cfg, rows)


def case_change_of_variables(params, rng, index):
    cfg = _cfg(params, rng)
    n = params.get("n") or rng.choice((1, 2))
    f = random_simple(cfg, rng, n)
    tau = random_monomial_matrix(cfg, rng, n, diagonal=index % 2 == 0)
    g, val = transform_linear(f, tau)
    want = abs_det(tau).inverse().to_laurent(cfg.q) * integrate_Fn(f)
    ok = val == want
    for _ in range(10):
        if rng.random() < 0.5:
            x = [random_felem(cfg, rng, -2, 3, -2, 3) for _ in range(n)]
        else:
            t = g.terms[rng.randrange(len(g.terms))]
            x = [a + FElem.monomial(cfg, gm, rng.randint(-2, 2), rng.randrange(cfg.q)) for a, gm in zip(t.a, t.gamma)]
        tx = [sum((tau[i, j] * x[j] for j in range(n)), FElem.zero(cfg)) for i in range(n)]
        if g(x) != f(tx):
            ok = False
    return CaseResult(index, ok, f"n={n}: integral after substitution {val}, |det|^-1 * integral {want}")


# ---------------------------------------------------------------------------
# GL_n


def case_gl_bridge(params, rng, index):
    n = params.get("n") or (1 + index % 2)
    cfg = FieldConfig(params.get("q") or 2)
    classes = list(congruence_enumerate(cfg, n, 1))
    table = {k: 1 for k in classes if rng.random() < 0.5} or {classes[0]: 1}
    f = BasicFn.unit(MatF.identity(cfg, n), 1, table)
    lhs = integrate_GLn(f)
    lhs_fine = integrate_GLn(f.raise_level(2)) if n == 1 else lhs
    rhs = integrate_GLn_E(cfg, n, 1, table)
    ok = lhs == rhs == lhs_fine
    return CaseResult(index, ok, f"n={n}: GL_n(F) side {lhs}, GL_n(E) side {rhs}, {len(table)} classes")


def random_product_pair(cfg, n, rng):
    f1 = random_basic(cfg, n, rng, level=1)
    q = cfg.q
    N = MatF(cfg, [[FElem.monomial(cfg, rng.randint(1, 2), rng.randint(0, 1), rng.randrange(q)) for _ in range(n)] for _ in range(n)])
    base2 = f1.A * (MatF.identity(cfg, n) + N)
    if rng.random() < 0.5:
        f2 = random_cong_basic(cfg, n, rng, level=1, base=base2, uniform=(n == 1 or rng.random() < 0.5))
    elif f1.kind == "cong":
        f2 = random_unit_basic(cfg, n, rng, level=rng.choice((0, 1)), base=base2)
    else:
        f2 = random_cong_basic(cfg, n, rng, base=base2)
    return f1, f2


def case_products(params, rng, index):
    n = params.get("n") or rng.choice((1, 2))
    cfg = FieldConfig(params.get("q") or (2 if n == 2 else rng.choice((2, 3))))
    points = params.get("points", 1000)
    f1, f2 = random_product_pair(cfg, n, rng)
    p = basic_product(f1, f2)
    if p and not isinstance(p, BasicFn):
        return CaseResult(index, False, "product is not a basic function")
    atoms = [a for a, _ in f1.atoms()] + [a for a, _ in f2.atoms()] + ([a for a, _ in p.atoms()] if p else [])
    bad = 0
    for _ in range(points):
        x = atoms[rng.randrange(len(atoms))].random_point(rng)
        got = p(x) if p else LaurentX.zero()
        if got != f1(x) * f2(x):
            bad += 1
    return CaseResult(index, bad == 0, f"n={n} q={cfg.q}: {points} points, {bad} disagreements, product {p!r}",
                      {"nonempty": bool(p)})


def unit_char(cfg, a, b):
    return BasicFn.char_unit_group(cfg, 1, MatF(cfg, [[FElem.monomial(cfg, a, b)]]))


def case_convolution(params, rng, index):
    q = params.get("q") or (2, 3)[index % 2]
    cfg = FieldConfig(q)
    half = LaurentX.const(1 - Fraction(1, q))
    e = unit_char(cfg, 0, 0)
    ok_e = convolve(e, e) == HeckeElem.from_basic(e).scale(half)
    a1, b1, a2, b2 = (rng.randint(-3, 3) for _ in range(4))
    f1, f2 = unit_char(cfg, a1, b1), unit_char(cfg, a2, b2)
    ok_g = convolve(f1, f2) == HeckeElem.from_basic(unit_char(cfg, a1 + a2, b1 + b2)).scale(half)
    return CaseResult(index, ok_e and ok_g, f"q={q}: e*e {ok_e}; f_(t2^{a1} t1^{b1}) * f_(t2^{a2} t1^{b2}) {ok_g}")


def _assoc_inputs(params, rng):
    n = params.get("n") or 1
    if n == 1:
        cfg = FieldConfig(params.get("q") or rng.choice((2, 3)))
        level = params.get("level") or (rng.choice((1, 2)) if cfg.q == 2 else 1)
    else:
        cfg = FieldConfig(params.get("q") or 2)
        level = params.get("level") or 1
    return cfg, n, level


def case_associativity(params, rng, index):
    cfg, n, level = _assoc_inputs(params, rng)
    f1, f2, f3 = (random_basic(cfg, n, rng, level=level) for _ in range(3))
    left = convolve(convolve(f1, f2), f3)
    right = convolve(f1, convolve(f2, f3))
    ok = left == right
    return CaseResult(index, ok, f"n={n} q={cfg.q} level={level}: {len(left.atoms)} atoms",
                      {"nonzero": not left.is_zero()})


def case_class_independence(params, rng, index):
    cfg, n, level = _assoc_inputs(params, rng)
    reps = params.get("reps", 10)
    b1, b2 = random_basic(cfg, n, rng, level=level), random_basic(cfg, n, rng, level=level)
    rows = class_values_at(b1, b2, rng, reps)
    bad = [str(cl) for cl, vals in rows if len(set(vals)) != 1]
    return CaseResult(index, not bad, f"{len(rows)} classes x {reps} representatives; varying: {bad}",
                      {"classes": len(rows), "reps": reps})


def case_action(params, rng, index):
    cfg, n, level = _assoc_inputs(params, rng)
    f1, f2, v = (random_basic(cfg, n, rng, level=level) for _ in range(3))
    lhs = hecke_action(convolve(f1, f2), v)
    rhs = hecke_action(f1, hecke_action(f2, v))
    h = nice_base(cfg, n, rng)
    moved = translate_action(h, as_vector(v))
    inv_ok = integrate_GLn(moved) == integrate_GLn(as_vector(v))
    return CaseResult(index, lhs == rhs and inv_ok, f"pi(f1*f2)v == pi(f1)pi(f2)v: {lhs == rhs}; translation keeps integral: {inv_ok}",
                      {"nonzero": not lhs.is_zero()})


# ---------------------------------------------------------------------------
# stabilizers and double cosets


def case_stabilizer(params, rng, index):
    n = params.get("n") or (1 + index % 2)
    cfg = FieldConfig(params.get("q") or 2)
    level = params.get("level") or 1
    ident = MatF.identity(cfg, n)
    if index % 2 == 0:
        f = random_cong_basic(cfg, n, rng, level=level, base=ident, density=rng.choice((0.3, 1.0)))
    else:
        f = random_unit_basic(cfg, n, rng, level=level, base=ident, density=rng.choice((0.4, 1.0)))
    S = stabilizer(f)
    found = stabilizer_search(f)
    measurable = integrate_GLn(S.indicator())
    ok = S.H == found and S.is_group() and not S.is_trivial
    return CaseResult(index, ok, f"{f.kind} n={n}: |H| closed form {len(S.H)}, exhaustive {len(found)}, measure {measurable}",
                      {"order": len(S.H)})


def case_stabilizer_trivial(params, rng, index):
    """The claim that a term based away from the identity has stabilizer {I}."""
    n = params.get("n") or (1 + index % 2)
    cfg = FieldConfig(params.get("q") or 2)
    A = nice_base(cfg, n, rng)
    while A.is_identity():
        A = nice_base(cfg, n, rng)
    f = random_cong_basic(cfg, n, rng, level=1, base=A)
    S = stabilizer(f)
    # an explicit non-identity stabilizer element: A (I + t2^Gamma t1 E11) A^-1
    k = MatF.identity(cfg, n) + MatF.unflatten(cfg, n, [FElem.monomial(cfg, f.gamma[0][0], 1)] + [FElem.zero(cfg)] * (n * n - 1))
    h = A * k * A.inverse()
    fixed = (translate_action(h, as_vector(f)) - as_vector(f)).is_zero()
    ok = S.is_trivial and not fixed
    return CaseResult(index, ok, f"A={A.to_literal()}: stabilizer {S.describe()}; h={h.to_literal()} fixes v: {fixed}")


def case_double_coset(params, rng, index):
    n = params.get("n") or (1 + index % 2)
    cfg = FieldConfig(params.get("q") or 2)
    points = params.get("points", 1000)
    kind = "unit" if index % 3 == 2 else "cong"
    if kind == "unit":
        level = 2 if n == 1 else 1
        lo = 0
    else:
        level = 1
        lo = -1 if (n == 1 and index % 3 == 1) else 0
    f = random_bi_invariant(cfg, n, rng, level=level, kind=kind, lo=lo)
    M = bi_invariance_group(f)
    D = double_coset_decompose(f, M, bound=0)
    bad = checked = 0
    for x in sample_points(f, rng, points):
        if not D.within_bound(x):
            continue
        checked += 1
        if D.reconstruct(x) != f(x):
            bad += 1
    return CaseResult(index, bad == 0, f"{kind} n={n}: |H|={len(M.H)}, {len(D.terms)} double cosets, truncated={D.truncated}, "
                      f"{checked} points checked, {bad} disagreements", {"checked": checked})


# ---------------------------------------------------------------------------
# registry and runner


@dataclass(frozen=True)
class Suite:
    name: str
    case: object
    default_cases: int
    description: str


SUITES = {s.name: s for s in (
    Suite("measure-formula", case_measure_formula, 98, "mu(t2^i t1^j O) = q^-j X^i on [-3,3]^2"),
    Suite("additivity", case_additivity, 100, "random refinements sum to the parent measure"),
    Suite("invariance", case_invariance, 200, "translation and scaling of random sets"),
    Suite("oracle", case_oracle, 100, "engine measures and integrals against the counting oracle"),
    Suite("fubini", case_fubini, 50, "all integration orders agree"),
    Suite("change-of-variables", case_change_of_variables, 50, "monomial substitutions scale by |det|^-1"),
    Suite("gl-bridge", case_gl_bridge, 20, "GL_n(F) integral of a lift equals the GL_n(E) integral"),
    Suite("products", case_products, 100, "products of basic functions, checked by sampling"),
    Suite("convolution", case_convolution, 20, "e*e and the graded law on GL_1"),
    Suite("associativity", case_associativity, 20, "(f1*f2)*f3 = f1*(f2*f3)"),
    Suite("class-independence", case_class_independence, 10, "convolution values constant on classes"),
    Suite("action", case_action, 20, "pi(f1*f2) = pi(f1) pi(f2)"),
    Suite("stabilizer", case_stabilizer, 20, "closed-form stabilizer equals exhaustive search"),
    Suite("stabilizer-trivial", case_stabilizer_trivial, 10, "terms away from the identity have trivial stabilizer"),
    Suite("double-coset", case_double_coset, 12, "double-coset reconstruction agrees pointwise"),
)}


def case_rng(suite, seed, index):
    return random.Random(f"{suite}:{seed}:{index}")


def _run_case(args):
    name, seed, params, index = args
    suite = SUITES[name]
    try:
        return suite.case(params, case_rng(name, seed, index), index)
    except Exception as ex:  # a crash is a failed case with its reason attached
        return CaseResult(index, False, f"{type(ex).__name__}: {ex}")


def get_suite(name):
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))}")
    return SUITES[name]


def run_verify(suite, seed=0, cases=None, params=None, parallel=0, only=None):
    """Run a suite; results are ordered by case index whatever the schedule."""
    s = get_suite(suite)
    params = dict(params or {})
    indices = list(only) if only is not None else list(range(cases if cases is not None else s.default_cases))
    work = [(suite, seed, params, i) for i in indices]
    start = time.perf_counter()
    if parallel and parallel > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(_run_case, work))
    else:
        results = [_run_case(w) for w in work]
    results.sort(key=lambda r: r.index)
    return SuiteReport(suite, seed, params, results, time.perf_counter() - start)
