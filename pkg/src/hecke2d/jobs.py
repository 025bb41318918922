"""Batch jobs: schema validation, dispatch and result documents."""

import logging
from dataclasses import dataclass, field

import jsonschema

from .cosets import GLCongCoset
from .efunction import EFunction
from .errors import NotAdmissible, ParseError, UnsupportedByOracle
from .field import FieldConfig
from .gf import factor_prime_power
from .hecke import BasicFn, HeckeElem, convolve, hecke_structure_constants
from .integration import SimpleFn, integrate_Fn, integrate_GLn
from .laurent import LaurentX
from .linalg import DEFAULT_BUDGET
from .literals import function_literal, parse_class, parse_coeff, parse_function, parse_set
from .oracle import oracle_integral, oracle_measure
from .representations import bi_invariance_group, double_coset_decompose, stabilizer
from .sets import Ball, Box, DistinguishedSet, SetExpr, dist_measure, ring_normalize
from .verify import run_verify

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
OPS = ("measure", "integrate", "convolve", "hecke-table", "stabilizer", "bicoset", "verify")

_CONFIG = {
    "version": {"const": SCHEMA_VERSION},
    "q": {"type": "integer", "minimum": 2},
    "n": {"type": "integer", "minimum": 1},
    "t1_prec": {"type": "integer", "minimum": 1},
    "t2_prec": {"type": "integer", "minimum": 1},
    "level": {"type": "integer", "minimum": 0},
    "budget": {"type": "integer", "minimum": 1},
    "seed": {"type": "integer"},
    "format": {"enum": ["json", "text", "csv"]},
}
_FUNCTION = {"type": ["object", "string"]}
_OP_FIELDS = {
    "measure": ({"set": {"type": "string"}}, ["set"]),
    "integrate": ({
        "space": {"enum": ["F", "F^n", "GL_n"]},
        "function": {},
        "order": {"type": "array", "items": {"type": "integer", "minimum": 0}},
    }, ["space", "function"]),
    "convolve": ({"f1": _FUNCTION, "f2": _FUNCTION}, ["f1", "f2"]),
    "hecke-table": ({"basis": {"type": "array", "items": _FUNCTION, "minItems": 1}}, ["basis"]),
    "stabilizer": ({"vector": _FUNCTION}, ["vector"]),
    "bicoset": ({"vector": _FUNCTION, "bound": {"type": "integer", "minimum": 0}}, ["vector"]),
    "verify": ({
        "suite": {"type": "string"},
        "cases": {"type": "integer", "minimum": 0},
        "params": {"type": "object"},
        "only": {"type": "array", "items": {"type": "integer", "minimum": 0}},
    }, ["suite"]),
}


def job_schema(op):
    props, required = _OP_FIELDS[op]
    return {
        "type": "object",
        "properties": {"op": {"const": op}, **_CONFIG, **props},
        "required": ["op", *required],
        "additionalProperties": False,
    }


@dataclass
class JobSpec:
    op: str
    q: int = 2
    n: int = 1
    t1_prec: int = 12
    t2_prec: int = 8
    level: int = 1
    budget: int = DEFAULT_BUDGET
    seed: int = 0
    format: str = "json"
    parallel: int = 0
    operands: dict = field(default_factory=dict)

    @property
    def cfg(self):
        return FieldConfig(self.q, self.t1_prec, self.t2_prec)


def validate_job(doc, where="job"):
    """A JobSpec from a JSON object; errors carry the offending path."""
    if not isinstance(doc, dict):
        raise ParseError(f"{where}: a job must be a JSON object")
    op = doc.get("op")
    if op not in OPS:
        raise ParseError(f"{where}/op: unknown operation {op!r}; expected one of {', '.join(OPS)}")
    try:
        jsonschema.validate(doc, job_schema(op))
    except jsonschema.ValidationError as ex:
        path = "/".join(str(p) for p in ex.absolute_path)
        raise ParseError(f"{where}/{path}: {ex.message}") from None
    if "q" in doc:
        try:
            factor_prime_power(doc["q"])
        except ValueError as ex:
            raise ParseError(f"{where}/q: {ex}") from None
    config = {k: doc[k] for k in _CONFIG if k in doc and k != "version"}
    operands = {k: v for k, v in doc.items() if k not in _CONFIG and k != "op"}
    return JobSpec(op=op, operands=operands, **config)


def parse_job_file(doc):
    """A single job object or ``{"version": 1, "jobs": [...]}``."""
    if isinstance(doc, dict) and "jobs" in doc:
        if doc.get("version", SCHEMA_VERSION) != SCHEMA_VERSION:
            raise ParseError(f"version: unsupported schema version {doc.get('version')!r}")
        defaults = {k: v for k, v in doc.items() if k not in ("jobs", "version")}
        return [validate_job({**defaults, **j} if isinstance(j, dict) else j, f"jobs/{i}") for i, j in enumerate(doc["jobs"])]
    return [validate_job(doc)]


# ---------------------------------------------------------------------------
# operand helpers


def _set_measure(cfg, S, budget):
    if isinstance(S, tuple):
        return dist_measure(S)
    if isinstance(S, (DistinguishedSet, SetExpr)):
        return dist_measure(ring_normalize(S, budget))
    if isinstance(S, GLCongCoset):
        if S.is_full:
            raise NotAdmissible("a full-residue coset has infinite measure")
        return integrate_GLn(BasicFn.char_coset(S))
    if isinstance(S, (Ball, Box)):
        raise NotAdmissible("rank-one balls and boxes have infinite measure")
    raise ParseError(f"cannot measure {type(S).__name__}")


def _set_terms(cfg, raw):
    if not isinstance(raw, list):
        raise ParseError("function on F must be a list of [coefficient, set literal] pairs")
    terms = []
    for i, item in enumerate(raw):
        if not isinstance(item, list) or len(item) != 2:
            raise ParseError(f"function/{i}: expected [coefficient, set literal]")
        terms.append((parse_coeff(item[0]), parse_set(cfg, item[1])))
    return terms


def _lift_terms(cfg, raw, n):
    f = SimpleFn(n)
    for i, t in enumerate(raw):
        try:
            a = [cfg.parse(x) for x in t["a"]]
            vals = {parse_class(cfg, k) if isinstance(k, str) else tuple(tuple(d) for d in k): parse_coeff(v) for k, v in t["values"]}
            g = EFunction(cfg, t["lo"], t["hi"], vals)
            f = f + SimpleFn.lift(g, a, t["gamma"], coef=parse_coeff(t.get("coef", 1)), shift=0)
        except (KeyError, TypeError) as ex:
            raise ParseError(f"function/{i}: malformed lift ({ex})") from None
    return f


def _as_hecke(f):
    return f if isinstance(f, HeckeElem) else HeckeElem.from_basic(f)


def hecke_document(h):
    h = _as_hecke(h).normalize()
    return {
        "atoms": [[c, s] for c, s in h.describe()],
        "terms": [function_literal(b) for b in h.basic_terms()],
    }


# ---------------------------------------------------------------------------
# dispatch


def _measure(spec):
    S = parse_set(spec.cfg, spec.operands["set"])
    return {"measure": str(_set_measure(spec.cfg, S, spec.budget))}


def _integrate(spec):
    cfg, ops = spec.cfg, spec.operands
    space = ops["space"]
    if space == "F":
        total = LaurentX.zero()
        for c, S in _set_terms(cfg, ops["function"]):
            total = total + c * _set_measure(cfg, S, spec.budget)
        return {"integral": str(total)}
    if space == "F^n":
        f = _lift_terms(cfg, ops["function"], spec.n)
        return {"integral": str(integrate_Fn(f, ops.get("order")))}
    return {"integral": str(integrate_GLn(parse_function(cfg, ops["function"])))}


def _convolve(spec):
    cfg = spec.cfg
    f1, f2 = parse_function(cfg, spec.operands["f1"]), parse_function(cfg, spec.operands["f2"])
    return {"product": hecke_document(convolve(f1, f2))}


def _hecke_table(spec):
    basis = [parse_function(spec.cfg, b) for b in spec.operands["basis"]]
    table = hecke_structure_constants(basis)
    rows = []
    for i, row in enumerate(table):
        for j, (coeffs, rest) in enumerate(row):
            rows.append({
                "i": i,
                "j": j,
                "coefficients": [str(c) for c in coeffs],
                "remainder": [[c, s] for c, s in rest.describe()],
            })
    return {"table": rows}


def _stabilizer(spec):
    S = stabilizer(parse_function(spec.cfg, spec.operands["vector"]), spec.budget)
    return {"stabilizer": S.to_json(), "description": S.describe()}


def _bicoset(spec):
    v = parse_function(spec.cfg, spec.operands["vector"])
    M = bi_invariance_group(v, spec.budget, seed=spec.seed)
    D = double_coset_decompose(v, M, spec.operands.get("bound", 0))
    return {
        "M": M.to_json(),
        "terms": [[g.to_literal(), str(c)] for g, c in D.terms],
        "bound": D.bound,
        "truncated": D.truncated,
        "skipped": D.skipped,
    }


def _verify(spec):
    ops = spec.operands
    params = dict(ops.get("params", {}))
    report = run_verify(ops["suite"], spec.seed, ops.get("cases"), params, spec.parallel, ops.get("only"))
    return {"report": report.to_json(), "ok": report.ok}


_DISPATCH = {
    "measure": _measure,
    "integrate": _integrate,
    "convolve": _convolve,
    "hecke-table": _hecke_table,
    "stabilizer": _stabilizer,
    "bicoset": _bicoset,
    "verify": _verify,
}


def run_job(spec):
    """Result document of one job; identical specs give identical documents."""
    log.info("job %s q=%d n=%d seed=%d", spec.op, spec.q, spec.n, spec.seed)
    out = {"op": spec.op, "q": spec.q}
    out.update(_DISPATCH[spec.op](spec))
    return out


def run_oracle(spec):
    """Measure or integral on F computed by the counting oracle alone."""
    cfg, ops = spec.cfg, spec.operands
    if spec.op == "measure":
        S = parse_set(cfg, ops["set"])
        if not isinstance(S, (DistinguishedSet, SetExpr, tuple)):
            raise UnsupportedByOracle(f"oracle does not handle {type(S).__name__} operands")
        return {"op": "measure", "q": spec.q, "measure": str(oracle_measure(S)), "engine": "oracle"}
    if spec.op == "integrate" and ops["space"] == "F":
        terms = _set_terms(cfg, ops["function"])
        for _, S in terms:
            if not isinstance(S, (DistinguishedSet, SetExpr)):
                raise UnsupportedByOracle(f"oracle does not handle {type(S).__name__} operands")
        return {"op": "integrate", "q": spec.q, "integral": str(oracle_integral(terms)), "engine": "oracle"}
    raise UnsupportedByOracle(f"oracle handles measure and integrate-on-F jobs, not {spec.op}")

