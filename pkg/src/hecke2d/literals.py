"""Text and JSON literals for sets, matrices and functions.

Set grammar (whitespace ignored between tokens)::

    expr   := term (('|' | '&' | '-') term)*
    term   := '(' expr ')' | dist | ball | box | prod | coset
    dist   := 'dist(' felem ';' int ',' int ')'
    ball   := 'ball(' felem ';' int ')'
    box    := 'box[' ball (';' ball)* ']'
    prod   := 'prod[' dist (';' dist)* ']'
    coset  := 'coset(' matrix ';' intmatrix ';' classes '@' window ')'
    matrix := '[' '[' felem (',' felem)* ']' (',' '[' ... ']')* ']'
    classes:= 'full' | '{' (class (';' class)*)? '}'
    class  := '[' digits (',' digits)* ']'        row-major entries
    digits := '_' | int ('.' int)*                t1-digits from t1^lo
    window := level | lo '..' level

``|``, ``&`` and ``-`` combine distinguished sets only.
"""

from fractions import Fraction

from .cosets import GLCongCoset
from .errors import ParseError
from .field import parse_felem
from .hecke import BasicFn, HeckeElem
from .laurent import LaurentX, parse_laurent
from .linalg import MatF
from .sets import Ball, Box, DistinguishedSet, SetExpr, as_expr


class _SetParser:
    def __init__(self, cfg, text):
        self.cfg = cfg
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise ParseError(msg, self.pos, self.text)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def eat(self, s):
        self.skip()
        if self.text.startswith(s, self.pos):
            self.pos += len(s)
            return True
        return False

    def expect(self, s):
        if not self.eat(s):
            self.error(f"expected {s!r}")

    def integer(self):
        self.skip()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] in "+-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        try:
            return int(self.text[start:self.pos])
        except ValueError:
            self.pos = start
            self.error("expected an integer")

    def chunk(self, stops):
        """Raw text up to the next top-level stop character."""
        self.skip()
        start, depth = self.pos, 0
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if depth == 0 and ch in stops:
                break
            depth += ch == "("
            depth -= ch == ")"
            self.pos += 1
        return start, self.text[start:self.pos].strip()

    def felem(self, stops):
        start, raw = self.chunk(stops)
        if not raw:
            self.error("expected a field element")
        try:
            return parse_felem(self.cfg, raw)
        except ParseError as ex:
            offset = start + (ex.position or 0)
            raise ParseError(f"bad field element {raw!r}", offset, self.text) from None

    # grammar -----------------------------------------------------------------
    def parse(self):
        val = self.expr()
        self.skip()
        if self.pos != len(self.text):
            self.error("trailing input")
        return val

    def expr(self):
        val = self.term()
        while True:
            self.skip()
            at = self.pos
            for op in "|&-":
                if self.eat(op):
                    rhs = self.term()
                    val = self._combine(op, val, rhs, at)
                    break
            else:
                return val

    def _combine(self, op, a, b, at):
        try:
            a, b = as_expr(a), as_expr(b)
        except TypeError:
            self.pos = at
            self.error("set operators only combine distinguished sets")
        return {"|": a.__or__, "&": a.__and__, "-": a.__sub__}[op](b)

    def term(self):
        if self.eat("("):
            val = self.expr()
            self.expect(")")
            return val
        if self.eat("dist("):
            return self.dist_body()
        if self.eat("ball("):
            return self.ball_body()
        if self.eat("box["):
            return Box(self.bracket_list("ball(", self.ball_body))
        if self.eat("prod["):
            return tuple(self.bracket_list("dist(", self.dist_body))
        if self.eat("coset("):
            return self.coset_body()
        self.error("expected dist, ball, box, prod, coset or '('")

    def bracket_list(self, head, body):
        items = []
        while True:
            self.expect(head)
            items.append(body())
            if self.eat("]"):
                return items
            self.expect(";")

    def dist_body(self):
        a = self.felem(";")
        self.expect(";")
        g = self.integer()
        self.expect(",")
        d = self.integer()
        self.expect(")")
        return DistinguishedSet(a, g, d)

    def ball_body(self):
        a = self.felem(";")
        self.expect(";")
        g = self.integer()
        self.expect(")")
        return Ball(a, g)

    def matrix(self):
        self.expect("[")
        rows = []
        while True:
            self.expect("[")
            row = [self.felem(",]")]
            while self.eat(","):
                row.append(self.felem(",]"))
            self.expect("]")
            rows.append(row)
            if self.eat("]"):
                break
            self.expect(",")
        if any(len(r) != len(rows) for r in rows):
            self.error("matrix must be square")
        return MatF(self.cfg, rows)

    def int_matrix(self):
        self.expect("[")
        rows = []
        while True:
            self.expect("[")
            row = [self.integer()]
            while self.eat(","):
                row.append(self.integer())
            self.expect("]")
            rows.append(tuple(row))
            if self.eat("]"):
                return tuple(rows)
            self.expect(",")

    def digits(self):
        if self.eat("_"):
            return ()
        out = [self.integer()]
        while self.eat("."):
            out.append(self.integer())
        if any(not 0 <= d < self.cfg.q for d in out):
            self.error(f"digit out of range for q={self.cfg.q}")
        return tuple(out)

    def classes(self):
        if self.eat("full"):
            return None
        self.expect("{")
        out = []
        if self.eat("}"):
            return out
        while True:
            self.expect("[")
            key = [self.digits()]
            while self.eat(","):
                key.append(self.digits())
            self.expect("]")
            out.append(tuple(key))
            if self.eat("}"):
                return out
            self.expect(";")

    def coset_body(self):
        A = self.matrix()
        self.expect(";")
        gamma = self.int_matrix()
        self.expect(";")
        classes = self.classes()
        self.expect("@")
        lo, level = 0, self.integer()
        if self.eat(".."):
            lo, level = level, self.integer()
        self.expect(")")
        if classes is None:
            return GLCongCoset(A, gamma)
        return GLCongCoset(A, gamma, level, lo, frozenset(classes))


def parse_set(cfg, text):
    """Parse a set literal; see the module docstring for the grammar."""
    if not isinstance(text, str):
        raise ParseError(f"set literal must be a string, got {type(text).__name__}")
    return _SetParser(cfg, text).parse()


def format_digits(d):
    return ".".join(str(x) for x in d) if d else "_"


def format_class(key):
    return "[" + ",".join(format_digits(d) for d in key) + "]"


def parse_class(cfg, text):
    p = _SetParser(cfg, text)
    p.expect("[")
    key = [p.digits()]
    while p.eat(","):
        key.append(p.digits())
    p.expect("]")
    p.skip()
    if p.pos != len(text):
        p.error("trailing input")
    return tuple(key)


def parse_coeff(value):
    """A LaurentX from an int, a ``p/q`` string or the rendered form."""
    if isinstance(value, LaurentX):
        return value
    if isinstance(value, int):
        return LaurentX.const(Fraction(value))
    if isinstance(value, str):
        return parse_laurent(value)
    raise ParseError(f"bad coefficient {value!r}")


def parse_matrix(cfg, literal):
    if isinstance(literal, str):
        return _SetParser(cfg, literal).matrix()
    if not isinstance(literal, list) or not literal or any(not isinstance(r, list) for r in literal):
        raise ParseError("matrix literal must be a nested list of field-element strings")
    try:
        M = MatF.parse(cfg, literal)
    except ParseError as ex:
        raise ParseError(f"bad matrix entry: {ex}") from None
    if any(len(r) != len(literal) for r in literal):
        raise ParseError("matrix must be square")
    return M


def _values(cfg, raw):
    if isinstance(raw, dict):
        raw = list(raw.items())
    out = {}
    for item in raw:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise ParseError(f"value entry {item!r} must be a [class, coefficient] pair")
        key, coef = item
        key = parse_class(cfg, key) if isinstance(key, str) else tuple(tuple(d) for d in key)
        out[key] = parse_coeff(coef)
    return out


def parse_function(cfg, obj):
    """A basic function or Hecke element on GL_n(F) from a JSON object.

    ``{"basic": "cong", "A", "Gamma", "level", "lo", "values"}``,
    ``{"basic": "unit", "A", "level", "values"}`` (level 0 takes a single
    value under ``"value"``), ``{"char": coset-literal}`` or
    ``{"sum": [[coefficient, function], ...]}``."""
    if isinstance(obj, str):
        obj = {"char": obj}
    if not isinstance(obj, dict):
        raise ParseError(f"function literal must be an object, got {type(obj).__name__}")
    if "sum" in obj:
        parts = [parse_function(cfg, f) for _, f in obj["sum"]]
        coefs = [parse_coeff(c) for c, _ in obj["sum"]]
        total = None
        for c, f in zip(coefs, parts):
            h = (f if isinstance(f, HeckeElem) else HeckeElem.from_basic(f)).scale(c)
            total = h if total is None else total + h
        return total
    if "char" in obj:
        C = parse_set(cfg, obj["char"])
        if not isinstance(C, GLCongCoset):
            raise ParseError("char needs a coset literal")
        return BasicFn.char_coset(C, parse_coeff(obj.get("value", 1)))
    kind = obj.get("basic")
    A = parse_matrix(cfg, obj["A"])
    level = int(obj.get("level", 0))
    if kind == "unit":
        if level == 0:
            return BasicFn.unit(A, 0, {((),) * (A.n * A.n): parse_coeff(obj.get("value", 1))})
        return BasicFn.unit(A, level, _values(cfg, obj["values"]))
    if kind == "cong":
        gamma = tuple(tuple(int(x) for x in r) for r in obj["Gamma"])
        return BasicFn.cong(A, gamma, level, _values(cfg, obj["values"]), int(obj.get("lo", 0)))
    raise ParseError(f"unknown function kind {kind!r}")


def function_literal(f):
    """JSON literal of a basic function (inverse of :func:`parse_function`)."""
    out = {"A": f.A.to_literal(), "level": f.level}
    if f.gamma is None:
        out["basic"] = "unit"
        if f.level == 0:
            out["value"] = str(f.values.get(f.unit_key(), LaurentX.zero()))
            return out
    else:
        out.update(basic="cong", Gamma=[list(r) for r in f.gamma], lo=f.lo)
    out["values"] = [[format_class(k), str(v)] for k, v in sorted(f.values.items())]
    return out


def is_set_expr(obj):
    return isinstance(obj, (SetExpr, DistinguishedSet))

