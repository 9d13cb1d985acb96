"""Exact symbolic expressions.

An :class:`Expr` is a canonical sum of terms, each an exact rational
coefficient times a product of powers of symbols and function
applications.  Expressions are immutable and always kept in normal form,
so structural equality is mathematical equality for polynomials over the
supported function applications.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Mapping

from .errors import EvaluationError, ExprError, ParseError

__all__ = [
    "Kind", "Sym", "FuncApp", "Expr", "Binding", "SymbolTable",
    "state", "dstate", "effort", "flow", "control", "param", "TIME",
    "const", "as_expr", "apply", "parse_expr", "differentiate",
    "substitute", "normalize", "evaluate", "evaluate_exact",
    "linear_split", "equal_mod_scale", "lambdify", "FUNCTIONS",
]


class Kind(enum.IntEnum):
    # the value order is the canonical term order
    DSTATE = 0
    EFFORT = 1
    FLOW = 2
    STATE = 3
    CONTROL = 4
    PARAMETER = 5
    TIME = 6


_PREFIX = {
    Kind.DSTATE: "dx",
    Kind.EFFORT: "e",
    Kind.FLOW: "f",
    Kind.STATE: "x",
    Kind.CONTROL: "u",
}

IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Sym:
    kind: Kind
    index: int = 0
    label: str = ""
    key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.label:
            if self.kind == Kind.TIME:
                label = "t"
            elif self.kind == Kind.PARAMETER:
                raise ExprError("parameters need a name")
            else:
                label = f"{_PREFIX[self.kind]}_{self.index}"
            object.__setattr__(self, "label", label)
        object.__setattr__(self, "key", (0, int(self.kind), self.index, self.label))

    def __str__(self):
        return self.label

    @property
    def is_port(self):
        return self.kind in (Kind.EFFORT, Kind.FLOW)

    # arithmetic on a bare symbol promotes it to an expression
    def __add__(self, other):
        return as_expr(self) + other

    def __radd__(self, other):
        return as_expr(other) + as_expr(self)

    def __sub__(self, other):
        return as_expr(self) - other

    def __rsub__(self, other):
        return as_expr(other) - as_expr(self)

    def __mul__(self, other):
        return as_expr(self) * other

    def __rmul__(self, other):
        return as_expr(other) * as_expr(self)

    def __truediv__(self, other):
        return as_expr(self) / other

    def __rtruediv__(self, other):
        return as_expr(other) / as_expr(self)

    def __pow__(self, n):
        return as_expr(self) ** n

    def __neg__(self):
        return -as_expr(self)


def state(i):
    return Sym(Kind.STATE, i)


def dstate(i):
    return Sym(Kind.DSTATE, i)


def effort(i):
    return Sym(Kind.EFFORT, i)


def flow(i):
    return Sym(Kind.FLOW, i)


def control(i):
    return Sym(Kind.CONTROL, i)


def param(name):
    if not IDENTIFIER.match(name):
        raise ExprError(f"invalid parameter name {name!r}")
    return Sym(Kind.PARAMETER, 0, name)


TIME = Sym(Kind.TIME)

# tag -> arity
FUNCTIONS = {
    "sin": 1, "cos": 1, "tan": 1, "exp": 1,
    "log": 1, "sqrt": 1, "abs": 1, "pow": 2,
}


@dataclass(frozen=True)
class FuncApp:
    tag: str
    args: tuple
    key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "key", (1, self.tag, tuple(a.key for a in self.args)))

    def __str__(self):
        return f"{self.tag}({', '.join(str(a) for a in self.args)})"


# sorts after every factor entry of a monomial key
_END = ((2,), 0)


def _mono_key(mono):
    return tuple((f.key, -k) for f, k in mono) + (_END,)


def _mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for f, k in b:
        n = exps.get(f, 0) + k
        if n:
            exps[f] = n
        else:
            del exps[f]
    return tuple(sorted(exps.items(), key=lambda fk: fk[0].key))


def _to_fraction(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ExprError("booleans are not numbers")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ExprError(f"non-finite number {value!r}")
        # the shortest decimal that round-trips, so 0.1 becomes 1/10
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value)
    raise ExprError(f"cannot convert {value!r} to a rational")


class Expr:
    """Canonical polynomial over symbols and function applications."""

    __slots__ = ("terms", "_hash", "_key")

    def __init__(self, terms=()):
        # `terms` must already be canonical; use the module helpers instead
        self.terms = terms
        self._hash = None
        self._key = None

    @classmethod
    def from_dict(cls, d):
        items = [(m, c) for m, c in d.items() if c]
        items.sort(key=lambda mc: _mono_key(mc[0]))
        return cls(tuple(items))

    # -- inspection --------------------------------------------------------
    @property
    def key(self):
        if self._key is None:
            self._key = tuple((_mono_key(m), c) for m, c in self.terms)
        return self._key

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.terms)
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Expr):
            return self.terms == other.terms
        try:
            other = as_expr(other)
        except ExprError:
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self):
        return f"Expr({str(self)!r})"

    def __bool__(self):
        return bool(self.terms)

    @property
    def is_zero(self):
        return not self.terms

    @property
    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and not self.terms[0][0])

    @property
    def constant_value(self):
        """The rational value of a constant expression (else ExprError)."""
        if not self.terms:
            return Fraction(0)
        if self.is_constant:
            return self.terms[0][1]
        raise ExprError(f"{self} is not constant")

    def symbols(self):
        """Every Sym occurring anywhere, including inside function arguments."""
        out = set()
        for mono, _ in self.terms:
            for f, _ in mono:
                if isinstance(f, Sym):
                    out.add(f)
                else:
                    for a in f.args:
                        out |= a.symbols()
        return out

    def has(self, sym):
        return sym in self.symbols()

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        other = as_expr(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        d = dict(self.terms)
        for m, c in other.terms:
            d[m] = d.get(m, 0) + c
        return Expr.from_dict(d)

    __radd__ = __add__

    def __neg__(self):
        return Expr(tuple((m, -c) for m, c in self.terms))

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-as_expr(other))

    def __rsub__(self, other):
        return as_expr(other) + (-self)

    def __mul__(self, other):
        other = as_expr(other)
        if not self.terms or not other.terms:
            return ZERO
        if other.is_constant:
            c = other.terms[0][1]
            if c == 1:
                return self
            return Expr(tuple((m, k * c) for m, k in self.terms))
        if self.is_constant:
            return other * self
        d = {}
        for ma, ca in self.terms:
            for mb, cb in other.terms:
                m = _mono_mul(ma, mb)
                d[m] = d.get(m, 0) + ca * cb
        return Expr.from_dict(d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (as_expr(other) ** -1)

    def __rtruediv__(self, other):
        return as_expr(other) * (self ** -1)

    def __pow__(self, n):
        if isinstance(n, Expr):
            if n.is_constant and n.constant_value.denominator == 1:
                n = int(n.constant_value)
            else:
                return apply("pow", self, n)
        if isinstance(n, Fraction) and n.denominator == 1:
            n = int(n)
        if not isinstance(n, int):
            return apply("pow", self, as_expr(n))
        if n == 0:
            return ONE
        if n == 1:
            return self
        if len(self.terms) == 1:
            mono, c = self.terms[0]
            if n < 0 and c == 0:
                raise ExprError("division by zero")
            return Expr((
                (tuple((f, k * n) for f, k in mono), c ** n),))
        if not self.terms:
            if n < 0:
                raise ExprError("division by zero")
            return ZERO
        if n < 0:
            recip = FuncApp("pow", (self, const(-1)))
            return Expr(((((recip, -n),), Fraction(1)),))
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __rpow__(self, other):
        return as_expr(other) ** self

    # -- printing ----------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for i, (mono, c) in enumerate(self.terms):
            body = _term_body(mono, abs(c))
            if i == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)


def _factor_str(f, k):
    s = str(f)
    return s if k == 1 else f"{s}^{k}"


def _term_body(mono, c):
    num = [_factor_str(f, k) for f, k in mono if k > 0]
    den = [_factor_str(f, -k) for f, k in mono if k < 0]
    p, q = c.numerator, c.denominator
    if num:
        body = "*".join(num)
        if p != 1:
            body = f"{p}*{body}"
    else:
        body = str(p)
    if q != 1:
        body += f"/{q}"
    for d in den:
        body += f"/{d}"
    return body


ZERO = Expr()
ONE = Expr(((((), Fraction(1))),))


def const(value):
    c = _to_fraction(value)
    return Expr((((), c),)) if c else ZERO


def as_expr(value):
    if isinstance(value, Expr):
        return value
    if isinstance(value, Sym):
        return Expr(((((value, 1),), Fraction(1)),))
    if isinstance(value, FuncApp):
        return Expr(((((value, 1),), Fraction(1)),))
    return const(value)


def _exact_sqrt(c):
    if c < 0:
        return None
    p, q = math.isqrt(c.numerator), math.isqrt(c.denominator)
    if p * p == c.numerator and q * q == c.denominator:
        return Fraction(p, q)
    return None


def apply(tag, *args):
    """Build ``tag(args...)`` with exact constant folding where possible."""
    if tag not in FUNCTIONS:
        raise ExprError(f"unknown function {tag!r}")
    if len(args) != FUNCTIONS[tag]:
        raise ExprError(f"{tag} expects {FUNCTIONS[tag]} argument(s), got {len(args)}")
    args = tuple(as_expr(a) for a in args)
    if tag == "pow":
        base, ex = args
        if ex.is_constant and ex.constant_value.denominator == 1:
            return base ** int(ex.constant_value)
        if ex.is_constant and base.is_constant and base.constant_value == 1:
            return ONE
    else:
        (a,) = args
        if a.is_constant:
            v = a.constant_value
            if tag == "abs":
                return const(abs(v))
            if tag == "sqrt":
                r = _exact_sqrt(v)
                if r is not None:
                    return const(r)
            if v == 0 and tag in ("sin", "tan"):
                return ZERO
            if v == 0 and tag in ("cos", "exp"):
                return ONE
            if v == 1 and tag == "log":
                return ZERO
    return as_expr(FuncApp(tag, args))


def normalize(e):
    """Return the canonical form of `e` (expressions are stored normalized)."""
    e = as_expr(e)
    d = {}
    for m, c in e.terms:
        m = tuple(sorted(((f, k) for f, k in m if k), key=lambda fk: fk[0].key))
        d[m] = d.get(m, 0) + c
    return Expr.from_dict(d)


# -- symbol resolution and parsing ----------------------------------------

_PATTERN = re.compile(r"(dx|x|e|f|u)_(\d+)\Z")
_PATTERN_KIND = {"dx": Kind.DSTATE, "x": Kind.STATE, "e": Kind.EFFORT,
                 "f": Kind.FLOW, "u": Kind.CONTROL}


class SymbolTable(Mapping):
    """Name -> Sym (or Expr) lookup used by :func:`parse_expr`.

    With ``coordinates=True`` the standard names ``dx_i``, ``x_i``,
    ``e_i``, ``f_i``, ``u_i`` and ``t`` resolve automatically.
    """

    def __init__(self, names=None, coordinates=True):
        self._names = dict(names or {})
        self.coordinates = coordinates

    def __getitem__(self, name):
        if name in self._names:
            return self._names[name]
        if self.coordinates:
            if name == "t":
                return TIME
            m = _PATTERN.match(name)
            if m:
                return Sym(_PATTERN_KIND[m.group(1)], int(m.group(2)))
        raise KeyError(name)

    def __iter__(self):
        return iter(self._names)

    def __len__(self):
        return len(self._names)

    def __contains__(self, name):
        try:
            self[name]
        except KeyError:
            return False
        return True


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+\.\d*|\.\d+|\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\*\*|[-+*/^(),])
""", re.VERBOSE)


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            val = m.group()
            if val == "**":
                val = "^"
            out.append((kind, val, pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text, context):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.context = context

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, val):
        tok = self.take()
        if tok[1] != val or tok[0] == "end":
            raise ParseError(f"expected {val!r}, found {tok[1] or 'end of input'!r}",
                             tok[2], self.text)
        return tok

    def parse(self):
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0, self.text)
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2], self.text)
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            _, op, pos = self.take()
            rhs = self.unary()
            if op == "*":
                e = e * rhs
            else:
                if rhs.is_zero:
                    raise ParseError("division by zero", pos, self.text)
                e = e / rhs
        return e

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("-", "+"):
            self.take()
            e = self.unary()
            return -e if tok[1] == "-" else e
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            ex = self.unary()
            try:
                return base ** ex
            except ExprError as err:
                raise ParseError(str(err), tok[2], self.text) from None
        return base

    def atom(self):
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            return const(Fraction(val))
        if kind == "id":
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                return self.call(val, pos)
            try:
                resolved = self.context[val]
            except KeyError:
                raise ParseError(f"unknown identifier {val!r}", pos, self.text) from None
            return as_expr(resolved)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos, self.text)

    def call(self, name, pos):
        if name not in FUNCTIONS:
            raise ParseError(f"unknown function {name!r}", pos, self.text)
        self.expect("(")
        args = []
        if self.peek()[1] != ")":
            args.append(self.expr())
            while self.peek()[1] == ",":
                self.take()
                args.append(self.expr())
        self.expect(")")
        if len(args) != FUNCTIONS[name]:
            raise ParseError(
                f"{name} expects {FUNCTIONS[name]} argument(s), got {len(args)}",
                pos, self.text)
        try:
            return apply(name, *args)
        except ExprError as err:
            raise ParseError(str(err), pos, self.text) from None


def parse_expr(text, context=None):
    """Parse infix `text` into a normalized :class:`Expr`.

    `context` maps identifiers to :class:`Sym` or :class:`Expr` values.  The
    default resolves only the standard coordinate names and ``t``.
    """
    if context is None:
        context = SymbolTable()
    return _Parser(text, context).parse()


# -- calculus and substitution --------------------------------------------

def _dfactor(f, s):
    if isinstance(f, Sym):
        return ONE if f == s else ZERO
    da = [differentiate(a, s) for a in f.args]
    if all(d.is_zero for d in da):
        return ZERO
    a = f.args[0]
    tag = f.tag
    if tag == "sin":
        return apply("cos", a) * da[0]
    if tag == "cos":
        return -apply("sin", a) * da[0]
    if tag == "tan":
        return (ONE + apply("tan", a) ** 2) * da[0]
    if tag == "exp":
        return apply("exp", a) * da[0]
    if tag == "log":
        return da[0] * a ** -1
    if tag == "sqrt":
        return da[0] * as_expr(f) ** -1 / 2
    if tag == "abs":
        # undefined where a == 0; evaluation there divides by zero
        return da[0] * a * as_expr(f) ** -1
    if tag == "pow":
        b = f.args[1]
        out = ZERO
        if not da[0].is_zero:
            out = out + b * as_expr(f) * da[0] * a ** -1
        if not da[1].is_zero:
            out = out + as_expr(f) * apply("log", a) * da[1]
        return out
    raise ExprError(f"cannot differentiate {tag}")


def differentiate(e, s):
    """Exact partial derivative of `e` with respect to the symbol `s`."""
    e = as_expr(e)
    d = ZERO
    for mono, c in e.terms:
        for i, (f, k) in enumerate(mono):
            df = _dfactor(f, s)
            if df.is_zero:
                continue
            rest = list(mono)
            if k == 1:
                del rest[i]
            else:
                rest[i] = (f, k - 1)
            d = d + Expr((((tuple(rest)), c * k),)) * df
    return d


def _check_acyclic(rules):
    deps = {k: v.symbols() & rules.keys() for k, v in rules.items()}
    state = {}

    def visit(k, path):
        state[k] = 1
        for d in deps[k]:
            if state.get(d) == 1:
                cycle = " -> ".join(str(p) for p in path + [d])
                raise ExprError(f"cyclic substitution rules: {cycle}")
            if d not in state:
                visit(d, path + [d])
        state[k] = 2

    for k in rules:
        if k not in state:
            visit(k, [k])


def substitute(e, rules, check=True):
    """Simultaneously replace symbols by expressions, then normalize."""
    e = as_expr(e)
    rules = {k: as_expr(v) for k, v in rules.items()}
    if not rules:
        return e
    if check:
        _check_acyclic(rules)
    cache = {}

    def sub_factor(f):
        if f in cache:
            return cache[f]
        if isinstance(f, Sym):
            r = rules.get(f)
            out = r if r is not None else as_expr(f)
        else:
            args = [_sub(a) for a in f.args]
            out = apply(f.tag, *args)
        cache[f] = out
        return out

    def _sub(x):
        total = ZERO
        touched = False
        for mono, c in x.terms:
            if not any(_touches(f) for f, _ in mono):
                total = total + Expr(((mono, c),))
                continue
            touched = True
            term = const(c)
            for f, k in mono:
                term = term * (sub_factor(f) ** k)
            total = total + term
        return total if touched else x

    def _touches(f):
        if isinstance(f, Sym):
            return f in rules
        return any(_touches_expr(a) for a in f.args)

    def _touches_expr(x):
        return any(_touches(f) for mono, _ in x.terms for f, _ in mono)

    return _sub(e)


# -- evaluation -----------------------------------------------------------

@dataclass(frozen=True)
class Binding:
    values: Mapping
    time: float | None = None

    def lookup(self, s):
        if s.kind == Kind.TIME and self.time is not None:
            return self.time
        try:
            return self.values[s]
        except KeyError:
            raise EvaluationError(f"unbound symbol {s}") from None


_MATH = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan, "exp": math.exp,
    "log": math.log, "sqrt": math.sqrt, "abs": abs, "pow": math.pow,
}


def _evaluate(e, lookup, convert):
    total = convert(0)
    for mono, c in e.terms:
        term = convert(c)
        for f, k in mono:
            if isinstance(f, Sym):
                v = lookup(f)
            else:
                args = [_evaluate(a, lookup, float) for a in f.args]
                try:
                    v = _MATH[f.tag](*args)
                except (ValueError, OverflowError) as err:
                    raise EvaluationError(f"domain error in {f}: {err}") from None
            try:
                term = term * v ** k
            except ZeroDivisionError:
                raise EvaluationError(f"division by zero in {f}^{k}") from None
        total = total + term
    return total


def evaluate(e, binding):
    """Evaluate to a float; `binding` is a :class:`Binding` or a Sym mapping."""
    if not isinstance(binding, Binding):
        binding = Binding(binding)
    return float(_evaluate(as_expr(e), binding.lookup, float))


def evaluate_exact(e, values):
    """Exact rational value of a function-free expression."""
    def lookup(s):
        try:
            return Fraction(values[s])
        except KeyError:
            raise EvaluationError(f"unbound symbol {s}") from None

    e = as_expr(e)
    for mono, _ in e.terms:
        if any(isinstance(f, FuncApp) for f, _ in mono):
            raise EvaluationError("exact evaluation needs a function-free expression")
    return _evaluate(e, lookup, Fraction)


# -- splitting and comparison ---------------------------------------------

def _parameter_only(f):
    if isinstance(f, Sym):
        return f.kind == Kind.PARAMETER
    return all(all(_parameter_only(g) for m, _ in a.terms for g, _ in m) for a in f.args)


def linear_split(e, coords):
    """Split `e` into ``row . coords + residual``.

    Returns ``(row, residual)`` where `row` maps coordinate positions to
    coefficient expressions that depend on parameters only.
    """
    e = as_expr(e)
    position = {s: i for i, s in enumerate(coords)}
    row = {}
    residual = {}
    for mono, c in e.terms:
        target = None
        coeff = []
        for f, k in mono:
            if _parameter_only(f):
                coeff.append((f, k))
            elif target is None and k == 1 and f in position:
                target = f
            else:
                target = False
                break
        if target:
            i = position[target]
            piece = Expr(((tuple(coeff), c),))
            row[i] = row[i] + piece if i in row else piece
        else:
            residual[mono] = residual.get(mono, 0) + c
    row = {i: v for i, v in row.items() if not v.is_zero}
    return row, Expr.from_dict(residual)


def equal_mod_scale(a, b):
    """True iff ``a == lam * b`` for a nonzero rational ``lam``."""
    a, b = normalize(a), normalize(b)
    if a.is_zero or b.is_zero:
        return a.is_zero and b.is_zero
    if len(a.terms) != len(b.terms):
        return False
    lam = None
    for (ma, ca), (mb, cb) in zip(a.terms, b.terms):
        if ma != mb:
            return False
        r = ca / cb
        if lam is None:
            lam = r
        elif r != lam:
            return False
    return True


# -- compilation to Python callables --------------------------------------

def _src(e, names):
    if not e.terms:
        return "0.0"
    parts = []
    for mono, c in e.terms:
        factors = [repr(float(c))]
        for f, k in mono:
            if isinstance(f, Sym):
                try:
                    base = names[f]
                except KeyError:
                    raise EvaluationError(f"unbound symbol {f}") from None
            else:
                args = ", ".join(_src(a, names) for a in f.args)
                base = f"_{f.tag}({args})"
            factors.append(base if k == 1 else f"{base}**{k}")
        parts.append("*".join(factors))
    return " + ".join(parts)


def lambdify(exprs, names, argnames):
    """Compile expressions into ``fn(*args) -> list[float]``.

    `names` maps each Sym to a Python source fragment over `argnames`,
    e.g. ``{state(0): "x[0]"}``.
    """
    body = ", ".join(_src(as_expr(e), names) for e in exprs)
    src = f"def _fn({', '.join(argnames)}):\n    return [{body}]\n"
    scope = {f"_{k}": v for k, v in _MATH.items()}
    exec(compile(src, "<bondgraph-lambdify>", "exec"), scope)
    return scope["_fn"]
