"""Symbolic scalar expressions on coordinate charts.

Expressions are immutable trees over exact rational constants, coordinate
symbols, the four arithmetic operations, integer powers, ``exp`` and ``log``.
The canonical form used for zero testing is a reduced rational function in
the coordinates and in opaque ``exp``/``log`` atoms; no logarithm or
exponential identities are applied.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import QQ
from sympy.polys.fields import FracField
from sympy.polys.orderings import grevlex

INT64_MAX = 2**63 - 1
DEFAULT_TOL = 1e-9
DEFAULT_SEED = 42


class ExprError(Exception):
    """Base class for expression errors."""


class ParseError(ExprError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifierError(ExprError):
    def __init__(self, name: str, offset: int = -1):
        super().__init__(f"unknown identifier {name!r}")
        self.name = name
        self.offset = offset


class RationalOverflowError(ExprError):
    """A rational constant left the 64-bit numerator/denominator range."""


class DomainViolationError(ExprError):
    def __init__(self, coordinate: str, value: float):
        super().__init__(f"coordinate {coordinate!r}={value!r} outside its domain")
        self.coordinate = coordinate
        self.value = value


class SingularityError(ExprError):
    def __init__(self, expr: "ScalarExpr", reason: str):
        super().__init__(f"{reason} in {expr}")
        self.expr = expr
        self.reason = reason


class SamplingError(ExprError):
    """No admissible sample point could be produced."""


def _check_rational(q: Fraction) -> Fraction:
    if abs(q.numerator) > INT64_MAX or q.denominator > INT64_MAX:
        raise RationalOverflowError(f"rational constant {q} exceeds 64-bit range")
    return q


# ---------------------------------------------------------------------------
# charts


UNCONSTRAINED = "unconstrained"
POSITIVE = "positive"


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")


Constraint = Union[str, Interval]


@dataclass(frozen=True)
class Chart:
    name: str
    coords: Tuple[str, ...]
    domain: Tuple[Tuple[str, Constraint], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if len(set(self.coords)) != len(self.coords):
            raise ValueError(f"chart {self.name}: duplicate coordinate names")
        if isinstance(self.domain, Mapping):
            object.__setattr__(self, "domain", tuple(self.domain.items()))
        for name, c in self.domain:
            if name not in self.coords:
                raise ValueError(f"chart {self.name}: domain constraint on undeclared {name!r}")
            if not (isinstance(c, Interval) or c in (UNCONSTRAINED, POSITIVE)):
                raise ValueError(f"chart {self.name}: bad constraint {c!r}")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def index(self, name: str) -> int:
        try:
            return self.coords.index(name)
        except ValueError:
            raise UnknownIdentifierError(name) from None

    def constraint(self, name: str) -> Constraint:
        for n, c in self.domain:
            if n == name:
                return c
        return UNCONSTRAINED

    def check_point(self, point: Sequence[float]) -> None:
        if len(point) != self.dim:
            raise ValueError(f"point has dimension {len(point)}, chart {self.name} has {self.dim}")
        for name, value in zip(self.coords, point):
            c = self.constraint(name)
            if not math.isfinite(value):
                raise DomainViolationError(name, value)
            if c == POSITIVE and not value > 0:
                raise DomainViolationError(name, value)
            if isinstance(c, Interval) and not (c.lo < value < c.hi):
                raise DomainViolationError(name, value)

    def admissible(self, point: Sequence[float]) -> bool:
        try:
            self.check_point(point)
        except DomainViolationError:
            return False
        return True

    def sample_box(self) -> list[tuple[float, float]]:
        box = []
        for name in self.coords:
            c = self.constraint(name)
            if c == POSITIVE:
                lo, hi = 0.1, 2.0
            else:
                lo, hi = -2.0, 2.0
            if isinstance(c, Interval):
                lo, hi = max(lo, float(c.lo)), min(hi, float(c.hi))
            if not lo < hi:
                raise SamplingError(f"empty sampling box for coordinate {name!r}")
            box.append((lo, hi))
        return box

    def sample_points(self, n: int, rng: np.random.Generator) -> np.ndarray:
        box = np.array(self.sample_box(), dtype=float)
        return rng.uniform(box[:, 0], box[:, 1], size=(n, self.dim))


# ---------------------------------------------------------------------------
# expression tree


def _coerce(x) -> "ScalarExpr":
    if isinstance(x, ScalarExpr):
        return x
    if isinstance(x, (int, Fraction)):
        return Const(Fraction(x))
    raise TypeError(f"cannot use {type(x).__name__} in an expression")


class ScalarExpr:
    """Base class of expression nodes; arithmetic operators build trees."""

    __slots__ = ()

    def __add__(self, other):
        other = _coerce(other)
        if isinstance(self, Const) and isinstance(other, Const):
            return Const(self.value + other.value)
        if other == ZERO:
            return self
        if self == ZERO:
            return other
        return Add(self, other)

    def __radd__(self, other):
        return _coerce(other) + self

    def __sub__(self, other):
        other = _coerce(other)
        if isinstance(self, Const) and isinstance(other, Const):
            return Const(self.value - other.value)
        if other == ZERO:
            return self
        if self == ZERO:
            return -other
        return Sub(self, other)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        if isinstance(self, Const) and isinstance(other, Const):
            return Const(self.value * other.value)
        if self == ZERO or other == ZERO:
            return ZERO
        if other == ONE:
            return self
        if self == ONE:
            return other
        return Mul(self, other)

    def __rmul__(self, other):
        return _coerce(other) * self

    def __truediv__(self, other):
        other = _coerce(other)
        if isinstance(self, Const) and isinstance(other, Const) and other.value != 0:
            return Const(self.value / other.value)
        if other == ONE:
            return self
        if self == ZERO and other != ZERO:
            return ZERO
        return Div(self, other)

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n == 0:
            return ONE
        if n == 1:
            return self
        if isinstance(self, Const) and self.value != 0:
            return Const(self.value**n)
        return Pow(self, n)

    def __neg__(self):
        if isinstance(self, Const):
            return Const(-self.value)
        if isinstance(self, Neg):
            return self.arg
        return Neg(self)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, eq=True)
class Const(ScalarExpr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", _check_rational(Fraction(self.value)))


@dataclass(frozen=True)
class Var(ScalarExpr):
    name: str


@dataclass(frozen=True)
class Add(ScalarExpr):
    left: ScalarExpr
    right: ScalarExpr


@dataclass(frozen=True)
class Sub(ScalarExpr):
    left: ScalarExpr
    right: ScalarExpr


@dataclass(frozen=True)
class Mul(ScalarExpr):
    left: ScalarExpr
    right: ScalarExpr


@dataclass(frozen=True)
class Div(ScalarExpr):
    left: ScalarExpr
    right: ScalarExpr


@dataclass(frozen=True)
class Pow(ScalarExpr):
    base: ScalarExpr
    exponent: int


@dataclass(frozen=True)
class Neg(ScalarExpr):
    arg: ScalarExpr


@dataclass(frozen=True)
class Exp(ScalarExpr):
    arg: ScalarExpr


@dataclass(frozen=True)
class Log(ScalarExpr):
    arg: ScalarExpr


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def const(x) -> Const:
    return Const(Fraction(x))


def exp(e) -> ScalarExpr:
    return Exp(_coerce(e))


def log(e) -> ScalarExpr:
    return Log(_coerce(e))


def variables(e: ScalarExpr) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset([e.name])
    if isinstance(e, Const):
        return frozenset()
    return frozenset().union(*(variables(c) for c in _children(e)))


def _children(e: ScalarExpr) -> tuple:
    if isinstance(e, (Add, Sub, Mul, Div)):
        return (e.left, e.right)
    if isinstance(e, Pow):
        return (e.base,)
    if isinstance(e, (Neg, Exp, Log)):
        return (e.arg,)
    return ()


# ---------------------------------------------------------------------------
# parsing and printing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[start]!r}", start)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, names: Optional[frozenset[str]]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.names = names

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, offset = self.take()
        if text != value or kind == "end":
            what = "end of input" if kind == "end" else repr(text)
            raise ParseError(f"expected {value!r}, found {what}", offset)

    def expr(self) -> ScalarExpr:
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            e = Add(e, rhs) if op == "+" else Sub(e, rhs)
        return e

    def term(self) -> ScalarExpr:
        e = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.factor()
            e = Mul(e, rhs) if op == "*" else Div(e, rhs)
        return e

    def factor(self) -> ScalarExpr:
        negate = False
        if self.peek()[:2] == ("op", "-"):
            self.take()
            negate = True
        e = self.base()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            sign = 1
            if self.peek()[:2] == ("op", "-"):
                self.take()
                sign = -1
            kind, text, offset = self.take()
            if kind != "num" or not text.isdigit():
                raise ParseError("expected integer exponent", offset)
            e = Pow(e, sign * int(text))
        return Neg(e) if negate else e

    def base(self) -> ScalarExpr:
        kind, text, offset = self.take()
        if kind == "num":
            return Const(Fraction(text))
        if kind == "ident":
            if text in ("exp", "log"):
                if self.peek()[:2] != ("op", "("):
                    raise ParseError(f"expected '(' after {text}", self.peek()[2])
                self.take()
                arg = self.expr()
                self.expect(")")
                return Exp(arg) if text == "exp" else Log(arg)
            if self.names is not None and text not in self.names:
                raise UnknownIdentifierError(text, offset)
            return Var(text)
        if (kind, text) == ("op", "("):
            e = self.expr()
            self.expect(")")
            return e
        what = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"unexpected {what}", offset)


def parse(text: str, chart: Optional[Chart] = None) -> ScalarExpr:
    """Parse ``text``; identifiers must be coordinates of ``chart`` if given."""
    names = frozenset(chart.coords) if chart is not None else None
    p = _Parser(text, names)
    e = p.expr()
    kind, tok, offset = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected {tok!r}", offset)
    return e


def _prec(e: ScalarExpr) -> int:
    if isinstance(e, (Add, Sub)):
        return 1
    if isinstance(e, (Mul, Div)):
        return 2
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Pow):
        return 4
    if isinstance(e, Const):
        if e.value.denominator != 1:
            return 2
        return 3 if e.value < 0 else 5
    return 5


def _wrap(e: ScalarExpr, need: int) -> str:
    s = to_text(e)
    return f"({s})" if _prec(e) < need else s


def to_text(e: ScalarExpr) -> str:
    """Render ``e`` in the input grammar (re-parseable)."""
    if isinstance(e, Const):
        v = e.value
        if v.denominator == 1:
            return str(v.numerator)
        return f"{v.numerator}/{v.denominator}"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Add):
        return f"{_wrap(e.left, 1)} + {_wrap(e.right, 2)}"
    if isinstance(e, Sub):
        return f"{_wrap(e.left, 1)} - {_wrap(e.right, 2)}"
    if isinstance(e, Mul):
        return f"{_wrap(e.left, 2)}*{_wrap(e.right, 3)}"
    if isinstance(e, Div):
        return f"{_wrap(e.left, 2)}/{_wrap(e.right, 3)}"
    if isinstance(e, Neg):
        return f"-{_wrap(e.arg, 4)}"
    if isinstance(e, Pow):
        return f"{_wrap(e.base, 5)}^{e.exponent}"
    if isinstance(e, Exp):
        return f"exp({to_text(e.arg)})"
    if isinstance(e, Log):
        return f"log({to_text(e.arg)})"
    raise TypeError(e)


# ---------------------------------------------------------------------------
# calculus and substitution


def differentiate(e: ScalarExpr, x: str) -> ScalarExpr:
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == x else ZERO
    if isinstance(e, Add):
        return differentiate(e.left, x) + differentiate(e.right, x)
    if isinstance(e, Sub):
        return differentiate(e.left, x) - differentiate(e.right, x)
    if isinstance(e, Mul):
        return differentiate(e.left, x) * e.right + e.left * differentiate(e.right, x)
    if isinstance(e, Div):
        du, dv = differentiate(e.left, x), differentiate(e.right, x)
        if dv == ZERO:
            return du / e.right
        return (du * e.right - e.left * dv) / e.right**2
    if isinstance(e, Pow):
        return e.exponent * e.base ** (e.exponent - 1) * differentiate(e.base, x)
    if isinstance(e, Neg):
        return -differentiate(e.arg, x)
    if isinstance(e, Exp):
        return e * differentiate(e.arg, x)
    if isinstance(e, Log):
        return differentiate(e.arg, x) / e.arg
    raise TypeError(e)


def gradient(e: ScalarExpr, chart: Chart) -> list[ScalarExpr]:
    return [differentiate(e, c) for c in chart.coords]


def substitute(e: ScalarExpr, mapping: Mapping[str, ScalarExpr]) -> ScalarExpr:
    """Replace coordinate symbols by expressions (simultaneously)."""
    if isinstance(e, Var):
        return _coerce(mapping[e.name]) if e.name in mapping else e
    if isinstance(e, Const):
        return e
    if isinstance(e, Add):
        return substitute(e.left, mapping) + substitute(e.right, mapping)
    if isinstance(e, Sub):
        return substitute(e.left, mapping) - substitute(e.right, mapping)
    if isinstance(e, Mul):
        return substitute(e.left, mapping) * substitute(e.right, mapping)
    if isinstance(e, Div):
        return Div(substitute(e.left, mapping), substitute(e.right, mapping))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, mapping), e.exponent)
    if isinstance(e, Neg):
        return -substitute(e.arg, mapping)
    if isinstance(e, Exp):
        return Exp(substitute(e.arg, mapping))
    if isinstance(e, Log):
        return Log(substitute(e.arg, mapping))
    raise TypeError(e)


# ---------------------------------------------------------------------------
# numeric evaluation


def _eval(e: ScalarExpr, env: Mapping[str, float]) -> float:
    if isinstance(e, Const):
        return e.value.numerator / e.value.denominator
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Add):
        return _eval(e.left, env) + _eval(e.right, env)
    if isinstance(e, Sub):
        return _eval(e.left, env) - _eval(e.right, env)
    if isinstance(e, Mul):
        return _eval(e.left, env) * _eval(e.right, env)
    if isinstance(e, Div):
        den = _eval(e.right, env)
        if den == 0.0:
            raise SingularityError(e, "division by zero")
        return _eval(e.left, env) / den
    if isinstance(e, Pow):
        b = _eval(e.base, env)
        if b == 0.0 and e.exponent < 0:
            raise SingularityError(e, "negative power of zero")
        try:
            return b**e.exponent
        except OverflowError:
            raise SingularityError(e, "overflow") from None
    if isinstance(e, Neg):
        return -_eval(e.arg, env)
    if isinstance(e, Exp):
        try:
            return math.exp(_eval(e.arg, env))
        except OverflowError:
            raise SingularityError(e, "overflow") from None
    if isinstance(e, Log):
        v = _eval(e.arg, env)
        if not v > 0:
            raise SingularityError(e, "log of non-positive value")
        return math.log(v)
    raise TypeError(e)


def evaluate(e: ScalarExpr, chart: Chart, point: Sequence[float], check_domain: bool = True) -> float:
    """Evaluate ``e`` in double precision at ``point`` (chart coordinate order)."""
    point = [float(v) for v in point]
    if check_domain:
        chart.check_point(point)
    elif len(point) != chart.dim:
        raise ValueError(f"point has dimension {len(point)}, chart {chart.name} has {chart.dim}")
    env = dict(zip(chart.coords, point))
    missing = variables(e) - env.keys()
    if missing:
        raise UnknownIdentifierError(sorted(missing)[0])
    value = _eval(e, env)
    if not math.isfinite(value):
        raise SingularityError(e, "non-finite value")
    return value


# ---------------------------------------------------------------------------
# normal form


class _Atoms:
    """Opaque exp/log atoms keyed by their canonical argument text."""

    def __init__(self):
        self.by_key: Dict[tuple, ScalarExpr] = {}

    def collect(self, e: ScalarExpr) -> None:
        if isinstance(e, Exp):
            for a, _ in _exp_factors(e):
                self.by_key[("exp", to_text(a))] = Exp(a)
            return
        if isinstance(e, Log):
            arg = simplify(e.arg)
            if isinstance(arg, Const):
                _const_atom(Log, arg, e)
                return
            self.by_key[("log", to_text(arg))] = Log(arg)
            return
        for c in _children(e):
            self.collect(c)


def _exp_factors(e: "Exp") -> list[tuple[ScalarExpr, int]]:
    """Split ``exp(sum_m c_m m)`` into ``prod exp(m)^c_m`` for integer ``c_m``.

    Non-integer coefficients stay inside the atom; a non-polynomial argument
    is one atom.
    """
    arg = simplify(e.arg)
    if isinstance(arg, Const):
        if arg.value == 0:
            return []
        if arg.value.denominator == 1:
            return [(ONE, int(arg.value))]
        return [(arg, 1)]
    num, den, atoms = _normal(arg)
    if den != 1:
        return [(arg, 1)]
    out = []
    for monom, coeff in num.terms():
        c = Fraction(int(coeff.numerator), int(coeff.denominator))
        unit = _from_poly(num.ring({monom: 1}), atoms)
        if c.denominator == 1:
            out.append((unit, int(c)))
        else:
            out.append((simplify(Const(c) * unit), 1))
    return out


def _const_atom(kind, arg: Const, where: ScalarExpr) -> Optional[Const]:
    if kind is Log and arg.value <= 0:
        raise SingularityError(where, "log of non-positive constant")
    if kind is Exp and arg.value == 0:
        return ONE
    if kind is Log and arg.value == 1:
        return ZERO
    return None


def _to_field(e: ScalarExpr, gens: Mapping, K: FracField):
    if isinstance(e, Const):
        return K(QQ(e.value.numerator, e.value.denominator))
    if isinstance(e, Var):
        return gens[("var", e.name)]
    if isinstance(e, Add):
        return _to_field(e.left, gens, K) + _to_field(e.right, gens, K)
    if isinstance(e, Sub):
        return _to_field(e.left, gens, K) - _to_field(e.right, gens, K)
    if isinstance(e, Mul):
        return _to_field(e.left, gens, K) * _to_field(e.right, gens, K)
    if isinstance(e, Div):
        den = _to_field(e.right, gens, K)
        if den == 0:
            raise SingularityError(e, "division by an expression that is identically zero")
        return _to_field(e.left, gens, K) / den
    if isinstance(e, Pow):
        b = _to_field(e.base, gens, K)
        if b == 0 and e.exponent < 0:
            raise SingularityError(e, "negative power of zero")
        return b**e.exponent
    if isinstance(e, Neg):
        return -_to_field(e.arg, gens, K)
    if isinstance(e, Exp):
        out = K.one
        for a, k in _exp_factors(e):
            out = out * gens[("exp", to_text(a))] ** k
        return out
    if isinstance(e, Log):
        arg = simplify(e.arg)
        if isinstance(arg, Const):
            folded = _const_atom(Log, arg, e)
            if folded is not None:
                return K(QQ(folded.value.numerator, folded.value.denominator))
        return gens[("log", to_text(arg))]
    raise TypeError(e)


def _from_poly(poly, atoms: Sequence[ScalarExpr]) -> ScalarExpr:
    result: ScalarExpr = ZERO
    for monom, coeff in poly.terms():
        c = Fraction(int(coeff.numerator), int(coeff.denominator))
        _check_rational(c)
        term: ScalarExpr = ONE
        for atom, k in zip(atoms, monom):
            if k:
                term = term * (atom if k == 1 else Pow(atom, k))
        if result == ZERO:
            result = -term if c == -1 else c * term
        elif c < 0:
            result = result - (-c) * term
        else:
            result = result + c * term
    return result


@lru_cache(maxsize=200_000)
def _normal(e: ScalarExpr):
    atoms = _Atoms()
    atoms.collect(e)
    names = sorted(variables_outside_atoms(e))
    keys = [("var", n) for n in names] + sorted(atoms.by_key)
    atom_exprs = [Var(n) for n in names] + [atoms.by_key[k] for k in sorted(atoms.by_key)]
    if not keys:
        keys, atom_exprs = [("var", "_")], [Var("_")]
    K = FracField([f"g{i}" for i in range(len(keys))], QQ, grevlex)
    gens = dict(zip(keys, K.gens))
    value = _to_field(e, gens, K)
    return value.numer, value.denom, tuple(atom_exprs)


def variables_outside_atoms(e: ScalarExpr) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset([e.name])
    if isinstance(e, (Const, Exp, Log)):
        return frozenset()
    return frozenset().union(*(variables_outside_atoms(c) for c in _children(e)))


@lru_cache(maxsize=200_000)
def simplify(e: ScalarExpr) -> ScalarExpr:
    """Reduced rational-function normal form; exp/log subtrees are opaque atoms."""
    num, den, atoms = _normal(e)
    n = _from_poly(num, atoms)
    d = _from_poly(den, atoms)
    return n if d == ONE else Div(n, d)


def is_structurally_zero(e: ScalarExpr) -> bool:
    return simplify(e) == ZERO


# ---------------------------------------------------------------------------
# zero testing


@dataclass(frozen=True)
class SymbolicZero:
    @property
    def is_zero(self) -> bool:
        return True


@dataclass(frozen=True)
class NonZero:
    witness: Tuple[float, ...]
    value: float
    where: str = ""

    @property
    def is_zero(self) -> bool:
        return False


@dataclass(frozen=True)
class ProbablyZero:
    samples: int
    max_abs: float

    @property
    def is_zero(self) -> bool:
        return True


ZeroVerdict = Union[SymbolicZero, NonZero, ProbablyZero]


def combine_verdicts(verdicts: Iterable[ZeroVerdict]) -> ZeroVerdict:
    """First NonZero wins; else ProbablyZero if any; else SymbolicZero."""
    probable = []
    for v in verdicts:
        if isinstance(v, NonZero):
            return v
        if isinstance(v, ProbablyZero):
            probable.append(v)
    if probable:
        return ProbablyZero(max(p.samples for p in probable), max(p.max_abs for p in probable))
    return SymbolicZero()


def is_zero(
    e: ScalarExpr,
    chart: Chart,
    samples: int = 100,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    label: str = "",
) -> ZeroVerdict:
    """Decide whether ``e`` vanishes on the chart.

    Structural zero of the normal form is authoritative; otherwise ``e`` is
    evaluated at seeded random admissible points.
    """
    if samples < 1 or not tol > 0:
        raise ValueError("need samples >= 1 and tol > 0")
    nf = simplify(e)
    if nf == ZERO:
        return SymbolicZero()
    rng = np.random.default_rng(seed)
    done, worst, attempts = 0, 0.0, 0
    while done < samples:
        if attempts > 20 * samples:
            raise SamplingError(f"no admissible sample points for {label or e} on chart {chart.name}")
        for point in chart.sample_points(samples, rng):
            attempts += 1
            try:
                value = evaluate(nf, chart, point)
            except (SingularityError, DomainViolationError):
                continue
            if abs(value) > tol:
                return NonZero(tuple(float(v) for v in point), value, label)
            worst = max(worst, abs(value))
            done += 1
            if done == samples:
                break
    return ProbablyZero(samples, worst)
