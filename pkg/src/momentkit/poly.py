"""Sparse multivariate real polynomials.

A polynomial in ``s`` variables is a map from exponent tuples (length ``s``)
to nonzero float coefficients.  Values are immutable; every operation returns
a new polynomial in canonical form (no stored zero coefficients).

Iteration and printing follow graded lexicographic order: lower total degree
first, then ``x1 > x2 > ...`` within a degree, so the basis of degree <= 1 in
two variables is ``1, x1, x2``.
"""

from __future__ import annotations

import math
import re
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ParseError, VariableCountError

Exponent = tuple[int, ...]


_SPLITTER = 134217729.0  # 2**27 + 1
_SPLIT_LIMIT = 2.0 ** 996


def two_product(a: float, b: float) -> tuple[float, float]:
    """``(p, e)`` with ``p = fl(a * b)`` and ``p + e == a * b`` exactly (Dekker).

    Feeding both parts to ``math.fsum`` gives a correctly rounded sum of
    exact products.  Exactness needs the product to stay clear of the
    subnormal range; outside the safe range of the splitting the rounding
    error is dropped.
    """
    p = a * b
    if not (abs(a) < _SPLIT_LIMIT and abs(b) < _SPLIT_LIMIT and math.isfinite(p)):
        return p, 0.0
    t = _SPLITTER * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLITTER * b
    bh = t - (t - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def exact_dot(pairs: Iterable[tuple[float, float]]) -> float:
    """Correctly rounded ``sum a_i * b_i``."""
    parts: list[float] = []
    for a, b in pairs:
        parts.extend(two_product(a, b))
    return math.fsum(parts)


def grlex_key(exponent: Exponent) -> tuple:
    return (sum(exponent), tuple(-e for e in exponent))


@lru_cache(maxsize=None)
def _compositions(num_vars: int, total: int) -> tuple[Exponent, ...]:
    # all exponents of exactly this total degree, x1-heavy first
    if num_vars == 1:
        return ((total,),)
    out = []
    for first in range(total, -1, -1):
        for rest in _compositions(num_vars - 1, total - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def monomials_upto(num_vars: int, degree: int) -> tuple[Exponent, ...]:
    """All exponents of total degree <= ``degree`` in graded-lex order."""
    if num_vars < 1:
        raise VariableCountError("num_vars must be >= 1")
    out: list[Exponent] = []
    for k in range(degree + 1):
        out.extend(_compositions(num_vars, k))
    return tuple(out)


class Polynomial:
    __slots__ = ("num_vars", "_terms", "_hash")

    def __init__(self, num_vars: int, terms: Mapping[Sequence[int], float] | None = None):
        if not isinstance(num_vars, int) or num_vars < 1:
            raise VariableCountError(f"num_vars must be a positive integer, got {num_vars!r}")
        clean: dict[Exponent, float] = {}
        for exp, coef in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != num_vars:
                raise VariableCountError(f"exponent {exp} has length {len(exp)}, expected {num_vars}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            c = float(coef)
            if not math.isfinite(c):
                raise ValueError(f"non-finite coefficient {coef!r}")
            c = clean.get(exp, 0.0) + c
            clean[exp] = c
        self.num_vars = num_vars
        self._terms = {e: clean[e] for e in sorted(clean, key=grlex_key) if clean[e] != 0.0}
        self._hash = None

    # constructors

    @classmethod
    def zero(cls, num_vars: int) -> Polynomial:
        return cls(num_vars)

    @classmethod
    def constant(cls, num_vars: int, value: float) -> Polynomial:
        return cls(num_vars, {(0,) * num_vars: value})

    @classmethod
    def one(cls, num_vars: int) -> Polynomial:
        return cls.constant(num_vars, 1.0)

    @classmethod
    def variable(cls, num_vars: int, index: int) -> Polynomial:
        """The coordinate polynomial ``x_{index+1}`` (index is 0-based)."""
        if not 0 <= index < num_vars:
            raise VariableCountError(f"variable index {index} out of range for {num_vars} variables")
        exp = [0] * num_vars
        exp[index] = 1
        return cls(num_vars, {tuple(exp): 1.0})

    @classmethod
    def monomial(cls, exponent: Sequence[int], coefficient: float = 1.0) -> Polynomial:
        return cls(len(exponent), {tuple(exponent): coefficient})

    # inspection

    @property
    def terms(self) -> dict[Exponent, float]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Exponent, float]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coefficient(self, exponent: Sequence[int]) -> float:
        return self._terms.get(tuple(exponent), 0.0)

    @property
    def degree(self) -> int:
        """Total degree; the zero polynomial reports 0."""
        return max((sum(e) for e in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def max_abs_coefficient(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    # ring operations

    def _check(self, other: Polynomial) -> None:
        if self.num_vars != other.num_vars:
            raise VariableCountError(
                f"variable-count mismatch: {self.num_vars} vs {other.num_vars}")

    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, float)):
            return Polynomial.constant(self.num_vars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0.0) + c
        return Polynomial(self.num_vars, out)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial(self.num_vars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Polynomial(self.num_vars, {e: c * other for e, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: dict[Exponent, list[float]] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                acc.setdefault(e, []).extend(two_product(c1, c2))
        # exact products summed by fsum: every coefficient is correctly rounded
        return Polynomial(self.num_vars, {e: math.fsum(v) for e, v in acc.items()})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Polynomial:
        if not isinstance(k, int) or k < 0:
            raise ValueError(f"exponent must be a nonnegative integer, got {k!r}")
        result = Polynomial.one(self.num_vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.num_vars == other.num_vars and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num_vars, tuple(self._terms.items())))
        return self._hash

    def __call__(self, point: Sequence[float]) -> float:
        return evaluate(self, point)

    def __repr__(self) -> str:
        return f"Polynomial({self.num_vars}, {format_polynomial(self)!r})"

    def __str__(self) -> str:
        return format_polynomial(self)


# functional interface


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    p._check(q)
    return p + q


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    p._check(q)
    return p * q


def power(p: Polynomial, k: int) -> Polynomial:
    return p ** k


def evaluate(p: Polynomial, point: Sequence[float]) -> float:
    point = [float(v) for v in point]
    if len(point) != p.num_vars:
        raise VariableCountError(f"point has dimension {len(point)}, polynomial has {p.num_vars} variables")
    vals = []
    for exp, c in p._terms.items():
        t = c
        for x, e in zip(point, exp):
            if e:
                t *= x ** e
        vals.append(t)
    return math.fsum(vals)


def binomial_product(T: float, a: Polynomial, p: int, q: int) -> Polynomial:
    """Expand ``(T - a)^p (T + a)^q``."""
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    if p < 0 or q < 0:
        raise ValueError("p and q must be nonnegative")
    return (T - a) ** p * (T + a) ** q


def sum_of_squares(polys: Iterable[Polynomial]) -> Polynomial:
    polys = list(polys)
    if not polys:
        raise ValueError("need at least one polynomial")
    out = Polynomial.zero(polys[0].num_vars)
    for g in polys:
        out = out + g * g
    return out


# text format


def _format_coef(c: float) -> str:
    if c.is_integer() and abs(c) < 1e16:
        return str(int(c))
    return repr(c)


def _format_monomial(exp: Exponent) -> str:
    parts = []
    for i, e in enumerate(exp):
        if e == 1:
            parts.append(f"x{i + 1}")
        elif e > 1:
            parts.append(f"x{i + 1}^{e}")
    return " * ".join(parts)


def format_polynomial(p: Polynomial) -> str:
    """Render as ``"1 - x1^2 - 0.5 * x1 * x2"``; :func:`parse_polynomial` inverts it exactly."""
    if not p._terms:
        return "0"
    chunks = []
    for i, (exp, c) in enumerate(p._terms.items()):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        mono = _format_monomial(exp)
        if not mono:
            body = _format_coef(mag)
        elif mag == 1.0:
            body = mono
        else:
            body = f"{_format_coef(mag)} * {mono}"
        if i == 0:
            chunks.append(body if sign == "+" else f"-{body}")
        else:
            chunks.append(f"{sign} {body}")
    return " ".join(chunks)


_TOKEN = re.compile(r"""
    \s*(?:
      (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
    | (?P<var>x\d*)
    | (?P<op>\*\*|[-+*^()])
    )""", re.VERBOSE)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r} at position {pos}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str, num_vars: int):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.num_vars = num_vars

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            raise ParseError(f"expected {value!r} at position {pos}, got {val!r}")

    def parse(self) -> Polynomial:
        if not self.tokens:
            raise ParseError("empty polynomial")
        out = self.expr()
        kind, val, pos = self.peek()
        if kind is not None:
            raise ParseError(f"unexpected {val!r} at position {pos}")
        return out

    def expr(self) -> Polynomial:
        out = self.term()
        while self.peek()[1] in ("+", "-"):
            _, op, _ = self.take()
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> Polynomial:
        out = self.unary()
        while True:
            kind, val, _ = self.peek()
            if val == "*":
                self.take()
                out = out * self.unary()
            elif kind in ("num", "var") or val == "(":
                out = out * self.unary()
            else:
                return out

    def unary(self) -> Polynomial:
        _, val, _ = self.peek()
        if val in ("+", "-"):
            self.take()
            inner = self.unary()
            return -inner if val == "-" else inner
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.peek()[1] in ("^", "**"):
            self.take()
            kind, val, pos = self.take()
            if kind != "num" or not val.isdigit():
                raise ParseError(f"exponent must be a nonnegative integer at position {pos}")
            base = base ** int(val)
        return base

    def atom(self) -> Polynomial:
        kind, val, pos = self.take()
        if kind == "num":
            return Polynomial.constant(self.num_vars, float(val))
        if kind == "var":
            if val == "x":
                if self.num_vars != 1:
                    raise ParseError(f"bare 'x' at position {pos} is only allowed for one variable")
                idx = 0
            else:
                idx = int(val[1:]) - 1
                if not 0 <= idx < self.num_vars:
                    raise ParseError(f"variable {val} at position {pos} out of range for {self.num_vars} variables")
            return Polynomial.variable(self.num_vars, idx)
        if val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {val!r} at position {pos}" if val else "unexpected end of input")


def parse_polynomial(text: str, num_vars: int) -> Polynomial:
    """Parse expressions such as ``"1 - x1^2 - x2^2"`` or ``"(1 - x)^2 (1 + x)"``.

    Accepts ``+ - *``, ``^``/``**`` with integer exponents, parentheses,
    implicit multiplication and the alias ``x`` for ``x1`` when ``num_vars == 1``.
    """
    return _Parser(text, num_vars).parse()
