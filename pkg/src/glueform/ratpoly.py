"""Exact multivariate polynomials over the rationals.

Polynomials live in a :class:`VarContext`, an ordered tuple of variable
names.  Terms are stored as a mapping from exponent tuples to
:class:`fractions.Fraction` coefficients; zero coefficients are never
stored and terms are kept in descending graded-lexicographic order, so
structural equality is mathematical equality.

    >>> ctx = VarContext.of("x y")
    >>> p = parse_poly("(x+y)^2", ctx)
    >>> str(p)
    'x^2 + 2*x*y + y^2'
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import ParseError, UsageError

__all__ = [
    "Rational",
    "VarContext",
    "Polynomial",
    "PolyMap",
    "as_rational",
    "grlex_key",
    "monomials_up_to",
    "poly_add",
    "poly_sub",
    "poly_mul",
    "poly_compose",
    "poly_partial",
    "poly_eval",
    "parse_poly",
]

Rational = Fraction
Monomial = tuple  # tuple[int, ...], one exponent per context variable

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a canonical Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise UsageError(f"not a rational number: {value!r}")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise UsageError(f"not an exact rational: {value!r}")


def grlex_key(mono: Monomial):
    """Sort key placing monomials in descending graded-lex order."""
    return (-sum(mono), tuple(-e for e in mono))


def monomials_up_to(nvars: int, max_degree: int) -> list[Monomial]:
    """All exponent tuples of total degree <= max_degree.

    Ordered by ascending total degree, and inside one degree by descending
    lex (``x^2, x*y, y^2``).  This is the column order used for truncated
    form spaces.
    """
    out: list[Monomial] = []
    for deg in range(max_degree + 1):
        out.extend(_monomials_of_degree(nvars, deg))
    return out


def _monomials_of_degree(nvars, deg):
    if nvars == 0:
        return [()] if deg == 0 else []
    if nvars == 1:
        return [(deg,)]
    out = []
    for first in range(deg, -1, -1):
        for rest in _monomials_of_degree(nvars - 1, deg - first):
            out.append((first,) + rest)
    return out


@dataclass(frozen=True)
class VarContext:
    """Ordered list of distinct variable names."""

    names: tuple[str, ...] = ()

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        for name in names:
            if not isinstance(name, str) or not _NAME_RE.match(name):
                raise UsageError(f"invalid variable name {name!r}")
        if len(set(names)) != len(names):
            raise UsageError(f"duplicate variable names in {names}")

    @classmethod
    def of(cls, names: str | Iterable[str]) -> "VarContext":
        if isinstance(names, str):
            names = names.split()
        return cls(tuple(names))

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UsageError(f"unknown variable {name!r} in context {self}") from None

    def __str__(self):
        return "(" + ", ".join(self.names) + ")"


class Polynomial:
    """Immutable polynomial with exact rational coefficients.

    Supports ``+``, ``-``, ``*`` and ``**`` (non-negative int) with other
    polynomials of the same context and with ints/Fractions.
    """

    __slots__ = ("context", "_terms", "_hash")

    def __init__(self, context: VarContext, terms: Mapping[Monomial, object] | None = None):
        n = len(context)
        clean = {}
        for mono, coeff in (terms or {}).items():
            mono = tuple(mono)
            if len(mono) != n or any(not isinstance(e, int) or e < 0 for e in mono):
                raise UsageError(f"bad exponent vector {mono} for context {context}")
            c = as_rational(coeff) + clean.get(mono, 0)
            if c:
                clean[mono] = c
            else:
                clean.pop(mono, None)
        self._init(context, clean)

    def _init(self, context, clean):
        self.context = context
        self._terms = {m: clean[m] for m in sorted(clean, key=grlex_key)}
        self._hash = None

    @classmethod
    def _raw(cls, context, clean):
        # clean: no zero coefficients, valid monomials
        p = cls.__new__(cls)
        p._init(context, clean)
        return p

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, context: VarContext) -> "Polynomial":
        return cls._raw(context, {})

    @classmethod
    def constant(cls, context: VarContext, value) -> "Polynomial":
        c = as_rational(value)
        return cls._raw(context, {(0,) * len(context): c} if c else {})

    @classmethod
    def var(cls, context: VarContext, which: int | str) -> "Polynomial":
        i = context.index(which) if isinstance(which, str) else which
        if not 0 <= i < len(context):
            raise UsageError(f"variable index {i} out of range for {context}")
        mono = tuple(1 if j == i else 0 for j in range(len(context)))
        return cls._raw(context, {mono: Fraction(1)})

    @classmethod
    def monomial(cls, context: VarContext, mono: Monomial, coeff=1) -> "Polynomial":
        return cls(context, {tuple(mono): coeff})

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> dict:
        """Copy of the term mapping, in canonical order."""
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self._terms), default=-1)

    def is_constant(self) -> bool:
        return self.degree() <= 0

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * len(self.context), Fraction(0))

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(tuple(mono), Fraction(0))

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.context == other.context and self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.is_constant() and self.constant_term() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.context, tuple(self._terms.items())))
        return self._hash

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.context != self.context:
                raise UsageError(f"context mismatch: {self.context} vs {other.context}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Polynomial.constant(self.context, other)
        raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                del out[m]
        return Polynomial._raw(self.context, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.context, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not self._terms or not other._terms:
            return Polynomial.zero(self.context)
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial._raw(self.context, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise UsageError(f"exponent must be a non-negative integer, got {n!r}")
        result = Polynomial.constant(self.context, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c) -> "Polynomial":
        c = as_rational(c)
        if not c:
            return Polynomial.zero(self.context)
        return Polynomial._raw(self.context, {m: v * c for m, v in self._terms.items()})

    # -- calculus and evaluation -------------------------------------------

    def partial(self, var_index: int) -> "Polynomial":
        return poly_partial(self, var_index)

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (list, tuple)):
            point = point[0]
        return poly_eval(self, point)

    # -- printing -----------------------------------------------------------

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for i, (mono, c) in enumerate(self._terms.items()):
            body = _format_term(self.context, mono, abs(c))
            if i == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"Polynomial({self.context.names!r}, {str(self)!r})"


def _format_term(context, mono, c):
    factors = []
    for name, e in zip(context.names, mono):
        if e == 1:
            factors.append(name)
        elif e > 1:
            factors.append(f"{name}^{e}")
    if not factors:
        return str(c)
    if c == 1:
        return "*".join(factors)
    return f"{c}*" + "*".join(factors)


# ---------------------------------------------------------------------------
# functional API


def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    return a + a._coerce(b)


def poly_sub(a: Polynomial, b: Polynomial) -> Polynomial:
    return a - a._coerce(b)


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    return a * a._coerce(b)


def poly_partial(p: Polynomial, var_index: int) -> Polynomial:
    """Formal partial derivative with respect to variable ``var_index``."""
    n = len(p.context)
    if not isinstance(var_index, int) or not 0 <= var_index < n:
        raise UsageError(f"variable index {var_index} out of range for {p.context}")
    out = {}
    for mono, c in p.items():
        e = mono[var_index]
        if e:
            m = mono[:var_index] + (e - 1,) + mono[var_index + 1:]
            out[m] = c * e
    return Polynomial._raw(p.context, out)


def poly_eval(p: Polynomial, point: Sequence) -> Fraction:
    """Exact value of ``p`` at a rational point."""
    if len(point) != len(p.context):
        raise UsageError(f"point has {len(point)} coordinates, context {p.context} needs {len(p.context)}")
    pt = [as_rational(v) for v in point]
    total = Fraction(0)
    for mono, c in p.items():
        term = c
        for v, e in zip(pt, mono):
            if e:
                term *= v ** e
        total += term
    return total


def poly_compose(p: Polynomial, f: "PolyMap") -> Polynomial:
    """Substitute ``f.components[i]`` for variable ``i`` of ``p``.

    The result lives in ``f.source``.
    """
    if f.target_arity != len(p.context):
        raise UsageError(
            f"map has {f.target_arity} components but {p.context} has {len(p.context)} variables"
        )
    src = f.source
    one = Polynomial.constant(src, 1)
    powers: list[dict[int, Polynomial]] = [{0: one, 1: comp} for comp in f.components]

    def power(i, e):
        cache = powers[i]
        if e not in cache:
            half = power(i, e // 2)
            sq = half * half
            cache[e] = sq * f.components[i] if e % 2 else sq
        return cache[e]

    out = Polynomial.zero(src)
    for mono, c in p.items():
        term = Polynomial.constant(src, c)
        for i, e in enumerate(mono):
            if e:
                term = term * power(i, e)
        out = out + term
    return out


# ---------------------------------------------------------------------------
# polynomial maps


@dataclass(frozen=True)
class PolyMap:
    """A polynomial map from ``source`` (p variables) to R^n, n = len(components)."""

    source: VarContext
    components: tuple[Polynomial, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        for comp in comps:
            if not isinstance(comp, Polynomial):
                raise UsageError(f"map component is not a Polynomial: {comp!r}")
            if comp.context != self.source:
                raise UsageError(f"component {comp} lives in {comp.context}, expected {self.source}")

    @property
    def target_arity(self) -> int:
        return len(self.components)

    @classmethod
    def identity(cls, context: VarContext) -> "PolyMap":
        return cls(context, tuple(Polynomial.var(context, i) for i in range(len(context))))

    @classmethod
    def parse(cls, source: VarContext, texts: Iterable[str]) -> "PolyMap":
        return cls(source, tuple(parse_poly(t, source) for t in texts))

    @classmethod
    def constant(cls, source: VarContext, values: Iterable) -> "PolyMap":
        return cls(source, tuple(Polynomial.constant(source, v) for v in values))

    def compose(self, inner: "PolyMap") -> "PolyMap":
        """``self ∘ inner``; defined when inner's arity matches self's source."""
        if inner.target_arity != len(self.source):
            raise UsageError(
                f"cannot compose: inner map has {inner.target_arity} components, "
                f"outer source {self.source} has {len(self.source)} variables"
            )
        return PolyMap(inner.source, tuple(poly_compose(c, inner) for c in self.components))

    def jacobian(self) -> list[list[Polynomial]]:
        """``J[i][j] = d components[i] / d source_j``."""
        return [[poly_partial(c, j) for j in range(len(self.source))] for c in self.components]

    def __call__(self, point: Sequence) -> tuple[Fraction, ...]:
        return tuple(poly_eval(c, point) for c in self.components)

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.components) + ")"


# ---------------------------------------------------------------------------
# parser
#
#   expr     := ['-'] term (('+'|'-') ['-'] term)*
#   term     := factor ('*' factor)*
#   factor   := base ('^' uint)?
#   base     := rational | var | '(' expr ')'
#   rational := int ('/' uint)?

_TOKEN_RE = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


def _tokenize(text):
    tokens = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN_RE.match(text, pos)
        if not m:
            tokens.append(("bad", text[pos], pos))
            pos += 1
            continue
        start = m.start(m.lastgroup)
        tokens.append((m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text, context):
        self.text = text
        self.context = context
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, tok[2])

    def parse(self):
        if self.peek()[0] == "end":
            self.error("empty expression")
        p = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            if tok[0] == "bad":
                self.error(f"unexpected character {tok[1]!r}", tok)
            if tok[0] in ("num", "name") or tok[1] == "(":
                self.error("implicit multiplication is not allowed; use '*'", tok)
            self.error(f"unexpected {tok[1]!r}", tok)
        return p

    def signed_term(self):
        if self.peek()[1] == "-":
            self.advance()
            return -self.term()
        return self.term()

    def expr(self):
        p = self.signed_term()
        while self.peek()[1] in ("+", "-"):
            op = self.advance()[1]
            t = self.signed_term()
            p = p + t if op == "+" else p - t
        return p

    def term(self):
        p = self.factor()
        while self.peek()[1] == "*":
            self.advance()
            p = p * self.factor()
        return p

    def factor(self):
        base = self.base()
        if self.peek()[1] == "^":
            self.advance()
            tok = self.peek()
            if tok[1] == "-":
                self.error("negative exponent", tok)
            if tok[0] != "num":
                self.error("exponent must be a non-negative integer literal", tok)
            self.advance()
            nxt = self.peek()
            if nxt[1] in ("/", "."):
                self.error("non-integer exponent", nxt)
            return base ** int(tok[1])
        return base

    def base(self):
        tok = self.peek()
        kind, value, pos = tok
        if kind == "num":
            self.advance()
            num = int(value)
            den = 1
            if self.peek()[1] == "/":
                self.advance()
                dtok = self.peek()
                if dtok[0] != "num":
                    self.error("expected unsigned integer denominator", dtok)
                self.advance()
                den = int(dtok[1])
                if den == 0:
                    self.error("zero denominator", dtok)
            return Polynomial.constant(self.context, Fraction(num, den))
        if kind == "name":
            self.advance()
            if value not in self.context.names:
                raise ParseError(f"unknown variable {value!r} (context {self.context})", pos)
            return Polynomial.var(self.context, value)
        if value == "(":
            self.advance()
            if self.peek()[1] == ")":
                self.error("empty parentheses")
            p = self.expr()
            if self.peek()[1] != ")":
                self.error("expected ')'")
            self.advance()
            return p
        if kind == "end":
            self.error("unexpected end of expression")
        if kind == "bad":
            self.error(f"unexpected character {value!r}")
        self.error(f"unexpected {value!r}")


def parse_poly(text: str, context: VarContext) -> Polynomial:
    """Parse ``text`` into a canonical polynomial over ``context``.

    Raises :class:`ParseError` (with a column) on syntax errors, unknown
    variables and negative or non-integer exponents.
    """
    return _Parser(text, context).parse()
