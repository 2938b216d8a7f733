"""Differential forms with polynomial coefficients on Euclidean domains.

A k-form on a domain with coordinates ``x_0 .. x_{m-1}`` is stored as a
mapping from strictly increasing index tuples ``(i_1 < ... < i_k)`` to
coefficient polynomials, read as ``sum g_I dx_{i_1} ^ ... ^ dx_{i_k}``.
Forms are canonical at construction: zero coefficients are dropped and
frames are sorted, so ``==`` compares mathematically.
"""

from __future__ import annotations

import re
from itertools import combinations
from typing import Iterable, Mapping

from .errors import ParseError, UsageError
from .ratpoly import Polynomial, PolyMap, VarContext, monomials_up_to, parse_poly, poly_compose, poly_partial

__all__ = [
    "DifferentialForm",
    "wedge",
    "ext_derivative",
    "pullback_form",
    "form_basis_labels",
    "form_coordinates",
    "form_from_coordinates",
    "parse_form",
    "format_form",
]

Frame = tuple  # strictly increasing tuple of variable indices


def _sort_with_sign(indices):
    """Sort ``indices``; return (sorted tuple, sign) or (None, 0) on a repeat."""
    if len(set(indices)) != len(indices):
        return None, 0
    idx = list(indices)
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return tuple(idx), sign


class DifferentialForm:
    __slots__ = ("context", "degree", "_terms", "_hash")

    def __init__(self, context: VarContext, degree: int, terms: Mapping[Frame, Polynomial] | None = None):
        if not isinstance(degree, int) or degree < 0:
            raise UsageError(f"form degree must be a non-negative integer, got {degree!r}")
        m = len(context)
        clean: dict = {}
        for frame, coeff in (terms or {}).items():
            frame = tuple(frame)
            if len(frame) != degree:
                raise UsageError(f"frame {frame} does not have length {degree}")
            if any(not isinstance(i, int) or not 0 <= i < m for i in frame):
                raise UsageError(f"frame {frame} has indices outside 0..{m - 1}")
            if any(a >= b for a, b in zip(frame, frame[1:])):
                raise UsageError(f"frame {frame} is not strictly increasing")
            if not isinstance(coeff, Polynomial):
                coeff = Polynomial.constant(context, coeff)
            if coeff.context != context:
                raise UsageError(f"coefficient {coeff} lives in {coeff.context}, expected {context}")
            total = clean[frame] + coeff if frame in clean else coeff
            if total.is_zero():
                clean.pop(frame, None)
            else:
                clean[frame] = total
        self._init(context, degree, clean)

    def _init(self, context, degree, clean):
        self.context = context
        self.degree = degree
        self._terms = {f: clean[f] for f in sorted(clean)}
        self._hash = None

    @classmethod
    def _raw(cls, context, degree, clean):
        w = cls.__new__(cls)
        w._init(context, degree, {f: c for f, c in clean.items() if not c.is_zero()})
        return w

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, context: VarContext, degree: int) -> "DifferentialForm":
        return cls(context, degree)

    @classmethod
    def function(cls, f: Polynomial) -> "DifferentialForm":
        """The 0-form given by a polynomial."""
        return cls._raw(f.context, 0, {(): f})

    @classmethod
    def coordinate(cls, context: VarContext, which: int | str) -> "DifferentialForm":
        """The 1-form ``dx_i``."""
        i = context.index(which) if isinstance(which, str) else which
        return cls(context, 1, {(i,): Polynomial.constant(context, 1)})

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, frame: Frame) -> Polynomial:
        return self._terms.get(tuple(frame), Polynomial.zero(self.context))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def coefficient_degree(self) -> int:
        return max((c.degree() for c in self._terms.values()), default=-1)

    def __eq__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return self.context == other.context and self.degree == other.degree and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.context, self.degree, tuple(self._terms.items())))
        return self._hash

    # -- linear structure ---------------------------------------------------

    def _check_same(self, other):
        if not isinstance(other, DifferentialForm):
            raise TypeError(f"expected a DifferentialForm, got {type(other).__name__}")
        if other.context != self.context:
            raise UsageError(f"context mismatch: {self.context} vs {other.context}")
        if other.degree != self.degree:
            raise UsageError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other):
        self._check_same(other)
        out = dict(self._terms)
        for f, c in other._terms.items():
            out[f] = out[f] + c if f in out else c
        return DifferentialForm._raw(self.context, self.degree, out)

    def __neg__(self):
        return DifferentialForm._raw(self.context, self.degree, {f: -c for f, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, g):
        """Multiply every coefficient by a polynomial or a rational scalar."""
        if isinstance(g, Polynomial):
            if g.context != self.context:
                raise UsageError(f"context mismatch: {self.context} vs {g.context}")
        elif isinstance(g, DifferentialForm):
            return NotImplemented
        else:
            g = Polynomial.constant(self.context, g)
        return DifferentialForm._raw(self.context, self.degree, {f: c * g for f, c in self._terms.items()})

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def __str__(self):
        return format_form(self)

    def __repr__(self):
        return f"DifferentialForm({self.context.names!r}, {self.degree}, {format_form(self)!r})"


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    if a.context != b.context:
        raise UsageError(f"context mismatch: {a.context} vs {b.context}")
    ctx = a.context
    degree = a.degree + b.degree
    out: dict = {}
    for fa, ca in a.items():
        for fb, cb in b.items():
            frame, sign = _sort_with_sign(fa + fb)
            if frame is None:
                continue
            term = ca * cb
            if sign < 0:
                term = -term
            out[frame] = out[frame] + term if frame in out else term
    return DifferentialForm._raw(ctx, degree, out)


def ext_derivative(w: DifferentialForm) -> DifferentialForm:
    """d(g dx_I) = sum_j dg/dx_j dx_j ^ dx_I."""
    ctx = w.context
    out: dict = {}
    for frame, g in w.items():
        for j in range(len(ctx)):
            if j in frame:
                continue
            dg = poly_partial(g, j)
            if dg.is_zero():
                continue
            # moving dx_j past the entries of I smaller than j
            pos = sum(1 for i in frame if i < j)
            new = frame[:pos] + (j,) + frame[pos:]
            if pos % 2:
                dg = -dg
            out[new] = out[new] + dg if new in out else dg
    return DifferentialForm._raw(ctx, w.degree + 1, out)


def pullback_form(f: PolyMap, w: DifferentialForm) -> DifferentialForm:
    """f*(g dx_{i1}^...^dx_{ik}) = (g o f) df_{i1}^...^df_{ik}."""
    if f.target_arity != len(w.context):
        raise UsageError(
            f"map has {f.target_arity} components but the form lives on {len(w.context)} variables"
        )
    src = f.source
    if w.degree > len(src):
        return DifferentialForm.zero(src, w.degree)
    differentials: dict[int, DifferentialForm] = {}

    def d_component(i):
        if i not in differentials:
            differentials[i] = ext_derivative(DifferentialForm.function(f.components[i]))
        return differentials[i]

    total = DifferentialForm.zero(src, w.degree)
    for frame, g in w.items():
        piece = DifferentialForm.function(poly_compose(g, f))
        for i in frame:
            if piece.is_zero():
                break
            piece = wedge(piece, d_component(i))
        else:
            total = total + piece
    return total


# ---------------------------------------------------------------------------
# coordinates on truncated monomial bases


def form_basis_labels(nvars: int, degree: int, max_coeff_degree: int) -> list[tuple[Frame, tuple]]:
    """Labels ``(frame, monomial)`` of the monomial-form basis.

    Frames in lexicographic order; inside a frame, monomials by ascending
    total degree.
    """
    monos = monomials_up_to(nvars, max_coeff_degree)
    return [(frame, mono) for frame in combinations(range(nvars), degree) for mono in monos]


def form_coordinates(w: DifferentialForm) -> dict:
    """Sparse coordinates ``{(frame, monomial): coefficient}``."""
    return {(frame, mono): c for frame, g in w.items() for mono, c in g.items()}


def form_from_coordinates(context: VarContext, degree: int, labels, vector) -> DifferentialForm:
    terms: dict = {}
    for (frame, mono), c in zip(labels, vector):
        if c:
            terms.setdefault(frame, {})[mono] = c
    return DifferentialForm._raw(context, degree, {f: Polynomial(context, t) for f, t in terms.items()})


# ---------------------------------------------------------------------------
# text syntax:  coeff = "<poly>" frame = <var> <var> ...

_ENTRY_RE = re.compile(r'^\s*coeff\s*=\s*"(?P<poly>[^"]*)"\s*(?:frame\s*=(?P<frame>.*))?$')


def parse_form(text: str, context: VarContext) -> DifferentialForm:
    """Parse a form file: one ``coeff = "<poly>" frame = v1 v2 ...`` per line.

    Entries sharing a frame are summed.  ``#`` starts a comment.
    """
    terms: dict = {}
    degree = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _ENTRY_RE.match(line)
        if not m:
            raise ParseError('expected: coeff = "<poly>" frame = <var> ...', line=lineno)
        try:
            coeff = parse_poly(m.group("poly"), context)
        except ParseError as e:
            raise ParseError(f"in coefficient: {e.message}", e.pos, lineno) from None
        names = (m.group("frame") or "").split()
        idx = []
        for name in names:
            if name not in context.names:
                raise ParseError(f"frame variable {name!r} not in {context}", line=lineno)
            idx.append(context.index(name))
        if any(a >= b for a, b in zip(idx, idx[1:])):
            raise ParseError(f"frame {' '.join(names)} is not strictly increasing in {context}", line=lineno)
        if degree is None:
            degree = len(idx)
        elif degree != len(idx):
            raise ParseError(f"frame of length {len(idx)} in a form of degree {degree}", line=lineno)
        frame = tuple(idx)
        terms[frame] = terms[frame] + coeff if frame in terms else coeff
    if degree is None:
        raise ParseError("form file has no entries")
    return DifferentialForm(context, degree, terms)


def format_form(w: DifferentialForm) -> str:
    """Human-readable rendering, e.g. ``(2*s)*ds - dx^dy``."""
    if w.is_zero():
        return "0" if w.degree == 0 else f"0 ({w.degree}-form)"
    parts = []
    names = w.context.names
    for frame, g in w.items():
        basis = "^".join("d" + names[i] for i in frame)
        if not basis:
            parts.append(str(g))
        elif g == 1:
            parts.append(basis)
        elif g == -1:
            parts.append("-" + basis)
        else:
            parts.append(f"({g})*{basis}")
    return " + ".join(parts)


def format_form_file(w: DifferentialForm) -> str:
    """Render ``w`` in the form-file syntax accepted by :func:`parse_form`."""
    names = w.context.names
    if w.is_zero():
        frame = " ".join(names[: w.degree])
        return f'coeff = "0" frame = {frame}'.rstrip() + "\n"
    lines = []
    for frame, g in w.items():
        lines.append(f'coeff = "{g}" frame = ' + " ".join(names[i] for i in frame))
    return "\n".join(line.rstrip() for line in lines) + "\n"
