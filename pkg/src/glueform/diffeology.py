"""Spaces presented by a generating family of two polynomial plots.

A :class:`SpacePresentation` bundles the ambient coordinates, the
equations cutting out ``X``, the two generating plots and a list of
charts of their fibered product.  Nothing here is solved for: every piece
of data is supplied by the user and checked symbolically, and
:func:`falsify_by_sampling` adds a randomized sanity net on top.

Horizontality of a form along a plot is only decidable relative to a
witness:

* :class:`Retraction` -- a polynomial left inverse ``q`` of the plot.  It
  forces ``h == h'`` whenever ``plot o h == plot o h'``, so every form is
  horizontal.
* :class:`SymmetryGenerators` -- a finite, user-asserted list of pairs
  ``(h, h')`` with ``plot o h == plot o h'``; a form is horizontal when its
  pullbacks along each pair agree.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Union

from .errors import UsageError, VerificationError
from .exterior import (
    DifferentialForm,
    form_basis_labels,
    form_coordinates,
    form_from_coordinates,
    pullback_form,
)
from .linalg import LabeledMatrix, mat_kernel_basis
from .ratpoly import Polynomial, PolyMap, VarContext, poly_compose, poly_eval

__all__ = [
    "Retraction",
    "SymmetryGenerators",
    "Plot",
    "PullbackChart",
    "SpacePresentation",
    "CheckResult",
    "Violation",
    "SamplingReport",
    "verify_plot",
    "verify_witness",
    "verify_pullback_chart",
    "verify_factorization",
    "is_horizontal",
    "horizontality_constraints",
    "horizontal_basis",
    "falsify_by_sampling",
]


@dataclass(frozen=True)
class Retraction:
    q: PolyMap  # ambient -> plot domain

    regime = "retraction"


@dataclass(frozen=True)
class SymmetryGenerators:
    context: VarContext
    pairs: tuple[tuple[PolyMap, PolyMap], ...]

    regime = "symmetry"

    def __post_init__(self):
        pairs = tuple((h, hp) for h, hp in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if not pairs:
            raise UsageError("a symmetry witness needs at least one pair")
        for h, hp in pairs:
            if h.source != self.context or hp.source != self.context:
                raise UsageError(f"symmetry pair maps must have source {self.context}")


HorizontalityWitness = Union[Retraction, SymmetryGenerators]


@dataclass(frozen=True)
class Plot:
    name: str
    map: PolyMap
    witness: HorizontalityWitness

    @property
    def domain(self) -> VarContext:
        return self.map.source


@dataclass(frozen=True)
class PullbackChart:
    name: str
    vars: VarContext
    to_alpha: PolyMap
    to_beta: PolyMap


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one symbolic verification.

    ``witness`` holds the first offending object (a nonzero polynomial, a
    mismatching component, ...) when the check fails.
    """

    check: str
    passed: bool
    detail: str = ""
    witness: object = None

    def __bool__(self):
        return self.passed

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.check}" + (f": {self.detail}" if self.detail else "")


@dataclass(frozen=True)
class SpacePresentation:
    ambient: VarContext
    equations: tuple[Polynomial, ...]
    alpha: Plot
    beta: Plot
    charts: tuple[PullbackChart, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "equations", tuple(self.equations))
        object.__setattr__(self, "charts", tuple(self.charts))
        for eq in self.equations:
            if eq.context != self.ambient:
                raise UsageError(f"equation {eq} is not over the ambient context {self.ambient}")
        if self.alpha.name == self.beta.name:
            raise UsageError(f"the two plots must have distinct names, both are {self.alpha.name!r}")
        names = [c.name for c in self.charts]
        if len(set(names)) != len(names):
            raise UsageError("pullback chart names must be unique")

    def plot(self, which: str) -> Plot:
        """Look a plot up by name, or by the selectors ``'alpha'``/``'beta'``."""
        for p in (self.alpha, self.beta):
            if p.name == which:
                return p
        if which == "alpha":
            return self.alpha
        if which == "beta":
            return self.beta
        raise UsageError(f"no plot named {which!r}")

    def checks(self) -> list[CheckResult]:
        """All symbolic verifications, in a fixed order."""
        out = [verify_plot(self, self.alpha), verify_witness(self.alpha),
               verify_plot(self, self.beta), verify_witness(self.beta)]
        out.extend(verify_pullback_chart(self, c) for c in self.charts)
        return out

    @cached_property
    def is_valid(self) -> bool:
        return all(self.checks())

    def ensure_valid(self) -> None:
        if not self.is_valid:
            failed = [r.line() for r in self.checks() if not r]
            raise VerificationError("presentation fails verification: " + "; ".join(failed))

    @property
    def regimes(self) -> str:
        return f"{self.alpha.name}={self.alpha.witness.regime}, {self.beta.name}={self.beta.witness.regime}"


# ---------------------------------------------------------------------------
# symbolic verification


def _map_mismatch(f: PolyMap, g: PolyMap):
    """First index where two maps differ, with the difference polynomial."""
    for i, (a, b) in enumerate(zip(f.components, g.components)):
        if a != b:
            return i, a - b
    return None


def verify_plot(space: SpacePresentation, plot: Plot) -> CheckResult:
    if plot.map.target_arity != len(space.ambient):
        raise UsageError(
            f"plot {plot.name} has {plot.map.target_arity} components, ambient has {len(space.ambient)} variables"
        )
    label = f"plot {plot.name} lands in X"
    for eq in space.equations:
        value = poly_compose(eq, plot.map)
        if not value.is_zero():
            return CheckResult(label, False, f"equation {eq} pulls back to {value}", value)
    return CheckResult(label, True, f"{len(space.equations)} equation(s) vanish identically")


def verify_witness(plot: Plot) -> CheckResult:
    w = plot.witness
    domain = plot.domain
    if isinstance(w, Retraction):
        label = f"witness {plot.name}: retraction composed with plot is the identity"
        if w.q.target_arity != len(domain):
            raise UsageError(f"retraction of {plot.name} has {w.q.target_arity} components, domain has {len(domain)}")
        if len(w.q.source) != plot.map.target_arity:
            raise UsageError(f"retraction of {plot.name} is not defined on the ambient space")
        # q is written in ambient variables, the plot in domain variables
        composed = PolyMap(domain, tuple(poly_compose(c, plot.map) for c in w.q.components))
        bad = _map_mismatch(composed, PolyMap.identity(domain))
        if bad:
            i, _ = bad
            return CheckResult(label, False,
                               f"component {i}: q o {plot.name} = {composed.components[i]}, expected {domain.names[i]}",
                               composed.components[i])
        return CheckResult(label, True, f"q = {w.q}")
    if isinstance(w, SymmetryGenerators):
        label = f"witness {plot.name}: {len(w.pairs)} symmetry pair(s) satisfy plot o h = plot o h'"
        for k, (h, hp) in enumerate(w.pairs):
            if h.target_arity != len(domain) or hp.target_arity != len(domain):
                raise UsageError(f"symmetry pair {k} of {plot.name} does not map into the plot domain")
            left, right = plot.map.compose(h), plot.map.compose(hp)
            bad = _map_mismatch(left, right)
            if bad:
                i, diff = bad
                return CheckResult(label, False,
                                   f"pair {k}, component {i}: {left.components[i]} != {right.components[i]}",
                                   diff)
        return CheckResult(label, True, "user-asserted generating list")
    raise UsageError(f"unknown witness type {type(w).__name__}")


def verify_pullback_chart(space: SpacePresentation, chart: PullbackChart) -> CheckResult:
    a, b = space.alpha, space.beta
    if chart.to_alpha.source != chart.vars or chart.to_beta.source != chart.vars:
        raise UsageError(f"chart {chart.name}: maps must be defined on the chart variables {chart.vars}")
    if chart.to_alpha.target_arity != len(a.domain) or chart.to_beta.target_arity != len(b.domain):
        raise UsageError(f"chart {chart.name}: maps do not land in the plot domains")
    label = f"chart {chart.name}: {a.name} o to_{a.name} = {b.name} o to_{b.name}"
    left = a.map.compose(chart.to_alpha)
    right = b.map.compose(chart.to_beta)
    bad = _map_mismatch(left, right)
    if bad:
        i, diff = bad
        return CheckResult(label, False,
                           f"ambient component {i}: {left.components[i]} != {right.components[i]}", diff)
    return CheckResult(label, True, f"both sides equal {left}")


def verify_factorization(candidate: PolyMap, space: SpacePresentation, through: str, h: PolyMap) -> CheckResult:
    """Certify ``candidate == plot o h`` globally, making it a plot of the generated diffeology."""
    plot = space.plot(through)
    if candidate.target_arity != len(space.ambient):
        raise UsageError(f"candidate has {candidate.target_arity} components, ambient has {len(space.ambient)}")
    if h.source != candidate.source or h.target_arity != len(plot.domain):
        raise UsageError(f"h must map {candidate.source} into the domain {plot.domain} of {plot.name}")
    label = f"candidate {candidate} factors through {plot.name}"
    composed = plot.map.compose(h)
    bad = _map_mismatch(candidate, composed)
    if bad:
        i, diff = bad
        return CheckResult(label, False,
                           f"component {i}: {candidate.components[i]} != {composed.components[i]}", diff)
    return CheckResult(label, True, f"h = {h}")


# ---------------------------------------------------------------------------
# horizontal forms


def is_horizontal(plot: Plot, w: DifferentialForm) -> bool:
    if w.context != plot.domain:
        raise UsageError(f"form lives on {w.context}, plot {plot.name} has domain {plot.domain}")
    if isinstance(plot.witness, Retraction):
        return True
    return all(pullback_form(h, w) == pullback_form(hp, w) for h, hp in plot.witness.pairs)


def horizontality_constraints(plot: Plot, w: DifferentialForm, tag=()) -> dict:
    """Sparse linear functional values of ``w`` for the horizontality system.

    Keys are ``tag + (pair index, frame, monomial)``; ``w`` is horizontal
    iff every value is zero.
    """
    if isinstance(plot.witness, Retraction):
        return {}
    out = {}
    for k, (h, hp) in enumerate(plot.witness.pairs):
        diff = pullback_form(h, w) - pullback_form(hp, w)
        for key, c in form_coordinates(diff).items():
            out[tag + (k,) + key] = c
    return out


def horizontal_basis(plot: Plot, k: int, D: int) -> list[DifferentialForm]:
    """Basis of horizontal k-forms on the plot domain with coefficient degree <= D."""
    if k < 0 or D < 0:
        raise UsageError("form degree and bound must be non-negative")
    domain = plot.domain
    labels = form_basis_labels(len(domain), k, D)
    columns = [form_from_coordinates(domain, k, [lab], [1]) for lab in labels]
    if isinstance(plot.witness, Retraction):
        return columns
    matrix = LabeledMatrix.from_sparse_columns(
        [horizontality_constraints(plot, col) for col in columns], col_labels=labels)
    return [form_from_coordinates(domain, k, labels, v) for v in mat_kernel_basis(matrix)]


# ---------------------------------------------------------------------------
# randomized falsification


@dataclass(frozen=True)
class Violation:
    check: str
    point: tuple
    detail: str

    def line(self) -> str:
        pt = "(" + ", ".join(str(x) for x in self.point) + ")"
        return f"{self.check} violated at {pt}: {self.detail}"


@dataclass(frozen=True)
class SamplingReport:
    samples: int
    seed: int
    evaluations: int
    violations: tuple[Violation, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return not self.violations


def _random_point(rng, n):
    return tuple(Fraction(rng.randint(-12, 12), rng.randint(1, 7)) for _ in range(n))


def falsify_by_sampling(space: SpacePresentation, samples: int, seed: int) -> SamplingReport:
    """Evaluate every symbolic identity of ``space`` at random rational points.

    Only ever falsifies: an empty violation list is not a certificate.  At
    most one violation per identity is recorded (the first one found).
    """
    if samples <= 0:
        raise UsageError("samples must be positive")
    rng = random.Random(seed)
    identities = []  # (check name, arity, function(point) -> detail or None)

    for plot in (space.alpha, space.beta):
        for eq in space.equations:
            def containment(pt, plot=plot, eq=eq):
                v = poly_eval(eq, plot.map(pt))
                return None if v == 0 else f"equation {eq} evaluates to {v}"
            identities.append((f"plot {plot.name} lands in X", len(plot.domain), containment))
        w = plot.witness
        if isinstance(w, Retraction):
            def retract(pt, plot=plot, q=w.q):
                back = q(plot.map(pt))
                return None if back == tuple(pt) else f"q({plot.name}(p)) = {_fmt(back)}"
            identities.append((f"witness {plot.name} retraction", len(plot.domain), retract))
        else:
            for k, (h, hp) in enumerate(w.pairs):
                def symmetric(pt, plot=plot, h=h, hp=hp):
                    a, b = plot.map(h(pt)), plot.map(hp(pt))
                    return None if a == b else f"{_fmt(a)} != {_fmt(b)}"
                identities.append((f"witness {plot.name} symmetry pair {k}", len(w.context), symmetric))
    for chart in space.charts:
        def commute(pt, chart=chart):
            a = space.alpha.map(chart.to_alpha(pt))
            b = space.beta.map(chart.to_beta(pt))
            return None if a == b else f"{space.alpha.name} gives {_fmt(a)}, {space.beta.name} gives {_fmt(b)}"
        identities.append((f"chart {chart.name} commutes", len(chart.vars), commute))

    violations = []
    evaluations = 0
    for name, arity, fn in identities:
        for _ in range(samples):
            pt = _random_point(rng, arity)
            evaluations += 1
            detail = fn(pt)
            if detail is not None:
                violations.append(Violation(name, pt, detail))
                break
    return SamplingReport(samples, seed, evaluations, tuple(violations))


def _fmt(values):
    return "(" + ", ".join(str(v) for v in values) + ")"
