"""Forms on the presented space as glued pairs, and their cohomology.

A k-form on ``X`` is represented by its two restrictions ``(mu, nu)``: a
horizontal form on each plot domain whose difference vanishes when pulled
back to every chart of the fibered product.  All spaces are truncated by
a bound ``D`` on the total degree of coefficients, which turns each
question into exact finite linear algebra.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache

from .diffeology import (
    CheckResult,
    SpacePresentation,
    horizontality_constraints,
    is_horizontal,
)
from .errors import GlueformError, InternalConsistencyError, UsageError
from .exterior import (
    DifferentialForm,
    ext_derivative,
    form_basis_labels,
    form_coordinates,
    form_from_coordinates,
    pullback_form,
)
from .linalg import LabeledMatrix, image_membership, mat_kernel_basis, mat_rank

__all__ = [
    "GluedForm",
    "GlueRejected",
    "CohomologyEntry",
    "CohomologyReport",
    "AuditReport",
    "delta",
    "glue",
    "restrict",
    "d_glued",
    "omega_basis",
    "cohomology",
    "cohomology_report",
    "exactness_audit",
]

CAVEAT = ("values are for the truncated polynomial model; they equal forms on X only under "
          "the asserted completeness of the pullback charts and horizontality witnesses")


@dataclass(frozen=True)
class GluedForm:
    space: SpacePresentation
    degree: int
    mu: DifferentialForm
    nu: DifferentialForm

    def is_zero(self) -> bool:
        return self.mu.is_zero() and self.nu.is_zero()

    def __str__(self):
        return f"({self.mu}, {self.nu})"


class GlueRejected(GlueformError):
    """A pair ``(mu, nu)`` does not define a form on the space.

    ``where`` names the witnessing chart or symmetry pair and ``value`` is
    the nonzero form that certifies the failure.
    """

    def __init__(self, reason: str, where: str, value=None):
        self.reason = reason
        self.where = where
        self.value = value
        super().__init__(f"{where}: {reason}")


def _check_pair(space, mu, nu):
    a, b = space.alpha, space.beta
    if mu.context != a.domain:
        raise UsageError(f"mu lives on {mu.context}, plot {a.name} has domain {a.domain}")
    if nu.context != b.domain:
        raise UsageError(f"nu lives on {nu.context}, plot {b.name} has domain {b.domain}")
    if mu.degree != nu.degree:
        raise UsageError(f"degree mismatch: mu is a {mu.degree}-form, nu a {nu.degree}-form")


def delta(space: SpacePresentation, mu: DifferentialForm, nu: DifferentialForm) -> list[tuple[str, DifferentialForm]]:
    """Pullback of ``mu`` minus pullback of ``nu`` on every chart."""
    _check_pair(space, mu, nu)
    return [(c.name, pullback_form(c.to_alpha, mu) - pullback_form(c.to_beta, nu)) for c in space.charts]


def glue(space: SpacePresentation, mu: DifferentialForm, nu: DifferentialForm) -> GluedForm:
    """Accept ``(mu, nu)`` as a form on ``X`` or raise :class:`GlueRejected`."""
    _check_pair(space, mu, nu)
    for plot, w, label in ((space.alpha, mu, "mu"), (space.beta, nu, "nu")):
        if not is_horizontal(plot, w):
            pairs = plot.witness.pairs
            k = next(i for i, (h, hp) in enumerate(pairs) if pullback_form(h, w) != pullback_form(hp, w))
            h, hp = pairs[k]
            raise GlueRejected(f"{label} is not horizontal for {plot.name}",
                               f"{plot.name} symmetry pair {k}",
                               pullback_form(h, w) - pullback_form(hp, w))
    for name, value in delta(space, mu, nu):
        if not value.is_zero():
            raise GlueRejected(f"delta = {value} (nonzero)", f"chart {name}", value)
    return GluedForm(space, mu.degree, mu, nu)


def restrict(space: SpacePresentation, g: GluedForm) -> tuple[DifferentialForm, DifferentialForm]:
    if g.space != space:
        raise UsageError("glued form belongs to a different presentation")
    return g.mu, g.nu


def d_glued(space: SpacePresentation, g: GluedForm) -> GluedForm:
    mu, nu = restrict(space, g)
    try:
        return glue(space, ext_derivative(mu), ext_derivative(nu))
    except GlueRejected as e:
        raise InternalConsistencyError(f"d of a glued form failed to glue: {e}") from e


# ---------------------------------------------------------------------------
# truncated spaces


def _pair_labels(space, k, D):
    la = form_basis_labels(len(space.alpha.domain), k, D)
    lb = form_basis_labels(len(space.beta.domain), k, D)
    return [(0,) + lab for lab in la] + [(1,) + lab for lab in lb]


def _pair_coordinates(mu, nu) -> dict:
    out = {(0,) + key: c for key, c in form_coordinates(mu).items()}
    out.update({(1,) + key: c for key, c in form_coordinates(nu).items()})
    return out


def _split(space, k, labels, vector):
    a_lab, a_val, b_lab, b_val = [], [], [], []
    for lab, v in zip(labels, vector):
        if lab[0] == 0:
            a_lab.append(lab[1:])
            a_val.append(v)
        else:
            b_lab.append(lab[1:])
            b_val.append(v)
    return (form_from_coordinates(space.alpha.domain, k, a_lab, a_val),
            form_from_coordinates(space.beta.domain, k, b_lab, b_val))


def _constraint_column(space, mu, nu) -> dict:
    out = {}
    out.update(horizontality_constraints(space.alpha, mu, tag=("horizontal", 0)))
    out.update(horizontality_constraints(space.beta, nu, tag=("horizontal", 1)))
    for i, (_, value) in enumerate(delta(space, mu, nu)):
        for key, c in form_coordinates(value).items():
            out[("delta", i) + key] = c
    return out


@lru_cache(maxsize=256)
def _constraint_system(space, k, D) -> LabeledMatrix:
    """Stacked horizontality and delta-vanishing system over the pair basis."""
    labels = _pair_labels(space, k, D)
    columns = []
    for lab in labels:
        mu, nu = _split(space, k, [lab], [1])
        columns.append(_constraint_column(space, mu, nu))
    return LabeledMatrix.from_sparse_columns(columns, col_labels=labels)


@lru_cache(maxsize=256)
def _omega_vectors(space, k, D) -> tuple:
    return tuple(mat_kernel_basis(_constraint_system(space, k, D)))


def omega_basis(space: SpacePresentation, k: int, D: int) -> list[GluedForm]:
    """Basis of truncated k-forms on ``X`` (coefficient degree <= D on both sides)."""
    if k < 0 or D < 0:
        raise UsageError("form degree and bound must be non-negative")
    labels = _pair_labels(space, k, D)
    out = []
    for v in _omega_vectors(space, k, D):
        mu, nu = _split(space, k, labels, v)
        out.append(GluedForm(space, k, mu, nu))
    return out


def _coordinate_matrix(forms, labels=None) -> LabeledMatrix:
    cols = [_pair_coordinates(g.mu, g.nu) for g in forms]
    if labels is None:
        return LabeledMatrix.from_sparse_columns(cols)
    index = {lab: i for i, lab in enumerate(labels)}
    dense = []
    for col in cols:
        v = [0] * len(labels)
        for key, c in col.items():
            if key not in index:
                raise InternalConsistencyError(f"coordinate {key} outside the truncated basis")
            v[index[key]] = c
        dense.append(v)
    return LabeledMatrix.from_columns(dense, len(labels), row_labels=labels)


# ---------------------------------------------------------------------------
# cohomology


@dataclass(frozen=True)
class CohomologyEntry:
    degree: int
    bound: int
    dim_omega: int
    closed: int
    exact: int

    def __post_init__(self):
        if not 0 <= self.exact <= self.closed <= self.dim_omega:
            raise InternalConsistencyError(f"inconsistent dimensions in {self}")

    @property
    def h(self) -> int:
        return self.closed - self.exact


@dataclass(frozen=True)
class CohomologyReport:
    bound: int
    regimes: str
    charts: tuple[str, ...]
    entries: tuple[CohomologyEntry, ...]
    stability: tuple[tuple[int, tuple[int, ...]], ...] = field(default=())
    caveat: str = CAVEAT

    def h(self, k: int) -> int:
        for e in self.entries:
            if e.degree == k:
                return e.h
        raise KeyError(k)


def cohomology(space: SpacePresentation, k: int, D: int) -> CohomologyEntry:
    """Truncated H^k at bound D.

    Closed forms are taken among forms with coefficients of degree <= D;
    exact forms are images of (k-1)-forms of degree <= D + 1 that land in
    that space.
    """
    if k < 0 or D < 0:
        raise UsageError("form degree and bound must be non-negative")
    basis = omega_basis(space, k, D)
    d_images = [d_glued(space, g) for g in basis]
    closed = len(basis) - mat_rank(_coordinate_matrix(d_images))
    exact = 0
    if k > 0 and basis:
        labels = _pair_labels(space, k, D)
        target = _coordinate_matrix(basis, labels)
        sources = [d_glued(space, g) for g in omega_basis(space, k - 1, D + 1)]
        images = _coordinate_matrix(sources, labels)
        for j in range(images.cols):
            if not image_membership(target, images.column(j)):
                raise InternalConsistencyError(f"d of a degree-{k - 1} form left the truncated space")
        # dim(im d  ∩  span basis) = rank(I) + rank(B) - rank([I | B])
        both = LabeledMatrix.from_columns(
            [images.column(j) for j in range(images.cols)] + [target.column(j) for j in range(target.cols)],
            len(labels))
        exact = mat_rank(images) + mat_rank(target) - mat_rank(both)
    return CohomologyEntry(k, D, len(basis), closed, exact)


def cohomology_report(space: SpacePresentation, degrees, D: int, window: int = 3) -> CohomologyReport:
    """Table of truncated cohomology, with H^k also computed at the
    ``window - 1`` smaller bounds to flag stabilization."""
    entries = tuple(cohomology(space, k, D) for k in degrees)
    stability = []
    for e in entries:
        lows = [cohomology(space, e.degree, b).h for b in range(max(0, D - window + 1), D)]
        stability.append((e.degree, tuple(lows) + (e.h,)))
    return CohomologyReport(D, space.regimes, tuple(c.name for c in space.charts), entries, tuple(stability))


# ---------------------------------------------------------------------------
# exactness audit


@dataclass(frozen=True)
class AuditReport:
    degree: int
    bound: int
    dim_omega: int
    steps: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(self.steps)


def exactness_audit(space: SpacePresentation, k: int, D: int, extra_samples: int = 8) -> AuditReport:
    """Machine-check the three exactness steps on the truncated bases.

    1. the representation is faithful: basis pairs are linearly independent;
    2. every basis pair is horizontal and has vanishing delta on each chart;
    3. every kernel vector of the constraint system (and random combinations
       of them) is accepted by :func:`glue`, and glue o restrict is the
       identity.
    """
    basis = omega_basis(space, k, D)
    system = _constraint_system(space, k, D)
    labels = _pair_labels(space, k, D)

    coords = _coordinate_matrix(basis, labels)
    rank = mat_rank(coords)
    nullity_ok = len(basis) == system.cols - mat_rank(system)
    step1 = CheckResult(
        "step 1: restriction is injective",
        rank == len(basis) and all(not g.is_zero() for g in basis) and nullity_ok,
        f"{len(basis)} basis pairs, rank {rank}, kernel dimension = cols - rank: {nullity_ok}")

    bad = None
    for i, g in enumerate(basis):
        if not (is_horizontal(space.alpha, g.mu) and is_horizontal(space.beta, g.nu)):
            bad = f"basis element {i} is not horizontal"
            break
        nonzero = [name for name, v in delta(space, g.mu, g.nu) if not v.is_zero()]
        if nonzero:
            bad = f"basis element {i} has nonzero delta on chart {nonzero[0]}"
            break
    step2 = CheckResult("step 2: delta o r = 0", bad is None,
                        bad or f"delta vanishes on {len(space.charts)} chart(s) for all {len(basis)} basis pairs")

    rng = random.Random(1009 * k + D)
    candidates = [tuple(v) for v in _omega_vectors(space, k, D)]
    for _ in range(extra_samples if candidates else 0):
        weights = [rng.randint(-5, 5) for _ in candidates]
        candidates.append(tuple(sum(w * v[j] for w, v in zip(weights, candidates[:len(basis)]))
                                for j in range(len(labels))))
    bad = None
    for i, v in enumerate(candidates):
        mu, nu = _split(space, k, labels, v)
        try:
            g = glue(space, mu, nu)
        except GlueRejected as e:
            bad = f"kernel vector {i} rejected: {e}"
            break
        if glue(space, *restrict(space, g)) != g:
            bad = f"glue o restrict differs from the identity on kernel vector {i}"
            break
    step3 = CheckResult("step 3: ker delta is contained in im r", bad is None,
                        bad or f"{len(candidates)} kernel vectors glued; glue o restrict = id")
    return AuditReport(k, D, len(basis), (step1, step2, step3))
