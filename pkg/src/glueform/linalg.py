"""Dense exact linear algebra over Q.

Matrices are small (a few thousand columns at most), so everything is a
plain Gauss-Jordan elimination on lists of Fractions.  The pivot is the
first nonzero entry found scanning each column top-down from the current
pivot row, which makes every result reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Sequence

from .errors import UsageError
from .ratpoly import as_rational

__all__ = [
    "LabeledMatrix",
    "rref",
    "mat_rank",
    "mat_kernel_basis",
    "image_membership",
    "mat_vec",
]

Vector = tuple  # tuple[Fraction, ...]


@dataclass(frozen=True)
class LabeledMatrix:
    """Dense rational matrix whose rows and columns carry basis labels."""

    rows: int
    cols: int
    entries: tuple[tuple[Fraction, ...], ...]
    row_labels: tuple[Hashable, ...] = field(default=())
    col_labels: tuple[Hashable, ...] = field(default=())

    def __post_init__(self):
        entries = tuple(tuple(as_rational(x) for x in row) for row in self.entries)
        object.__setattr__(self, "entries", entries)
        if len(entries) != self.rows or any(len(r) != self.cols for r in entries):
            raise UsageError(f"entries are not a {self.rows}x{self.cols} array")
        if not self.row_labels:
            object.__setattr__(self, "row_labels", tuple(range(self.rows)))
        if not self.col_labels:
            object.__setattr__(self, "col_labels", tuple(range(self.cols)))
        object.__setattr__(self, "row_labels", tuple(self.row_labels))
        object.__setattr__(self, "col_labels", tuple(self.col_labels))
        if len(self.row_labels) != self.rows or len(self.col_labels) != self.cols:
            raise UsageError("label list lengths do not match matrix dimensions")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None,
                  row_labels=(), col_labels=()) -> "LabeledMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                cols = len(col_labels)
            else:
                cols = len(rows[0])
        return cls(len(rows), cols, tuple(tuple(r) for r in rows), tuple(row_labels), tuple(col_labels))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int,
                     row_labels=(), col_labels=()) -> "LabeledMatrix":
        for c in columns:
            if len(c) != nrows:
                raise UsageError(f"column of length {len(c)}, expected {nrows}")
        rows = [[columns[j][i] for j in range(len(columns))] for i in range(nrows)]
        return cls(nrows, len(columns), tuple(tuple(r) for r in rows), tuple(row_labels), tuple(col_labels))

    @classmethod
    def from_sparse_columns(cls, columns: Sequence[dict], col_labels=()) -> "LabeledMatrix":
        """Build from columns given as ``{row_label: value}`` dicts.

        Row labels are the union of all keys, sorted, so the row order does
        not depend on column order.
        """
        keys = sorted({k for col in columns for k in col})
        index = {k: i for i, k in enumerate(keys)}
        rows = [[Fraction(0)] * len(columns) for _ in keys]
        for j, col in enumerate(columns):
            for k, v in col.items():
                rows[index[k]][j] = as_rational(v)
        return cls(len(keys), len(columns), tuple(tuple(r) for r in rows), tuple(keys), tuple(col_labels))

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self.entries)


def rref(rows: Sequence[Sequence[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    a = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    nrows = len(a)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        if piv != 1:
            inv = 1 / piv
            a[r] = [x * inv for x in a[r]]
        prow = a[r]
        for i in range(nrows):
            if i != r and a[i][c]:
                f = a[i][c]
                row = a[i]
                a[i] = [x - f * y if y else x for x, y in zip(row, prow)]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def mat_rank(m: LabeledMatrix) -> int:
    return len(rref(m.entries, m.cols)[1])


def mat_kernel_basis(m: LabeledMatrix) -> list[Vector]:
    """Basis of the right null space.

    One vector per free column, in ascending column order.  Each vector is
    scaled so that its first nonzero entry is 1.
    """
    reduced, pivots = rref(m.entries, m.cols)
    pivot_set = set(pivots)
    basis = []
    for f in range(m.cols):
        if f in pivot_set:
            continue
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for row, pc in zip(reduced, pivots):
            v[pc] = -row[f]
        lead = next(x for x in v if x)
        if lead != 1:
            v = [x / lead for x in v]
        basis.append(tuple(v))
    return basis


def mat_vec(m: LabeledMatrix, v: Sequence) -> Vector:
    if len(v) != m.cols:
        raise UsageError(f"vector of length {len(v)} for a matrix with {m.cols} columns")
    return tuple(sum((a * b for a, b in zip(row, v) if a and b), Fraction(0)) for row in m.entries)


def image_membership(m: LabeledMatrix, v: Sequence) -> bool:
    """True iff ``v`` lies in the column span of ``m``."""
    if len(v) != m.rows:
        raise UsageError(f"vector of length {len(v)} for a matrix with {m.rows} rows")
    vv = [as_rational(x) for x in v]
    if not any(vv):
        return True
    augmented = [list(row) + [x] for row, x in zip(m.entries, vv)]
    return len(rref(augmented, m.cols + 1)[1]) == mat_rank(m)
