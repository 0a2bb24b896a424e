"""Exact linear algebra over the rationals.

Scalars are :class:`fractions.Fraction`.  Echelon forms use the pivot rule
"first nonzero entry in column order", so every result (rank, pivots, kernel
basis, particular solution) is a deterministic function of the input.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .monomials import scan_key


class NoSolution(ValueError):
    """Right-hand side lies outside the column space."""


class NotSymmetric(ValueError):
    pass


_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``; floats are rejected on purpose."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str) or not _RATIONAL.match(text.strip()):
        raise ValueError(f"not an exact rational: {text!r}")
    value = Fraction(text.strip())
    return value


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class RatMatrix:
    """Dense row-major matrix of Fractions with optional monomial labels."""

    __slots__ = ("rows", "ncols", "row_labels", "col_labels")

    def __init__(self, rows: Iterable[Iterable], row_labels=None, col_labels=None, ncols=None):
        self.rows = tuple(tuple(Fraction(x) for x in row) for row in rows)
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != ncols for r in self.rows):
            raise ValueError("ragged matrix")
        if row_labels is not None and len(row_labels) != len(self.rows):
            raise ValueError("row label count does not match")
        if col_labels is not None and len(col_labels) != ncols:
            raise ValueError("column label count does not match")
        self.ncols = ncols
        self.row_labels = tuple(row_labels) if row_labels is not None else None
        self.col_labels = tuple(col_labels) if col_labels is not None else None

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> RatMatrix:
        return cls([[0] * ncols for _ in range(nrows)], ncols=ncols)

    @classmethod
    def identity(cls, size: int) -> RatMatrix:
        return cls([[int(i == j) for j in range(size)] for i in range(size)], ncols=size)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int = 0) -> RatMatrix:
        if not columns:
            return cls.zeros(nrows, 0)
        return cls(list(zip(*columns)), ncols=len(columns))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.ncols

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        if isinstance(other, RatMatrix):
            return self.rows == other.rows
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_rational(x) for x in r) for r in self.rows)
        return f"RatMatrix([{body}])"

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.column(j) for j in range(self.shape[1])]

    @property
    def T(self) -> RatMatrix:
        return RatMatrix(
            [self.column(j) for j in range(self.ncols)], self.col_labels, self.row_labels, len(self.rows)
        )

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> RatMatrix:
        return RatMatrix(
            [[self.rows[i][j] for j in cols] for i in rows],
            [self.row_labels[i] for i in rows] if self.row_labels else None,
            [self.col_labels[j] for j in cols] if self.col_labels else None,
            len(cols),
        )

    def __matmul__(self, other):
        if isinstance(other, RatMatrix):
            cols = other.columns()
            return RatMatrix(
                [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in self.rows],
                ncols=other.ncols,
            )
        return tuple(sum((a * b for a, b in zip(r, other)), Fraction(0)) for r in self.rows)

    def __sub__(self, other: RatMatrix) -> RatMatrix:
        return RatMatrix(
            [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], ncols=self.ncols
        )

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def is_symmetric(self) -> bool:
        n, m = self.shape
        return n == m and all(self.rows[i][j] == self.rows[j][i] for i in range(n) for j in range(i))

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.rows], dtype=float).reshape(self.shape)

    def to_json(self) -> list[list[str]]:
        return [[format_rational(x) for x in r] for r in self.rows]

    @classmethod
    def from_json(cls, data) -> RatMatrix:
        return cls([[parse_rational(x) for x in r] for r in data])


def _integer_row(row: Sequence[Fraction]) -> list[int]:
    scale = math.lcm(*(x.denominator for x in row)) if row else 1
    return [int(x * scale) for x in row]


def _normalize(row: list[int]) -> list[int]:
    g = math.gcd(*row)
    return [x // g for x in row] if g > 1 else row


def row_echelon(M: RatMatrix) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form on integer rows (gcd-reduced).

    Returns the nonzero echelon rows and the pivot column indices.
    """
    rows = [_integer_row(r) for r in M.rows]
    ncols = M.shape[1]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        p = rows[r]
        for i in range(r + 1, len(rows)):
            f = rows[i][c]
            if f:
                rows[i] = _normalize([p[c] * x - f * y for x, y in zip(rows[i], p)])
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rank(M: RatMatrix) -> int:
    return len(row_echelon(M)[1])


def rref(M: RatMatrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns."""
    echelon, pivots = row_echelon(M)
    rows = [[Fraction(x, r[c]) for x in r] for r, c in zip(echelon, pivots)]
    for k in range(len(rows) - 1, -1, -1):
        c = pivots[k]
        for i in range(k):
            f = rows[i][c]
            if f:
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[k])]
    return rows, pivots


def kernel_basis(M: RatMatrix) -> list[tuple[Fraction, ...]]:
    """Canonical basis of the right null space.

    The basis returned is the reduced echelon basis of the null space itself,
    so it depends only on the subspace, not on how it was reached.
    """
    ncols = M.shape[1]
    rows, pivots = rref(M)
    free = [c for c in range(ncols) if c not in set(pivots)]
    vectors = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            v[p] = -row[f]
        vectors.append(v)
    if not vectors:
        return []
    canon, _ = rref(RatMatrix(vectors))
    return [tuple(v) for v in canon]


def solve_in_span(A: RatMatrix, b: Sequence) -> tuple[Fraction, ...]:
    """Particular solution of ``A x = b`` with all free variables set to zero."""
    nrows, ncols = A.shape
    b = [Fraction(x) for x in b]
    if len(b) != nrows:
        raise ValueError("right-hand side has the wrong length")
    augmented = RatMatrix([list(r) + [x] for r, x in zip(A.rows, b)], ncols=ncols + 1)
    rows, pivots = rref(augmented)
    if pivots and pivots[-1] == ncols:
        raise NoSolution("right-hand side is not in the column space")
    x = [Fraction(0)] * ncols
    for row, p in zip(rows, pivots):
        x[p] = row[ncols]
    return tuple(x)


def greedy_column_basis(
    M: RatMatrix, order: Sequence[int] | Callable | None = None
) -> list[int]:
    """Scan columns in ``order`` and keep each one independent of those kept.

    ``order`` is either an explicit list of column indices or a key function
    applied to the column labels (default: degree, then x1 before x2, ...).
    """
    ncols = M.shape[1]
    if order is None:
        order = scan_key
    if callable(order):
        if M.col_labels is None:
            raise ValueError("a key order needs labelled columns")
        order = sorted(range(ncols), key=lambda j: order(M.col_labels[j]))
    kept: list[int] = []
    # reduced kept columns, keyed by their pivot row
    reducers: dict[int, list[int]] = {}
    for j in order:
        v = _integer_row(M.column(j))
        for p, red in reducers.items():
            if v[p]:
                v = _normalize([red[p] * x - v[p] * y for x, y in zip(v, red)])
        lead = next((i for i, x in enumerate(v) if x), None)
        if lead is None:
            continue
        for p, red in list(reducers.items()):
            if red[lead]:
                reducers[p] = _normalize([v[lead] * x - red[lead] * y for x, y in zip(red, v)])
        reducers[lead] = v
        kept.append(j)
    return kept


def is_psd(M: RatMatrix) -> bool:
    """Exact positive semidefiniteness via symmetric-pivoted LDL^T."""
    if not M.is_symmetric():
        raise NotSymmetric("positive semidefiniteness needs a symmetric matrix")
    A = [list(r) for r in M.rows]
    while A:
        size = len(A)
        k = next((i for i in range(size) if A[i][i] > 0), None)
        if k is None:
            if any(A[i][i] < 0 for i in range(size)):
                return False
            # zero diagonal: PSD only if the remainder vanishes entirely
            return all(x == 0 for r in A for x in r)
        d = A[k][k]
        pivot_row = A[k]
        rest = [i for i in range(size) if i != k]
        A = [
            [A[i][j] - A[i][k] * pivot_row[j] / d for j in rest]
            for i in rest
        ]
    return True


def matrix_power_apply(ops: Sequence[RatMatrix], exponents: Sequence[int], v):
    """Apply ``ops[0]^e0 ... ops[n-1]^e(n-1)`` to ``v``, last operator first."""
    v = tuple(Fraction(x) for x in v)
    for op, e in zip(reversed(ops), reversed(exponents)):
        for _ in range(e):
            v = op @ v
    return v
