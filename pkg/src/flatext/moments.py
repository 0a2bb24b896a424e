"""Moment sequences, their Hankel (moment) matrices and the flatness test."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from . import linalg
from .linalg import RatMatrix
from .monomials import (
    Monomial,
    MonomialSet,
    closure,
    border,
    format_monomial,
    is_connected_to_one,
    mul,
    one,
    product_set,
    shift,
)

log = logging.getLogger(__name__)

Polynomial = dict  # Monomial -> Fraction


class MissingMoment(KeyError):
    def __init__(self, missing: Iterable[Monomial]):
        self.missing = sorted(set(missing), key=lambda m: (sum(m), m))
        names = ", ".join(format_monomial(m) for m in self.missing)
        super().__init__(f"missing moments for: {names}")

    def __str__(self) -> str:
        return self.args[0]


class InconsistentInput(ValueError):
    """The same moment was given two different values."""


class ZeroFormDetected(RuntimeError):
    """Flat instance whose column of 1 vanishes although the matrix does not."""


@dataclass(frozen=True)
class MomentSequence:
    """Exact moments ``y_alpha`` indexed by (at least) ``C+ . C+``.

    Values outside ``C+ . C+`` are kept (an extension carries many of them)
    but are reported by :attr:`extra`.
    """

    n: int
    C: MonomialSet
    values: Mapping[Monomial, Fraction]

    def __post_init__(self):
        if self.C.n != self.n:
            raise ValueError("index set and sequence disagree on n")
        values = {tuple(k): Fraction(v) for k, v in self.values.items()}
        object.__setattr__(self, "values", values)
        missing = [m for m in self.support if m not in values]
        if missing:
            raise MissingMoment(missing)

    @classmethod
    def from_pairs(cls, n: int, C, pairs: Iterable[tuple[Sequence[int], object]]) -> MomentSequence:
        """Build from a stream of ``(alpha, value)``; repeated alphas must agree."""
        values: dict[Monomial, Fraction] = {}
        for alpha, value in pairs:
            alpha = tuple(int(e) for e in alpha)
            value = linalg.parse_rational(value)
            if len(alpha) != n:
                raise ValueError(f"exponent {list(alpha)} does not have {n} entries")
            if alpha in values and values[alpha] != value:
                raise InconsistentInput(
                    f"moment {format_monomial(alpha)} given as both "
                    f"{linalg.format_rational(values[alpha])} and {linalg.format_rational(value)}"
                )
            values[alpha] = value
        if not isinstance(C, MonomialSet):
            C = MonomialSet(n, C)
        return cls(n, C, values)

    @classmethod
    def from_function(cls, C: MonomialSet, f, support: Iterable[Monomial] | None = None):
        """Tabulate ``f(alpha)`` on ``C+ . C+`` (or on ``support``)."""
        Cp = closure(C)
        if support is None:
            support = product_set(Cp, Cp)
        return cls(C.n, C, {m: f(m) for m in support})

    def __getitem__(self, alpha) -> Fraction:
        return self.values[tuple(alpha)]

    def get(self, alpha, default=None):
        return self.values.get(tuple(alpha), default)

    @cached_property
    def closure(self) -> MonomialSet:
        return closure(self.C)

    @cached_property
    def border(self) -> MonomialSet:
        return border(self.C)

    @cached_property
    def support(self) -> MonomialSet:
        return product_set(self.closure, self.closure)

    @cached_property
    def extra(self) -> MonomialSet:
        return MonomialSet(self.n, (m for m in self.values if m not in self.support))

    def restricted(self) -> MomentSequence:
        """Copy keeping only the moments indexed by ``C+ . C+``."""
        return MomentSequence(self.n, self.C, {m: self.values[m] for m in self.support})

    def apply(self, p: Mapping[Monomial, Fraction]) -> Fraction:
        """``Lambda(p)`` for a polynomial given as ``{monomial: coefficient}``."""
        total = Fraction(0)
        for m, c in p.items():
            if c:
                try:
                    total += c * self.values[m]
                except KeyError:
                    raise MissingMoment([m]) from None
        return total

    def shifted_apply(self, a: Monomial, p: Mapping[Monomial, Fraction]) -> Fraction:
        """``Lambda(a * p)``."""
        return self.apply({mul(a, m): c for m, c in p.items()})

    @cached_property
    def H_C(self) -> HankelView:
        return assemble(self, self.C, self.C)

    @cached_property
    def H_Cplus(self) -> HankelView:
        return assemble(self, self.closure, self.closure)


@dataclass(frozen=True)
class HankelView:
    """Matrix ``(y_{ab})`` with rows ``a`` in ``row_labels`` and columns ``b`` in ``col_labels``."""

    row_labels: tuple[Monomial, ...]
    col_labels: tuple[Monomial, ...]
    matrix: RatMatrix

    def column_of(self, m: Monomial) -> tuple[Fraction, ...]:
        return self.matrix.column(self.col_labels.index(tuple(m)))

    def apply(self, p: Mapping[Monomial, Fraction]) -> tuple[Fraction, ...]:
        """Column vector of ``H p`` for a polynomial supported on the column labels."""
        coords = [Fraction(0)] * len(self.col_labels)
        for m, c in p.items():
            coords[self.col_labels.index(m)] += c
        return self.matrix @ coords

    def rank(self) -> int:
        return linalg.rank(self.matrix)


def assemble(y: MomentSequence, rows: Iterable[Monomial], cols: Iterable[Monomial]) -> HankelView:
    """The moment matrix of ``y`` on the given row and column monomials."""
    rows = tuple(map(tuple, rows))
    cols = tuple(map(tuple, cols))
    entries = []
    missing = set()
    for a in rows:
        row = []
        for b in cols:
            value = y.get(mul(a, b))
            if value is None:
                missing.add(mul(a, b))
            row.append(value)
        entries.append(row)
    if missing:
        raise MissingMoment(missing)
    matrix = RatMatrix(entries, rows, cols, ncols=len(cols))
    return HankelView(rows, cols, matrix)


def vector_to_poly(labels: Sequence[Monomial], v: Sequence[Fraction]) -> Polynomial:
    return {m: Fraction(c) for m, c in zip(labels, v) if c}


def poly_to_vector(labels: Sequence[Monomial], p: Mapping[Monomial, Fraction]) -> list[Fraction]:
    index = {m: i for i, m in enumerate(labels)}
    v = [Fraction(0)] * len(labels)
    for m, c in p.items():
        if c:
            if m not in index:
                raise KeyError(f"{format_monomial(m)} is outside the allowed support")
            v[index[m]] += c
    return v


def format_poly(p: Mapping[Monomial, Fraction]) -> str:
    terms = []
    for m in sorted(p, key=lambda m: (sum(m), m), reverse=True):
        c = p[m]
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        c = abs(c)
        mono = format_monomial(m)
        if mono == "1":
            body = linalg.format_rational(c)
        elif c == 1:
            body = mono
        else:
            body = f"{linalg.format_rational(c)}*{mono}"
        terms.append((sign, body))
    if not terms:
        return "0"
    text = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        text += f" {sign} {body}"
    return text


@dataclass(frozen=True)
class FlatnessReport:
    connected: bool
    rank_C: int
    rank_Cplus: int
    flat: bool
    basis: MonomialSet
    kernel_Cplus: list = field(default_factory=list)
    zero_form: bool = False

    def __post_init__(self):
        if self.flat != (self.rank_C == self.rank_Cplus):
            raise ValueError("flat flag disagrees with the ranks")
        if self.flat and len(self.basis) != self.rank_Cplus:
            raise ValueError("basis size differs from the rank of a flat instance")


def kernel_polynomials(y: MomentSequence) -> list[Polynomial]:
    """Canonical basis of ``ker H^{C+}`` as polynomials over ``C+``."""
    H = y.H_Cplus
    return [vector_to_poly(H.col_labels, v) for v in linalg.kernel_basis(H.matrix)]


def check_flat(y: MomentSequence, C: MonomialSet | None = None) -> FlatnessReport:
    """Ranks of ``H^C`` and ``H^{C+}``, connectivity, greedy basis and kernel."""
    y = _with_index_set(y, C)
    rank_C = y.H_C.rank()
    rank_Cplus = y.H_Cplus.rank()
    flat = rank_C == rank_Cplus
    basis = select_basis(y, flat=flat)
    return FlatnessReport(
        connected=bool(is_connected_to_one(y.C)),
        rank_C=rank_C,
        rank_Cplus=rank_Cplus,
        flat=flat,
        basis=basis,
        kernel_Cplus=kernel_polynomials(y),
        zero_form=rank_Cplus == 0,
    )


def select_basis(y: MomentSequence, C: MonomialSet | None = None, *, flat: bool | None = None) -> MonomialSet:
    """Greedy column basis of ``H^{C+}`` among the columns indexed by ``C``.

    Columns are scanned by degree, x1 before x2 within a degree, so ``1`` is
    kept whenever its column is nonzero.  An all-zero matrix gives the empty
    basis (the zero form).
    """
    y = _with_index_set(y, C)
    H = y.H_Cplus
    cols = [H.col_labels.index(m) for m in y.C]
    sub = H.matrix.submatrix(range(len(H.row_labels)), cols)
    kept = linalg.greedy_column_basis(sub)
    basis = MonomialSet(y.n, (sub.col_labels[j] for j in kept))
    unit = one(y.n)
    if unit in y.C and unit not in basis and not H.matrix.is_zero():
        if flat is None:
            flat = y.H_C.rank() == H.rank()
        if flat:
            raise ZeroFormDetected(
                "the column of 1 vanishes on a flat instance whose moment matrix is nonzero"
            )
    return basis


def admissible_bases(y: MomentSequence, C: MonomialSet | None = None, limit: int = 100_000) -> list[MonomialSet]:
    """Every ``B`` in ``C`` with ``rank H^{C+} = rank H^B = |B|`` (exhaustive scan)."""
    y = _with_index_set(y, C)
    H = y.H_Cplus
    r = H.rank()
    members = list(y.C)
    count = 0
    found = []
    for subset in itertools.combinations(members, r):
        count += 1
        if count > limit:
            raise ValueError(f"more than {limit} candidate subsets")
        idx = [H.col_labels.index(m) for m in subset]
        if linalg.rank(H.matrix.submatrix(idx, idx)) == r:
            found.append(MonomialSet(y.n, subset))
    return found


def in_kernel(y: MomentSequence, p: Mapping[Monomial, Fraction], rows: Iterable[Monomial] | None = None) -> bool:
    """``Lambda(a p) = 0`` for every ``a`` in ``rows`` (default ``C+``)."""
    rows = y.closure if rows is None else rows
    return all(y.shifted_apply(a, p) == 0 for a in rows)


def verify_kernel_conditions(y: MomentSequence, p: Mapping[Monomial, Fraction]) -> bool:
    """Check the kernel observations for ``p`` supported on ``C+``.

    Testing ``Lambda(a p) = 0`` over ``a`` in ``C`` must agree with testing it
    over ``C+``; and if ``p`` is in the kernel, so is every ``x_i p`` that
    stays inside ``span(C+)``.
    """
    p = {tuple(m): Fraction(c) for m, c in p.items() if c}
    if any(m not in y.closure for m in p):
        raise KeyError("polynomial is not supported on C+")
    full = in_kernel(y, p)
    if full != in_kernel(y, p, y.C):
        return False
    if not full:
        return True
    for i in range(y.n):
        xp = {shift(m, i): c for m, c in p.items()}
        if all(m in y.closure for m in xp) and not in_kernel(y, xp):
            return False
    return True


def check_sigma_equivalences(y: MomentSequence, C: MonomialSet | None = None) -> bool:
    """Basis-free flatness: ``<C+> = <C> + ker H^{C+}`` and ``ker H^C = ker H^{C+} ∩ <C>``.

    The result is compared with the rank test and a disagreement raises.
    """
    y = _with_index_set(y, C)
    H = y.H_Cplus
    c_idx = [H.col_labels.index(m) for m in y.C]
    all_rows = range(len(H.row_labels))
    C_cols = H.matrix.submatrix(all_rows, c_idx)
    span_ok = True
    for m in y.border:
        try:
            linalg.solve_in_span(C_cols, H.column_of(m))
        except linalg.NoSolution:
            span_ok = False
            break
    kernel_ok = linalg.kernel_basis(y.H_C.matrix) == linalg.kernel_basis(C_cols)
    result = span_ok and kernel_ok
    if result != (y.H_C.rank() == H.rank()):
        raise AssertionError("basis-free flatness disagrees with the rank test")
    return result


def is_flat(y: MomentSequence) -> bool:
    return y.H_C.rank() == y.H_Cplus.rank()


def _with_index_set(y: MomentSequence, C: MonomialSet | None) -> MomentSequence:
    if C is None or C == y.C:
        return y
    return MomentSequence(y.n, C, y.values)
