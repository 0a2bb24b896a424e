"""Constructing the unique flat extension of a flat truncated moment sequence.

Pipeline: pick a column basis ``B`` of ``H^{C+}`` inside ``C``; project every
border monomial of ``B`` onto ``span(B)`` along ``ker H^{C+}`` (the rewriting
family); read off the multiplication operators ``chi_i``; check that they
commute; then the extended form is ``L(x^a) = Lambda(chi^a applied to 1)``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import linalg
from .linalg import RatMatrix
from .moments import (
    MomentSequence,
    assemble,
    in_kernel,
    select_basis,
)
from .monomials import (
    Monomial,
    MonomialSet,
    border,
    format_monomial,
    is_connected_to_one,
    monomials_up_to,
    one,
    shift,
)


class NotInSpan(linalg.NoSolution):
    pass


class InvalidBasis(ValueError):
    pass


class MissingRule(KeyError):
    def __init__(self, monomial: Monomial, var: int | None = None):
        self.monomial = monomial
        self.var = var
        where = f" (reached through x{var + 1})" if var is not None else ""
        super().__init__(f"no rewriting rule for border monomial {format_monomial(monomial)}{where}")

    def __str__(self) -> str:
        return self.args[0]


class CommutationUnverified(RuntimeError):
    pass


class NotFlat(ValueError):
    pass


class NotConnected(ValueError):
    pass


class InconsistentExtension(RuntimeError):
    def __init__(self, message: str, report: ConsistencyReport | None = None):
        super().__init__(message)
        self.report = report


# ----------------------------------------------------------------------------
# projection onto span(B) along ker H^{C+}


def validate_basis(y: MomentSequence, B: MonomialSet) -> None:
    if not B.issubset(y.C):
        raise InvalidBasis("basis must be a subset of C")
    H = y.H_Cplus
    r = H.rank()
    if len(B) != r:
        raise InvalidBasis(f"basis has {len(B)} elements but rank H^(C+) is {r}")
    cols = [H.col_labels.index(b) for b in B]
    sub = H.matrix.submatrix(range(len(H.row_labels)), cols)
    if linalg.rank(sub) != len(B):
        raise InvalidBasis("basis columns of H^(C+) are linearly dependent")


def project_pi(y: MomentSequence, p: Mapping[Monomial, Fraction], B: MonomialSet) -> tuple[Fraction, ...]:
    """Coordinates over ``B`` of the unique ``pi(p)`` with ``p - pi(p)`` in ``ker H^{C+}``."""
    H = y.H_Cplus
    cols = [H.col_labels.index(b) for b in B]
    A = H.matrix.submatrix(range(len(H.row_labels)), cols)
    target = H.apply({tuple(m): Fraction(c) for m, c in p.items()})
    try:
        return linalg.solve_in_span(A, target)
    except linalg.NoSolution:
        raise NotInSpan("polynomial has no projection onto span(B); the instance is not flat") from None


# ----------------------------------------------------------------------------
# rewriting families and multiplication operators


@dataclass(frozen=True)
class RewritingFamily:
    """For each border monomial ``m`` of ``B``, the coordinates of its rewrite over ``B``.

    ``pair_rules`` optionally overrides the rule for a given variable, i.e.
    the polynomial used when ``m`` is reached as ``x_i * b``.
    """

    basis: MonomialSet
    rules: Mapping[Monomial, tuple[Fraction, ...]]
    pair_rules: Mapping[tuple[int, Monomial], tuple[Fraction, ...]] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def border(self) -> MonomialSet:
        return border(self.basis)

    @property
    def contains_one(self) -> bool:
        return one(self.n) in self.basis

    def rule(self, m: Monomial, var: int | None = None) -> tuple[Fraction, ...]:
        if var is not None and (var, m) in self.pair_rules:
            return self.pair_rules[(var, m)]
        if m in self.rules:
            return self.rules[m]
        raise MissingRule(m, var)

    def generators(self) -> list[dict]:
        """The polynomials ``m - pi(m)``."""
        out = []
        for m, coeffs in self.rules.items():
            g = {m: Fraction(1)}
            for b, c in zip(self.basis, coeffs):
                if c:
                    g[b] = g.get(b, 0) - c
            out.append(g)
        return out


def build_rewriting_family(y: MomentSequence, B: MonomialSet | None = None) -> RewritingFamily:
    if B is None:
        B = select_basis(y)
    validate_basis(y, B)
    rules = {}
    for m in border(B):
        coeffs = project_pi(y, {m: Fraction(1)}, B)
        f = {m: Fraction(1)}
        for b, c in zip(B, coeffs):
            if c:
                f[b] = f.get(b, 0) - c
        # the cheap test over C suffices on flat instances
        if not in_kernel(y, f, y.C):
            raise NotInSpan(f"{format_monomial(m)} - pi({format_monomial(m)}) is not in the kernel")
        rules[m] = coeffs
    return RewritingFamily(B, rules)


@dataclass(frozen=True)
class MultiplicationSystem:
    """Operators ``chi_1..chi_n`` on ``span(B)``; column ``j`` of ``chi_i`` is ``chi_i(b_j)``."""

    basis: MonomialSet
    operators: tuple[RatMatrix, ...]

    @property
    def n(self) -> int:
        return self.basis.n

    def apply(self, i: int, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
        return self.operators[i] @ v


def build_multiplication_system(F: RewritingFamily) -> MultiplicationSystem:
    B = F.basis
    N = len(B)
    ops = []
    for i in range(F.n):
        columns = []
        for b in B:
            m = shift(b, i)
            if m in B:
                col = [Fraction(0)] * N
                col[B.index(m)] = Fraction(1)
            else:
                col = list(F.rule(m, i))
            columns.append(col)
        ops.append(RatMatrix.from_columns(columns, N) if N else RatMatrix.zeros(0, 0))
    return MultiplicationSystem(B, tuple(ops))


@dataclass(frozen=True)
class Commutation:
    commute: bool
    witness: tuple[int, int] | None = None  # 1-based variable indices
    difference: RatMatrix | None = None

    def __bool__(self) -> bool:
        return self.commute


def check_commutation(S: MultiplicationSystem) -> Commutation:
    ops = S.operators
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            diff = ops[i] @ ops[j] - ops[j] @ ops[i]
            if not diff.is_zero():
                return Commutation(False, (i + 1, j + 1), diff)
    return Commutation(True)


# ----------------------------------------------------------------------------
# the extended linear form


class ExtendedForm:
    """``L(x^a) = <Lambda on B, chi^a (pi(1))>``, memoized per monomial."""

    def __init__(
        self,
        system: MultiplicationSystem,
        lam_basis: Sequence[Fraction],
        unit: Sequence[Fraction],
        sequence: MomentSequence | None = None,
        commutation: Commutation | None = None,
    ):
        self.system = system
        self.lam_basis = tuple(Fraction(x) for x in lam_basis)
        self.unit = tuple(Fraction(x) for x in unit)
        self.sequence = sequence
        self.commutation = commutation if commutation is not None else check_commutation(system)
        self._phi: dict[Monomial, tuple[Fraction, ...]] = {}
        self._values: dict[Monomial, Fraction] = {}
        self._lock = threading.Lock()

    @classmethod
    def from_sequence(cls, y: MomentSequence, B: MonomialSet | None = None) -> ExtendedForm:
        F = build_rewriting_family(y, B)
        S = build_multiplication_system(F)
        lam = [y[b] for b in F.basis]
        if F.contains_one:
            unit = [Fraction(int(b == one(y.n))) for b in F.basis]
        else:
            unit = project_pi(y, {one(y.n): Fraction(1)}, F.basis)
        form = cls(S, lam, unit, sequence=y)
        form.family = F
        return form

    @property
    def basis(self) -> MonomialSet:
        return self.system.basis

    @property
    def n(self) -> int:
        return self.system.n

    def _require_commuting(self) -> None:
        if not self.commutation.commute:
            i, j = self.commutation.witness
            raise CommutationUnverified(
                f"chi_{i} and chi_{j} do not commute; the extension would depend on evaluation order"
            )

    def phi(self, alpha: Sequence[int]) -> tuple[Fraction, ...]:
        """Coordinates over ``B`` of ``x^alpha`` applied to ``pi(1)``."""
        self._require_commuting()
        alpha = tuple(alpha)
        cached = self._phi.get(alpha)
        if cached is not None:
            return cached
        # walk down from alpha, lowering the last nonzero exponent each step
        chain = []
        m = alpha
        while m not in self._phi and any(m):
            i = max(k for k, e in enumerate(m) if e)
            chain.append((m, i))
            m = m[:i] + (m[i] - 1,) + m[i + 1:]
        v = self._phi.get(m, self.unit)
        computed = {m: v}
        for m, i in reversed(chain):
            v = self.system.apply(i, v)
            computed[m] = v
        with self._lock:
            self._phi.update(computed)
        return v

    def normal_form(self, p: Mapping[Monomial, Fraction]) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * len(self.basis)
        for m, c in p.items():
            if c:
                for k, x in enumerate(self.phi(m)):
                    out[k] += c * x
        return tuple(out)

    def evaluate(self, alpha: Sequence[int]) -> Fraction:
        alpha = tuple(alpha)
        value = self._values.get(alpha)
        if value is None:
            value = sum((l * x for l, x in zip(self.lam_basis, self.phi(alpha))), Fraction(0))
            with self._lock:
                self._values[alpha] = value
        return value

    def __call__(self, p: Mapping[Monomial, Fraction]) -> Fraction:
        return sum((Fraction(c) * self.evaluate(m) for m, c in p.items()), Fraction(0))


@dataclass
class ConsistencyReport:
    phi_violations: list = field(default_factory=list)  # (m, phi(m), pi(m))
    moment_violations: list = field(default_factory=list)  # (alpha, expected, got)

    @property
    def ok(self) -> bool:
        return not self.phi_violations and not self.moment_violations

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "consistent"
        lines = []
        for alpha, expected, got in self.moment_violations:
            lines.append(
                f"moment {format_monomial(alpha)}: expected {linalg.format_rational(expected)}, "
                f"got {linalg.format_rational(got)}"
            )
        for m, _, _ in self.phi_violations:
            lines.append(f"normal form of {format_monomial(m)} differs from its projection")
        return "; ".join(lines)


def verify_consistency(E: ExtendedForm) -> ConsistencyReport:
    """Compare ``phi`` with ``pi`` on ``C+`` and ``L`` with ``y`` on ``C+ . C+``."""
    y = E.sequence
    if y is None:
        raise ValueError("the extended form was not built from a moment sequence")
    report = ConsistencyReport()
    for m in y.closure:
        phi = E.phi(m)
        pi = project_pi(y, {m: Fraction(1)}, E.basis)
        if phi != pi:
            report.phi_violations.append((m, phi, pi))
    for alpha in y.support:
        got = E.evaluate(alpha)
        if got != y[alpha]:
            report.moment_violations.append((alpha, y[alpha], got))
    return report


# ----------------------------------------------------------------------------
# the full pipeline


@dataclass
class Extension:
    moments: MomentSequence
    form: ExtendedForm
    basis: MonomialSet
    rank: int
    connected: bool
    certified: bool
    degree: int
    consistency: ConsistencyReport
    warnings: list = field(default_factory=list)


def extend_sequence(
    y: MomentSequence,
    degree: int,
    *,
    force: bool = False,
    basis: MonomialSet | None = None,
    rank_check: bool = True,
) -> Extension:
    """Extend ``y`` to every monomial of degree at most ``degree``.

    Connected index sets come with the uniqueness guarantee.  With ``force``
    a disconnected ``C`` is attempted anyway and the result is accepted only
    if it reproduces ``y`` exactly; it is then reported as uncertified.
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    conn = is_connected_to_one(y.C)
    if not conn and not force:
        names = ", ".join(format_monomial(m) for m in conn.unreachable)
        raise NotConnected(f"C is not connected to 1 (unreachable: {names})")
    rC, rCp = y.H_C.rank(), y.H_Cplus.rank()
    if rC != rCp:
        raise NotFlat(f"rank H^C = {rC} but rank H^(C+) = {rCp}")
    E = ExtendedForm.from_sequence(y, basis)
    if not E.commutation:
        i, j = E.commutation.witness
        raise InconsistentExtension(f"multiplication operators chi_{i}, chi_{j} do not commute")
    report = verify_consistency(E)
    if not report:
        raise InconsistentExtension(report.describe(), report)
    values = {m: E.evaluate(m) for m in monomials_up_to(y.n, degree)}
    values.update((m, y[m]) for m in y.support)
    moments = MomentSequence(y.n, y.C, values)
    warnings = []
    if not conn:
        warnings.append(f"C is not connected to 1; extension verified through degree {degree} only")
    if rank_check:
        _check_rank(moments, E.basis, degree)
    return Extension(
        moments=moments,
        form=E,
        basis=E.basis,
        rank=len(E.basis),
        connected=bool(conn),
        certified=bool(conn),
        degree=degree,
        consistency=report,
        warnings=warnings,
    )


def _check_rank(moments: MomentSequence, B: MonomialSet, degree: int) -> None:
    d = degree // 2
    full = monomials_up_to(moments.n, d)
    r = assemble(moments, full, full).rank()
    expected = len(B)
    if (B.issubset(full) and r != expected) or r > expected:
        raise InconsistentExtension(f"moment matrix of degree {d} has rank {r}, expected {expected}")


def uniqueness_probe(
    y: MomentSequence,
    B1: MonomialSet,
    B2: MonomialSet,
    degree: int,
    *,
    force: bool = False,
) -> bool:
    """Run the construction under two bases and compare the extensions exactly."""
    e1 = extend_sequence(y, degree, basis=B1, force=force, rank_check=False)
    e2 = extend_sequence(y, degree, basis=B2, force=force, rank_check=False)
    return e1.moments.values == e2.moments.values


def family_from_rules(
    basis: MonomialSet,
    rules: Iterable[tuple[Monomial, Mapping[Monomial, Fraction], int | None]],
) -> RewritingFamily:
    """Assemble a user-supplied border prebasis.

    Each rule is ``(border monomial, {b: coefficient}, var)`` where ``var``
    (zero-based or ``None``) restricts the rule to ``chi_var``.
    """
    plain: dict = {}
    paired: dict = {}
    bd = border(basis)
    for m, coeffs, var in rules:
        m = tuple(m)
        if m not in bd:
            raise ValueError(f"{format_monomial(m)} is not a border monomial of B")
        vec = [Fraction(0)] * len(basis)
        for b, c in coeffs.items():
            if tuple(b) not in basis:
                raise ValueError(f"rule for {format_monomial(m)} uses {format_monomial(tuple(b))} outside B")
            vec[basis.index(tuple(b))] += Fraction(c)
        target = plain if var is None else paired
        key = m if var is None else (var, m)
        if key in target:
            raise ValueError(f"duplicate rule for {format_monomial(m)}")
        target[key] = tuple(vec)
    return RewritingFamily(basis, plain, paired)
