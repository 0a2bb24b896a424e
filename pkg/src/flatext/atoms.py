"""Recovering the atomic representing measure of a positive flat sequence.

This is the only module that leaves exact arithmetic: the commuting
multiplication operators are converted to floats and jointly diagonalized
through a random linear combination.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg
from .extension import ExtendedForm
from .moments import MomentSequence
from .monomials import Monomial, evaluate, format_monomial

log = logging.getLogger(__name__)

NEGATIVE_WEIGHT_WARNING = -1e-9


class NotPositive(ValueError):
    pass


class DegenerateCombination(RuntimeError):
    pass


class SingularWeightSystem(RuntimeError):
    pass


@dataclass(frozen=True)
class ExtractionConfig:
    tol_residual: float = 1e-8
    tol_cluster: float = 1e-10
    seed: int = 0
    max_retries: int = 5

    def __post_init__(self):
        if self.tol_residual <= 0 or self.tol_cluster <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_retries < 1:
            raise ValueError("max_retries must be at least 1")


@dataclass
class AtomicMeasure:
    n: int
    points: np.ndarray  # shape (atoms, n); complex only when complex_atoms is set
    weights: np.ndarray
    residual: float = float("nan")
    complex_atoms: bool = False
    warnings: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.weights)

    def moment(self, alpha: Monomial):
        return sum(w * evaluate(alpha, p) for p, w in zip(self.points, self.weights))

    def atoms(self):
        return list(zip(self.points, self.weights))


def check_positive(y: MomentSequence) -> bool:
    """Exact PSD test of the moment matrix on ``C+``."""
    return linalg.is_psd(y.H_Cplus.matrix)


def _distinct(values: np.ndarray, tol: float) -> bool:
    diffs = np.abs(values[:, None] - values[None, :])
    np.fill_diagonal(diffs, np.inf)
    return values.size < 2 or diffs.min() > tol


def extract_atoms(E: ExtendedForm, cfg: ExtractionConfig | None = None, *, unsafe: bool = False) -> AtomicMeasure:
    """Atoms from the joint eigenvectors of the transposed multiplication operators.

    Each eigenvector ``v`` of a random combination ``sum c_i chi_i^T`` is a
    common eigenvector of all ``chi_i^T``; the Rayleigh quotients
    ``v* chi_i^T v / v* v`` give the coordinates of one atom.  Weights solve
    ``sum_k w_k b(z_k) = Lambda(b)`` over ``b`` in ``B``.
    """
    cfg = cfg or ExtractionConfig()
    E._require_commuting()
    if E.sequence is not None and not unsafe and not check_positive(E.sequence):
        raise NotPositive("moment matrix on C+ is not positive semidefinite")
    n = E.n
    B = E.basis
    N = len(B)
    if N == 0:
        mu = AtomicMeasure(n, np.zeros((0, n)), np.zeros(0))
        if E.sequence is not None:
            mu.residual = verify_measure(mu, E.sequence, cfg.tol_residual).max_deviation
        return mu
    ops = [op.to_numpy().T for op in E.system.operators]
    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.max_retries):
        c = rng.standard_normal(n)
        c /= np.linalg.norm(c)
        combo = sum(ci * op for ci, op in zip(c, ops))
        eigvals, eigvecs = np.linalg.eig(combo)
        if _distinct(eigvals, cfg.tol_cluster):
            break
    else:
        raise DegenerateCombination(
            f"eigenvalues of the random combination stayed clustered after {cfg.max_retries} draws"
        )
    points = np.empty((N, n), dtype=complex)
    for k in range(N):
        v = eigvecs[:, k]
        vv = np.vdot(v, v)
        for i, op in enumerate(ops):
            points[k, i] = np.vdot(v, op @ v) / vv
    warnings = []
    complex_atoms = bool(np.abs(points.imag).max() > 1e-9 * max(1.0, np.abs(points).max()))
    if complex_atoms:
        warnings.append("complex atoms: the operators have non-real joint eigenvalues")
    else:
        points = points.real
    for a in range(N):
        for b in range(a + 1, N):
            if np.linalg.norm(points[a] - points[b]) <= cfg.tol_cluster:
                raise SingularWeightSystem("two atoms coincide; the weight system is singular")
    # rows b in B, columns atoms
    dtype = complex if complex_atoms else float
    V = np.array([[evaluate(b, p) for p in points] for b in B], dtype=dtype)
    rhs = np.array([float(x) for x in E.lam_basis], dtype=dtype)
    try:
        weights = np.linalg.solve(V, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularWeightSystem(str(exc)) from None
    if not complex_atoms:
        weights = weights.real
    order = _lexsort(points)
    points, weights = points[order], weights[order]
    if not complex_atoms and (weights < NEGATIVE_WEIGHT_WARNING).any():
        warnings.append("negative weight: extraction may be numerically unstable")
    mu = AtomicMeasure(n, points, weights, complex_atoms=complex_atoms, warnings=warnings)
    if E.sequence is not None:
        mu.residual = verify_measure(mu, E.sequence, cfg.tol_residual).max_deviation
    for w in warnings:
        log.warning(w)
    return mu


def _lexsort(points: np.ndarray) -> np.ndarray:
    keys = [points[:, i].real for i in reversed(range(points.shape[1]))]
    return np.lexsort(keys) if keys else np.arange(len(points))


@dataclass(frozen=True)
class MeasureReport:
    max_deviation: float
    worst: Monomial | None
    passed: bool
    tol: float

    def describe(self) -> str:
        where = f" at {format_monomial(self.worst)}" if self.worst is not None else ""
        verdict = "pass" if self.passed else "fail"
        return f"max deviation {self.max_deviation:.3e}{where} (tol {self.tol:g}): {verdict}"


def verify_measure(mu: AtomicMeasure, y: MomentSequence, tol: float = 1e-8) -> MeasureReport:
    """Largest ``|sum_k w_k z_k^alpha - y_alpha|`` over ``alpha`` in ``C+ . C+``."""
    worst, dev = None, 0.0
    for alpha in y.support:
        d = abs(mu.moment(alpha) - float(y[alpha]))
        if d > dev or worst is None:
            worst, dev = alpha, float(d)
    return MeasureReport(dev, worst, dev <= tol, tol)


def measure_from_atoms(points, weights) -> AtomicMeasure:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return AtomicMeasure(points.shape[1], points, np.asarray(weights, dtype=float))


def exact_moments(points, weights, support) -> dict[Monomial, Fraction]:
    """Moments of a rational atomic measure, computed exactly."""
    points = [tuple(Fraction(x) for x in p) for p in points]
    weights = [Fraction(w) for w in weights]
    return {m: sum((w * evaluate(m, p) for p, w in zip(points, weights)), Fraction(0)) for m in support}
