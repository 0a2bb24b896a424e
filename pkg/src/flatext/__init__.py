"""Exact flat extensions of truncated moment sequences indexed by sparse monomial sets."""

from importlib import resources

from .atoms import (
    AtomicMeasure,
    DegenerateCombination,
    ExtractionConfig,
    NotPositive,
    SingularWeightSystem,
    check_positive,
    extract_atoms,
    verify_measure,
)
from .extension import (
    CommutationUnverified,
    ExtendedForm,
    Extension,
    InconsistentExtension,
    InvalidBasis,
    MissingRule,
    NotConnected,
    NotFlat,
    build_multiplication_system,
    build_rewriting_family,
    check_commutation,
    extend_sequence,
    project_pi,
    uniqueness_probe,
    verify_consistency,
)
from .linalg import RatMatrix, greedy_column_basis, is_psd, kernel_basis, rank, solve_in_span
from .moments import (
    MissingMoment,
    MomentSequence,
    ZeroFormDetected,
    admissible_bases,
    assemble,
    check_flat,
    check_sigma_equivalences,
    select_basis,
    verify_kernel_conditions,
)
from .monomials import MonomialSet, border, closure, grlex_compare, is_connected_to_one, product_set

__version__ = "0.1.0"


def fixture_path(name: str):
    """Path of a bundled fixture file, e.g. ``fixture_path("ex_sec31.json")``."""
    return resources.files(__name__) / "fixtures" / name
