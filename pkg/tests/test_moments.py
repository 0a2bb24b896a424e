import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from flatext import linalg
from flatext.moments import (
    InconsistentInput,
    MissingMoment,
    MomentSequence,
    ZeroFormDetected,
    admissible_bases,
    assemble,
    check_flat,
    check_sigma_equivalences,
    format_poly,
    is_flat,
    select_basis,
    verify_kernel_conditions,
)
from flatext.monomials import MonomialSet, closure, is_division_closed, monomials_up_to
from flatext.synthetic import perturb, random_flat_instance

from conftest import from_measure

A = 2
# the printed 7x7 moment matrix of the bivariate example, with a = 2
BIVARIATE_LABELS = [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (0, 1), (1, 2)]
BIVARIATE_MATRIX = [
    [1, 1, 1, 1, 1, 1, A],
    [1, 1, 1, 1, 1, 1, A],
    [1, 1, A, 1, A, A, A],
    [1, 1, 1, 1, 1, 1, A],
    [1, 1, A, 1, A, A, A],
    [1, 1, A, 1, A, A, A],
    [A, A, A, A, A, A, A * A],
]


def test_assemble_dirac():
    C = MonomialSet(2, [(0, 0), (1, 0)])
    y = from_measure(C, [(1, 1)], [1])
    H = assemble(y, C, C)
    assert H.matrix == linalg.RatMatrix([[1, 1], [1, 1]])


def test_assemble_nonconnected_example(nonconnected):
    labels = [(0,), (3,), (1,), (4,)]
    H = assemble(nonconnected, labels, labels)
    assert H.matrix == linalg.RatMatrix([[1, 2, 1, 2], [2, 3, 2, 3], [1, 2, 1, 2], [2, 3, 2, 3]])


def test_assemble_bivariate_matches_printed_matrix(bivariate):
    H = assemble(bivariate, BIVARIATE_LABELS, BIVARIATE_LABELS)
    assert H.matrix == linalg.RatMatrix(BIVARIATE_MATRIX)


def test_check_flat_examples(nonconnected, bivariate, two_atoms_uni):
    r = check_flat(nonconnected)
    assert (r.connected, r.rank_C, r.rank_Cplus, r.flat) == (False, 2, 2, True)
    r = check_flat(bivariate)
    assert (r.connected, r.rank_C, r.rank_Cplus, r.flat) == (True, 2, 2, True)
    r = check_flat(two_atoms_uni)
    assert r.flat and r.rank_Cplus == 2 and list(r.basis) == [(0,), (1,)]


def test_select_basis_examples(bivariate):
    assert list(select_basis(bivariate)) == [(0, 0), (1, 1)]
    C = MonomialSet(2, monomials_up_to(2, 1))
    y = from_measure(C, [(0, 0), (1, 1)], [Fraction(1, 2)] * 2)
    B = select_basis(y)
    assert list(B) == [(0, 0), (1, 0)] and is_division_closed(B)


def test_zero_form():
    C = MonomialSet(2, [(0, 0), (1, 0)])
    y = MomentSequence.from_function(C, lambda m: 0)
    assert len(select_basis(y)) == 0
    assert check_flat(y).zero_form


def test_zero_form_detected():
    # column of 1 vanishes but the matrix does not
    C = MonomialSet(1, [(0,)])
    y = MomentSequence.from_function(C, lambda m: 1 if m == (2,) else 0)
    assert not is_flat(y)
    assert len(select_basis(y)) == 0
    # on a flat instance this situation cannot arise; the guard raises
    with pytest.raises(ZeroFormDetected):
        select_basis(y, flat=True)


def test_admissible_bases_bivariate(bivariate):
    found = [list(B) for B in admissible_bases(bivariate)]
    assert found == [[(0, 0), (1, 1)], [(1, 0), (1, 1)]]


def test_kernel_conditions(bivariate, nonconnected):
    assert verify_kernel_conditions(bivariate, {(0, 0): 1, (1, 0): -1})
    assert verify_kernel_conditions(bivariate, {})
    assert verify_kernel_conditions(nonconnected, {(0,): 1, (1,): -1})


def test_kernel_polynomials_bivariate(bivariate):
    kernel = check_flat(bivariate).kernel_Cplus
    assert len(kernel) == 5
    assert all(bivariate.shifted_apply(a, p) == 0 for p in kernel for a in bivariate.closure)


def test_sigma_examples(bivariate, dirac_origin):
    assert check_sigma_equivalences(bivariate) is True
    assert check_sigma_equivalences(dirac_origin) is True


def test_sigma_random_two_atoms():
    rng = random.Random(7)
    for _ in range(10):
        inst = random_flat_instance(rng, n=2, max_atoms=2)
        assert check_sigma_equivalences(inst.y) == check_flat(inst.y).flat


def test_missing_moment_lists_exponents():
    C = MonomialSet(1, [(0,), (1,)])
    with pytest.raises(MissingMoment) as err:
        MomentSequence(1, C, {(0,): 1, (1,): 1})
    assert err.value.missing == [(2,), (3,), (4,)]


def test_inconsistent_duplicate():
    C = MonomialSet(1, [(0,)])
    with pytest.raises(InconsistentInput):
        MomentSequence.from_pairs(1, C, [((0,), "1"), ((0,), "2"), ((1,), "0"), ((2,), "0")])


def test_extra_moments_reported():
    C = MonomialSet(1, [(0,)])
    y = MomentSequence(1, C, {(0,): 1, (1,): 0, (2,): 1, (7,): 5})
    assert list(y.extra) == [(7,)]
    assert list(y.restricted().values) == [(0,), (1,), (2,)]


def test_format_poly():
    assert format_poly({(0, 0): Fraction(1), (1, 2): Fraction(-1, 2)}) == "-1/2*x1*x2^2 + 1"


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_views_symmetric_and_basis_size(seed):
    inst = random_flat_instance(random.Random(seed))
    y = inst.y
    assert y.H_C.matrix.is_symmetric() and y.H_Cplus.matrix.is_symmetric()
    assert len(select_basis(y)) == y.H_Cplus.rank()


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_sigma_flat_and_perturbed(seed):
    rng = random.Random(seed)
    inst = random_flat_instance(rng)
    assert check_sigma_equivalences(inst.y) is True
    z = perturb(rng, inst.y)
    assert check_sigma_equivalences(z) == is_flat(z)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 3), st.integers(2, 3))
def test_division_closed_basis_on_full_degree_sets(seed, n, t):
    C = monomials_up_to(n, t - 1)
    rng = random.Random(seed)
    inst = random_flat_instance(rng, n=n, C=C, max_atoms=min(4, len(C)))
    assert is_division_closed(select_basis(inst.y))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_assemble_label_permutation(seed):
    rng = random.Random(seed)
    y = random_flat_instance(rng).y
    labels = list(closure(y.C))
    perm = labels[:]
    rng.shuffle(perm)
    H, P = assemble(y, labels, labels), assemble(y, perm, perm)
    assert H.rank() == P.rank()
    for i, a in enumerate(perm):
        for j, b in enumerate(perm):
            assert P.matrix[i, j] == H.matrix[labels.index(a), labels.index(b)]
