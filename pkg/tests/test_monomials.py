import itertools

import pytest
from hypothesis import given, strategies as st

from flatext.monomials import (
    MonomialSet,
    border,
    closure,
    divides,
    format_monomial,
    grlex_compare,
    grlex_key,
    is_connected_to_one,
    is_division_closed,
    monomials_up_to,
    parse_monomial,
    product_set,
)


def S(n, *ms):
    return MonomialSet(n, ms)


def test_closure_univariate_gap():
    assert closure(S(1, (0,), (3,))) == S(1, (0,), (1,), (3,), (4,))


def test_closure_of_unit():
    assert closure(S(2, (0, 0))) == S(2, (0, 0), (1, 0), (0, 1))


def test_closure_bivariate():
    C = S(2, (0, 0), (1, 0), (1, 1))
    assert closure(C) == S(2, (0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (2, 1), (1, 2))


def test_border_examples():
    assert border(S(1, (0,), (3,))) == S(1, (1,), (4,))
    assert border(S(2, (0, 0), (1, 0), (1, 1))) == S(2, (0, 1), (1, 2), (2, 0), (2, 1))
    assert border(S(1, (0,))) == S(1, (1,))


def test_connectivity_examples():
    assert is_connected_to_one(S(2, (0, 0), (0, 1), (1, 1)))
    c = is_connected_to_one(S(2, (0, 0), (1, 1)))
    assert not c and list(c.unreachable) == [(1, 1)]
    c = is_connected_to_one(S(1, (0,), (3,)))
    assert not c and list(c.unreachable) == [(3,)]


def test_connectivity_witness_chain():
    C = S(2, (0, 0), (0, 1), (1, 1), (2, 1))
    chain = is_connected_to_one(C).chain((2, 1))
    assert chain[0] == (0, 0) and chain[-1] == (2, 1)
    for a, b in zip(chain, chain[1:]):
        assert sum(b) == sum(a) + 1 and divides(a, b) and a in C


def test_connectivity_edge_cases():
    assert not is_connected_to_one(MonomialSet(2, ()))
    assert not is_connected_to_one(S(2, (1, 0)))


def test_product_set_examples():
    assert product_set(S(1, (0,), (1,)), S(1, (0,), (1,))) == S(1, (0,), (1,), (2,))
    Cp = closure(S(1, (0,), (3,)))
    assert product_set(Cp, Cp) == MonomialSet(1, [(k,) for k in range(9)])
    assert product_set(S(2, (0, 0)), S(2, (0, 0), (1, 1))) == S(2, (0, 0), (1, 1))


def test_grlex_compare_basic():
    assert grlex_compare((0, 0), (1, 0)) == -1
    assert grlex_compare((0, 1), (2, 0)) == -1
    assert grlex_compare((1, 1), (1, 1)) == 0


def test_grlex_degree_two_tiebreak():
    # oracle: sort all degree-2 exponents lexicographically with x1 most significant
    deg2 = [e for e in itertools.product(range(3), repeat=2) if sum(e) == 2]
    assert sorted(deg2) == [(0, 2), (1, 1), (2, 0)]
    assert grlex_compare((0, 2), (1, 1)) == -1


def test_grlex_full_list():
    assert list(monomials_up_to(2, 2)) == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]


@pytest.mark.parametrize(
    "text,n,expected",
    [("1", 2, (0, 0)), ("x1", 2, (1, 0)), ("x1^2*x2", 2, (2, 1)), ("x1x2", 2, (1, 1)), ("x^3", 1, (3,))],
)
def test_parse_monomial(text, n, expected):
    assert parse_monomial(text, n) == expected


def test_format_round_trip():
    for m in monomials_up_to(3, 3):
        assert parse_monomial(format_monomial(m), 3) == m


monomial2 = st.tuples(st.integers(0, 3), st.integers(0, 3))
sets2 = st.lists(monomial2, max_size=8).map(lambda ms: MonomialSet(2, ms))


@given(sets2, sets2)
def test_closure_monotone(C, D):
    assert C.issubset(closure(C))
    assert closure(C).union(closure(D)).issubset(closure(C.union(D)))


@given(sets2)
def test_border_partitions_closure(C):
    bd = border(C)
    assert not any(m in C for m in bd)
    assert bd.union(C) == closure(C)


@given(sets2)
def test_connectivity_passes_to_closure(C):
    if is_connected_to_one(C):
        assert is_connected_to_one(closure(C))


@given(st.lists(monomial2, min_size=1, max_size=6))
def test_division_closed_sets_are_connected(gens):
    # every divisor of a generator: a division-closed set
    members = {(a, b) for g in gens for a in range(g[0] + 1) for b in range(g[1] + 1)}
    C = MonomialSet(2, members)
    assert is_division_closed(C)
    assert is_connected_to_one(C)


@given(sets2)
def test_members_grlex_sorted(C):
    assert list(C) == sorted(set(C), key=grlex_key)
