import json
from fractions import Fraction

import pytest

from flatext import fixture_path
from flatext.io import load_moments
from flatext.moments import MomentSequence
from flatext.monomials import MonomialSet, closure, product_set


def load(name):
    y, _ = load_moments(fixture_path(name))
    return y


@pytest.fixture
def bivariate():
    return load("ex_sec31.json")


@pytest.fixture
def nonconnected():
    return load("ex_nonconnected.json")


@pytest.fixture
def two_atoms_uni():
    return load("uni_two_atoms.json")


@pytest.fixture
def dirac11():
    return load("dirac_11.json")


@pytest.fixture
def dirac_origin():
    return load("dirac_origin.json")


def from_measure(C: MonomialSet, points, weights) -> MomentSequence:
    Cp = closure(C)
    points = [tuple(Fraction(x) for x in p) for p in points]
    values = {}
    for m in product_set(Cp, Cp):
        total = Fraction(0)
        for p, w in zip(points, weights):
            term = Fraction(w)
            for x, e in zip(p, m):
                term *= x**e
            total += term
        values[m] = total
    return MomentSequence(C.n, C, values)


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
