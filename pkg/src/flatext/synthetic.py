"""Random test instances built from explicit rational atomic measures."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .atoms import exact_moments
from .moments import MomentSequence, is_flat
from .monomials import MonomialSet, closure, evaluate, one, product_set, shift
from . import linalg


@dataclass
class AtomicInstance:
    y: MomentSequence
    points: list[tuple[Fraction, ...]]
    weights: list[Fraction]

    @property
    def n(self) -> int:
        return self.y.n

    def true_moment(self, alpha) -> Fraction:
        return sum((w * evaluate(alpha, p) for p, w in zip(self.points, self.weights)), Fraction(0))


def random_rational(rng: random.Random, lo, hi, max_den: int) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(int(lo * den), int(hi * den)), den)


def random_connected_set(rng: random.Random, n: int, size: int, max_degree: int = 2) -> MonomialSet:
    """Grow a set from ``1`` by multiplying members with single variables."""
    members = [one(n)]
    attempts = 0
    while len(members) < size and attempts < 1000:
        attempts += 1
        m = shift(rng.choice(members), rng.randrange(n))
        if sum(m) <= max_degree and m not in members:
            members.append(m)
    return MonomialSet(n, members)


def random_points(rng: random.Random, n: int, count: int, lo=-2, hi=2, max_den=8, min_dist=0.0):
    points: list[tuple[Fraction, ...]] = []
    while len(points) < count:
        p = tuple(random_rational(rng, lo, hi, max_den) for _ in range(n))
        if all(sum((a - b) ** 2 for a, b in zip(p, q)) > min_dist**2 for q in points) and p not in points:
            points.append(p)
    return points


def atomic_instance(C: MonomialSet, points, weights) -> AtomicInstance:
    Cp = closure(C)
    values = exact_moments(points, weights, product_set(Cp, Cp))
    return AtomicInstance(MomentSequence(C.n, C, values), list(points), list(weights))


def random_flat_instance(
    rng: random.Random,
    *,
    n: int | None = None,
    max_n: int = 3,
    max_atoms: int = 4,
    C: MonomialSet | None = None,
    max_den: int = 8,
    weight_range=(Fraction(1, 10), Fraction(1)),
    min_dist: float = 0.0,
) -> AtomicInstance:
    """A flat instance on a connected ``C`` whose rank equals the atom count."""
    while True:
        nn = n or rng.randint(1, max_n)
        r = rng.randint(1, max_atoms)
        index_set = C
        if index_set is None:
            size = rng.randint(r, r + 2)
            index_set = random_connected_set(rng, nn, size, max_degree=3 if nn == 1 else 2)
        if len(index_set) < r:
            continue
        points = random_points(rng, index_set.n, r, max_den=max_den, min_dist=min_dist)
        # evaluations on C must be independent for the rank to reach r
        V = linalg.RatMatrix([[evaluate(m, p) for m in index_set] for p in points])
        if linalg.rank(V) != r:
            continue
        weights = [random_rational(rng, *weight_range, max_den) for _ in range(r)]
        if any(w <= 0 for w in weights):
            continue
        inst = atomic_instance(index_set, points, weights)
        if is_flat(inst.y):
            return inst


def perturb(rng: random.Random, y: MomentSequence) -> MomentSequence:
    """Change one moment of ``y`` by a small nonzero rational."""
    alpha = rng.choice(list(y.support))
    values = dict(y.values)
    values[alpha] += Fraction(rng.choice([-1, 1]) * rng.randint(1, 5), rng.randint(1, 8))
    return MomentSequence(y.n, y.C, values)
