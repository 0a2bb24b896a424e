"""Monomials as exponent tuples and finite monomial sets.

A monomial ``x1^a1 ... xn^an`` is stored as the tuple ``(a1, ..., an)``.
Sets are kept in graded-lexicographic order (total degree first, then
lexicographic on the exponent tuple, so ``x2 < x1`` when ``n == 2``).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

Monomial = tuple[int, ...]


def one(n: int) -> Monomial:
    return (0,) * n


def var(i: int, n: int) -> Monomial:
    """The variable ``x_{i+1}`` (``i`` is zero-based)."""
    return tuple(1 if k == i else 0 for k in range(n))


def degree(m: Monomial) -> int:
    return sum(m)


def mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def shift(m: Monomial, i: int) -> Monomial:
    """``x_{i+1} * m``."""
    return m[:i] + (m[i] + 1,) + m[i + 1:]


def divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def evaluate(m: Monomial, point) -> object:
    """Value of the monomial at ``point``; works for Fractions and floats alike."""
    value = 1
    for e, x in zip(m, point):
        if e:
            value = value * x**e
    return value


def grlex_key(m: Monomial) -> tuple:
    return (sum(m), m)


def scan_key(m: Monomial) -> tuple:
    """Degree first, then x1 before x2 before ... within a degree.

    This is the usual moment-matrix index order ``1, x1, x2, x1^2, x1x2, ...``
    and is the column order used by greedy basis selection.
    """
    return (sum(m), tuple(-e for e in m))


def grlex_compare(a: Monomial, b: Monomial) -> int:
    """Return -1, 0 or 1 as ``a`` is below, equal to, or above ``b`` in grlex."""
    if len(a) != len(b):
        raise ValueError("monomials live in different rings")
    ka, kb = grlex_key(a), grlex_key(b)
    return (ka > kb) - (ka < kb)


def monomials_up_to(n: int, d: int) -> "MonomialSet":
    """All monomials of total degree at most ``d`` in ``n`` variables."""
    members = [
        m for m in itertools.product(range(d + 1), repeat=n) if sum(m) <= d
    ]
    return MonomialSet(n, members)


_FACTOR = re.compile(r"x(\d*)(?:\^(\d+))?")


def parse_monomial(text: str, n: int) -> Monomial:
    """Parse ``"1"``, ``"x1"``, ``"x1^2*x2"``, ``"x1x2"`` or ``"x^3"`` (n == 1)."""
    text = text.strip().replace("*", "").replace(" ", "")
    if text == "1":
        return one(n)
    exps = [0] * n
    pos = 0
    while pos < len(text):
        match = _FACTOR.match(text, pos)
        if match is None or match.end() == pos:
            raise ValueError(f"cannot parse monomial {text!r}")
        index = int(match.group(1)) if match.group(1) else 1
        if not 1 <= index <= n:
            raise ValueError(f"variable x{index} out of range for n={n}")
        exps[index - 1] += int(match.group(2) or 1)
        pos = match.end()
    return tuple(exps)


def format_monomial(m: Monomial) -> str:
    if not any(m):
        return "1"
    parts = []
    for i, e in enumerate(m):
        if e == 0:
            continue
        name = "x" if len(m) == 1 else f"x{i + 1}"
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


@dataclass(frozen=True, init=False)
class MonomialSet:
    """Finite duplicate-free set of monomials in ``n`` variables, grlex-sorted."""

    n: int
    members: tuple[Monomial, ...]

    def __init__(self, n: int, members: Iterable[Sequence[int]] = ()):
        unique = set()
        for m in members:
            m = tuple(int(e) for e in m)
            if len(m) != n:
                raise ValueError(f"monomial {m} does not have {n} exponents")
            if any(e < 0 for e in m):
                raise ValueError(f"negative exponent in {m}")
            unique.add(m)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "members", tuple(sorted(unique, key=grlex_key)))
        object.__setattr__(self, "_lookup", frozenset(unique))

    def __iter__(self) -> Iterator[Monomial]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, m) -> bool:
        return tuple(m) in self._lookup

    def __getitem__(self, i: int) -> Monomial:
        return self.members[i]

    def index(self, m: Monomial) -> int:
        return self.members.index(tuple(m))

    def __hash__(self) -> int:
        return hash((self.n, self.members))

    def union(self, other: Iterable[Monomial]) -> MonomialSet:
        return MonomialSet(self.n, itertools.chain(self.members, other))

    def difference(self, other: Iterable[Monomial]) -> MonomialSet:
        drop = set(map(tuple, other))
        return MonomialSet(self.n, (m for m in self.members if m not in drop))

    def issubset(self, other: Iterable[Monomial]) -> bool:
        return set(self.members) <= set(map(tuple, other))

    def max_degree(self) -> int:
        return max((degree(m) for m in self.members), default=0)

    def to_json(self) -> list[list[int]]:
        return [list(m) for m in self.members]

    def __repr__(self) -> str:
        body = ", ".join(format_monomial(m) for m in self.members)
        return f"MonomialSet(n={self.n}, {{{body}}})"


def closure(C: MonomialSet) -> MonomialSet:
    """``C`` together with every ``x_i * m`` for ``m`` in ``C``."""
    shifted = (shift(m, i) for m in C for i in range(C.n))
    return C.union(shifted)


def border(C: MonomialSet) -> MonomialSet:
    return closure(C).difference(C)


def product_set(A: MonomialSet, B: MonomialSet) -> MonomialSet:
    if A.n != B.n:
        raise ValueError("monomial sets live in different rings")
    return MonomialSet(A.n, (mul(a, b) for a in A for b in B))


@dataclass(frozen=True)
class Connectivity:
    connected: bool
    # member -> (variable index, predecessor); the unit monomial maps to None
    parents: dict
    unreachable: MonomialSet

    def __bool__(self) -> bool:
        return self.connected

    def chain(self, m: Monomial) -> list[Monomial]:
        """Path ``1, x_{i1}, x_{i1}x_{i2}, ..., m`` inside the set."""
        path = [m]
        while self.parents[path[-1]] is not None:
            path.append(self.parents[path[-1]][1])
        return path[::-1]


def is_connected_to_one(C: MonomialSet) -> Connectivity:
    """Fixed-point reachability from ``1`` by single-variable multiplications."""
    unit = one(C.n)
    if unit not in C:
        return Connectivity(False, {}, C)
    parents: dict = {unit: None}
    # grlex order visits every predecessor before its multiples
    for m in C:
        if m in parents:
            continue
        for i in range(C.n):
            if m[i] == 0:
                continue
            prev = m[:i] + (m[i] - 1,) + m[i + 1:]
            if prev in parents:
                parents[m] = (i, prev)
                break
    unreachable = C.difference(parents)
    return Connectivity(not unreachable, parents, unreachable)


def is_division_closed(C: MonomialSet) -> bool:
    members = set(C)
    for m in C:
        for i in range(C.n):
            if m[i] and m[:i] + (m[i] - 1,) + m[i + 1:] not in members:
                return False
    return True
