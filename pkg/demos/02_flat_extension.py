# %% [markdown]
# Building the flat extension
#
# From a flat sequence on a connected C we pick a column basis B, rewrite each
# border monomial of B over B, and read off multiplication operators chi_i.
# The extension is L(x^a) = (values of y on B) . chi^a . e_1.

# %%
from flatext import fixture_path
from flatext.extension import (
    ExtendedForm,
    InconsistentExtension,
    extend_sequence,
    uniqueness_probe,
)
from flatext.io import load_moments
from flatext.moments import format_poly
from flatext.monomials import MonomialSet, format_monomial, monomials_up_to

y, _ = load_moments(fixture_path("ex_sec31.json"))
E = ExtendedForm.from_sequence(y)
print("basis:", E.basis)
for m, coeffs in E.family.rules.items():
    print(f"  {format_monomial(m):>9} -> {format_poly(dict(zip(E.basis, coeffs)))}")
for i, op in enumerate(E.system.operators, 1):
    print(f"chi_{i} =", [[str(x) for x in row] for row in op.rows])
print("operators commute:", E.commutation.commute)

# %% [markdown]
# Since chi_2^2 = 2 I, the pure x2 moments double every two degrees.

# %%
ext = extend_sequence(y, 8)
print("certified:", ext.certified)
print("x2^j:", [str(ext.moments[(0, j)]) for j in range(9)])
print("x1^i:", [str(ext.moments[(i, 0)]) for i in range(9)])

# %% [markdown]
# The same extension comes out of the other admissible basis {x1, x1*x2},
# which does not contain 1.

# %%
same = uniqueness_probe(y, MonomialSet(2, [(0, 0), (1, 1)]), MonomialSet(2, [(1, 0), (1, 1)]), 6)
print("identical through degree 6:", same)

# %% [markdown]
# Without connectivity the construction can fail.  On C = {1, x^3} the only
# basis is {1, x^3}; the rewriting x -> 1 forces chi = identity, so every
# moment collapses to y_0 and no flat extension exists.

# %%
z, _ = load_moments(fixture_path("ex_nonconnected.json"))
try:
    extend_sequence(z, 6, force=True)
except InconsistentExtension as exc:
    print("refused:", exc)

# %% [markdown]
# A full-degree set behaves like the classical case: the greedy basis is
# closed under division.

# %%
from fractions import Fraction
from flatext.synthetic import atomic_instance

C = monomials_up_to(2, 2)
pts = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(-1)), (Fraction(1, 2), Fraction(2)), (Fraction(-1), Fraction(1))]
inst = atomic_instance(C, pts, [Fraction(1, 4)] * 4)
print("basis on M_{2,2}:", extend_sequence(inst.y, 6).basis)
