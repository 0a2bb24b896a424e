# %% [markdown]
# Border prebases and commuting operators
#
# A hand-written rewriting family on B defines operators chi_i; the family is a
# border basis exactly when they commute (for B connected to 1).

# %%
from flatext import fixture_path
from flatext.extension import build_multiplication_system, check_commutation, family_from_rules
from flatext.io import load_family
from flatext.monomials import MonomialSet

F = load_family(fixture_path("noncommuting_family.json"))
S = build_multiplication_system(F)
c = check_commutation(S)
print("commute:", c.commute, "witness:", c.witness)
print("chi_1 chi_2 - chi_2 chi_1 =", c.difference.to_json())

# %% [markdown]
# Rewriting x1*x2 to 0 instead of 1 and x1^2 -> x1, x2^2 -> x2 describes the
# points (0,0), (1,0), (0,1): the operators now commute.

# %%
B = MonomialSet(2, [(0, 0), (0, 1), (1, 0)])
rules = [((0, 2), {(0, 1): 1}, None), ((1, 1), {}, None), ((2, 0), {(1, 0): 1}, None)]
S = build_multiplication_system(family_from_rules(B, rules))
print("commute:", check_commutation(S).commute)
for i, op in enumerate(S.operators, 1):
    print(f"chi_{i} =", op.to_json())
