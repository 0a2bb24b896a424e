# %% [markdown]
# Moment matrices on sparse monomial sets
#
# A moment sequence indexed by a set C of monomials only needs values on
# C+ . C+, where C+ adds every single-variable shift of C.  This script walks
# through the two bundled examples and the flatness test.

# %%
from flatext import fixture_path
from flatext.io import load_moments
from flatext.moments import admissible_bases, assemble, check_flat, format_poly
from flatext.monomials import MonomialSet, border, closure, format_monomial, is_connected_to_one

# %%
C = MonomialSet(2, [(0, 0), (1, 0), (1, 1)])
print("C      ", C)
print("C+     ", closure(C))
print("border ", border(C))
print("connected to 1:", bool(is_connected_to_one(C)))

# %% [markdown]
# The bivariate example: y(x1^i x2^j) = 1 for j <= 1 and 2 otherwise, with
# y(x1^2 x2^4) = 4.  Both moment matrices have rank 2.

# %%
y, _ = load_moments(fixture_path("ex_sec31.json"))
labels = [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (0, 1), (1, 2)]
H = assemble(y, labels, labels)
print("      " + " ".join(f"{format_monomial(m):>8}" for m in labels))
for m, row in zip(labels, H.matrix.rows):
    print(f"{format_monomial(m):>6}" + " ".join(f"{str(v):>8}" for v in row))

report = check_flat(y)
print("rank H^C =", report.rank_C, " rank H^C+ =", report.rank_Cplus, " flat:", report.flat)
print("greedy basis:", report.basis)
print("kernel of H^C+:")
for p in report.kernel_Cplus:
    print("   ", format_poly(p))

# %% [markdown]
# Every column basis of H^C drawn from C.  The column of x1 equals the column
# of 1, so no basis is connected to 1.

# %%
for B in admissible_bases(y):
    print("admissible:", B, " connected:", bool(is_connected_to_one(B)))

# %% [markdown]
# The univariate example on C = {1, x^3}: flat, but C is not connected to 1.

# %%
z, _ = load_moments(fixture_path("ex_nonconnected.json"))
r = check_flat(z)
conn = is_connected_to_one(z.C)
print(f"ranks {r.rank_C}/{r.rank_Cplus}, flat={r.flat}, unreachable={list(map(format_monomial, conn.unreachable))}")
