# %% [markdown]
# Recovering the representing measure
#
# For a positive flat sequence the operators chi_i commute and are jointly
# diagonalizable; their joint eigenvalues are the atoms.  Everything before
# this step is exact, the eigen-decomposition is done in floating point.

# %%
from fractions import Fraction

import numpy as np

from flatext import fixture_path
from flatext.atoms import ExtractionConfig, check_positive, extract_atoms, verify_measure
from flatext.extension import ExtendedForm
from flatext.io import load_moments, measure_to_json
from flatext.monomials import MonomialSet
from flatext.synthetic import atomic_instance

y, _ = load_moments(fixture_path("ex_sec31.json"))
print("positive:", check_positive(y))
mu = extract_atoms(ExtendedForm.from_sequence(y))
print(measure_to_json(mu))

# %% [markdown]
# Round trip: moments of a known rational measure go in, the atoms come back.

# %%
C = MonomialSet(3, [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0)])
points = [(Fraction(1, 2), Fraction(-1), Fraction(3, 4)), (Fraction(-3, 2), Fraction(1, 8), Fraction(0)), (Fraction(1), Fraction(1), Fraction(-2))]
weights = [Fraction(1, 5), Fraction(1, 2), Fraction(3, 10)]
inst = atomic_instance(C, points, weights)
mu = extract_atoms(ExtendedForm.from_sequence(inst.y), ExtractionConfig(seed=3))
for p, w in mu.atoms():
    print(np.round(p, 12), round(w, 12))
print(verify_measure(mu, inst.y).describe())

# %% [markdown]
# Perturbing a weight is caught by the verifier.

# %%
mu.weights[0] += 0.1
print(verify_measure(mu, inst.y).describe())

# %% [markdown]
# Different seeds change the random combination of operators, not the answer.

# %%
for seed in range(3):
    m = extract_atoms(ExtendedForm.from_sequence(inst.y), ExtractionConfig(seed=seed))
    print(seed, np.round(m.points[:, 0], 10))
