# %% [markdown]
# # When are two nodal period matrices equivalent?
#
# P ~ P' when P = M P' A with M complex invertible and A integer unimodular.
# For nodal curves the search over A is finite once the entries are bounded.

# %%
import math

import numpy as np

from genjac import NodalGenus2Curve, equivalent_nodal, nodal_biholomorphic
from genjac.albanese import nodal_matrix
from genjac.equivalence import nodal_witnesses

tau, b = 2j, math.sqrt(2) / 2
w = equivalent_nodal(nodal_matrix(tau, b), nodal_matrix(tau, 1 - b), entry_bound=1)
print(w.A)

# %% [markdown]
# A matrix is equivalent to itself only through the two trivial witnesses.

# %%
pb = nodal_matrix(tau, b)
print(sorted({tuple(int(v) for v in x.A.ravel()) for x in nodal_witnesses(pb, pb, 2)}))

# %% [markdown]
# Two nodal curves are biholomorphic when some automorphism of the base
# lattice carries one difference of glued points to the other.  Note that
# 1 - b is -b modulo 1, so multiplication by -1 already identifies these two
# curves.

# %%
print(nodal_biholomorphic(NodalGenus2Curve(tau, b, 0), NodalGenus2Curve(tau, 1 - b, 0)))
print(nodal_biholomorphic(NodalGenus2Curve(tau, b, 0), NodalGenus2Curve(tau, 0.3, 0)))
print(equivalent_nodal(nodal_matrix(tau, b), nodal_matrix(tau, 0.3), 2))
