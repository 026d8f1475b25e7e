# %% [markdown]
# # A node on an elliptic curve
#
# Glue two points z1, z2 of the torus C/(Z + tau Z).  The result has
# arithmetic genus 2, and its generalized Jacobian is C^2 modulo a rank-3
# lattice.  We build the period matrix in closed form and from contour
# integrals, then classify the quotient group.

# %%
import math

import numpy as np

from genjac import build_period_matrix, build_period_matrix_numeric, canonical_form, genus, node_spec

tau = 2j
spec = node_spec(tau, math.sqrt(2) / 2, 0)
print(genus(spec).as_dict())

# %% [markdown]
# Columns are alpha, beta (the torus cycles) and gamma (a small loop around
# z1).  The first row is dz, the second the third-kind differential with
# residues at z1 and z2, normalised to have zero alpha period.

# %%
closed = build_period_matrix(spec)
numeric = build_period_matrix_numeric(spec)
print(closed.labels)
print(np.round(closed.entries, 12))
print("max deviation closed vs numeric:", np.max(np.abs(closed.entries - numeric.entries)))

# %% [markdown]
# With a = z1 - z2 = sqrt(2)/2 irrational, only constant holomorphic
# functions live on the quotient: a toroidal group, here quasi-abelian of
# kind 0.

# %%
cf = canonical_form(closed)
print(cf.description)
print(np.round(cf.toroidal_block.entries, 12))    # (0 1 tau; 1 0 a)

# %% [markdown]
# A rational difference gives a C* factor instead.

# %%
half = canonical_form(build_period_matrix(node_spec(tau, 0.5, 0)))
print(half.description)
