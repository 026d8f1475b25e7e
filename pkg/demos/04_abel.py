# %% [markdown]
# # Checking Abel's theorem numerically
#
# On the nodal curve a function f descends if f(z1) = f(z2).  Its divisor,
# pushed through the period map, must then land in the period lattice.

# %%
import numpy as np

from genjac import abel_verify, divisor_of, function_with_divisor, make_context, node_spec
from genjac.abel import PeriodMapper, check_mod_m

tau = 0.1 + 1.1j
ctx = make_context(tau)
z1, z2 = 0.2 + 0.3j, 0.6 + 0.5j
spec = node_spec(tau, z1, z2)
mapper = PeriodMapper(spec, ctx)

# %% [markdown]
# With c = z1 + z2, a sigma quotient whose zeros and poles are symmetric
# under z -> c - z satisfies f(c - z) = f(z), so f(z1) = f(z2) for free.

# %%
c = z1 + z2
a, b = 0.15 + 0.8j, 0.7 + 0.1j
f = function_with_divisor(ctx, [a, c - a], [b, c - b])
print(divisor_of(f, ctx))
print(check_mod_m(f, spec, ctx=ctx))
rep = abel_verify(spec, f, mapper=mapper)
print(rep.passes, rep.residual)

# %% [markdown]
# Break the symmetry and the residue component of the Abel sum no longer
# vanishes.  `force=True` skips the f = c mod m precondition.

# %%
g = function_with_divisor(ctx, [a, 0.3 + 0.1j], [b, a + 0.3 + 0.1j - b])
rep = abel_verify(spec, g, force=True, mapper=mapper)
print(rep.passes, np.round(rep.residue_components, 4))
