# %% [markdown]
# # A cusp, and where the numbers disagree with the closed form
#
# A single point of multiplicity 2 gives a cusp.  The dualizing sheaf gains a
# differential of the second kind, wp(z - P) dz plus a multiple of dz that kills
# its alpha period.

# %%
import math

from genjac import build_period_matrix, canonical_form, cusp_spec
from genjac.albanese import verify

tau, p = 0.1 + 1.3j, 0.4 + 0.5j
spec = cusp_spec(tau, p)
cf = canonical_form(build_period_matrix(spec), base_tau=tau)
print(cf.description)        # C x J(X)

# %% [markdown]
# The closed form writes 0 for the beta period of that differential.  The
# Legendre relation says eta1 tau - eta2 = 2 pi i, and the contour integral
# agrees with Legendre.  The additive factor C is there either way; only the
# recorded entry differs.

# %%
sk = verify(spec)["second_kind"][0]
print("numeric beta   ", sk["beta_numeric"])
print("Legendre oracle", sk["beta_oracle"], "=", 2 * math.pi, "i")
print("closed-form zero agrees:", sk["closed_form_agrees"])
