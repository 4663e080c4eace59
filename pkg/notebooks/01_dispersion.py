# %% [markdown]
# # Surface-plasmon mode of a silver/air interface
#
# Solve the dispersion relation, look at the decay lengths and split the
# emitter decay into its channels.

# %%
import numpy as np

from plasmonqe import materials, spmode

sol = spmode.solve_dispersion(-5.65 + 0.65j, 1.0, 450.0)
for key, val in sol.summary().items():
    print(f"{key:>24s}  {val:.6g}")

# %% [markdown]
# The same interface from the bundled silver table, across the visible.

# %%
ag = materials.load_silver()
for lam in np.arange(400, 701, 50):
    s = spmode.solve_dispersion(ag(lam), 1.0, lam)
    print(f"{lam:5.0f} nm  lambda_sp/lambda0 = {s.lambda_sp_ratio:.4f}  "
          f"L_prop = {s.L_prop_nm / 1000:6.2f} um  delta_diel = {s.delta_diel_nm:6.1f} nm")

# %% [markdown]
# Decay budget of an emitter 10 nm above the metal, calibrated so that the
# total rate is 1.2 times the free-space rate.

# %%
gamma0 = 2.9e10 / 1.2
c_rad, c_nr = 0.1 * gamma0, 0.05 * gamma0 * 10.0**3
c_sp = spmode.calibrate_sp_coefficient(10.0, sol, 2.9e10, c_rad, c_nr)
coeffs = spmode.DecayCoefficients(c_rad, c_nr, c_sp)
for z0 in (5.0, 10.0, 20.0, 50.0, 100.0):
    b = spmode.decay_budget(z0, coeffs, sol)
    print(f"z0 = {z0:5.1f} nm  gamma/gamma0 = {b.ratio_to(gamma0):7.3f}  SP share = {b.sp_fraction:.3f}")
