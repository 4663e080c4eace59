# %% [markdown]
# # Transmission into radiative modes
#
# Expand the facet profile in plane waves and add up the propagating flux.

# %%
from plasmonqe import scattering, spmode

sol = spmode.solve_dispersion(-5.65 + 0.65j, 1.0, 450.0)
modes = scattering.mode_match(sol, M=33, z_extent=1200.0, n_points=401)
print(f"total transmissivity {modes.total_transmissivity:.4f}, residual {modes.residual:.2e}")
for m, t in zip(modes.m[:8], modes.transmissivity[:8]):
    print(f"m = {m:2d}  q/k0 = {m / 32:.4f}  T_m = {t:.4f}")

# %% [markdown]
# Doubling the basis and the sampling barely moves the total.

# %%
for M, n in ((17, 201), (33, 401), (65, 802), (129, 1604)):
    mm = scattering.mode_match(sol, M, 1200.0, n)
    print(f"M = {M:4d}  n = {n:5d}  T = {mm.total_transmissivity:.5f}  residual = {mm.residual:.2e}")
