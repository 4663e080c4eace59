# %% [markdown]
# # Far field of the plasmon leaving the end of the interface

# %%
import numpy as np

from plasmonqe import scattering, spmode

sol = spmode.solve_dispersion(-5.65 + 0.65j, 1.0, 450.0)
theta = np.linspace(-1.5, 1.5, 2001)
spectra = {c: scattering.farfield(sol, theta, c) for c in ("Hy", "Ez")}
for c, spec in spectra.items():
    print(c, "lobes at", np.round(spec.lobes, 4), "rad")

# %% [markdown]
# The closed-form Fourier integral against adaptive quadrature.

# %%
prof = scattering.sp_profile(sol, "Hy")
check = theta[::200]
closed = scattering.farfield_amplitude(prof, sol.k0, check)
quad = scattering.farfield_amplitude_quad(prof, sol.k0, check)
print("max relative deviation:", np.max(np.abs(closed - quad) / np.abs(closed)))

# %% [markdown]
# A coarse text plot of the H_y pattern.

# %%
spec = spectra["Hy"]
for th, y in zip(spec.theta[::100], spec.intensity[::100]):
    print(f"{th:+.2f} " + "#" * int(60 * y))
