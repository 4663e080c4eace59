# %% [markdown]
# # Two emitters: joint populations
#
# Both emitters start excited. With gamma_12 = gamma the antisymmetric
# single-excitation state is dark, so part of the population never decays.

# %%
import numpy as np

from plasmonqe import dynamics

t = np.linspace(0, 5, 11)
for label, drive in (("pulsed", 0.0), ("driven", 1.0)):
    sys = dynamics.two_emitters(omega12_over_gamma=1.0, rabi_over_gamma=drive)
    pops = dynamics.populations(dynamics.evolve(sys, dynamics.product_state("ee"), t))
    print(label)
    print(np.array2string(pops.as_array(), precision=4, suppress_small=True))
    rho = dynamics.steady_state(sys, rho0=dynamics.product_state("ee"))
    print("long-time P_gg:", dynamics.populations(rho).P_gg[0])

# %% [markdown]
# Single-excitation decay rates from the generator.

# %%
L = dynamics.build_liouvillian(dynamics.two_emitters(rabi_over_gamma=0))
print(np.sort_complex(np.round(np.linalg.eigvals(dynamics.single_excitation_block(L)), 10)))
