"""Quantum emitters coupled to a surface plasmon on a metal/dielectric interface.

Modules
-------
numerics      dense linear algebra, matrix exponential, adaptive RK, null spaces
materials     permittivity tables and constant media
spmode        plasmon dispersion, field profiles, decay-rate budget
dynamics      emitter Hamiltonian, Liouvillian, evolution, steady state
correlations  regression-theorem correlators and two-detector g2
scattering    end-facet far field and radiative-mode transmissivities
cli           command-line entry point and comparison report
"""

__version__ = "0.1.0"
