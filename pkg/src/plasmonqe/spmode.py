"""Surface-plasmon mode of a flat metal/dielectric interface.

Geometry: metal (``eps1``) fills ``z < 0``, dielectric (``eps2``) fills
``z > 0``, the mode propagates along ``+x``. Lengths are in nm and
wavenumbers in rad/nm.

Branch conventions
------------------
``n_eff`` is the principal square root of ``eps1 eps2 / (eps1 + eps2)``.
Both ``k_z1`` and ``k_z2`` are taken with non-negative imaginary part. The
field goes as ``exp(+i k_z2 z)`` above the interface and as
``exp(-i k_z1 z)`` below it, so it decays away from the interface on both
sides.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SPModeSolution:
    eps1: complex
    eps2: complex
    lambda0_nm: float
    k0: float
    n_eff: complex
    k_x: complex
    k_z1: complex
    k_z2: complex
    lambda_sp_nm: float
    L_prop_nm: float
    delta_metal_nm: float
    delta_diel_nm: float

    @property
    def lambda_sp_ratio(self):
        return self.lambda_sp_nm / self.lambda0_nm

    def kz_effective(self, side):
        """z-component of the wavevector actually used in ``exp(i k_z z)``."""
        return self.k_z2 if side > 0 else -self.k_z1

    def eps_side(self, side):
        return self.eps2 if side > 0 else self.eps1

    def summary(self):
        return {
            "eps1_re": self.eps1.real, "eps1_im": self.eps1.imag,
            "eps2_re": self.eps2.real, "eps2_im": self.eps2.imag,
            "lambda0_nm": self.lambda0_nm,
            "n_eff_re": self.n_eff.real, "n_eff_im": self.n_eff.imag,
            "lambda_sp_nm": self.lambda_sp_nm,
            "lambda_sp_over_lambda0": self.lambda_sp_ratio,
            "L_prop_nm": self.L_prop_nm,
            "delta_metal_nm": self.delta_metal_nm,
            "delta_diel_nm": self.delta_diel_nm,
        }


def _decaying_sqrt(x):
    r = complex(np.sqrt(complex(x)))
    return -r if r.imag < 0 else r


def _inv_or_inf(x):
    return math.inf if x == 0 else 1.0 / x


def solve_dispersion(eps1, eps2, lambda0_nm):
    eps1, eps2 = complex(eps1), complex(eps2)
    lambda0_nm = float(lambda0_nm)
    if not all(np.isfinite([eps1, eps2, lambda0_nm])):
        raise ValueError("non-finite input to solve_dispersion")
    if lambda0_nm <= 0:
        raise ValueError("lambda0_nm must be positive")
    denom = eps1 + eps2
    if abs(denom) <= 1e-14 * max(abs(eps1), abs(eps2)):
        raise ValueError("eps1 = -eps2: surface-plasmon pole")
    if not (eps1.real < 0 < eps2.real):
        warnings.warn("Re(eps1) < 0 < Re(eps2) violated; mode is not a bound "
                      "surface plasmon", RuntimeWarning, stacklevel=2)

    k0 = 2 * math.pi / lambda0_nm
    n_eff = complex(np.sqrt(eps1 * eps2 / denom))
    k_x = n_eff * k0
    k_z1 = _decaying_sqrt(eps1 * k0**2 - k_x**2)
    k_z2 = _decaying_sqrt(eps2 * k0**2 - k_x**2)
    return SPModeSolution(
        eps1=eps1, eps2=eps2, lambda0_nm=lambda0_nm, k0=k0,
        n_eff=n_eff, k_x=k_x, k_z1=k_z1, k_z2=k_z2,
        lambda_sp_nm=lambda0_nm / n_eff.real,
        L_prop_nm=_inv_or_inf(2 * k_x.imag),
        delta_metal_nm=_inv_or_inf(k_z1.imag),
        delta_diel_nm=_inv_or_inf(k_z2.imag),
    )


def dispersion_residual(sol):
    """Largest relative residual of ``k_x^2 + k_zj^2 = eps_j k0^2``."""
    out = 0.0
    for eps, kz in ((sol.eps1, sol.k_z1), (sol.eps2, sol.k_z2)):
        target = eps * sol.k0**2
        out = max(out, abs(sol.k_x**2 + kz**2 - target) / abs(target))
    return out


def field_at(sol, x, z, E0=1.0):
    """Field components ``(E_x, E_y, E_z, H_y)`` of the mode.

    ``H_y`` is reported as ``Z0 * H_y`` so that it carries the units of
    ``E``. ``z = 0`` is evaluated on the dielectric side; both ``E_x`` and
    ``H_y`` are continuous there.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    upper = z >= 0
    kz = np.where(upper, sol.k_z2, -sol.k_z1)
    eps = np.where(upper, sol.eps2, sol.eps1)
    Ex = E0 * np.exp(1j * (sol.k_x * x + kz * z))
    Ez = -(sol.k_x / kz) * Ex
    Hy = eps * sol.k0 / kz * Ex
    Ey = np.zeros_like(Ex)
    return Ex, Ey, Ez, Hy


# -- decay-rate budget -----------------------------------------------------

@dataclass(frozen=True)
class DecayCoefficients:
    """Parametric channel strengths.

    ``c_rad`` and ``c_sp`` in Hz, ``c_nr`` in Hz nm^3.
    """

    c_rad: float
    c_nr: float
    c_sp: float

    def __post_init__(self):
        if min(self.c_rad, self.c_nr, self.c_sp) < 0:
            raise ValueError("decay coefficients must be non-negative")


@dataclass(frozen=True)
class DecayBudget:
    z0_nm: float
    gamma_rad: float
    gamma_non_rad: float
    gamma_sp: float
    gamma_total: float
    coefficients: DecayCoefficients

    def ratio_to(self, gamma0):
        return self.gamma_total / gamma0

    @property
    def sp_fraction(self):
        return self.gamma_sp / self.gamma_total if self.gamma_total else 0.0


def decay_budget(z0_nm, coefficients, sol):
    """Split the emitter decay into free-space, non-radiative and SP channels.

    The SP channel follows the intensity of the evanescent tail,
    ``c_sp exp(-2 z0 / delta_diel)``; the non-radiative channel goes as
    ``c_nr / z0^3``; the free-space channel is the constant ``c_rad``.
    """
    if not z0_nm > 0:
        raise ValueError("z0_nm must be positive")
    c = coefficients
    g_sp = c.c_sp * math.exp(-2 * z0_nm / sol.delta_diel_nm)
    g_nr = c.c_nr / z0_nm**3
    g_rad = c.c_rad
    return DecayBudget(z0_nm=z0_nm, gamma_rad=g_rad, gamma_non_rad=g_nr,
                       gamma_sp=g_sp, gamma_total=g_rad + g_nr + g_sp,
                       coefficients=c)


def calibrate_sp_coefficient(z0_nm, sol, gamma_total, c_rad, c_nr):
    """``c_sp`` that makes the budget at ``z0_nm`` sum to ``gamma_total``."""
    if not z0_nm > 0:
        raise ValueError("z0_nm must be positive")
    rest = gamma_total - c_rad - c_nr / z0_nm**3
    if rest < 0:
        raise ValueError("free-space and non-radiative channels already exceed gamma_total")
    return rest * math.exp(2 * z0_nm / sol.delta_diel_nm)
