"""Glue between a ``RunConfig`` and the physics modules.

Each ``run_*`` function returns plain results (arrays and dicts); writing
files is left to the caller.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import correlations, dynamics, materials, scattering, spmode
from .config import RunConfig


def interface(cfg: RunConfig):
    if cfg.material is None:
        eps1 = complex(cfg.eps1_re, cfg.eps1_im)
    elif cfg.material == "silver_jc":
        eps1 = materials.permittivity_at(materials.load_silver(), cfg.lambda0_nm)
    else:
        eps1 = materials.permittivity_at(materials.load_table(cfg.material), cfg.lambda0_nm)
    return spmode.solve_dispersion(eps1, cfg.eps2, cfg.lambda0_nm)


def emitter_system(cfg: RunConfig, omega12_over_gamma=None, mode=None):
    mode = mode or cfg.run_mode
    o12 = cfg.omega12_values()[0] if omega12_over_gamma is None else omega12_over_gamma
    rabi = cfg.omega_drive_over_gamma if mode == "driven" else [0.0, 0.0]
    return dynamics.two_emitters(
        gamma_hz=cfg.gamma_hz, omega12_over_gamma=o12, rabi_over_gamma=rabi,
        gamma12_over_gamma=cfg.gamma12_over_gamma,
        detuning_over_gamma=cfg.detuning_over_gamma, r12_nm=cfg.r12_nm,
        z0_nm=cfg.z0_nm, lambda0_nm=cfg.lambda0_nm)


def theta_grid(cfg: RunConfig):
    return np.linspace(cfg.theta_min_rad, cfg.theta_max_rad, cfg.n_theta)


def detector_angle(cfg: RunConfig, sol=None):
    """``theta0`` from the config, else the outermost lobe of the H_y far field."""
    if cfg.theta0_rad is not None:
        return float(cfg.theta0_rad)
    sol = sol or interface(cfg)
    lobes = scattering.farfield(sol, theta_grid(cfg), "Hy").lobes
    return max((abs(x) for x in lobes), default=0.0)


def detectors(cfg: RunConfig, sol=None):
    sol = sol or interface(cfg)
    k = sol.k0 if cfg.detector_k == "free_space" else sol.k_x.real
    return correlations.symmetric_detectors(detector_angle(cfg, sol), k)


def run_dispersion(cfg: RunConfig):
    sol = interface(cfg)
    gamma0 = cfg.gamma_hz / cfg.gamma_over_gamma0
    c_rad = cfg.c_rad_over_gamma0 * gamma0
    c_nr = cfg.c_nr_over_gamma0 * gamma0 * cfg.z0_nm**3
    c_sp = spmode.calibrate_sp_coefficient(cfg.z0_nm, sol, cfg.gamma_hz, c_rad, c_nr)
    budget = spmode.decay_budget(cfg.z0_nm, spmode.DecayCoefficients(c_rad, c_nr, c_sp), sol)
    out = sol.summary()
    out.update({
        "dispersion_residual": spmode.dispersion_residual(sol),
        "decay_budget": {
            "z0_nm": budget.z0_nm,
            "gamma_rad_hz": budget.gamma_rad,
            "gamma_non_rad_hz": budget.gamma_non_rad,
            "gamma_sp_hz": budget.gamma_sp,
            "gamma_total_hz": budget.gamma_total,
            "gamma_over_gamma0": budget.ratio_to(gamma0),
            "sp_fraction": budget.sp_fraction,
        },
    })
    return sol, out


def run_farfield(cfg: RunConfig, n_check=41):
    """Far field for both facet components plus a quadrature spot check."""
    sol = interface(cfg)
    theta = theta_grid(cfg)
    spectra = {c: scattering.farfield(sol, theta, c) for c in ("Hy", "Ez")}
    check = {}
    idx = np.unique(np.linspace(0, theta.size - 1, n_check).round().astype(int))
    for c, spec in spectra.items():
        quad = scattering.farfield_amplitude_quad(scattering.sp_profile(sol, c), sol.k0,
                                                  theta[idx])
        closed = spec.amplitude[idx]
        check[c] = float(np.max(np.abs(quad - closed) / np.abs(closed)))
    summary = {
        "theta0_list": {c: s.lobes for c, s in spectra.items()},
        "quadrature_max_rel_dev": check,
    }
    return spectra, summary


def run_transmission(cfg: RunConfig):
    sol = interface(cfg)
    modes = scattering.mode_match(sol, cfg.n_modes, cfg.z_extent_nm, cfg.n_points)
    lobes = scattering.farfield(sol, theta_grid(cfg), "Hy").lobes
    summary = {
        "total_transmissivity": modes.total_transmissivity,
        "residual": modes.residual,
        "theta0_list": lobes,
        "n_modes": cfg.n_modes,
        "n_points": cfg.n_points,
        "z_extent_nm": cfg.z_extent_nm,
        "period_nm": modes.period_nm,
        "grid_spacing_nm": modes.spacing_nm,
    }
    return modes, summary


def time_grid(cfg: RunConfig):
    return np.linspace(0.0, cfg.t_max_over_gamma, cfg.n_t)


def tau_grid(cfg: RunConfig):
    return np.linspace(0.0, cfg.tau_max_over_gamma, cfg.n_tau)


def run_populations(cfg: RunConfig, mode=None):
    """Joint populations from ``initial_state`` and the long-time state."""
    mode = mode or cfg.run_mode
    sys = emitter_system(cfg, mode=mode)
    rho0 = dynamics.product_state(cfg.initial_state)
    traj = dynamics.evolve(sys, rho0, time_grid(cfg), method=cfg.evolve_method)
    pops = dynamics.populations(traj)
    rho_ss = dynamics.steady_state(sys, rho0=rho0)
    ss = dynamics.populations(rho_ss)
    summary = {
        "run_mode": mode,
        "steady_state": {k: float(getattr(ss, k)[0]) for k in ("P_ee", "P_eg", "P_ge", "P_gg")},
        "max_trace_error": float(np.max(np.abs(pops.P_ee + pops.P_eg + pops.P_ge + pops.P_gg - 1))),
    }
    return pops, summary


def run_g2(cfg: RunConfig, mode=None, omega12_over_gamma=None):
    """g2(tau) in the driven (stationary) or pulsed (from ``initial_state``) mode.

    In the pulsed mode the reference state is the initial state itself, which
    is not stationary; the steady state there has no excitation and cannot
    normalize a correlation.
    """
    mode = mode or cfg.run_mode
    sol = interface(cfg)
    geom = detectors(cfg, sol)
    sys = emitter_system(cfg, omega12_over_gamma=omega12_over_gamma, mode=mode)
    rho0 = dynamics.product_state(cfg.initial_state)
    tau = tau_grid(cfg)
    if mode == "driven":
        series = correlations.g2(sys, geom, tau, denominator=cfg.denominator, rho0=rho0)
    else:
        series = correlations.g2(sys, geom, tau, denominator=cfg.denominator,
                                 rho_ref=rho0, stationary=False)
    summary = {
        "run_mode": mode,
        "theta0_rad": detector_angle(cfg, sol),
        "omega12_over_gamma": (cfg.omega12_values()[0] if omega12_over_gamma is None
                               else omega12_over_gamma),
        "g2_0": float(series.g2[0]),
        "g2_tau_max": float(series.g2[-1]),
        "P_ee_ref": float(series.rho_ref[0, 0].real),
        "denominator": series.denominator,
    }
    return series, summary


def run_sweep(cfg: RunConfig, mode=None, max_workers=1):
    """One g2 run per coupling value, returned in input order."""
    values = cfg.omega12_values()

    def one(val):
        return (val,) + run_g2(cfg, mode=mode, omega12_over_gamma=val)

    if max_workers == 1:
        return [one(v) for v in values]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(one, values))


def monotone_overshoot(values):
    """Largest drop of a curve below its running maximum."""
    values = np.asarray(values, dtype=float)
    return float(np.max(np.maximum.accumulate(values) - values))


def slope_sign_changes(values, rel_tol=1e-9):
    """Sign changes of the discrete derivative, ignoring flat steps."""
    d = np.diff(np.asarray(values, dtype=float))
    scale = max(np.max(np.abs(d)), 1e-300)
    s = np.sign(np.where(np.abs(d) <= rel_tol * scale, 0.0, d))
    s = s[s != 0]
    return int(np.sum(s[1:] != s[:-1]))
