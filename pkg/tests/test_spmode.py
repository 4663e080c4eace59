import cmath
import math
import warnings

import numpy as np
import pytest

from plasmonqe import spmode
from plasmonqe.spmode import (DecayCoefficients, calibrate_sp_coefficient, decay_budget,
                              dispersion_residual, field_at, solve_dispersion)

EPS_AG = -5.65 + 0.65j


@pytest.fixture(scope="module")
def sol():
    return solve_dispersion(EPS_AG, 1.0, 450.0)


def test_independent_closed_form(sol):
    # textbook expressions written out directly with cmath
    k0 = 2 * math.pi / 450
    kx = k0 * cmath.sqrt(EPS_AG / (EPS_AG + 1))
    assert sol.k_x == pytest.approx(kx, rel=1e-14)
    assert sol.lambda_sp_nm == pytest.approx(2 * math.pi / kx.real, rel=1e-14)
    assert sol.L_prop_nm == pytest.approx(1 / (2 * kx.imag), rel=1e-14)


def test_decaying_branches(sol):
    assert sol.k_z1.imag > 0 and sol.k_z2.imag > 0
    z = np.array([-200.0, -10.0, 10.0, 200.0])
    Ex = field_at(sol, 0.0, z)[0]
    assert abs(Ex[0]) < abs(Ex[1]) and abs(Ex[3]) < abs(Ex[2])


def test_boundary_conditions(sol):
    tiny = 1e-9
    up = field_at(sol, 3.0, tiny)
    down = field_at(sol, 3.0, -tiny)
    assert up[0] == pytest.approx(down[0], rel=1e-9)  # tangential E
    assert up[3] == pytest.approx(down[3], rel=1e-9)  # tangential H
    assert sol.eps2 * up[2] == pytest.approx(sol.eps1 * down[2], rel=1e-9)  # normal D
    assert np.all(field_at(sol, 0.0, [1.0, -1.0])[1] == 0)


def test_fields_satisfy_divergence(sol):
    # i k_x E_x + dE_z/dz = 0 on each side
    for z in (50.0, -5.0):
        Ex, _, Ez, _ = field_at(sol, 0.0, z)
        h = 1e-4
        dEz = (field_at(sol, 0.0, z + h)[2] - field_at(sol, 0.0, z - h)[2]) / (2 * h)
        assert abs(1j * sol.k_x * Ex + dEz) < 1e-8 * abs(sol.k_x * Ex)


def test_residual_sweep():
    for e1 in np.linspace(-3, -30, 25) + 0.5j:
        for e2 in (1.0, 1.77, 2.25, 3.0):
            assert dispersion_residual(solve_dispersion(e1, e2, 600.0)) <= 1e-12


def test_errors_and_warnings():
    with pytest.raises(ValueError, match="pole"):
        solve_dispersion(-1.0, 1.0, 450.0)
    with pytest.raises(ValueError):
        solve_dispersion(complex("nan"), 1.0, 450.0)
    with pytest.raises(ValueError):
        solve_dispersion(-5, 1, 0.0)
    with pytest.warns(RuntimeWarning):
        solve_dispersion(2.0, 1.0, 450.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        solve_dispersion(-5.0, 1.0, 450.0)


def test_lossless_metal_gives_infinite_lengths():
    s = solve_dispersion(-5.0, 1.0, 450.0)
    assert s.L_prop_nm == math.inf
    assert s.delta_diel_nm == pytest.approx(1 / abs(s.k_z2), rel=1e-12)


def test_summary_is_plain_floats(sol):
    assert all(type(v) is float for v in sol.summary().values())


def test_decay_budget_scaling(sol):
    c = DecayCoefficients(c_rad=1.0, c_nr=8.0, c_sp=2.0)
    near, far = decay_budget(1.0, c, sol), decay_budget(2.0, c, sol)
    assert near.gamma_non_rad / far.gamma_non_rad == pytest.approx(8.0)
    assert near.gamma_sp / far.gamma_sp == pytest.approx(math.exp(2 / sol.delta_diel_nm))
    assert near.gamma_total == pytest.approx(near.gamma_rad + near.gamma_non_rad + near.gamma_sp)
    with pytest.raises(ValueError):
        DecayCoefficients(-1, 0, 0)
    with pytest.raises(ValueError):
        decay_budget(0.0, c, sol)


def test_calibration_roundtrip(sol):
    c_sp = calibrate_sp_coefficient(10.0, sol, 1.2, 0.1, 0.05 * 1000)
    b = decay_budget(10.0, DecayCoefficients(0.1, 50.0, c_sp), sol)
    assert b.ratio_to(1.0) == pytest.approx(1.2, rel=1e-14)
    assert 0 < b.sp_fraction < 1
    with pytest.raises(ValueError):
        spmode.calibrate_sp_coefficient(10.0, sol, 0.1, 0.1, 50.0)
