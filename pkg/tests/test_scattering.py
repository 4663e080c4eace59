import numpy as np
import pytest

from plasmonqe import scattering
from plasmonqe.scattering import (ExpProfile, farfield, farfield_amplitude,
                                  farfield_amplitude_quad, find_lobes, match_profile,
                                  mode_match, sp_profile)
from plasmonqe.spmode import solve_dispersion

SOL = solve_dispersion(-5.65 + 0.65j, 1.0, 450.0)


def test_closed_form_matches_quadrature():
    theta = np.linspace(-1.4, 1.4, 15)
    for comp in ("Hy", "Ez"):
        prof = sp_profile(SOL, comp)
        a = farfield_amplitude(prof, SOL.k0, theta)
        b = farfield_amplitude_quad(prof, SOL.k0, theta)
        assert np.max(np.abs(a - b) / np.abs(a)) < 1e-8


def test_hand_integral_of_simple_profile():
    prof = ExpProfile(1.0, 0.5j, 2.0, -0.25j)
    # int_0^inf e^{-z/2} dz + int_-inf^0 2 e^{z/4} dz = 2 + 8
    assert farfield_amplitude(prof, 1.0, 0.0) == pytest.approx(10.0)


def test_profile_must_decay():
    with pytest.raises(ValueError):
        ExpProfile(1.0, -0.1j, 1.0, -0.1j)
    with pytest.raises(ValueError):
        sp_profile(SOL, "Ex")


def test_farfield_normalized_with_lobes():
    spec = farfield(SOL)
    assert spec.intensity.max() == pytest.approx(1.0)
    assert len(spec.lobes) >= 1
    assert all(-1.5 < x < 1.5 for x in spec.lobes)


def test_synthetic_double_lobe():
    theta = np.linspace(-1.5, 1.5, 2001)
    y = np.exp(-(theta - 0.3) ** 2 / 0.01) + 0.5 * np.exp(-(theta + 0.5) ** 2 / 0.02)
    lobes = find_lobes(theta, y)
    assert len(lobes) == 2
    assert lobes[0] == pytest.approx(-0.5, abs=1e-4)
    assert lobes[1] == pytest.approx(0.3, abs=1e-5)


def test_parabola_vertex_is_exact():
    theta = np.array([0.0, 0.1, 0.2, 0.3])
    y = -(theta - 0.137) ** 2
    assert find_lobes(theta, y) == [pytest.approx(0.137, abs=1e-12)]
    assert find_lobes(theta, theta) == []
    assert find_lobes([0.0, 1.0], [1.0, 0.0]) == []


def test_single_plane_wave():
    k0, M = 1.0, 9
    dq = k0 / (M - 1)
    modes = match_profile(lambda z: np.exp(1j * 3 * dq * np.asarray(z)), lambda z: 1.0 + 0 * z,
                          k0, M, z_extent=10.0, n_points=41)
    expected = np.zeros((M, 2))
    expected[3, 0] = 1.0
    np.testing.assert_allclose(np.abs(modes.amplitudes), expected, atol=1e-12)
    assert modes.residual < 1e-12
    beta = np.sqrt(1 - (3 * dq) ** 2)
    assert modes.total_transmissivity == pytest.approx(beta, rel=1e-12)


def test_normal_plane_wave_carries_all_flux():
    modes = match_profile(lambda z: np.ones_like(np.asarray(z), dtype=complex),
                          lambda z: np.ones_like(np.asarray(z)), 1.0, 5, 2.0, 11)
    assert modes.total_transmissivity == pytest.approx(1.0, rel=1e-12)


def test_least_squares_equals_fft():
    modes = mode_match(SOL, 9, 1000.0, 31)
    prof = sp_profile(SOL, "Hy")
    n, h = modes.n_grid, modes.spacing_nm
    c = n // 2
    idx = np.arange(n) - c
    z = idx * h
    dq = SOL.k0 / 8
    A = np.exp(1j * np.outer(z, idx * dq))
    coef, *_ = np.linalg.lstsq(A, prof(z), rcond=None)
    assert np.linalg.cond(A) == pytest.approx(1.0, abs=1e-8)
    np.testing.assert_allclose(modes.amplitudes[:, 0], coef[c:c + 9], atol=1e-12)
    np.testing.assert_allclose(modes.amplitudes[1:, 1], coef[c - 1:c - 9:-1], atol=1e-12)


def test_rows_are_signed():
    modes = mode_match(SOL, 7, 1000.0, 15)
    rows = modes.rows()
    assert len(rows) == 13
    assert rows[0][1] == 0.0 and rows[1][1] > 0 and rows[2][1] < 0
    assert modes.total_transmissivity == pytest.approx(sum(modes.transmissivity))


def test_mode_match_errors():
    with pytest.raises(ValueError):
        mode_match(SOL, 1, 1200.0, 401)
    with pytest.raises(ValueError):
        mode_match(SOL, 33, 1200.0, 40)
    with pytest.raises(ValueError, match="period"):
        mode_match(SOL, 3, 1200.0, 401)
    with pytest.raises(ValueError, match="decay lengths"):
        mode_match(SOL, 33, 200.0, 401)


def test_convergence_and_range():
    base = mode_match(SOL, 33, 1200.0, 401)
    fine = mode_match(SOL, 65, 1200.0, 802)
    assert 0 < base.total_transmissivity < 1
    assert abs(fine.total_transmissivity / base.total_transmissivity - 1) < 0.01
    assert fine.residual < base.residual
    assert np.all(scattering.DEFAULT_THETA == np.linspace(-1.5, 1.5, 2001))
