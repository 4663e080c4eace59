"""Scattering of the surface plasmon at the end of the interface.

Two calculations share one ingredient, the transverse profile of the mode
at the end facet ``x = 0``:

* the far-field angular intensity
  ``I(theta) ~ cos^2(theta) |int dz f(z) exp(i k0 z sin(theta))|^2``;
* the expansion of that profile into radiative plane waves of the free
  half-space ``x > 0`` (amplitudes ``T_m``), from which the transmitted
  fraction of the plasmon power flux follows.

A profile is a pair of one-sided exponentials, ``a+ exp(i kz+ z)`` above the
interface and ``a- exp(i kz- z)`` below, with ``Im kz+ > 0 > Im kz-``. Its
Fourier transform ``F(q) = int f(z) exp(-i q z) dz`` is closed-form.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

DEFAULT_THETA = np.linspace(-1.5, 1.5, 2001)


@dataclass(frozen=True)
class ExpProfile:
    a_pos: complex
    kz_pos: complex
    a_neg: complex
    kz_neg: complex
    flux_pos: float = 1.0
    flux_neg: float = 1.0

    def __post_init__(self):
        if not (complex(self.kz_pos).imag > 0 and complex(self.kz_neg).imag < 0):
            raise ValueError("profile does not decay away from z = 0 on both sides")

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        up = z >= 0
        # evaluate each branch only where it decays, to avoid overflow
        zp = np.where(up, z, 0.0)
        zn = np.where(up, 0.0, z)
        return np.where(up, self.a_pos * np.exp(1j * self.kz_pos * zp),
                        self.a_neg * np.exp(1j * self.kz_neg * zn))

    def flux_density(self, z):
        """Power-flux weight per ``|f|^2``; the two sides are averaged at z = 0."""
        z = np.asarray(z, dtype=float)
        w = np.where(z > 0, self.flux_pos, self.flux_neg)
        return np.where(z == 0, 0.5 * (self.flux_pos + self.flux_neg), w)

    def spectrum(self, q):
        q = np.asarray(q, dtype=complex)
        return 1j * self.a_pos / (self.kz_pos - q) - 1j * self.a_neg / (self.kz_neg - q)

    @property
    def decay_lengths(self):
        return 1.0 / complex(self.kz_pos).imag, -1.0 / complex(self.kz_neg).imag


def sp_profile(sol, component="Hy"):
    """Facet profile of ``H_y`` (Z0-normalized) or ``E_z`` for unit ``E_x``."""
    kp, kn = sol.k_z2, -sol.k_z1
    if component == "Hy":
        a_pos, a_neg = sol.eps2 * sol.k0 / kp, sol.eps1 * sol.k0 / kn
    elif component == "Ez":
        a_pos, a_neg = -sol.k_x / kp, -sol.k_x / kn
    else:
        raise ValueError(f"unknown component {component!r}")
    return ExpProfile(a_pos, kp, a_neg, kn,
                      flux_pos=float((sol.n_eff / sol.eps2).real),
                      flux_neg=float((sol.n_eff / sol.eps1).real))


# -- far field -------------------------------------------------------------

@dataclass(frozen=True)
class AngularSpectrum:
    theta: np.ndarray
    intensity: np.ndarray
    amplitude: np.ndarray
    lobes: list
    component: str = "Hy"


def farfield_amplitude(profile, k0, theta):
    """``int dz f(z) exp(i k0 z sin(theta))`` in closed form."""
    return profile.spectrum(-k0 * np.sin(np.asarray(theta, dtype=float)))


def farfield_amplitude_quad(profile, k0, theta, n_decay=60.0):
    """Same integral by adaptive quadrature, truncated after ``n_decay`` decay lengths."""
    lp, ln = profile.decay_lengths
    out = []
    for th in np.atleast_1d(theta):
        s = k0 * math.sin(th)
        total = 0j
        for lo, hi in ((0.0, n_decay * lp), (-n_decay * ln, 0.0)):
            def f(z):
                return complex(profile(z)) * np.exp(1j * s * z)
            re = integrate.quad(lambda z: f(z).real, lo, hi, epsabs=0, epsrel=1e-13, limit=500)[0]
            im = integrate.quad(lambda z: f(z).imag, lo, hi, epsabs=0, epsrel=1e-13, limit=500)[0]
            total += re + 1j * im
        out.append(total)
    return np.array(out)


def farfield(sol, theta=None, component="Hy", profile=None):
    """Normalized far-field angular intensity and its lobes.

    ``profile`` overrides the plasmon facet profile (e.g. a synthetic one).
    """
    theta = DEFAULT_THETA if theta is None else np.asarray(theta, dtype=float)
    if profile is None:
        profile = sp_profile(sol, component)
    amp = farfield_amplitude(profile, sol.k0, theta)
    inten = np.cos(theta) ** 2 * np.abs(amp) ** 2 / sol.lambda_sp_nm
    peak = inten.max()
    if not peak > 0:
        raise ValueError("far-field intensity vanishes everywhere")
    inten = inten / peak
    spec = AngularSpectrum(theta=theta, intensity=inten, amplitude=amp, lobes=[],
                           component=component)
    return AngularSpectrum(theta=theta, intensity=inten, amplitude=amp,
                           lobes=find_lobes(spec), component=component)


def find_lobes(spec, intensity=None):
    """Strict local maxima of a sampled curve, refined by a parabola through
    each peak and its two neighbours. Endpoints never count.

    Accepts an ``AngularSpectrum`` or ``(theta, intensity)`` arrays.
    """
    if intensity is None:
        theta, y = spec.theta, spec.intensity
    else:
        theta, y = spec, intensity
    theta = np.asarray(theta, dtype=float)
    y = np.asarray(y, dtype=float)
    if theta.size < 3:
        return []
    lobes = []
    for i in range(1, theta.size - 1):
        if y[i] > y[i - 1] and y[i] > y[i + 1]:
            x0, x1, x2 = theta[i - 1:i + 2]
            y0, y1, y2 = y[i - 1:i + 2]
            d01, d12 = (y1 - y0) / (x1 - x0), (y2 - y1) / (x2 - x1)
            curv = (d12 - d01) / (x2 - x0)
            # vertex of the interpolating parabola
            lobes.append(float(0.5 * (x0 + x1) - d01 / (2 * curv)))
    return sorted(lobes)


# -- radiative mode expansion ----------------------------------------------

@dataclass(frozen=True)
class RadiativeModeSet:
    """Propagating plane-wave content of a facet profile.

    Mode ``m`` has transverse wavenumber ``q[m] = m k0 / (M - 1)``; column 0
    of ``amplitudes`` is the ``+q`` wave, column 1 the ``-q`` wave (zero for
    ``m = 0``). ``transmissivity[m]`` is the share of the incident power
    flux carried by both.
    """

    m: np.ndarray
    q: np.ndarray
    amplitudes: np.ndarray
    flux_weight: np.ndarray
    transmissivity: np.ndarray
    total_transmissivity: float
    residual: float
    k0: float
    period_nm: float
    spacing_nm: float
    n_grid: int
    n_collocation: int

    def rows(self):
        """``(m, q/k0, T_re, T_im, flux_weight)`` per signed plane wave."""
        out = []
        for m, q, (tp, tn), w in zip(self.m, self.q, self.amplitudes, self.flux_weight):
            out.append((m, q / self.k0, tp.real, tp.imag, w))
            if m > 0:
                out.append((m, -q / self.k0, tn.real, tn.imag, w))
        return out


def match_profile(profile, flux_density, k0, M, z_extent, n_points):
    """Least-squares expansion of a facet profile into plane waves.

    The basis is ``exp(i j dq z)`` with ``dq = k0 / (M - 1)``; waves with
    ``|j| <= M - 1`` propagate, the rest are evanescent and carry no flux.
    Collocation points are equally spaced with spacing at most
    ``2 z_extent / (n_points - 1)`` and continue over one full basis period
    ``2 pi / dq``, where the profile is negligible outside ``|z| <= z_extent``.
    On that periodic grid the basis is orthogonal, so the least-squares
    amplitudes are the discrete Fourier coefficients.

    ``residual`` is the relative RMS misfit of the expansion at the
    midpoints between collocation points inside ``|z| <= z_extent``.
    """
    if M < 2:
        raise ValueError("need at least 2 radiative modes")
    if n_points < 2 * M:
        raise ValueError(f"n_points={n_points} must be at least 2*M={2 * M}")
    dq = k0 / (M - 1)
    period = 2 * math.pi / dq
    if period / 2 < z_extent:
        raise ValueError(f"M={M} gives a basis period of {period:.1f} nm, shorter "
                         f"than the matching window 2*{z_extent} nm")
    n_grid = math.ceil(period / (2 * z_extent / (n_points - 1)))
    n_grid += 1 - n_grid % 2
    h = period / n_grid
    c = n_grid // 2
    idx = np.arange(n_grid) - c
    z = idx * h
    f = np.asarray(profile(z), dtype=complex)

    coef = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(f))) / n_grid
    q_all = idx * dq

    # flux of the incident profile over one period
    p_in = h * np.sum(flux_density(z) * np.abs(f) ** 2)
    if not p_in > 0:
        raise ValueError("profile carries no forward power flux")

    m = np.arange(M)
    q = m * dq
    beta = np.sqrt(np.clip(k0**2 - q**2, 0.0, None))
    w = (beta / k0) * period / p_in
    amps = np.zeros((M, 2), dtype=complex)
    amps[:, 0] = coef[c + m]
    amps[1:, 1] = coef[c - m[1:]]
    trans = w * np.sum(np.abs(amps) ** 2, axis=1)

    # trigonometric interpolant at the midpoints
    shifted = coef * np.exp(1j * q_all * h / 2)
    mid_vals = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(shifted))) * n_grid
    z_mid = z + h / 2
    window = np.abs(z_mid) <= z_extent
    truth = np.asarray(profile(z_mid[window]), dtype=complex)
    residual = float(np.linalg.norm(mid_vals[window] - truth) / np.linalg.norm(truth))

    return RadiativeModeSet(
        m=m, q=q, amplitudes=amps, flux_weight=w, transmissivity=trans,
        total_transmissivity=float(np.sum(trans)), residual=residual, k0=k0,
        period_nm=period, spacing_nm=h, n_grid=n_grid,
        n_collocation=int(np.sum(np.abs(z) <= z_extent)),
    )


def mode_match(sol, M, z_extent, n_points, min_decay_lengths=6.0):
    """Radiative-mode amplitudes ``T_m`` of the plasmon ``H_y`` at the facet."""
    profile = sp_profile(sol, "Hy")
    need = min_decay_lengths * max(sol.delta_diel_nm, sol.delta_metal_nm)
    if z_extent < need:
        raise ValueError(f"z_extent={z_extent} nm covers fewer than {min_decay_lengths:g} "
                         f"decay lengths ({need:.1f} nm needed)")
    return match_profile(profile, profile.flux_density, sol.k0, M, z_extent, n_points)
