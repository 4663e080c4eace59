"""Two-time spin correlators and the two-detector g2(tau).

Indices of emitters are 0-based. Detector directions are unit 3-vectors;
phases use ``exp(i k R.(r_p - r_s))`` with ``k`` in rad/nm and positions in
nm.

The g2 numerator is evaluated through the detector field operators
``A_j = sum_s exp(-i k R_j.r_s) S_s^-``:

    G2(tau) = Tr[A_2^+ A_2 exp(L tau)(A_1 rho A_1^+)]

which expands to the four-index phased sum of regression-theorem correlators
``<S_p^+(0) S_q^+(tau) S_r^-(tau) S_s^-(0)>``. ``two_time`` computes those
correlators one at a time and serves as the independent route.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import dynamics, numerics
from .numerics import dagger

STATIONARY_TOL = 1e-8


@dataclass(frozen=True)
class DetectorGeometry:
    directions: np.ndarray
    k: float

    def __post_init__(self):
        d = np.atleast_2d(np.asarray(self.directions, dtype=float))
        if d.shape[1] != 3:
            raise ValueError("detector directions must be 3-vectors")
        norms = np.linalg.norm(d, axis=1)
        if np.any(np.abs(norms - 1) > 1e-12):
            raise ValueError("detector directions must be unit vectors")
        if not self.k >= 0:
            raise ValueError("k must be non-negative")
        object.__setattr__(self, "directions", d)

    def swapped(self):
        return DetectorGeometry(self.directions[::-1].copy(), self.k)


def symmetric_detectors(theta0, k):
    """Detectors in the x-z plane at ``+theta0`` and ``-theta0`` from +x."""
    c, s = np.cos(theta0), np.sin(theta0)
    return DetectorGeometry([[c, 0.0, s], [c, 0.0, -s]], k)


@dataclass(frozen=True)
class CorrelationSeries:
    tau: np.ndarray
    g2: np.ndarray
    numerator: np.ndarray
    denominator: float
    rho_ref: np.ndarray
    stationary: bool = True
    label: str = ""

    def as_rows(self):
        return np.column_stack([self.tau, self.g2, self.numerator.real,
                                self.numerator.imag,
                                np.full(self.tau.shape, self.denominator)])


def field_operator(sys, geom, detector_index):
    R = geom.directions[detector_index]
    phases = np.exp(-1j * geom.k * (sys.positions_nm @ R))
    return sum(phases[s] * dynamics.lowering(s, sys.n) for s in range(sys.n))


def _check_reference(sys, L, rho_ref, stationary):
    rho_ref = np.asarray(rho_ref, dtype=complex)
    if rho_ref.shape != (sys.dim, sys.dim):
        raise ValueError(f"reference state must be {sys.dim}x{sys.dim}")
    if stationary:
        res = np.linalg.norm(L @ numerics.vec(rho_ref))
        if res > STATIONARY_TOL:
            raise ValueError(f"reference state is not stationary (residual {res:.2e}); "
                             "pass stationary=False to use it anyway")
    return rho_ref


def two_time(sys, rho_ref, p, q, r, s, tau, stationary=True):
    """``<S_p^+(0) S_q^+(tau) S_r^-(tau) S_s^-(0)>`` by quantum regression."""
    for idx in (p, q, r, s):
        if not 0 <= idx < sys.n:
            raise IndexError(f"emitter index {idx} out of range for {sys.n} emitters")
    L = dynamics.build_liouvillian(sys)
    rho_ref = _check_reference(sys, L, rho_ref, stationary)
    n = sys.n
    X0 = dynamics.lowering(s, n) @ rho_ref @ dynamics.raising(p, n)
    B = dynamics.raising(q, n) @ dynamics.lowering(r, n)
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    X = numerics.unvec(numerics.propagate(L, numerics.vec(X0), tau), sys.dim)
    return np.einsum("ij,tji->t", B, X)


def intensity(sys, rho, geom, detector_index):
    """``sum_mn <S_m^+ S_n^-> exp(i k R.(r_m - r_n))`` at one detector."""
    A = field_operator(sys, geom, detector_index)
    val = np.trace(dagger(A) @ A @ rho)
    if abs(val.imag) > 1e-10 * max(1.0, abs(val)):
        raise numerics.InvariantError("intensity is not real", module="correlations",
                                      invariant="realness")
    return float(val.real)


def g2(sys, geom, tau, denominator="product", rho_ref=None, rho0=None,
       stationary=True, label=""):
    """Normalized two-detector correlation g2(tau).

    Parameters
    ----------
    denominator : {"product", "literal"}
        ``"product"`` divides by ``I(R1) I(R2)``; ``"literal"`` by
        ``I(R1)^2``.
    rho_ref : array, optional
        Reference state. Defaults to the steady state (reached from
        ``rho0`` when the kernel is degenerate).
    stationary : bool
        Set False to correlate from a non-stationary ``rho_ref``.
    """
    tau = np.asarray(tau, dtype=float)
    L = dynamics.build_liouvillian(sys)
    if rho_ref is None:
        rho_ref = dynamics.steady_state(sys, rho0=rho0)
    rho_ref = _check_reference(sys, L, rho_ref, stationary)

    A1 = field_operator(sys, geom, 0)
    A2 = field_operator(sys, geom, 1)
    I1 = intensity(sys, rho_ref, geom, 0)
    I2 = intensity(sys, rho_ref, geom, 1)
    if denominator == "product":
        den = I1 * I2
    elif denominator == "literal":
        den = I1 * I1
    else:
        raise ValueError(f"unknown denominator {denominator!r}")
    if den <= 1e-14:
        raise numerics.NumericalError("zero g2 denominator: no excitation in the "
                                      "reference state", module="correlations",
                                      invariant="denominator")

    X0 = A1 @ rho_ref @ dagger(A1)
    B = dagger(A2) @ A2
    X = numerics.unvec(numerics.propagate(L, numerics.vec(X0), tau), sys.dim)
    num = np.einsum("ij,tji->t", B, X)
    if np.any(np.abs(num.imag) > 1e-10 * np.abs(num) + 1e-14):
        raise numerics.InvariantError("g2 numerator has an imaginary residue",
                                      module="correlations", invariant="realness")
    return CorrelationSeries(tau=tau, g2=num.real / den, numerator=num,
                             denominator=den, rho_ref=rho_ref,
                             stationary=stationary, label=label)


def g2_phased_sum(sys, geom, tau, rho_ref, stationary=True, denominator="product"):
    """g2 assembled literally from the four-index phased two-time sum.

    Slow (``N^4`` propagations); used as a cross-check of ``g2``.
    """
    R1, R2 = geom.directions
    r = sys.positions_nm
    tau = np.asarray(tau, dtype=float)
    num = np.zeros(tau.shape, dtype=complex)
    rng = range(sys.n)
    for p in rng:
        for q in rng:
            for rr in rng:
                for s in rng:
                    phase = np.exp(1j * geom.k * (R1 @ (r[p] - r[s]) + R2 @ (r[q] - r[rr])))
                    num += phase * two_time(sys, rho_ref, p, q, rr, s, tau,
                                            stationary=stationary)
    I1 = intensity(sys, rho_ref, geom, 0)
    I2 = intensity(sys, rho_ref, geom, 1)
    den = I1 * I2 if denominator == "product" else I1 * I1
    return num / den


def g2_sweep(sys_base, omega12_values, geom, tau, max_workers=1, **kwargs):
    """One g2 series per dipole-dipole coupling (same units as ``gamma``).

    Results are returned in input order whatever ``max_workers`` is.
    """
    def one(val):
        if not np.isfinite(val):
            raise ValueError("omega12 values must be finite")
        o12 = np.array(sys_base.omega12, dtype=float)
        mask = ~np.eye(sys_base.n, dtype=bool)
        o12[mask] = val
        sys = sys_base.with_(omega12=o12)
        return g2(sys, geom, tau, label=f"omega12={val / sys_base.gamma:g}", **kwargs)

    values = list(omega12_values)
    if max_workers == 1:
        return [one(v) for v in values]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(one, values))
