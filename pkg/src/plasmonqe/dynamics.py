"""Collective emitter dynamics under the master equation.

Basis ordering: tensor products with emitter 1 as the leftmost factor and
``|e>`` before ``|g>`` on every site, so for two emitters the basis is
``|ee>, |eg>, |ge>, |gg>``.

Units: all rates are divided by the reference decay rate ``gamma`` before
building generators, so Hamiltonians and Liouvillians are in units of
``gamma`` and times are in units of ``1/gamma``.

Rate convention: the dissipator is

    -sum_ij gamma_ij (S_i^+ S_j^- rho + rho S_i^+ S_j^- - 2 S_j^- rho S_i^+)

taken literally, so a lone emitter loses its excitation as ``exp(-2 gamma t)``.
"""

from dataclasses import dataclass, field, replace
from functools import reduce
import itertools

import numpy as np

from . import numerics
from .numerics import InvariantError, ODESolution, dagger, spost, spre, sprepost

SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()

TRACE_TOL = 1e-9
HERMITIAN_TOL = 1e-10
POSITIVITY_TOL = 1e-8


def basis_labels(n):
    return ["".join(p) for p in itertools.product("eg", repeat=n)]


def basis_index(label):
    """Index of a product state such as ``"eg"`` in the basis ordering."""
    return int("".join("0" if c == "e" else "1" for c in label), 2)


def product_state(label):
    """Density matrix of a basis product state, e.g. ``product_state("ee")``."""
    d = 2 ** len(label)
    rho = np.zeros((d, d), dtype=complex)
    k = basis_index(label)
    rho[k, k] = 1.0
    return rho


def lowering(i, n):
    """``S_i^-`` for emitter ``i`` (0-based) among ``n``."""
    if not 0 <= i < n:
        raise IndexError(f"emitter index {i} out of range for {n} emitters")
    factors = [np.eye(2, dtype=complex)] * n
    factors[i] = SIGMA_MINUS
    return reduce(np.kron, factors)


def raising(i, n):
    return lowering(i, n).T.copy()


@dataclass(frozen=True)
class EmitterSystem:
    """N two-level emitters sharing one surface-plasmon mode.

    Parameters
    ----------
    positions_nm : (N, 3) array
        Emitter positions.
    gamma : float
        Reference decay rate, the per-emitter total rate (Hz). Sets the unit
        of every generator.
    rabi : (N,) complex array
        Drive Rabi frequencies (same units as ``gamma``).
    omega12 : (N, N) real symmetric array
        Dipole-dipole couplings with zero diagonal.
    gamma_matrix : (N, N) real symmetric PSD array
        Collective decay rates; its diagonal is usually ``gamma``.
    detuning : float
        ``omega0 - omega_drive``.
    omega0 : float
        Transition frequency (rad/s). Only stored; it does not enter the
        rotating-frame generators.
    """

    positions_nm: np.ndarray
    gamma: float
    rabi: np.ndarray
    omega12: np.ndarray
    gamma_matrix: np.ndarray
    detuning: float = 0.0
    omega0: float = float("nan")
    label: str = field(default="", compare=False)

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions_nm, dtype=float))
        n = pos.shape[0]
        if pos.shape != (n, 3):
            raise ValueError("positions_nm must have shape (N, 3)")
        rabi = np.asarray(self.rabi, dtype=complex).reshape(-1)
        o12 = np.asarray(self.omega12, dtype=float)
        gm = np.asarray(self.gamma_matrix, dtype=float)
        if rabi.shape != (n,) or o12.shape != (n, n) or gm.shape != (n, n):
            raise ValueError("rabi, omega12 and gamma_matrix must match the emitter count")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not np.allclose(o12, o12.T, atol=0) or np.any(np.diag(o12) != 0):
            raise ValueError("omega12 must be symmetric with zero diagonal")
        if not np.allclose(gm, gm.T, atol=0):
            raise ValueError("gamma_matrix must be symmetric")
        if np.min(np.linalg.eigvalsh(gm)) < -1e-10 * max(1.0, np.max(np.abs(gm))):
            raise ValueError("gamma_matrix must be positive semidefinite")
        for i, j in itertools.combinations(range(n), 2):
            if np.allclose(pos[i], pos[j], rtol=0, atol=1e-12):
                raise ValueError("emitter positions must be distinct")
        for name, val in (("positions_nm", pos), ("rabi", rabi), ("omega12", o12),
                          ("gamma_matrix", gm)):
            if not np.all(np.isfinite(val)):
                raise ValueError(f"{name} has non-finite entries")
        object.__setattr__(self, "positions_nm", pos)
        object.__setattr__(self, "rabi", rabi)
        object.__setattr__(self, "omega12", o12)
        object.__setattr__(self, "gamma_matrix", gm)

    @property
    def n(self):
        return self.positions_nm.shape[0]

    @property
    def dim(self):
        return 2 ** self.n

    def with_(self, **changes):
        return replace(self, **changes)

    def undriven(self):
        return replace(self, rabi=np.zeros(self.n, dtype=complex))


def two_emitters(gamma_hz=2.9e10, omega12_over_gamma=1.0, rabi_over_gamma=(1.0, 1.0),
                 gamma12_over_gamma=1.0, detuning_over_gamma=0.0, r12_nm=20.0,
                 z0_nm=10.0, lambda0_nm=450.0):
    """Two emitters at height ``z0_nm`` separated by ``r12_nm`` along x."""
    g = float(gamma_hz)
    rabi = np.broadcast_to(np.asarray(rabi_over_gamma, dtype=complex), (2,)) * g
    return EmitterSystem(
        positions_nm=[[0.0, 0.0, z0_nm], [r12_nm, 0.0, z0_nm]],
        gamma=g,
        rabi=rabi,
        omega12=np.array([[0.0, 1.0], [1.0, 0.0]]) * omega12_over_gamma * g,
        gamma_matrix=np.array([[1.0, gamma12_over_gamma], [gamma12_over_gamma, 1.0]]) * g,
        detuning=detuning_over_gamma * g,
        omega0=2 * np.pi * 299792458.0 / (lambda0_nm * 1e-9),
    )


def build_hamiltonian(sys):
    """Rotating-frame Hamiltonian ``H / (hbar gamma)``."""
    n, g = sys.n, sys.gamma
    lo = [lowering(i, n) for i in range(n)]
    hi = [dagger(s) for s in lo]
    H = np.zeros((sys.dim, sys.dim), dtype=complex)
    for i in range(n):
        H += 0.5 * sys.detuning / g * (hi[i] @ lo[i] - lo[i] @ hi[i])
        H += 0.5 * (sys.rabi[i] / g * hi[i] + np.conj(sys.rabi[i]) / g * lo[i])
    for i, j in itertools.combinations(range(n), 2):
        H += sys.omega12[i, j] / g * (hi[i] @ lo[j] + hi[j] @ lo[i])
    if not numerics.is_hermitian(H, 1e-12):
        raise InvariantError("Hamiltonian is not Hermitian", module="dynamics",
                             invariant="hermiticity")
    return H


def build_liouvillian(sys):
    """Column-stacked superoperator of the master equation, in units of gamma."""
    n, g = sys.n, sys.gamma
    lo = [lowering(i, n) for i in range(n)]
    hi = [dagger(s) for s in lo]
    H = build_hamiltonian(sys)
    L = -1j * (spre(H) - spost(H))
    for i in range(n):
        for j in range(n):
            gij = sys.gamma_matrix[i, j] / g
            if gij == 0:
                continue
            A = hi[i] @ lo[j]
            L -= gij * (spre(A) + spost(A) - 2 * sprepost(lo[j], hi[i]))
    return L


def check_density_matrix(rho, where=""):
    """Raise ``InvariantError`` unless ``rho`` is a valid density matrix."""
    rho = np.asarray(rho)
    tr = np.trace(rho)
    if abs(tr - 1) > TRACE_TOL:
        raise InvariantError(f"{where}trace {tr:.12g} deviates from 1",
                             module="dynamics", invariant="trace")
    herm = np.max(np.abs(rho - dagger(rho)))
    if herm > HERMITIAN_TOL:
        raise InvariantError(f"{where}Hermiticity violated by {herm:.3e}",
                             module="dynamics", invariant="hermiticity")
    lam = np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))[0]
    if lam < -POSITIVITY_TOL:
        raise InvariantError(f"{where}negative eigenvalue {lam:.3e}",
                             module="dynamics", invariant="positivity")


def evolve(sys, rho0, t_grid, method="expm", check=True, atol=1e-10):
    """Evolve ``rho0`` over ``t_grid`` (units of ``1/gamma``).

    ``method`` is ``"expm"`` (exact propagator) or ``"integrate"``
    (adaptive Runge-Kutta). Returns an ``ODESolution`` whose ``states`` are
    density matrices of shape ``(len(t_grid), dim, dim)``.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (sys.dim, sys.dim):
        raise ValueError(f"rho0 must be {sys.dim}x{sys.dim}")
    if check:
        check_density_matrix(rho0, "initial state: ")
    L = build_liouvillian(sys)
    t_grid = np.asarray(t_grid, dtype=float)
    if method == "expm":
        vecs = numerics.propagate(L, numerics.vec(rho0), t_grid)
        sol = ODESolution(t=t_grid.copy(), states=numerics.unvec(vecs, sys.dim),
                          meta={"method": "expm"})
    elif method == "integrate":
        shifted = t_grid - t_grid[0]
        raw = numerics.integrate(L, numerics.vec(rho0), shifted, atol=atol)
        sol = ODESolution(t=t_grid.copy(), states=numerics.unvec(raw.states, sys.dim),
                          max_error=raw.max_error, n_steps=raw.n_steps,
                          n_rejected=raw.n_rejected, meta={"method": "integrate"})
    else:
        raise ValueError(f"unknown method {method!r}")
    if check:
        for t, rho in zip(sol.t, sol.states):
            check_density_matrix(rho, f"t={t:.6g}: ")
    return sol


def _normalize(rho):
    rho = 0.5 * (rho + dagger(rho))
    tr = np.trace(rho).real
    if abs(tr) < 1e-12:
        raise numerics.NumericalError("steady state has vanishing trace",
                                      module="dynamics", invariant="normalization")
    return rho / tr


def steady_state(sys, rho0=None, residual_tol=1e-9):
    """Stationary density matrix.

    With a one-dimensional kernel the result is unique. When the kernel is
    degenerate (for instance a dark antisymmetric state at
    ``gamma_12 = gamma``) a ``DegenerateKernelError`` is raised unless
    ``rho0`` is given, in which case the long-time limit reached from
    ``rho0`` is returned.
    """
    L = build_liouvillian(sys)
    try:
        v = numerics.null_vector(L)
    except numerics.DegenerateKernelError:
        if rho0 is None:
            raise
        v = numerics.kernel_projection(L, numerics.vec(np.asarray(rho0, dtype=complex)))
    rho = _normalize(numerics.unvec(v, sys.dim))
    res = np.linalg.norm(L @ numerics.vec(rho))
    if res > residual_tol * np.linalg.norm(L, 2):
        raise numerics.NumericalError(f"steady-state residual {res:.3e}",
                                      module="dynamics", invariant="stationarity")
    return rho


def liouvillian_residual(sys, rho):
    return float(np.linalg.norm(build_liouvillian(sys) @ numerics.vec(rho)))


@dataclass(frozen=True)
class PopulationTrajectory:
    t: np.ndarray
    P_ee: np.ndarray
    P_eg: np.ndarray
    P_ge: np.ndarray
    P_gg: np.ndarray

    def as_array(self):
        return np.column_stack([self.t, self.P_ee, self.P_eg, self.P_ge, self.P_gg])


def populations(traj, t=None):
    """Joint-state populations of a two-emitter trajectory.

    ``traj`` may be an ``ODESolution``, a stack of density matrices or a
    single density matrix.
    """
    if isinstance(traj, ODESolution):
        states, t = traj.states, traj.t
    else:
        states = np.asarray(traj)
        if states.ndim == 2:
            states = states[None]
        if t is None:
            t = np.arange(states.shape[0], dtype=float)
    if states.shape[1:] != (4, 4):
        raise ValueError(f"populations need a two-emitter (4x4) state, got {states.shape[1:]}")
    diag = np.real(np.diagonal(states, axis1=1, axis2=2))
    return PopulationTrajectory(np.asarray(t, dtype=float), *diag.T.copy())


def single_excitation_block(L, n=2):
    """Sub-block of ``L`` acting on the single-excitation coherences.

    Rows and columns are the vectorized entries ``rho_ab`` with ``a`` and
    ``b`` in the single-excitation sector, which the undriven dynamics only
    feeds into the ground state.
    """
    d = 2 ** n
    sector = [k for k, lab in enumerate(basis_labels(n)) if lab.count("e") == 1]
    idx = [a + d * b for b in sector for a in sector]
    return L[np.ix_(idx, idx)]
