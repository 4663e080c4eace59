"""Dense complex linear algebra and time integration used by the physics modules.

Conventions
-----------
Operators are plain ``numpy`` complex arrays. Superoperators act on
column-stacked density matrices, so that ``A @ rho @ B`` maps to
``kron(B.T, A) @ vec(rho)``.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg


class NumericalError(RuntimeError):
    """A numerical procedure failed or an invariant was violated.

    ``module`` and ``invariant`` name where the failure happened; the CLI
    prints both.
    """

    def __init__(self, message, module="numerics", invariant=None):
        super().__init__(message)
        self.module = module
        self.invariant = invariant


class StiffnessError(NumericalError):
    pass


class InvariantError(NumericalError):
    pass


class DegenerateKernelError(NumericalError):
    """The generator has more than one (near-)null direction.

    ``right`` holds an orthonormal basis of the right null space and ``left``
    one of the left null space, both as columns.
    """

    def __init__(self, message, right, left, module="numerics"):
        super().__init__(message, module=module, invariant="kernel dimension")
        self.right = right
        self.left = left


@dataclass(frozen=True)
class ODESolution:
    t: np.ndarray
    states: np.ndarray
    max_error: float = 0.0
    n_steps: int = 0
    n_rejected: int = 0
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)


def _as_matrix(a, name):
    a = np.asarray(a)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    return a


def matmul(a, b):
    a = _as_matrix(a, "a")
    b = _as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def kron(a, b):
    return np.kron(_as_matrix(a, "a"), _as_matrix(b, "b"))


def dagger(a):
    return np.conj(np.swapaxes(a, -1, -2))


def is_hermitian(a, rtol=1e-12):
    a = np.asarray(a)
    scale = max(np.max(np.abs(a)), 1.0) if a.size else 1.0
    return bool(np.max(np.abs(a - dagger(a)), initial=0.0) <= rtol * scale)


# -- vectorization ---------------------------------------------------------

def vec(rho):
    """Column-stack a matrix (or a stack of matrices along axis 0)."""
    rho = np.asarray(rho)
    if rho.ndim == 2:
        return rho.reshape(-1, order="F")
    return np.swapaxes(rho, -1, -2).reshape(rho.shape[0], -1)


def unvec(v, dim=None):
    v = np.asarray(v)
    if dim is None:
        dim = int(round(np.sqrt(v.shape[-1])))
    if v.ndim == 1:
        return v.reshape(dim, dim, order="F")
    return np.swapaxes(v.reshape(v.shape[0], dim, dim), -1, -2)


def spre(a):
    """Superoperator of ``rho -> a @ rho``."""
    a = _as_matrix(a, "a")
    return np.kron(np.eye(a.shape[0]), a)


def spost(b):
    """Superoperator of ``rho -> rho @ b``."""
    b = _as_matrix(b, "b")
    return np.kron(b.T, np.eye(b.shape[0]))


def sprepost(a, b):
    """Superoperator of ``rho -> a @ rho @ b``."""
    return np.kron(_as_matrix(b, "b").T, _as_matrix(a, "a"))


# -- matrix exponential ----------------------------------------------------

def _check_generator(L):
    L = np.asarray(L)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValueError(f"generator must be square, got shape {L.shape}")
    if not np.all(np.isfinite(L)):
        raise ValueError("generator has non-finite entries")
    return L


def expm_action(L, v, t):
    """Return ``exp(L t) @ v`` (Pade scaling and squaring)."""
    L = _check_generator(L)
    if t < 0:
        raise ValueError("t must be non-negative")
    v = np.asarray(v)
    if t == 0:
        return v.astype(np.result_type(v, L), copy=True)
    return scipy.linalg.expm(L * t) @ v


def propagate(L, v, times):
    """Evaluate ``exp(L t) v`` for every ``t`` in an increasing grid.

    Uniform grids reuse a single step propagator.
    """
    L = _check_generator(L)
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-D grid")
    if times[0] < 0 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be non-negative and strictly increasing")
    v = np.asarray(v, dtype=complex)
    out = np.empty((times.size,) + v.shape, dtype=complex)
    out[0] = expm_action(L, v, times[0])
    if times.size == 1:
        return out
    steps = np.diff(times)
    if np.allclose(steps, steps[0], rtol=1e-12, atol=0.0):
        U = scipy.linalg.expm(L * steps[0])
        for i in range(1, times.size):
            out[i] = U @ out[i - 1]
    else:
        for i in range(1, times.size):
            out[i] = expm_action(L, out[i - 1], steps[i - 1])
    return out


# -- adaptive Runge-Kutta --------------------------------------------------

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [np.array(row) for row in [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B - _B4


def integrate(rhs, y0, t_grid, atol=1e-10, rtol=0.0, h0=None, max_steps=1_000_000):
    """Integrate ``dy/dt = rhs(t, y)`` with Dormand-Prince 5(4) steps.

    Steps are clipped so that every point of ``t_grid`` is hit exactly, so
    no interpolation error enters the reported states. A step is accepted
    when the max-abs embedded error estimate is below
    ``atol + rtol * max|y|``.

    Parameters
    ----------
    rhs : callable or ndarray
        ``rhs(t, y)`` returning an array shaped like ``y``. A square matrix
        ``L`` is accepted as shorthand for the linear problem ``L @ y``.
    y0 : array_like
        Initial state, any shape.
    t_grid : array_like
        Strictly increasing output times; ``t_grid[0]`` is the initial time.

    Raises
    ------
    StiffnessError
        If the step size underflows or ``max_steps`` is exceeded.
    """
    if not callable(rhs):
        L = _check_generator(rhs)
        rhs = lambda t, y: L @ y  # noqa: E731
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ValueError("t_grid must be a non-empty 1-D array")
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")

    y = np.array(y0, dtype=complex)
    shape = y.shape
    y = y.ravel()
    f = lambda t, yy: np.asarray(rhs(t, yy.reshape(shape)), dtype=complex).ravel()  # noqa: E731

    states = np.empty((t_grid.size,) + shape, dtype=complex)
    states[0] = y.reshape(shape)
    t = t_grid[0]
    span = t_grid[-1] - t_grid[0]
    h = h0 if h0 is not None else (min(1e-3, span / 10) if span > 0 else 1e-3)
    k1 = f(t, y)
    max_err = 0.0
    n_steps = n_rejected = 0
    stages = np.empty((7, y.size), dtype=complex)

    for i in range(1, t_grid.size):
        target = t_grid[i]
        while t < target:
            if n_steps + n_rejected >= max_steps:
                raise StiffnessError(f"exceeded {max_steps} steps at t={t:.6g}",
                                     invariant="step budget")
            last = h >= target - t
            h_try = target - t if last else h
            if h_try <= 1e-14 * max(1.0, abs(t)):
                raise StiffnessError(f"step size underflow at t={t:.6g}",
                                     invariant="step size")
            stages[0] = k1
            for s in range(1, 7):
                ys = y + h_try * (_A[s] @ stages[:s])
                stages[s] = f(t + _C[s] * h_try, ys)
            y_new = y + h_try * (_B @ stages)
            err = h_try * np.max(np.abs(_E @ stages))
            tol = atol + rtol * max(np.max(np.abs(y)), np.max(np.abs(y_new)))
            if not np.isfinite(err):
                raise StiffnessError(f"non-finite error estimate at t={t:.6g}",
                                     invariant="finite state")
            factor = 0.9 * (tol / err) ** 0.2 if err > 0 else 5.0
            if err <= tol:
                t = target if last else t + h_try
                y = y_new
                k1 = stages[6]  # FSAL
                max_err = max(max_err, err)
                n_steps += 1
                # a clipped final step says nothing about the free step size
                if not last or factor < 1.0:
                    h = h_try * min(5.0, max(0.2, factor))
            else:
                n_rejected += 1
                h = h_try * max(0.1, factor)
        states[i] = y.reshape(shape)

    return ODESolution(t=t_grid.copy(), states=states, max_error=max_err,
                       n_steps=n_steps, n_rejected=n_rejected)


# -- null space ------------------------------------------------------------

def kernel_basis(L, tol=1e-10):
    """Right and left near-null bases of ``L`` from its SVD.

    Singular values below ``tol * s_max`` count as zero.
    """
    L = _check_generator(L)
    u, s, vh = np.linalg.svd(L)
    if s[0] == 0:
        n = L.shape[0]
        return np.eye(n, dtype=complex), np.eye(n, dtype=complex)
    mask = s <= tol * s[0]
    return dagger(vh)[:, mask], u[:, mask]


def _fix_phase(v):
    k = np.argmax(np.abs(v))
    return v * (np.abs(v[k]) / v[k])


def null_vector(L, tol=1e-10, residual_tol=1e-9):
    """Unit vector spanning the one-dimensional null space of ``L``.

    The global phase is fixed so that the largest component is real and
    positive.

    Raises
    ------
    NumericalError
        No singular value falls below ``tol * s_max``.
    DegenerateKernelError
        More than one does; the exception carries both null bases.
    """
    L = _check_generator(L)
    right, left = kernel_basis(L, tol)
    if right.shape[1] == 0:
        raise NumericalError("no near-null direction", invariant="rank deficiency")
    if right.shape[1] > 1:
        raise DegenerateKernelError(
            f"null space has dimension {right.shape[1]}", right=right, left=left)
    v = _fix_phase(right[:, 0])
    v = v / np.linalg.norm(v)
    norm_L = np.linalg.norm(L, 2)
    res = np.linalg.norm(L @ v)
    if res > residual_tol * max(norm_L, 1e-300):
        raise NumericalError(f"null vector residual {res:.3e} too large",
                             invariant="null residual")
    return v


def kernel_projection(L, v, tol=1e-10):
    """Spectral projection of ``v`` onto the kernel of ``L``.

    Uses ``P0 = R (W^H R)^-1 W^H`` with right/left null bases ``R``, ``W``.
    For a generator whose zero eigenvalue is semisimple this is the
    long-time (Cesaro) limit of ``exp(L t) v``.
    """
    right, left = kernel_basis(L, tol)
    if right.shape[1] == 0:
        raise NumericalError("no near-null direction", invariant="rank deficiency")
    overlap = dagger(left) @ right
    coeffs = np.linalg.solve(overlap, dagger(left) @ np.asarray(v))
    return right @ coeffs
