"""Small dense complex operators: validation, propagators and a linear ODE solver.

Operators are plain ``complex128`` numpy arrays of shape ``(2, 2)`` or
``(3, 3)`` in the basis order ``(|a>, |b>, |c>)``. Amplitude states are
``complex128`` vectors of matching length. Arrays returned from this module
are marked read-only.

Two independent routes to ``exp(-iHt)`` are provided so each can check the
other: :func:`expm` (Pade scaling and squaring, no eigendecomposition, so it
stays accurate at exceptional points where ``H`` is defective) and
:func:`integrate_linear` (embedded Runge-Kutta 5(4) on ``i dpsi/dt = H psi``).
"""
import math
from typing import NamedTuple

import numpy as np

from .errors import IntegrationError, InvalidInputError

__all__ = [
    "as_operator",
    "as_state",
    "expm",
    "integrate_linear",
    "Trajectory",
]

ALLOWED_DIMS = (2, 3)


def _frozen(arr):
    arr.setflags(write=False)
    return arr


def as_operator(h):
    """Validate ``h`` and return it as a read-only complex square matrix."""
    arr = np.array(h, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidInputError(f"operator must be square, got shape {arr.shape}")
    if arr.shape[0] not in ALLOWED_DIMS:
        raise InvalidInputError(f"operator dimension must be 2 or 3, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("operator has non-finite entries")
    return _frozen(arr)


def as_state(psi, dim=None):
    """Validate an amplitude vector (or a stack of column vectors)."""
    arr = np.array(psi, dtype=np.complex128)
    if arr.ndim not in (1, 2):
        raise InvalidInputError(f"state must be a vector or matrix, got ndim={arr.ndim}")
    if dim is not None and arr.shape[0] != dim:
        raise InvalidInputError(f"state length {arr.shape[0]} does not match operator dim {dim}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("state has non-finite entries")
    return _frozen(arr)


# Pade numerator coefficients b_k for degrees 7, 9, 13, with the 1-norm
# bounds theta_m below which no scaling is needed (double precision).
_PADE = {
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
         960960.0, 16380.0, 182.0, 1.0),
}
_THETA = {7: 0.9504178996162932, 9: 2.097847961257068, 13: 5.371920351148152}


def _pade_low(a, m):
    b = _PADE[m]
    ident = np.eye(a.shape[0], dtype=np.complex128)
    a2 = a @ a
    powers = [ident, a2]
    for _ in range(2, (m + 1) // 2):
        powers.append(powers[-1] @ a2)
    u = sum(b[2 * j + 1] * powers[j] for j in range((m + 1) // 2))
    v = sum(b[2 * j] * powers[j] for j in range((m + 1) // 2))
    return u, v


def _pade13(a):
    b = _PADE[13]
    ident = np.eye(a.shape[0], dtype=np.complex128)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a4 @ a2
    u = a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident
    v = a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident
    return u, v


def _expm_raw(a):
    """exp(a) by scaling and squaring with a diagonal Pade approximant."""
    norm = np.linalg.norm(a, 1)
    if norm == 0.0:
        return np.eye(a.shape[0], dtype=np.complex128)
    squarings = 0
    for m in (7, 9):
        if norm <= _THETA[m]:
            u, v = _pade_low(a, m)
            u = a @ u
            break
    else:
        squarings = max(0, int(math.ceil(math.log2(norm / _THETA[13]))))
        scaled = a / (2.0 ** squarings)
        u, v = _pade13(scaled)
        u = scaled @ u
    r = np.linalg.solve(v - u, v + u)
    for _ in range(squarings):
        r = r @ r
    return r


def expm(h, t):
    """Propagator ``U = exp(-i H t)``.

    Parameters
    ----------
    h : array_like
        2x2 or 3x3 complex Hamiltonian; may be non-Hermitian or defective.
    t : float
        Elapsed time, ``t >= 0``.

    Returns
    -------
    numpy.ndarray
        Read-only complex matrix of the same shape as ``h``.
    """
    h = as_operator(h)
    t = float(t)
    if not math.isfinite(t) or t < 0.0:
        raise InvalidInputError(f"time must be finite and non-negative, got {t}")
    return _frozen(_expm_raw(-1j * t * h))


class Trajectory(NamedTuple):
    """Accepted integrator steps; ``psi[i]`` is the state at ``t[i]``."""

    t: np.ndarray
    psi: np.ndarray

    @property
    def final(self):
        return self.psi[-1]


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = _A[6] + (0.0,)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


def integrate_linear(h, psi0, t_end, tol=1e-10):
    """Integrate ``i dpsi/dt = H psi`` from 0 to ``t_end``.

    Adaptive Dormand-Prince 5(4) with local extrapolation. A step is
    accepted when the max-norm of the embedded error estimate is at most
    ``tol``. ``psi0`` may be a single vector or a matrix whose columns are
    propagated together (columns of the identity give ``U(t_end)``).

    Raises
    ------
    IntegrationError
        If the step size drops below ``t_end * 1e-14``.
    """
    h = as_operator(h)
    psi = np.array(as_state(psi0, dim=h.shape[0]))
    t_end = float(t_end)
    tol = float(tol)
    if not math.isfinite(t_end) or t_end < 0.0:
        raise InvalidInputError(f"t_end must be finite and non-negative, got {t_end}")
    if not tol > 0.0:
        raise InvalidInputError(f"tol must be positive, got {tol}")

    times = [0.0]
    states = [psi.copy()]
    if t_end == 0.0:
        return Trajectory(_frozen(np.array(times)), _frozen(np.array(states)))

    gen = -1j * h
    step = t_end / 1000.0
    min_step = t_end * 1e-14
    t = 0.0
    k = [None] * 7
    k[0] = gen @ psi
    while t < t_end:
        step = min(step, t_end - t)
        if step < min_step and t_end - t > min_step:
            raise IntegrationError("step size underflow", t)
        # overflow surfaces below as a non-finite state
        with np.errstate(over="ignore", invalid="ignore"):
            for i in range(1, 7):
                incr = sum(a * kj for a, kj in zip(_A[i], k[:i]) if a != 0.0)
                k[i] = gen @ (psi + step * incr)
            y_new = psi + step * sum(b * ki for b, ki in zip(_B5, k) if b != 0.0)
            err = step * np.max(np.abs(sum(e * ki for e, ki in zip(_E, k) if e != 0.0)))
        if not np.all(np.isfinite(y_new)):
            raise IntegrationError("state became non-finite", t)
        if err <= tol:
            # the last step may be clipped to hit t_end exactly
            t = t_end if t_end - t <= step else t + step
            psi = y_new
            times.append(t)
            states.append(psi.copy())
            k[0] = k[6]
        factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * (tol / err) ** 0.2))
        step *= factor
    return Trajectory(_frozen(np.array(times)), _frozen(np.array(states)))
