"""Smooth monotone step used to round off each branch's right-hand piece.

The step is the classic flat-ended sigmoid built from E(u) = exp(-1/u):

    step(t) = E(t) / (E(t) + E(1-t)),        E(0) := 0,

which rises from 0 to 1 on [0, 1], is strictly increasing inside, satisfies
the symmetry step(t) + step(1-t) = 1, and has every one-sided derivative
equal to zero at both endpoints.  Two consequences are used elsewhere:

  * step_integral(1) = 1/2                      (integrate the symmetry),
  * step_integral(1-t) = 1/2 - t + step_integral(t).

The antiderivative has no closed form.  It is evaluated through a cached
Chebyshev expansion: interpolate the step at Chebyshev points, zero the even
coefficients that symmetry forces to vanish, integrate the series term by
term, and evaluate with the Clenshaw recurrence.  The degree is doubled
until the trailing coefficients fall below the requested tolerance, so a
single table built once serves every later query at vector speed.

The closed-form derivative, needed for curvature checks, is

    step'(t) = (t^-2 + (1-t)^-2) * step(t) * (1 - step(t)),

with the product evaluated first so the flat tails underflow cleanly to 0
before the reciprocal factors can blow up.
"""

from __future__ import annotations

import threading

import numpy as np
from numpy.polynomial import chebyshev as _cheb

from .errors import ConvergenceError, DomainError

_MIN_DEGREE = 32
_MAX_DEGREE = 8192
_TINY = 1e-12  # arguments this close to an endpoint are in the flat tail
_FLAT_ZONE = 0.02  # exp(-1/t) makes the antiderivative < 1e-21 out here


def _as_float_array(t) -> tuple[np.ndarray, bool]:
    arr = np.asarray(t, dtype=float)
    return arr, arr.ndim == 0


def _step_raw(t: np.ndarray) -> np.ndarray:
    # E(u) <= e^-1 on [0,1] and max(E(t), E(1-t)) >= e^-2, so the quotient
    # never overflows and never divides by zero away from the clipped tails.
    lo = np.clip(t, _TINY, None)
    hi = np.clip(1.0 - t, _TINY, None)
    with np.errstate(under="ignore"):
        e_lo = np.exp(-1.0 / lo)
        e_hi = np.exp(-1.0 / hi)
        out = e_lo / (e_lo + e_hi)
    out = np.where(t <= 0.0, 0.0, out)
    out = np.where(t >= 1.0, 1.0, out)
    return out


class TransitionProfile:
    """Cached evaluator for the smooth step and its antiderivative.

    Instances are immutable after construction and safe to share between
    threads.  ``tol`` bounds the uniform error of ``step_integral``.
    """

    def __init__(self, tol: float = 1e-12):
        if not 0.0 < tol < 1e-2:
            raise DomainError(f"transition tolerance out of range: {tol!r}")
        self.tol = float(tol)
        coeffs = self._fit(self.tol)
        self._coeffs = coeffs
        integ = _cheb.chebint(coeffs)
        self._int_coeffs = integ
        self._int_offset = float(_cheb.chebval(-1.0, integ))
        # Value of the antiderivative at t=1; equals 1/2 up to fit error.
        self.half = 0.5 * (float(_cheb.chebval(1.0, integ)) - self._int_offset)

    @staticmethod
    def _fit(tol: float) -> np.ndarray:
        deg = _MIN_DEGREE
        while deg <= _MAX_DEGREE:
            coeffs = _cheb.chebinterpolate(lambda u: _step_raw((u + 1.0) / 2.0), deg)
            # Symmetry makes the expansion odd apart from the constant 1/2;
            # snap the even coefficients so the identity holds exactly.
            coeffs[0] = 0.5
            coeffs[2::2] = 0.0
            if np.max(np.abs(coeffs[-8:])) < tol / 64.0:
                return coeffs
            deg *= 2
        raise ConvergenceError(
            f"smooth-step expansion did not reach tolerance {tol} by degree {_MAX_DEGREE}"
        )

    @property
    def degree(self) -> int:
        return len(self._coeffs) - 1

    def step(self, t):
        """The step itself; accepts scalars or arrays in [0, 1]."""
        arr, scalar = _as_float_array(t)
        out = _step_raw(arr)
        return float(out) if scalar else out

    def step_derivative(self, t):
        """Closed-form derivative of the step; zero in the flat tails."""
        arr, scalar = _as_float_array(t)
        s = _step_raw(arr)
        with np.errstate(under="ignore"):
            w = s * (1.0 - s)
        lo = np.clip(arr, _TINY, None)
        hi = np.clip(1.0 - arr, _TINY, None)
        out = np.where(w > 0.0, w * (lo**-2.0 + hi**-2.0), 0.0)
        return float(out) if scalar else out

    def step_integral(self, t):
        """Antiderivative of the step with value 0 at t=0, to within ``tol``."""
        arr, scalar = _as_float_array(t)
        u = np.clip(2.0 * arr - 1.0, -1.0, 1.0)
        out = 0.5 * (_cheb.chebval(u, self._int_coeffs) - self._int_offset)
        # The fitted series wiggles by ~1e-17 inside the flat tails, which
        # would break monotonicity of values built on top of it.  The true
        # antiderivative is below 1e-21 for t <= 0.02, so snap the left tail
        # to 0 and the right tail to its reflection half - (1 - t).
        out = np.where(arr <= _FLAT_ZONE, 0.0, out)
        out = np.where(arr >= 1.0 - _FLAT_ZONE, self.half - (1.0 - arr), out)
        out = np.where(arr >= 1.0, self.half, out)
        out = np.clip(out, 0.0, self.half)
        return float(out) if scalar else out


_PROFILES: dict[float, TransitionProfile] = {}
_PROFILES_LOCK = threading.Lock()


def default_profile(tol: float = 1e-12) -> TransitionProfile:
    """Shared profile cache; one table per tolerance serves all maps."""
    key = float(tol)
    with _PROFILES_LOCK:
        profile = _PROFILES.get(key)
        if profile is None:
            profile = TransitionProfile(key)
            _PROFILES[key] = profile
        return profile


def smooth_step(t, tol: float = 1e-12):
    return default_profile(tol).step(t)


def smooth_step_integral(t, tol: float = 1e-12):
    return default_profile(tol).step_integral(t)


def smooth_step_derivative(t, tol: float = 1e-12):
    return default_profile(tol).step_derivative(t)
