"""Special functions for field synthesis and the analytic references.

Bessel J0 for complex argument, J0/Y0 and the Hankel function H0^(1) for real argument. Small arguments use the
ascending power series, large ones the Hankel asymptotic expansion in amplitude-phase (P/Q) form; the crossover
is at |z| = 12 where both branches agree to about 1e-11.
"""

from __future__ import annotations
from typing import overload

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import kve


__all__ = [
    "bessel_j0_complex",
    "bessel_j0",
    "bessel_y0",
    "hankel1_0",
    "hankel1_0_imaginary",
    "MAX_IMAG_ARGUMENT",
]

ComplexArray = NDArray[np.complex128]
RealArray = NDArray[np.float64]

MAX_IMAG_ARGUMENT: float = 10.0

_CROSSOVER: float = 12.0
_SERIES_TERMS: int = 45
_ASYMPTOTIC_TERMS: int = 24
_EULER_GAMMA: float = 0.57721566490153286061


def _asymptotic_coefficients() -> NDArray[np.float64]:
    # a_m = prod_{j<=m} (-(2j-1)^2) / (m! 8^m) for order zero
    a = np.ones(_ASYMPTOTIC_TERMS)
    for m in range(1, _ASYMPTOTIC_TERMS):
        a[m] = a[m - 1] * (-((2 * m - 1) ** 2)) / (8.0 * m)
    return a


_A = _asymptotic_coefficients()
_P_COEFFS = _A[0::2] * (-1.0) ** np.arange(_A[0::2].size)
_Q_COEFFS = _A[1::2] * (-1.0) ** np.arange(_A[1::2].size)


def _amplitude_phase(z: ComplexArray) -> tuple[ComplexArray, ComplexArray, ComplexArray, ComplexArray]:
    """Return (sqrt(2/(pi z)), P(z), Q(z), z - pi/4) for the large-argument branch."""
    inv_sq = 1.0 / (z * z)
    p = np.zeros_like(z)
    q = np.zeros_like(z)
    for coeff in _P_COEFFS[::-1]:
        p = p * inv_sq + coeff
    for coeff in _Q_COEFFS[::-1]:
        q = q * inv_sq + coeff
    q = q / z
    return np.sqrt(2.0 / (np.pi * z)), p, q, z - 0.25 * np.pi


def _j0_series(z: ComplexArray) -> ComplexArray:
    quarter = -0.25 * z * z
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(1, _SERIES_TERMS):
        term = term * quarter / (k * k)
        total = total + term
    return total


def _y0_series(x: RealArray) -> RealArray:
    quarter = 0.25 * x * x
    term = np.ones_like(x)
    harmonic = 0.0
    tail = np.zeros_like(x)
    for k in range(1, _SERIES_TERMS):
        term = term * quarter / (k * k)
        harmonic += 1.0 / k
        tail = tail + (1.0 if k % 2 == 1 else -1.0) * harmonic * term
    j0 = _j0_series(x.astype(np.complex128)).real
    return (2.0 / np.pi) * ((np.log(0.5 * x) + _EULER_GAMMA) * j0 + tail)


@overload
def bessel_j0_complex(z: complex) -> complex: ...
@overload
def bessel_j0_complex(z: ArrayLike) -> ComplexArray: ...
def bessel_j0_complex(z: ArrayLike) -> complex | ComplexArray:
    """Bessel function J0 of complex argument.

    Args:
        z: Scalar or array of finite complex arguments with |Im z| <= 10.

    Returns:
        J0(z), complex scalar for scalar input.

    Raises:
        ValueError: If any argument is non-finite or violates the imaginary-part guard.
    """
    values = np.asarray(z, dtype=np.complex128)
    if not np.all(np.isfinite(values)):
        raise ValueError("J0 argument must be finite")
    if np.any(np.abs(values.imag) > MAX_IMAG_ARGUMENT):
        worst = values.ravel()[np.argmax(np.abs(values.imag).ravel())]
        raise ValueError(f"J0 argument {worst} exceeds |Im z| <= {MAX_IMAG_ARGUMENT}")
    # J0 is even; keep the asymptotic branch in the right half-plane
    values = np.where(values.real < 0.0, -values, values)
    result = np.empty(values.shape, dtype=np.complex128)
    small = np.abs(values) <= _CROSSOVER
    result[small] = _j0_series(values[small])
    large = ~small
    if np.any(large):
        amp, p, q, chi = _amplitude_phase(values[large])
        result[large] = amp * (p * np.cos(chi) - q * np.sin(chi))
    if result.ndim == 0:
        return complex(result)
    return result


def _real_branches(x: RealArray) -> tuple[RealArray, RealArray]:
    """Return (J0, Y0) for positive real x."""
    j0 = np.empty_like(x)
    y0 = np.empty_like(x)
    small = x <= _CROSSOVER
    j0[small] = _j0_series(x[small].astype(np.complex128)).real
    y0[small] = _y0_series(x[small])
    large = ~small
    if np.any(large):
        amp, p, q, chi = _amplitude_phase(x[large].astype(np.complex128))
        j0[large] = (amp * (p * np.cos(chi) - q * np.sin(chi))).real
        y0[large] = (amp * (p * np.sin(chi) + q * np.cos(chi))).real
    return j0, y0


def _positive(x: ArrayLike, name: str) -> RealArray:
    values = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
        raise ValueError(f"{name} requires finite x > 0, got {values}")
    return values


def bessel_j0(x: ArrayLike) -> RealArray:
    """J0 for real argument; the real part of the complex evaluation."""
    return bessel_j0_complex(np.asarray(x, dtype=np.float64)).real


def bessel_y0(x: ArrayLike) -> RealArray:
    """Y0 for positive real argument.

    Raises:
        ValueError: If any x <= 0 (Y0 is singular at the origin).
    """
    values = _positive(x, "Y0")
    return _real_branches(np.atleast_1d(values))[1].reshape(values.shape)


@overload
def hankel1_0(x: float) -> complex: ...
@overload
def hankel1_0(x: ArrayLike) -> ComplexArray: ...
def hankel1_0(x: ArrayLike) -> complex | ComplexArray:
    """Hankel function of the first kind, H0^(1)(x) = J0(x) + i Y0(x), for positive real x.

    Raises:
        ValueError: If any x <= 0.
    """
    values = _positive(x, "H0^(1)")
    j0, y0 = _real_branches(np.atleast_1d(values))
    result = (j0 + 1j * y0).reshape(values.shape)
    if result.ndim == 0:
        return complex(result)
    return result


def hankel1_0_imaginary(y: ArrayLike) -> ComplexArray:
    """H0^(1)(i y) for y > 0, the evanescent-mode kernel.

    Uses H0^(1)(iy) = -(2i/pi) K0(y) with the exponentially scaled K0, so large y decays without overflow.
    """
    values = _positive(y, "H0^(1)(iy)")
    scaled: RealArray = kve(0, values)
    return -(2j / np.pi) * scaled * np.exp(-values)
