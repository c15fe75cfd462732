"""Chebyshev spectral core for tauwave.

Gauss-Chebyshev-Lobatto nodes, the discrete forward transform, Clenshaw evaluation, and the differentiation and
product matrices acting on truncated coefficient vectors. All functions are pure; returned arrays are read-only.
"""

from __future__ import annotations
from dataclasses import dataclass
from typing import Any, Literal, TypeVar, overload

import numpy as np
from numpy.typing import ArrayLike, NDArray


__all__ = [
    "SpectralCoeffs",
    "SpectralMatrix",
    "cgl_nodes",
    "chebyshev_forward",
    "chebyshev_evaluate",
    "derivative_matrix",
    "product_matrix",
    "endpoint_vector",
]

ComplexArray = NDArray[np.complex128]
RealArray = NDArray[np.float64]

_T_SLACK: float = 1e-12


_ArrayT = TypeVar("_ArrayT", bound=np.ndarray[Any, Any])


def _frozen(array: _ArrayT) -> _ArrayT:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, slots=True)
class SpectralCoeffs:
    """Truncated Chebyshev expansion of one function on [-1, 1].

    Attributes:
        coeffs (ComplexArray): Amplitudes of T_0..T_N, length order + 1.
    """
    coeffs: ComplexArray

    def __post_init__(self) -> None:
        if self.coeffs.ndim != 1 or self.coeffs.size < 1:
            raise ValueError(f"coefficient vector must be one-dimensional and non-empty, got shape {self.coeffs.shape}")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("spectral coefficients must be finite")

    @classmethod
    def of(cls, values: ArrayLike) -> SpectralCoeffs:
        """Build coefficients from any array-like, copying into a read-only complex array."""
        array = np.array(values, dtype=np.complex128).ravel()
        return cls(_frozen(array))

    @property
    def order(self) -> int:
        """Truncation order N."""
        return self.coeffs.size - 1


@dataclass(frozen=True, slots=True)
class SpectralMatrix:
    """Dense (N+1)x(N+1) operator on truncated coefficient vectors.

    Attributes:
        entries (ComplexArray): Square complex matrix.
    """
    entries: ComplexArray

    def __post_init__(self) -> None:
        rows, cols = self.entries.shape
        if rows != cols:
            raise ValueError(f"spectral matrix must be square, got {self.entries.shape}")

    @property
    def order(self) -> int:
        """Truncation order N."""
        return self.entries.shape[0] - 1

    def apply(self, coeffs: SpectralCoeffs) -> SpectralCoeffs:
        """Return the coefficients of the operator applied to `coeffs`."""
        if coeffs.order != self.order:
            raise ValueError(f"order mismatch: matrix {self.order}, coefficients {coeffs.order}")
        return SpectralCoeffs.of(self.entries @ coeffs.coeffs)


def cgl_nodes(n: int) -> RealArray:
    """Return the N+1 Gauss-Chebyshev-Lobatto nodes cos(pi j / N), j = 0..N.

    Args:
        n: Truncation order N, at least 1.

    Returns:
        Strictly decreasing nodes from +1 to -1.

    Raises:
        ValueError: If N < 1 (degenerate grid).
    """
    if n < 1:
        raise ValueError(f"CGL grid needs N >= 1, got {n}")
    nodes = np.cos(np.pi * np.arange(n + 1) / n)
    # cos(pi/2) is not exactly zero in floating point
    if n % 2 == 0:
        nodes[n // 2] = 0.0
    return _frozen(nodes)


def _cosine_table(n: int) -> RealArray:
    """T_i(t_j) = cos(pi i j / N) with the angle reduced exactly modulo 2N."""
    index = np.arange(n + 1)
    reduced = np.outer(index, index) % (2 * n)
    return np.cos(np.pi * reduced / n)


def chebyshev_forward(samples: ArrayLike) -> SpectralCoeffs:
    """Transform samples at the CGL nodes into Chebyshev coefficients.

    Direct O(N^2) quadrature; interpolates exactly, so any polynomial of degree <= N is recovered to round-off.

    Args:
        samples: N+1 values at cgl_nodes(N), ordered from t=+1 down to t=-1.

    Returns:
        The coefficients of the interpolating expansion.

    Raises:
        ValueError: If fewer than two samples are given or any is non-finite.
    """
    values = np.asarray(samples, dtype=np.complex128).ravel()
    if values.size < 2:
        raise ValueError(f"forward transform needs at least 2 samples, got {values.size}")
    if not np.all(np.isfinite(values)):
        raise ValueError("forward transform samples must be finite")
    n = values.size - 1
    edge = np.ones(n + 1)
    edge[0] = edge[-1] = 2.0
    weights = (2.0 / n) / np.outer(edge, edge)
    return SpectralCoeffs.of((weights * _cosine_table(n)) @ values)


@overload
def chebyshev_evaluate(coeffs: SpectralCoeffs, t: float) -> complex: ...
@overload
def chebyshev_evaluate(coeffs: SpectralCoeffs, t: RealArray) -> ComplexArray: ...
def chebyshev_evaluate(coeffs: SpectralCoeffs, t: float | RealArray) -> complex | ComplexArray:
    """Evaluate sum_i c_i T_i(t) with the Clenshaw backward recurrence.

    Args:
        coeffs: Expansion to evaluate.
        t: Scalar or array of points in [-1, 1]; a 1e-12 slack is clipped.

    Returns:
        Complex scalar for scalar input, complex array otherwise.

    Raises:
        ValueError: If any point lies outside [-1-1e-12, 1+1e-12].
    """
    points = np.asarray(t, dtype=np.float64)
    if np.any(np.abs(points) > 1.0 + _T_SLACK):
        raise ValueError(f"Chebyshev argument outside [-1, 1]: {points}")
    points = np.clip(points, -1.0, 1.0)
    c = coeffs.coeffs
    b1 = np.zeros(points.shape, dtype=np.complex128)
    b2 = np.zeros(points.shape, dtype=np.complex128)
    for k in range(c.size - 1, 0, -1):
        b1, b2 = c[k] + 2.0 * points * b1 - b2, b1
    result = c[0] + points * b1 - b2
    if np.ndim(t) == 0:
        return complex(result)
    return result


def derivative_matrix(n: int) -> SpectralMatrix:
    """Return D_N mapping coefficients of f to coefficients of f'.

    D[i, j] = 2 j / c_i for j > i with i + j odd, c_0 = 2 and c_i = 1 otherwise.

    Raises:
        ValueError: If N < 1.
    """
    if n < 1:
        raise ValueError(f"derivative matrix needs N >= 1, got {n}")
    i, j = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    c = np.where(i == 0, 2.0, 1.0)
    entries = np.where((j > i) & ((i + j) % 2 == 1), 2.0 * j / c, 0.0).astype(np.complex128)
    return SpectralMatrix(_frozen(entries))


def product_matrix(v_coeffs: SpectralCoeffs) -> SpectralMatrix:
    """Return C_v such that C_v @ psi_hat approximates the coefficients of v * psi.

    Uses T_m T_n = (T_{m+n} + T_{|m-n|}) / 2 with m, n in 0..N; output indices above N are discarded,
    the only aliasing error of this module.
    """
    v = v_coeffs.coeffs
    n = v_coeffs.order
    m_idx, n_idx = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    half_v = np.broadcast_to(0.5 * v[np.newaxis, :], m_idx.shape)
    entries = np.zeros((n + 1, n + 1), dtype=np.complex128)
    total = m_idx + n_idx
    keep = total <= n
    np.add.at(entries, (total[keep], m_idx[keep]), half_v[keep])
    np.add.at(entries, (np.abs(m_idx - n_idx).ravel(), m_idx.ravel()), half_v.ravel())
    return SpectralMatrix(_frozen(entries))


def endpoint_vector(n: int, side: Literal["top", "bottom"]) -> RealArray:
    """Row vector of T_i at a layer end: T_i(+1) = 1 at the top, T_i(-1) = (-1)^i at the bottom."""
    if side == "top":
        return _frozen(np.ones(n + 1))
    return _frozen((-1.0) ** np.arange(n + 1))
