"""Analytic oracles and benchmark profiles.

Ideal-waveguide modal sets and fields, the Munk and pseudolinear sound-speed profiles, the mean absolute TL error
metric and wavenumber-spectrum peak extraction. All functions are pure.
"""

from __future__ import annotations
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .specfun import hankel1_0, hankel1_0_imaginary


__all__ = [
    "ModalSet",
    "TLComparison",
    "ideal_modes",
    "ideal_field",
    "munk_profile",
    "pseudolinear_profile",
    "tl_error",
    "tl_clamped",
    "spectrum_peaks",
    "TL_CLAMP_DB",
    "PEAK_THRESHOLD",
]

RealArray = NDArray[np.float64]

TL_CLAMP_DB: float = 300.0
# run-time peak threshold, as a fraction of the largest spectrum peak
PEAK_THRESHOLD: float = 0.1

Seabed = Literal["free", "rigid"]


@dataclass(frozen=True, slots=True)
class ModalSet:
    """Propagating modes of an ideal fluid waveguide.

    Attributes:
        wavenumbers (tuple[float, ...]): Horizontal wavenumbers k_r,m [1/m], descending.
        vertical_wavenumbers (tuple[float, ...]): Matching k_z,m [1/m], ascending.
        seabed (Seabed): Bottom kind the set was computed for.
        k (float): Medium wavenumber [1/m].
    """
    wavenumbers: tuple[float, ...]
    vertical_wavenumbers: tuple[float, ...]
    seabed: Seabed
    k: float

    def __len__(self) -> int:
        return len(self.wavenumbers)


@dataclass(frozen=True, slots=True)
class TLComparison:
    """Outcome of a TL grid comparison.

    Attributes:
        error_db (float): Mean absolute difference over compared points [dB].
        compared (int): Number of points entering the mean.
        excluded (int): Points skipped because either grid was clamped.
    """
    error_db: float
    compared: int
    excluded: int


def _vertical_wavenumbers(h: float, seabed: Seabed, count: int) -> RealArray:
    m = np.arange(1, count + 1, dtype=np.float64)
    if seabed == "rigid":
        m = m - 0.5
    return m * np.pi / h


def ideal_modes(h: float, k: float, seabed: Seabed) -> ModalSet:
    """Return the propagating modes of an ideal waveguide of depth H.

    Free seabed: k_z = m pi / H; rigid seabed: k_z = (m - 1/2) pi / H; k_r = sqrt(k^2 - k_z^2) for k_z < k.

    Args:
        h: Waveguide depth [m], positive.
        k: Medium wavenumber [1/m], positive.
        seabed: "free" or "rigid".

    Returns:
        The propagating ModalSet, possibly empty below cutoff.
    """
    if h <= 0.0 or k <= 0.0:
        raise ValueError(f"ideal_modes needs H > 0 and k > 0, got H={h}, k={k}")
    count = int(np.floor(k * h / np.pi + 0.5)) + 1
    kz = _vertical_wavenumbers(h, seabed, count)
    kz = kz[kz < k]
    kr = np.sqrt(k * k - kz * kz)
    return ModalSet(
        wavenumbers=tuple(float(v) for v in kr),
        vertical_wavenumbers=tuple(float(v) for v in kz),
        seabed=seabed,
        k=k,
    )


def ideal_field(
    h: float,
    k: float,
    z_s: float,
    seabed: Seabed,
    ranges: ArrayLike,
    depths: ArrayLike,
    n_modes: int,
) -> RealArray:
    """Transmission loss of a point source in an ideal waveguide by modal summation.

    Sums the first `n_modes` modes, propagating and evanescent, skipping a mode exactly at cutoff, of
    p/p0 = (2 pi i / H) sum_m sin(k_z,m z_s) sin(k_z,m z) H0^(1)(k_r,m r).

    Args:
        h: Waveguide depth [m].
        k: Medium wavenumber [1/m].
        z_s: Source depth [m].
        seabed: "free" or "rigid".
        ranges: Receiver ranges [m], each >= 1.
        depths: Receiver depths [m].
        n_modes: Number of modes summed; at least the propagating count.

    Returns:
        TL grid [dB] of shape (nr, nz); exact nulls map to +inf.
    """
    r = np.asarray(ranges, dtype=np.float64).ravel()
    z = np.asarray(depths, dtype=np.float64).ravel()
    if np.any(r < 1.0):
        raise ValueError("ideal_field ranges must be >= 1 m")
    propagating = len(ideal_modes(h, k, seabed))
    if n_modes < propagating:
        raise ValueError(f"n_modes={n_modes} is below the propagating count {propagating}")
    kz = _vertical_wavenumbers(h, seabed, n_modes)
    kr2 = k * k - kz * kz
    field = np.zeros((r.size, z.size), dtype=np.complex128)
    for kz_m, kr2_m in zip(kz, kr2, strict=True):
        if kr2_m == 0.0:
            continue
        shape = np.sin(kz_m * z_s) * np.sin(kz_m * z)
        if kr2_m > 0.0:
            radial = hankel1_0(np.sqrt(kr2_m) * r)
        else:
            radial = hankel1_0_imaginary(np.sqrt(-kr2_m) * r)
        field += np.outer(radial, shape)
    magnitude = np.abs((2j * np.pi / h) * field)
    with np.errstate(divide="ignore"):
        return -20.0 * np.log10(magnitude)


def munk_profile(
    z: ArrayLike,
    c_axis: float = 1500.0,
    z_axis: float = 1300.0,
    scale: float = 650.0,
    epsilon: float = 0.00737,
) -> RealArray:
    """Munk canonical sound speed c = c_axis [1 + eps (zt - 1 + exp(-zt))], zt = (z - z_axis) / scale."""
    depth = np.asarray(z, dtype=np.float64)
    zt = (depth - z_axis) / scale
    return c_axis * (1.0 + epsilon * (zt - 1.0 + np.exp(-zt)))


def pseudolinear_profile(z: ArrayLike, a: float, b: float) -> RealArray:
    """Pseudolinear sound speed c = sqrt(1 / (a z + b)).

    Raises:
        ValueError: If a z + b <= 0 anywhere.
    """
    depth = np.asarray(z, dtype=np.float64)
    slowness2 = a * depth + b
    if np.any(slowness2 <= 0.0):
        raise ValueError(f"pseudolinear profile needs a*z + b > 0 (a={a}, b={b})")
    return np.sqrt(1.0 / slowness2)


def tl_clamped(tl: ArrayLike) -> NDArray[np.bool_]:
    """Mask of sentinel TL values (non-finite or at or above the clamp)."""
    values = np.asarray(tl, dtype=np.float64)
    return ~np.isfinite(values) | (values >= TL_CLAMP_DB)


def tl_error(tl: ArrayLike, reference: ArrayLike) -> TLComparison:
    """Mean absolute TL difference over all grid points where neither grid is clamped.

    Raises:
        ValueError: If the grid shapes differ.
    """
    a = np.asarray(tl, dtype=np.float64)
    b = np.asarray(reference, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"TL grid shapes differ: {a.shape} vs {b.shape}")
    excluded = tl_clamped(a) | tl_clamped(b)
    compared = int(np.count_nonzero(~excluded))
    if compared == 0:
        return TLComparison(error_db=0.0, compared=0, excluded=int(excluded.sum()))
    error = float(np.mean(np.abs(a[~excluded] - b[~excluded])))
    return TLComparison(error_db=error, compared=compared, excluded=int(excluded.sum()))


def spectrum_peaks(
    spectrum: ArrayLike,
    wavenumbers: ArrayLike,
    threshold_fraction: float = 0.5,
) -> tuple[float, ...]:
    """Locate modal peaks in a wavenumber spectrum.

    Interior local maxima above threshold_fraction * max, each refined by a three-point parabola on the
    log-magnitude.

    Args:
        spectrum: |Psi(k, z_probe)| sampled on a uniform grid.
        wavenumbers: The uniform grid [1/m], same length.
        threshold_fraction: Fraction of the global maximum a peak must exceed.

    Returns:
        Refined peak wavenumbers, descending.

    Raises:
        ValueError: If the spectrum is empty, non-finite, or its length differs from the grid.
    """
    s = np.asarray(spectrum, dtype=np.float64).ravel()
    k = np.asarray(wavenumbers, dtype=np.float64).ravel()
    if s.size == 0:
        raise ValueError("spectrum is empty")
    if s.size != k.size:
        raise ValueError(f"spectrum length {s.size} differs from grid length {k.size}")
    if not np.all(np.isfinite(s)):
        raise ValueError("spectrum must be finite")
    if s.size < 3:
        return ()
    threshold = threshold_fraction * float(s.max())
    centre = s[1:-1]
    is_peak = (centre > s[:-2]) & (centre >= s[2:]) & (centre > threshold)
    dk = k[1] - k[0]
    peaks: list[float] = []
    tiny = np.finfo(np.float64).tiny
    for i in np.flatnonzero(is_peak) + 1:
        y0, y1, y2 = np.log(np.maximum(s[i - 1 : i + 2], tiny))
        curvature = y0 - 2.0 * y1 + y2
        offset = 0.5 * (y0 - y2) / curvature if curvature < 0.0 else 0.0
        peaks.append(float(k[i] + offset * dk))
    return tuple(sorted(peaks, reverse=True))
