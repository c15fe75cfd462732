"""Wavenumber space: the sampling grid, the Green-function sweep and field synthesis.

The sweep solves the depth problem for every sample k_j - i eps on a joblib thread pool; synthesis evaluates the
rectangular-rule inverse Hankel (point source) or Fourier (line source) transform as a kernel matrix product over
blocks of ranges. Pressure and transmission loss follow from the synthesized displacement potential.
"""

from __future__ import annotations
import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from joblib import Parallel, delayed
from numpy.typing import ArrayLike, NDArray

from .depth_solver import DepthSolver, ReceiverMap
from .environment import complex_wavenumber, layer_index_at, sample_layer
from .errors import ConfigError, SingularSystemError, SweepFailedError
from .reference import TL_CLAMP_DB
from .specfun import MAX_IMAG_ARGUMENT, bessel_j0_complex, hankel1_0
from .waveguide_model import Environment


__all__ = [
    "WavenumberGrid",
    "GreensGrid",
    "FieldGrid",
    "TLGrid",
    "Normalization",
    "make_grid",
    "greens_sweep",
    "synthesize_point",
    "synthesize_line",
    "synthesize",
    "pressure",
    "reference_pressure",
    "pressure_and_tl",
    "SINGULAR_FRACTION_LIMIT",
    "RANGE_BLOCK",
]

logger = logging.getLogger(__name__)

ComplexArray = NDArray[np.complex128]
RealArray = NDArray[np.float64]

Normalization = Literal["standard", "line-h0-at-1"]

SINGULAR_FRACTION_LIMIT: float = 0.01
RANGE_BLOCK: int = 256
_OFFSET_FACTOR: float = 3.0 / (2.0 * np.pi * np.log10(np.e))


@dataclass(frozen=True, slots=True)
class WavenumberGrid:
    """Uniform horizontal-wavenumber grid on the offset contour k - i eps.

    Attributes:
        k_min (float): First real sample [1/m].
        k_max (float): Last real sample [1/m].
        count (int): Number of samples M.
        spacing (float): Delta k [1/m].
        offset (float): Contour offset eps [1/m].
    """
    k_min: float
    k_max: float
    count: int
    spacing: float
    offset: float

    @property
    def real_samples(self) -> RealArray:
        return self.k_min + self.spacing * np.arange(self.count, dtype=np.float64)

    @property
    def samples(self) -> ComplexArray:
        return self.real_samples - 1j * self.offset

    @property
    def aliasing_range(self) -> float:
        """Range 2 pi / Delta k beyond which the rectangular rule wraps around."""
        return 2.0 * np.pi / self.spacing


@dataclass(frozen=True, slots=True)
class GreensGrid:
    """Green function samples Psi(k_j - i eps, z_i).

    Attributes:
        values (ComplexArray): Matrix of shape (M, nz).
        depths (RealArray): Receiver depths [m].
        grid (WavenumberGrid): The wavenumber grid of the rows.
        singular (tuple[int, ...]): Rows filled by interpolation after a singular solve.
    """
    values: ComplexArray
    depths: RealArray
    grid: WavenumberGrid
    singular: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.values.shape != (self.grid.count, self.depths.size):
            raise ValueError(
                f"Green grid shape {self.values.shape} does not match (M, nz) = ({self.grid.count}, {self.depths.size})"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("Green grid contains non-finite entries")

    def spectrum(self, depth: float) -> RealArray:
        """|Psi(k, z)| at the receiver depth closest to `depth`."""
        column = int(np.argmin(np.abs(self.depths - depth)))
        return np.abs(self.values[:, column])


@dataclass(frozen=True, slots=True)
class FieldGrid:
    """Synthesized field over ranges x depths.

    Attributes:
        values (ComplexArray): Shape (nr, nz).
        ranges (RealArray): Horizontal distances [m], strictly increasing, first >= 1.
        depths (RealArray): Receiver depths [m].
        geometry (Literal["point", "line"]): Source geometry the field was synthesized for.
        quantity (Literal["potential", "pressure"]): Displacement potential or pressure.
    """
    values: ComplexArray
    ranges: RealArray
    depths: RealArray
    geometry: Literal["point", "line"]
    quantity: Literal["potential", "pressure"] = "potential"

    def __post_init__(self) -> None:
        _check_ranges(self.ranges)
        if self.values.shape != (self.ranges.size, self.depths.size):
            raise ValueError(f"field shape {self.values.shape} does not match ({self.ranges.size}, {self.depths.size})")


@dataclass(frozen=True, slots=True)
class TLGrid:
    """Transmission loss [dB] over ranges x depths; +inf marks exact nulls.

    Attributes:
        values (RealArray): Shape (nr, nz).
        ranges (RealArray): Ranges [m].
        depths (RealArray): Depths [m].
        reference (complex): Reference pressure p0 the grid is normalized by.
    """
    values: RealArray
    ranges: RealArray
    depths: RealArray
    reference: complex = field(default=1.0 + 0j)

    def clamped(self) -> RealArray:
        """Values with +inf, NaN and anything above TL_CLAMP_DB replaced by TL_CLAMP_DB."""
        out = np.where(np.isfinite(self.values), self.values, TL_CLAMP_DB)
        return np.minimum(out, TL_CLAMP_DB)

    def at(self, rng: float, depth: float) -> float:
        """TL at the grid point nearest (rng, depth)."""
        i = int(np.argmin(np.abs(self.ranges - rng)))
        j = int(np.argmin(np.abs(self.depths - depth)))
        return float(self.values[i, j])


def _check_ranges(ranges: RealArray) -> None:
    if ranges.ndim != 1 or ranges.size == 0:
        raise ValueError("ranges must be a non-empty 1-D array")
    if ranges[0] < 1.0:
        raise ValueError(f"first range must be >= 1 m, got {ranges[0]}")
    if np.any(np.diff(ranges) <= 0.0):
        raise ValueError("ranges must be strictly increasing")


def make_grid(k_min: float, k_max: float, count: int) -> WavenumberGrid:
    """Build the sampling grid with Delta k = (k_max - k_min)/(M - 1) and eps = 3 Delta k / (2 pi log10 e).

    Raises:
        ValueError: If M < 2, k_min < 0, k_max <= k_min, or eps is not below (k_max - k_min)/100.
    """
    if count < 2:
        raise ValueError(f"wavenumber sample count must be >= 2, got {count}")
    if k_min < 0.0 or k_max <= k_min:
        raise ValueError(f"wavenumber interval needs 0 <= k_min < k_max, got [{k_min}, {k_max}]")
    spacing = (k_max - k_min) / (count - 1)
    offset = _OFFSET_FACTOR * spacing
    if not offset < (k_max - k_min) / 100.0:
        raise ValueError(
            f"contour offset {offset:.6g} is not small against the interval {k_max - k_min:.6g}; increase M (got {count})"
        )
    return WavenumberGrid(k_min=k_min, k_max=k_max, count=count, spacing=spacing, offset=offset)


def _solve_column(solver: DepthSolver, kr: complex, receivers: ReceiverMap) -> ComplexArray | None:
    try:
        return solver.solve(kr, receivers)
    except SingularSystemError as exc:
        logger.warning("singular depth system at k=%s (pivot %.3e); column will be interpolated", kr, exc.pivot)
        return None


def _fill_singular(values: ComplexArray, singular: list[int], k: RealArray) -> None:
    good = np.setdiff1d(np.arange(k.size), singular)
    for column in range(values.shape[1]):
        real = np.interp(k[singular], k[good], values[good, column].real)
        imag = np.interp(k[singular], k[good], values[good, column].imag)
        values[singular, column] = real + 1j * imag


def greens_sweep(
    env: Environment,
    grid: WavenumberGrid,
    receiver_depths: ArrayLike,
    workers: int | None = None,
    solver: DepthSolver | None = None,
) -> GreensGrid:
    """Solve the depth problem at every grid sample.

    Columns are independent and computed on a thread pool; the result is assembled in wavenumber order, so it does
    not depend on the number of workers.

    Args:
        env: Environment with a tagged source interface.
        grid: Wavenumber grid.
        receiver_depths: Receiver depths in [0, H].
        workers: Thread count; None uses every available core.
        solver: Prepared solver for `env`, built here when omitted.

    Returns:
        The GreensGrid; singular rows are filled by linear interpolation of their neighbours.

    Raises:
        MissingSourceInterfaceError: If `env` has no source interface.
        SweepFailedError: If more than 1% of the samples are singular.
    """
    depth_solver = solver if solver is not None else DepthSolver(env)
    receivers = depth_solver.receiver_map(receiver_depths)
    samples = grid.samples
    logger.debug("sweeping %d wavenumbers x %d receivers", grid.count, receivers.depths.size)
    columns = Parallel(n_jobs=workers if workers is not None else -1, prefer="threads")(
        delayed(_solve_column)(depth_solver, complex(kr), receivers) for kr in samples
    )
    singular = [j for j, column in enumerate(columns) if column is None]
    if len(singular) > SINGULAR_FRACTION_LIMIT * grid.count:
        raise SweepFailedError(f"{len(singular)} of {grid.count} wavenumber samples produced a singular depth system")
    values = np.zeros((grid.count, receivers.depths.size), dtype=np.complex128)
    for j, column in enumerate(columns):
        if column is not None:
            values[j, :] = column
    if singular:
        logger.warning("interpolated %d singular wavenumber samples", len(singular))
        _fill_singular(values, singular, grid.real_samples)
    logger.info("green function sweep complete: %d samples", grid.count)
    return GreensGrid(values=values, depths=receivers.depths.copy(), grid=grid, singular=tuple(singular))


def _prepare_ranges(gg: GreensGrid, ranges: ArrayLike) -> RealArray:
    r = np.asarray(ranges, dtype=np.float64).ravel()
    _check_ranges(r)
    worst = gg.grid.offset * float(r[-1])
    if worst > MAX_IMAG_ARGUMENT:
        raise ConfigError(
            "ranges",
            f"contour offset times maximum range is {worst:.3g}, above {MAX_IMAG_ARGUMENT}; "
            f"lower the maximum range or raise samples (r={r[-1]}, offset={gg.grid.offset:.3g})",
        )
    if r[-1] > gg.grid.aliasing_range:
        logger.warning(
            "maximum range %.6g m exceeds the aliasing range 2*pi/dk = %.6g m", float(r[-1]), gg.grid.aliasing_range
        )
    return r


def _point_block(gg: GreensGrid, r: RealArray) -> ComplexArray:
    kr = gg.grid.samples
    kernel = bessel_j0_complex(np.outer(r, kr)) * (gg.grid.spacing * kr)
    return kernel @ gg.values


def _line_block(gg: GreensGrid, x: RealArray) -> ComplexArray:
    arg = np.outer(x, gg.grid.samples)
    kernel = (np.exp(1j * arg) + np.exp(-1j * arg)) * gg.grid.spacing
    return kernel @ gg.values


def _synthesize(gg: GreensGrid, r: RealArray, block: str, workers: int | None) -> ComplexArray:
    kernel_block = _point_block if block == "point" else _line_block
    chunks = [r[i : i + RANGE_BLOCK] for i in range(0, r.size, RANGE_BLOCK)]
    parts = Parallel(n_jobs=workers if workers is not None else -1, prefer="threads")(
        delayed(kernel_block)(gg, chunk) for chunk in chunks
    )
    return np.vstack(parts)


def synthesize_point(gg: GreensGrid, ranges: ArrayLike, workers: int | None = None) -> FieldGrid:
    """Point-source potential psi(r, z) = dk sum_j Psi_j(z) J0(k_j r) k_j over the offset samples.

    Raises:
        ValueError: On invalid ranges.
        ConfigError: If the contour offset times the maximum range passes the J0 imaginary-part guard.
    """
    r = _prepare_ranges(gg, ranges)
    values = _synthesize(gg, r, "point", workers)
    return FieldGrid(values=values, ranges=r, depths=gg.depths, geometry="point")


def synthesize_line(gg: GreensGrid, ranges: ArrayLike, workers: int | None = None) -> FieldGrid:
    """Line-source potential psi(x, z) = 2 dk sum_j Psi_j(z) cos(k_j x) over the offset samples."""
    x = _prepare_ranges(gg, ranges)
    values = _synthesize(gg, x, "line", workers)
    return FieldGrid(values=values, ranges=x, depths=gg.depths, geometry="line")


def synthesize(
    gg: GreensGrid, ranges: ArrayLike, geometry: Literal["point", "line"], workers: int | None = None
) -> FieldGrid:
    if geometry == "point":
        return synthesize_point(gg, ranges, workers)
    return synthesize_line(gg, ranges, workers)


def _density_at(env: Environment, depths: RealArray) -> RealArray:
    rho = np.empty(depths.size, dtype=np.float64)
    for i, z in enumerate(depths):
        layer = env.layers[layer_index_at(env, float(z))]
        rho[i] = float(sample_layer(layer, np.array([z]))[1][0])
    return rho


def pressure(potential: FieldGrid, env: Environment) -> FieldGrid:
    """p = rho(z) omega^2 psi, with rho read from the layer above at interfaces."""
    if potential.quantity == "pressure":
        return potential
    omega = env.source.omega
    rho = _density_at(env, potential.depths)
    return FieldGrid(
        values=potential.values * (rho[np.newaxis, :] * omega**2),
        ranges=potential.ranges,
        depths=potential.depths,
        geometry=potential.geometry,
        quantity="pressure",
    )


def reference_pressure(env: Environment, normalization: Normalization = "standard") -> complex:
    """Pressure 1 m from the source in a homogeneous medium with the source-depth properties.

    Point: rho_s omega^2 exp(i k_s) / (4 pi). Line: i rho_s omega^2 H0(Re k_s) / 4, or H0(1) with
    "line-h0-at-1".

    The line form drops the source-depth attenuation: the Hankel argument is Re k_s.

    Raises:
        ValueError: If "line-h0-at-1" is requested for a point source.
    """
    source = env.source
    layer = env.layers[layer_index_at(env, source.depth)]
    c, rho, alpha = sample_layer(layer, np.array([source.depth]))
    rho_s = float(rho[0])
    omega2 = source.omega**2
    k_s = complex(complex_wavenumber(c, alpha, source.frequency)[0])
    if source.geometry == "point":
        if normalization != "standard":
            raise ValueError(f"normalization {normalization!r} applies to line sources only")
        return rho_s * omega2 * np.exp(1j * k_s) / (4.0 * np.pi)
    argument = 1.0 if normalization == "line-h0-at-1" else k_s.real
    return 1j * rho_s * omega2 * hankel1_0(argument) / 4.0


def pressure_and_tl(field_grid: FieldGrid, env: Environment, normalization: Normalization = "standard") -> TLGrid:
    """Transmission loss TL = -20 log10 |p / p0|; zero pressure maps to +inf.

    Raises:
        ValueError: If the field is non-finite or its geometry differs from the source geometry.
    """
    if not np.all(np.isfinite(field_grid.values)):
        raise ValueError("field contains non-finite values")
    if field_grid.geometry != env.source.geometry:
        raise ValueError(f"field geometry {field_grid.geometry} differs from source geometry {env.source.geometry}")
    p = pressure(field_grid, env)
    p0 = reference_pressure(env, normalization)
    with np.errstate(divide="ignore"):
        tl = -20.0 * np.log10(np.abs(p.values) / abs(p0))
    clamped = int(np.count_nonzero(~np.isfinite(tl) | (tl >= TL_CLAMP_DB)))
    if clamped:
        logger.warning("%d TL values at or beyond the %.0f dB clamp", clamped, TL_CLAMP_DB)
    return TLGrid(values=tl, ranges=p.ranges, depths=p.depths, reference=complex(p0))
