"""PipelineService: runs a configuration from environment to output files.

Stages: source-interface insertion, wavenumber grid, Green-function sweep, synthesis, transmission loss, output.
Stage wall times go to the log and the run ledger; the summary file holds only deterministic content.
"""

from __future__ import annotations
import logging
import time
import uuid
from collections.abc import Callable, Iterator, Sequence
from contextlib import contextmanager
from dataclasses import dataclass, replace
from datetime import datetime
from pathlib import Path
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .depth_solver import SOURCE_JUMP, DepthSolver, condition_residuals
from .environment import insert_source_interface, reference_wavenumber
from .errors import ConfigError
from .kspace import GreensGrid, TLGrid, WavenumberGrid, greens_sweep, make_grid, pressure_and_tl, synthesize
from .reference import PEAK_THRESHOLD, TLComparison, ideal_field, ideal_modes, spectrum_peaks, tl_error
from .result_writer import (
    spectrum_path,
    tl_line_path,
    write_spectrum_csv,
    write_summary,
    write_tl_binary,
    write_tl_grid_csv,
    write_tl_line_csv,
)
from .run_config import RunConfig, config_digest
from .run_repository import RunRecord, RunRepository
from .waveguide_model import ConstantProfile, Environment


__all__ = [
    "Oracle",
    "RunResult",
    "ResidualReport",
    "PipelineService",
    "build_grid",
    "convergence_study",
    "check_residuals",
    "ORACLE_MIN_RANGE",
    "ORACLE_MODES",
    "PEAK_THRESHOLD",
]

logger = logging.getLogger(__name__)

Oracle = Literal["ideal-free", "ideal-rigid"]

ORACLE_MIN_RANGE: float = 200.0
ORACLE_MODES: int = 50


@dataclass(frozen=True, slots=True)
class RunResult:
    """Everything one pipeline run produced.

    Attributes:
        environment (Environment): The environment with its source interface tagged.
        grid (WavenumberGrid): Wavenumber grid used.
        greens (GreensGrid): Green function over all receivers.
        tl (TLGrid | None): TL on the depth grid, None without the tl_grid product.
        tl_lines (dict[float, TLGrid]): Single-depth TL per probe depth for the tl_line product.
        peaks (dict[float, tuple[float, ...]]): Spectrum peaks per probe depth.
        oracle (TLComparison | None): Comparison against the analytic oracle for r >= ORACLE_MIN_RANGE.
        warnings (tuple[str, ...]): Warnings logged during the run.
        timings (dict[str, float]): Wall time per stage [s].
        files (tuple[Path, ...]): Written output files.
        summary (tuple[str, ...]): Summary lines.
    """
    environment: Environment
    grid: WavenumberGrid
    greens: GreensGrid
    tl: TLGrid | None
    tl_lines: dict[float, TLGrid]
    peaks: dict[float, tuple[float, ...]]
    oracle: TLComparison | None
    warnings: tuple[str, ...]
    timings: dict[str, float]
    files: tuple[Path, ...] = ()
    summary: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class ResidualReport:
    """Worst condition residuals over a set of random wavenumbers.

    Attributes:
        samples (int): Number of wavenumbers checked.
        worst_residual (float): Largest relative residual of any condition row.
        worst_jump_error (float): Largest relative deviation of the source jump from -1/(2 pi).
    """
    samples: int
    worst_residual: float
    worst_jump_error: float


class _WarningCollector(logging.Handler):
    def __init__(self) -> None:
        super().__init__(level=logging.WARNING)
        self.messages: list[str] = []

    def emit(self, record: logging.LogRecord) -> None:
        self.messages.append(record.getMessage())


@contextmanager
def _collect_warnings() -> Iterator[_WarningCollector]:
    collector = _WarningCollector()
    package_logger = logging.getLogger("tauwave")
    package_logger.addHandler(collector)
    try:
        yield collector
    finally:
        package_logger.removeHandler(collector)


def build_grid(env: Environment, k_min: float, k_max: float | None, samples: int) -> WavenumberGrid:
    """Wavenumber grid on [k_min, k_max], with k_max = 2 k0 when None.

    Raises:
        ConfigError: If the grid violates its constraints.
    """
    upper = k_max if k_max is not None else 2.0 * reference_wavenumber(env)
    try:
        return make_grid(k_min, upper, samples)
    except ValueError as exc:
        raise ConfigError("samples", str(exc)) from exc


def _with_order(env: Environment, order: int) -> Environment:
    return replace(env, layers=tuple(replace(layer, order=order) for layer in env.layers))


def _oracle_grid(
    env: Environment, oracle: Oracle, ranges: NDArray[np.float64], depths: NDArray[np.float64]
) -> NDArray[np.float64]:
    speeds = {layer.c.value for layer in env.layers if isinstance(layer.c, ConstantProfile)}
    if len(speeds) != 1 or any(not isinstance(layer.c, ConstantProfile) for layer in env.layers):
        raise ConfigError("oracle", "the ideal-waveguide oracle needs a homogeneous water column")
    if env.source.geometry != "point":
        raise ConfigError("oracle", "the ideal-waveguide oracle needs a point source")
    source = env.source
    k = source.omega / speeds.pop()
    seabed = "free" if oracle == "ideal-free" else "rigid"
    if (seabed == "free") != (env.bottom.kind == "pressure_release"):
        raise ConfigError("oracle", f"{oracle} does not match bottom = {env.bottom.kind}")
    n_modes = max(ORACLE_MODES, len(ideal_modes(env.depth, k, seabed)))
    return ideal_field(env.depth, k, source.depth, seabed, ranges, depths, n_modes)


def _compare(tl: TLGrid, reference: ArrayLike, min_range: float) -> TLComparison:
    keep = tl.ranges >= min_range
    return tl_error(tl.values[keep, :], np.asarray(reference)[keep, :])


def convergence_study(
    env: Environment,
    grid: WavenumberGrid,
    ranges: ArrayLike,
    depths: ArrayLike,
    orders: Sequence[int],
    reference: ArrayLike,
    min_range: float = 0.0,
    workers: int | None = None,
) -> list[tuple[int, TLComparison]]:
    """TL error against a reference grid for each spectral order N.

    Every layer of `env` is rerun at order N; the comparison keeps ranges >= min_range.
    """
    results: list[tuple[int, TLComparison]] = []
    for order in orders:
        tagged = insert_source_interface(_with_order(env, order))
        greens = greens_sweep(tagged, grid, depths, workers)
        field_grid = synthesize(greens, ranges, tagged.source.geometry, workers)
        comparison = _compare(pressure_and_tl(field_grid, tagged), reference, min_range)
        logger.info("order %d: TL error %.4f dB over %d points", order, comparison.error_db, comparison.compared)
        results.append((order, comparison))
    return results


def check_residuals(env: Environment, grid: WavenumberGrid, count: int, seed: int = 0) -> ResidualReport:
    """Solve at `count` random wavenumbers on the grid contour and report the worst condition residuals."""
    solver = DepthSolver(insert_source_interface(env))
    rng = np.random.default_rng(seed)
    wavenumbers = rng.uniform(grid.k_min, grid.k_max, size=count) - 1j * grid.offset
    worst, worst_jump = 0.0, 0.0
    for kr in wavenumbers:
        coeffs = solver.solve_coefficients(complex(kr))
        x = np.concatenate([c.coeffs for c in coeffs])
        for condition in solver.condition_rows(complex(kr)):
            if condition.kind == "source_jump":
                jump = complex(condition.row @ x)
                worst_jump = max(worst_jump, abs(jump - SOURCE_JUMP) / abs(SOURCE_JUMP))
        worst = max(worst, max(residual for _, _, residual in condition_residuals(solver, complex(kr), coeffs)))
    logger.info("checked %d wavenumbers: worst residual %.3e, worst jump error %.3e", count, worst, worst_jump)
    return ResidualReport(samples=count, worst_residual=worst, worst_jump_error=worst_jump)


def _columns(greens: GreensGrid, columns: NDArray[np.intp]) -> GreensGrid:
    return GreensGrid(greens.values[:, columns], greens.depths[columns], greens.grid, greens.singular)


def _take(tl: TLGrid, columns: NDArray[np.intp]) -> TLGrid:
    return TLGrid(tl.values[:, columns], tl.ranges, tl.depths[columns], tl.reference)


class PipelineService:
    """Runs configurations end to end and records them in the run ledger."""

    def __init__(
        self,
        workers: int | None = None,
        repository: RunRepository | None = None,
        clock: Callable[[], float] = time.perf_counter,
        now_fn: Callable[[], datetime] = datetime.now,
    ) -> None:
        """Initialize PipelineService.

        Args:
            workers: Thread count for sweep and synthesis; None uses every core.
            repository: Run ledger; runs are not recorded when None.
            clock: Monotonic clock for stage timings.
            now_fn: Injectable wall clock for the ledger timestamp.
        """
        self._workers = workers
        self._repository = repository
        self._clock = clock
        self._now_fn = now_fn

    @contextmanager
    def _stage(self, name: str, timings: dict[str, float]) -> Iterator[None]:
        start = self._clock()
        yield
        timings[name] = self._clock() - start
        logger.info("stage %s finished in %.3f s", name, timings[name])

    def run(
        self,
        config: RunConfig,
        out_dir: Path | None = None,
        oracle: Oracle | None = None,
        label: str = "",
    ) -> RunResult:
        """Execute a configuration and write its declared products to `out_dir`.

        Args:
            config: The run configuration.
            out_dir: Output directory; nothing is written when None.
            oracle: Also compare the TL grid with the ideal-waveguide oracle.
            label: Name recorded in the summary and the ledger.

        Raises:
            ConfigError: If the wavenumber grid or the oracle request is invalid.
            SweepFailedError: If too many wavenumber samples are singular.
        """
        started = self._now_fn()
        timings: dict[str, float] = {}
        output = config.output
        products = set(output.products)
        if oracle is not None and "tl_grid" not in products:
            raise ConfigError("oracle", "needs the tl_grid product")
        grid_depths = output.depth_grid() if "tl_grid" in products else np.empty(0)
        probes = np.asarray(output.probe_depths, dtype=np.float64)
        with _collect_warnings() as collector:
            with self._stage("environment", timings):
                env = insert_source_interface(config.environment)
                wk = config.wavenumbers
                grid = build_grid(env, wk.k_min, wk.k_max, wk.samples)
            receivers = np.concatenate([grid_depths, probes])
            logger.debug("dk=%.6g eps=%.6g, %d receivers", grid.spacing, grid.offset, receivers.size)
            with self._stage("sweep", timings):
                greens = greens_sweep(env, grid, receivers, self._workers)
            peaks = {
                float(z): spectrum_peaks(greens.spectrum(float(z)), grid.real_samples, output.peak_threshold)
                for z in probes
            }

            grid_columns = np.arange(grid_depths.size)
            probe_columns = grid_depths.size + np.arange(probes.size) if "tl_line" in products else np.empty(0, np.intp)
            wanted = np.concatenate([grid_columns, probe_columns]).astype(np.intp)
            tl: TLGrid | None = None
            tl_lines: dict[float, TLGrid] = {}
            comparison: TLComparison | None = None
            reference: NDArray[np.float64] | None = None
            if wanted.size:
                with self._stage("synthesis", timings):
                    field_grid = synthesize(
                        _columns(greens, wanted), output.range_grid(), env.source.geometry, self._workers
                    )
                with self._stage("tl", timings):
                    full = pressure_and_tl(field_grid, env, config.normalization)
                if grid_columns.size:
                    tl = _take(full, grid_columns)
                for offset, z in enumerate(probes if probe_columns.size else ()):
                    tl_lines[float(z)] = _take(full, np.array([grid_columns.size + offset], dtype=np.intp))
                if tl is not None and oracle is not None:
                    reference = _oracle_grid(env, oracle, tl.ranges, tl.depths)
                    comparison = _compare(tl, reference, ORACLE_MIN_RANGE)
            warnings = tuple(collector.messages)
        summary = self._summary(config, env, grid, greens, tl, tl_lines, peaks, comparison, warnings, label)
        files: list[Path] = []
        if out_dir is not None:
            with self._stage("output", timings):
                files = self._write(config, out_dir, greens, tl, tl_lines, reference, summary)
        result = RunResult(
            environment=env,
            grid=grid,
            greens=greens,
            tl=tl,
            tl_lines=tl_lines,
            peaks=peaks,
            oracle=comparison,
            warnings=warnings,
            timings=timings,
            files=tuple(files),
            summary=tuple(summary),
        )
        if self._repository is not None:
            self._repository.add_run(self._record(config, result, started, label))
        return result

    def _write(
        self,
        config: RunConfig,
        out_dir: Path,
        greens: GreensGrid,
        tl: TLGrid | None,
        tl_lines: dict[float, TLGrid],
        reference: NDArray[np.float64] | None,
        summary: list[str],
    ) -> list[Path]:
        out_dir.mkdir(parents=True, exist_ok=True)
        output = config.output
        files: list[Path] = []
        if "spectrum" in output.products:
            files += [write_spectrum_csv(spectrum_path(out_dir, z), greens, z) for z in output.probe_depths]
        if tl is not None:
            files.append(write_tl_grid_csv(out_dir / "tl_grid.csv", tl))
            if output.tl_binary:
                files.append(write_tl_binary(out_dir / "tl_grid.bin", tl))
            if reference is not None:
                files.append(write_tl_grid_csv(out_dir / "tl_oracle.csv", replace(tl, values=reference)))
        for z, line in tl_lines.items():
            files.append(write_tl_line_csv(tl_line_path(out_dir, z), line, z))
        files.append(write_summary(out_dir / "summary.txt", summary))
        return files

    def _summary(
        self,
        config: RunConfig,
        env: Environment,
        grid: WavenumberGrid,
        greens: GreensGrid,
        tl: TLGrid | None,
        tl_lines: dict[float, TLGrid],
        peaks: dict[float, tuple[float, ...]],
        comparison: TLComparison | None,
        warnings: tuple[str, ...],
        label: str,
    ) -> list[str]:
        source = env.source
        lines = [
            f"run: {label or 'unnamed'}",
            f"config digest: {config_digest(config)}",
            f"source: {source.geometry} at {source.depth:g} m, {source.frequency:g} Hz",
            f"layers: {len(env.layers)} (orders {', '.join(str(layer.order) for layer in env.layers)}), "
            f"H = {env.depth:g} m, bottom {env.bottom.kind}",
            f"wavenumbers: M = {grid.count}, [{grid.k_min:.8g}, {grid.k_max:.8g}] 1/m, "
            f"dk = {grid.spacing:.6e}, eps = {grid.offset:.6e}",
            f"singular samples: {len(greens.singular)}",
        ]
        for depth, found in peaks.items():
            listed = ", ".join(f"{k:.6f}" for k in found) or "none"
            lines.append(f"peaks at z = {depth:g} m: {listed}")
        if tl is not None:
            clamped = tl.clamped()
            lines.append(f"TL grid range: {float(clamped.min()):.3f} .. {float(clamped.max()):.3f} dB")
        for depth, line in tl_lines.items():
            clamped = line.clamped()
            lines.append(f"TL line at z = {depth:g} m: {float(clamped.min()):.3f} .. {float(clamped.max()):.3f} dB")
        if comparison is not None:
            lines.append(
                f"oracle TL error (r >= {ORACLE_MIN_RANGE:g} m): {comparison.error_db:.4f} dB "
                f"over {comparison.compared} points, {comparison.excluded} excluded"
            )
        lines.append(f"warnings: {len(warnings)}")
        lines += [f"  {message}" for message in warnings]
        return lines

    def _record(self, config: RunConfig, result: RunResult, started: datetime, label: str) -> RunRecord:
        grids = ([result.tl] if result.tl is not None else []) + list(result.tl_lines.values())
        tl_min = min((float(g.clamped().min()) for g in grids), default=None)
        tl_max = max((float(g.clamped().max()) for g in grids), default=None)
        return RunRecord(
            run_id=uuid.uuid4().hex,
            created_at=started,
            label=label,
            config_digest=config_digest(config),
            timings=dict(result.timings),
            peaks=dict(result.peaks),
            tl_min=tl_min,
            tl_max=tl_max,
            warnings=result.warnings,
            oracle_error=result.oracle.error_db if result.oracle is not None else None,
        )
