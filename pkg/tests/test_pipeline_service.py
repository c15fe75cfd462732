"""Tests for PipelineService and the pipeline helpers: stages, products, oracle, ledger and residual checks."""

from datetime import datetime
from pathlib import Path

import numpy as np
import pytest
from tinydb import TinyDB
from tinydb.storages import MemoryStorage

from tauwave.benchmarks import ideal_waveguide, pekeris_waveguide
from tauwave.environment import reference_wavenumber
from tauwave.errors import ConfigError
from tauwave.pipeline_service import (
    PipelineService,
    build_grid,
    check_residuals,
    convergence_study,
)
from tauwave.reference import TL_CLAMP_DB, ideal_field
from tauwave.run_config import RunConfig, config_digest, parse_config
from tauwave.run_repository import RunRepository


SMALL_RUN = """
frequency = 20
source_depth = 36
bottom = pressure_release
samples = 512
ranges = 100 1500 29
depths = 0 100 11
probe_depths = 46
layer
  top = 0
  bottom = 100
  c = constant 1500
end
"""


@pytest.fixture
def config() -> RunConfig:
    return parse_config(SMALL_RUN)


@pytest.fixture
def now() -> datetime:
    return datetime(2026, 5, 4, 8, 0, 0)


@pytest.fixture
def repo() -> RunRepository:
    return RunRepository(TinyDB(storage=MemoryStorage))


@pytest.fixture
def service(repo: RunRepository, now: datetime) -> PipelineService:
    return PipelineService(workers=2, repository=repo, now_fn=lambda: now)


def test_run_produces_all_products(service: PipelineService, config: RunConfig) -> None:
    result = service.run(config, label="small")
    assert result.environment.source_interface == 0
    assert result.greens.values.shape == (512, 12)
    assert result.tl is not None
    assert result.tl.values.shape == (29, 11)
    assert set(result.tl_lines) == {46.0}
    assert result.tl_lines[46.0].values.shape == (29, 1)
    assert set(result.peaks) == {46.0}
    assert set(result.timings) == {"environment", "sweep", "synthesis", "tl"}
    assert result.files == ()
    assert result.oracle is None


def test_tl_line_matches_grid_column(service: PipelineService) -> None:
    config = parse_config(SMALL_RUN.replace("probe_depths = 46", "probe_depths = 40"))
    result = service.run(config)
    assert result.tl is not None
    column = int(np.flatnonzero(result.tl.depths == 40.0)[0])
    assert result.tl_lines[40.0].values[:, 0] == pytest.approx(result.tl.values[:, column], rel=1e-12)


def test_surface_null_is_reported_as_warning(service: PipelineService, config: RunConfig) -> None:
    result = service.run(config)
    assert result.tl is not None
    assert np.all(result.tl.clamped()[:, 0] == TL_CLAMP_DB)
    assert any("clamp" in message for message in result.warnings)
    assert f"warnings: {len(result.warnings)}" in result.summary


def test_run_writes_declared_files(tmp_path: Path, config: RunConfig) -> None:
    config_with_binary = parse_config(SMALL_RUN.replace("probe_depths = 46", "probe_depths = 46\ntl_binary = true"))
    result = PipelineService(workers=1).run(config_with_binary, tmp_path, label="small")
    names = sorted(path.name for path in result.files)
    assert names == ["spectrum_z46.csv", "summary.txt", "tl_grid.bin", "tl_grid.csv", "tl_line_z46.csv"]
    assert all(path.exists() for path in result.files)
    assert "output" in result.timings
    summary = (tmp_path / "summary.txt").read_text(encoding="utf-8")
    assert summary.startswith("run: small\n")
    assert f"config digest: {config_digest(config_with_binary)}" in summary


def test_spectrum_only_run_skips_synthesis(tmp_path: Path) -> None:
    config = parse_config(SMALL_RUN.replace("depths = 0 100 11", "depths = 0 100 11\nproducts = spectrum"))
    result = PipelineService(workers=1).run(config, tmp_path)
    assert result.tl is None
    assert result.tl_lines == {}
    assert "synthesis" not in result.timings
    assert result.greens.values.shape == (512, 1)
    assert sorted(path.name for path in result.files) == ["spectrum_z46.csv", "summary.txt"]



def test_peak_threshold_from_config(config: RunConfig) -> None:
    default = PipelineService(workers=1).run(config).peaks[46.0]
    strict = parse_config(SMALL_RUN.replace("probe_depths = 46", "probe_depths = 46\npeak_threshold = 0.5"))
    high = PipelineService(workers=1).run(strict).peaks[46.0]
    assert len(default) == 2
    assert len(high) == 1
    assert high[0] in default

def test_summary_is_deterministic(config: RunConfig) -> None:
    first = PipelineService(workers=1).run(config, label="a").summary
    second = PipelineService(workers=3).run(config, label="a").summary
    assert first == second


def test_run_recorded_in_ledger(service: PipelineService, repo: RunRepository, config: RunConfig, now: datetime) -> None:
    result = service.run(config, label="small")
    runs = repo.list_runs()
    assert len(runs) == 1
    record = runs[0]
    assert record.created_at == now
    assert record.label == "small"
    assert record.config_digest == config_digest(config)
    assert record.peaks == result.peaks
    assert record.tl_max == TL_CLAMP_DB
    assert record.tl_min is not None and record.tl_min < record.tl_max
    assert record.oracle_error is None
    assert repo.runs_for_config(config_digest(config)) == runs


def test_oracle_comparison(config: RunConfig) -> None:
    result = PipelineService(workers=2).run(config, oracle="ideal-free")
    assert result.oracle is not None
    assert result.oracle.compared > 0
    assert np.isfinite(result.oracle.error_db)
    assert any(line.startswith("oracle TL error") for line in result.summary)


@pytest.mark.edge
def test_oracle_requires_matching_configuration(config: RunConfig) -> None:
    spectrum_only = parse_config(SMALL_RUN.replace("depths = 0 100 11", "depths = 0 100 11\nproducts = spectrum"))
    with pytest.raises(ConfigError) as info:
        PipelineService(workers=1).run(spectrum_only, oracle="ideal-free")
    assert info.value.key == "oracle"
    with pytest.raises(ConfigError):
        PipelineService(workers=1).run(config, oracle="ideal-rigid")
    halfspace = parse_config(
        SMALL_RUN.replace("bottom = pressure_release", "bottom = halfspace\nhalfspace = 2000 1.5 0.5")
    )
    with pytest.raises(ConfigError):
        PipelineService(workers=1).run(halfspace, oracle="ideal-free")


def test_build_grid_default_upper_limit() -> None:
    env = ideal_waveguide().environment
    grid = build_grid(env, 0.0, None, 2048)
    assert grid.k_max == pytest.approx(2.0 * reference_wavenumber(env))
    with pytest.raises(ConfigError) as info:
        build_grid(env, 0.0, None, 50)
    assert info.value.key == "samples"


def test_check_residuals_pekeris() -> None:
    env = pekeris_waveguide().environment
    grid = build_grid(env, 0.0, None, 2048)
    report = check_residuals(env, grid, 20, seed=4)
    assert report.samples == 20
    assert report.worst_residual < 1e-6
    assert report.worst_jump_error < 1e-6


def test_convergence_study_orders() -> None:
    env = ideal_waveguide().environment
    grid = build_grid(env, 0.0, None, 512)
    ranges = np.linspace(200.0, 1000.0, 9)
    depths = np.linspace(10.0, 90.0, 5)
    reference = ideal_field(100.0, 2.0 * np.pi * 20.0 / 1500.0, 36.0, "free", ranges, depths, 50)
    results = convergence_study(env, grid, ranges, depths, [6, 10], reference, workers=1)
    assert [order for order, _ in results] == [6, 10]
    assert all(comparison.compared + comparison.excluded == 45 for _, comparison in results)
