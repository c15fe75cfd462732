"""Tests for RunRepository: storing, replacing and querying run records."""

from dataclasses import replace
from datetime import datetime, timedelta
from pathlib import Path

import pytest
from tinydb import TinyDB
from tinydb.storages import MemoryStorage

from tauwave.run_repository import LEDGER_FILE, RunRecord, RunRepository


@pytest.fixture
def repo() -> RunRepository:
    return RunRepository(TinyDB(storage=MemoryStorage))


@pytest.fixture
def sample_run() -> RunRecord:
    return RunRecord(
        run_id="r1",
        created_at=datetime(2026, 3, 2, 9, 30, 0),
        label="ideal-free",
        config_digest="abc123",
        timings={"sweep": 1.25, "synthesis": 0.5},
        peaks={46.0: (0.0776623, 0.0554125)},
        tl_min=12.5,
        tl_max=300.0,
        warnings=("120 TL values at or beyond the 300 dB clamp",),
        oracle_error=0.08,
    )


def test_add_and_get_run(repo: RunRepository, sample_run: RunRecord) -> None:
    repo.add_run(sample_run)
    assert repo.get_run("r1") == sample_run


def test_get_missing_run(repo: RunRepository) -> None:
    assert repo.get_run("nope") is None
    assert repo.list_runs() == []


def test_run_idempotency(repo: RunRepository, sample_run: RunRecord) -> None:
    repo.add_run(sample_run)
    # same id, new label
    repo.add_run(replace(sample_run, label="again"))
    runs = repo.list_runs()
    assert len(runs) == 1
    assert runs[0].label == "again"


def test_list_runs_oldest_first(repo: RunRepository, sample_run: RunRecord) -> None:
    later = replace(sample_run, run_id="r2", created_at=sample_run.created_at + timedelta(hours=1))
    repo.add_run(later)
    repo.add_run(sample_run)
    assert [run.run_id for run in repo.list_runs()] == ["r1", "r2"]


def test_runs_for_config(repo: RunRepository, sample_run: RunRecord) -> None:
    other = replace(sample_run, run_id="r2", config_digest="def456")
    repo.add_run(sample_run)
    repo.add_run(other)
    assert [run.run_id for run in repo.runs_for_config("abc123")] == ["r1"]
    assert repo.runs_for_config("zzz") == []


def test_optional_fields_round_trip(repo: RunRepository) -> None:
    bare = RunRecord(run_id="r3", created_at=datetime(2026, 1, 1), label="", config_digest="x")
    repo.add_run(bare)
    assert repo.get_run("r3") == bare


def test_file_backed_ledger(tmp_path: Path, sample_run: RunRecord) -> None:
    repo = RunRepository.at(tmp_path / "out")
    repo.add_run(sample_run)
    repo.close()
    assert (tmp_path / "out" / LEDGER_FILE).exists()
    reopened = RunRepository.at(tmp_path / "out")
    assert reopened.get_run("r1") == sample_run
    reopened.close()
