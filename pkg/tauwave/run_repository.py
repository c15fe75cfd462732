"""RunRepository: TinyDB-backed ledger of pipeline runs.

Each run stores its configuration digest, stage timings, spectrum peaks, TL range, warnings and the optional
oracle error. Storage is pluggable (a JSON file next to the outputs, or in-memory for tests).
"""

from __future__ import annotations
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
import typing as t

from tinydb import TinyDB, where
from tinydb.storages import MemoryStorage
from tinydb.table import Table


__all__ = ["RunRecord", "RunRepository", "LEDGER_FILE"]

LEDGER_FILE: str = "runs.json"


@dataclass(frozen=True, slots=True)
class RunRecord:
    """One completed pipeline run.

    Attributes:
        run_id (str): Unique identifier.
        created_at (datetime): Start of the run.
        label (str): Preset name or configuration path.
        config_digest (str): SHA-256 of the serialized configuration.
        timings (dict[str, float]): Wall time per stage [s].
        peaks (dict[float, tuple[float, ...]]): Spectrum peak wavenumbers per probe depth.
        tl_min (float | None): Smallest clamped TL [dB], None without TL products.
        tl_max (float | None): Largest clamped TL [dB].
        warnings (tuple[str, ...]): Data-quality warnings raised during the run.
        oracle_error (float | None): TL error against the analytic oracle [dB].
    """
    run_id: str
    created_at: datetime
    label: str
    config_digest: str
    timings: dict[str, float] = field(default_factory=dict)
    peaks: dict[float, tuple[float, ...]] = field(default_factory=dict)
    tl_min: float | None = None
    tl_max: float | None = None
    warnings: tuple[str, ...] = ()
    oracle_error: float | None = None


def _serialize_datetime(dt: datetime) -> str:
    return dt.isoformat()


def _deserialize_datetime(val: str) -> datetime:
    return datetime.fromisoformat(val)


def _serialize_peaks(peaks: dict[float, tuple[float, ...]]) -> list[dict[str, t.Any]]:
    return [{"depth": depth, "wavenumbers": list(values)} for depth, values in peaks.items()]


def _deserialize_peaks(data: list[dict[str, t.Any]]) -> dict[float, tuple[float, ...]]:
    return {float(item["depth"]): tuple(float(k) for k in item["wavenumbers"]) for item in data}


def _serialize_run(record: RunRecord) -> dict[str, t.Any]:
    return {
        "run_id": record.run_id,
        "created_at": _serialize_datetime(record.created_at),
        "label": record.label,
        "config_digest": record.config_digest,
        "timings": dict(record.timings),
        "peaks": _serialize_peaks(record.peaks),
        "tl_min": record.tl_min,
        "tl_max": record.tl_max,
        "warnings": list(record.warnings),
        "oracle_error": record.oracle_error,
    }


def _deserialize_run(data: dict[str, t.Any]) -> RunRecord:
    return RunRecord(
        run_id=data["run_id"],
        created_at=_deserialize_datetime(data["created_at"]),
        label=data["label"],
        config_digest=data["config_digest"],
        timings={str(k): float(v) for k, v in data.get("timings", {}).items()},
        peaks=_deserialize_peaks(data.get("peaks", [])),
        tl_min=data.get("tl_min"),
        tl_max=data.get("tl_max"),
        warnings=tuple(data.get("warnings", [])),
        oracle_error=data.get("oracle_error"),
    )


class RunRepository:
    """Stores and queries run records in a TinyDB table."""

    def __init__(self, db: TinyDB | None = None) -> None:
        """Initialize the repository with a TinyDB instance.

        Args:
            db: Optional TinyDB instance. If None, uses in-memory storage.
        """
        self._db: TinyDB = db if db is not None else TinyDB(storage=MemoryStorage)
        self._runs: Table = self._db.table("runs")  # type: ignore

    @classmethod
    def at(cls, out_dir: Path) -> RunRepository:
        """Repository backed by `runs.json` in `out_dir`."""
        out_dir.mkdir(parents=True, exist_ok=True)
        return cls(TinyDB(out_dir / LEDGER_FILE))

    def add_run(self, record: RunRecord) -> None:
        """Store a run; a record with the same run_id is replaced."""
        self._runs.upsert(_serialize_run(record), lambda doc: doc.get("run_id") == record.run_id)

    def get_run(self, run_id: str) -> RunRecord | None:
        doc = self._runs.get(lambda d: d.get("run_id") == run_id)
        if doc is not None:
            return _deserialize_run(doc)
        return None

    def list_runs(self) -> list[RunRecord]:
        """All runs, oldest first."""
        return sorted((_deserialize_run(d) for d in self._runs.all()), key=lambda r: r.created_at)

    def runs_for_config(self, digest: str) -> list[RunRecord]:
        """Runs of one configuration, oldest first."""
        docs = self._runs.search(where("config_digest") == digest)
        return sorted((_deserialize_run(d) for d in docs), key=lambda r: r.created_at)

    def close(self) -> None:
        self._db.close()
