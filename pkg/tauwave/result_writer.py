"""Output files: spectrum CSV, TL grid CSV and flat binary, TL line CSV and the plain-text run summary.

TL values are clamped at TL_CLAMP_DB in every output. Numbers are written with 17 significant digits so that
identical runs produce identical files.
"""

from __future__ import annotations
import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from .kspace import GreensGrid, TLGrid
from .reference import TL_CLAMP_DB


__all__ = [
    "TL_MAGIC",
    "TL_HEADER_BYTES",
    "spectrum_path",
    "tl_line_path",
    "write_spectrum_csv",
    "write_tl_grid_csv",
    "write_tl_line_csv",
    "write_tl_binary",
    "read_tl_binary",
    "write_summary",
]

logger = logging.getLogger(__name__)

TL_MAGIC: bytes = b"WINTTL01"
TL_HEADER_BYTES: int = 32
_FMT = "%.17g"


def spectrum_path(out_dir: Path, depth: float) -> Path:
    return out_dir / f"spectrum_z{depth:g}.csv"


def tl_line_path(out_dir: Path, depth: float) -> Path:
    return out_dir / f"tl_line_z{depth:g}.csv"


def write_spectrum_csv(path: Path, greens: GreensGrid, depth: float) -> Path:
    """Write `k, |Psi|, Re Psi, Im Psi` at the receiver nearest `depth`, one row per wavenumber sample."""
    column = int(np.argmin(np.abs(greens.depths - depth)))
    psi = greens.values[:, column]
    table = np.column_stack([greens.grid.real_samples, np.abs(psi), psi.real, psi.imag])
    np.savetxt(path, table, fmt=_FMT, delimiter=",", header="k,abs_psi,re_psi,im_psi", comments="")
    logger.info("wrote spectrum at z=%g m to %s", greens.depths[column], path)
    return path


def write_tl_grid_csv(path: Path, tl: TLGrid) -> Path:
    """Write the TL grid: a header row of ranges, then one `depth, TL...` row per depth."""
    header = ",".join(["depth"] + [_FMT % r for r in tl.ranges])
    table = np.column_stack([tl.depths, tl.clamped().T])
    np.savetxt(path, table, fmt=_FMT, delimiter=",", header=header, comments="")
    logger.info("wrote %dx%d TL grid to %s", tl.ranges.size, tl.depths.size, path)
    return path


def write_tl_line_csv(path: Path, tl: TLGrid, depth: float) -> Path:
    """Write `range, TL` at the receiver nearest `depth`."""
    column = int(np.argmin(np.abs(tl.depths - depth)))
    table = np.column_stack([tl.ranges, tl.clamped()[:, column]])
    np.savetxt(path, table, fmt=_FMT, delimiter=",", header="range,tl", comments="")
    logger.info("wrote TL line at z=%g m to %s", tl.depths[column], path)
    return path


def write_tl_binary(path: Path, tl: TLGrid) -> Path:
    """Write the clamped TL grid as flat little-endian binary.

    Layout: 8-byte magic, nr and nz as int64, 8 zero bytes, then nz x nr float64 in row-major order with one row
    per depth.
    """
    nr, nz = tl.ranges.size, tl.depths.size
    header = TL_MAGIC + np.array([nr, nz, 0], dtype="<i8").tobytes()
    data = np.ascontiguousarray(tl.clamped().T, dtype="<f8")
    with path.open("wb") as handle:
        handle.write(header)
        handle.write(data.tobytes(order="C"))
    logger.info("wrote binary TL grid to %s", path)
    return path


def read_tl_binary(path: Path) -> NDArray[np.float64]:
    """Read a binary TL grid back as an (nz, nr) array.

    Raises:
        ValueError: If the magic or the payload size is wrong.
    """
    raw = path.read_bytes()
    if len(raw) < TL_HEADER_BYTES or raw[:8] != TL_MAGIC:
        raise ValueError(f"{path} is not a TL grid file")
    nr, nz, _ = np.frombuffer(raw[8:TL_HEADER_BYTES], dtype="<i8")
    data = np.frombuffer(raw[TL_HEADER_BYTES:], dtype="<f8")
    if data.size != nr * nz:
        raise ValueError(f"{path}: payload holds {data.size} values, header says {nr}x{nz}")
    return data.reshape(int(nz), int(nr)).astype(np.float64)


def write_summary(path: Path, lines: Sequence[str]) -> Path:
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info("wrote summary to %s", path)
    return path
