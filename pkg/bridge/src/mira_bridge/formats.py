"""Binary interchange formats consumed by the mira engine.

MIRAEMB1: 8-byte ASCII magic, u32 D, u32 N, N*D float32 row-major (LE).
MIRAPRB1: 8-byte ASCII magic, u32 K, u32 N, N*K float32 rows summing to 1.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

EMB_MAGIC = b"MIRAEMB1"
PRB_MAGIC = b"MIRAPRB1"


def _write(path: Path, magic: bytes, matrix: np.ndarray) -> None:
    matrix = np.ascontiguousarray(matrix, dtype="<f4")
    if matrix.ndim != 2 or matrix.size == 0:
        raise ValueError(f"{path}: expected a non-empty 2-D matrix")
    if not np.isfinite(matrix).all():
        raise ValueError(f"{path}: refusing to write NaN/Inf features")
    n, d = matrix.shape
    path.write_bytes(magic + struct.pack("<II", d, n) + matrix.tobytes())


def write_embedding_file(path: str | Path, frames: np.ndarray) -> None:
    _write(Path(path), EMB_MAGIC, np.asarray(frames))


def write_prob_file(path: str | Path, rows: np.ndarray) -> None:
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim == 1:
        rows = rows[None, :]
    sums = rows.sum(axis=1, keepdims=True)
    if (sums <= 0).any():
        raise ValueError(f"{path}: probability rows must have positive mass")
    # float32 storage truncates; renormalize in float32 so rows survive the
    # engine's 1e-4 sum check exactly as written
    rows32 = rows.astype("<f4")
    rows32 /= rows32.sum(axis=1, keepdims=True, dtype="<f4")
    _write(Path(path), PRB_MAGIC, rows32)
