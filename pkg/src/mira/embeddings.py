"""File-backed embedding sets, cosine scores, and symmetric KL divergence.

Binary interchange formats (little-endian):
  MIRAEMB1: 8-byte ASCII magic, u32 D, u32 N, then N*D float32 row-major.
  MIRAPRB1: 8-byte ASCII magic, u32 K, u32 N, then N*K float32 rows, each
            summing to 1 within 1e-4.
Embedding manifests are JSON: {"model_id": str, "tracks": {id: rel_path}}.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    ConfigurationError,
    CorruptFileError,
    DegenerateInputError,
    DimensionError,
    EmptyInputError,
    FormatError,
    MissingEntryError,
)

EMB_MAGIC = b"MIRAEMB1"
PRB_MAGIC = b"MIRAPRB1"
KL_EPS = 1e-10
PROB_SUM_TOL = 1e-4


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    """Per-track frame-vector matrices from one named model."""

    model_id: str
    entries: dict[str, np.ndarray] = field(default_factory=dict)
    dim: int = 0


@dataclass(frozen=True, eq=False)
class ProbDistribution:
    probs: np.ndarray

    def __post_init__(self):
        probs = np.ascontiguousarray(self.probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size == 0:
            raise DimensionError("probability vector must be 1-D and non-empty")
        if (probs < 0).any():
            raise ValueError("probabilities must be non-negative")
        if abs(float(probs.sum()) - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {probs.sum():.6f}, expected 1 within {PROB_SUM_TOL}")
        object.__setattr__(self, "probs", probs)

    def __len__(self) -> int:
        return len(self.probs)


@dataclass(frozen=True)
class PairScore:
    ref_id: str
    tgt_id: str
    metric: str
    value: float
    higher_is_similar: bool

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise ValueError(f"non-finite score for ({self.ref_id}, {self.tgt_id}, {self.metric})")


def _read_binary(path: Path, magic: bytes) -> np.ndarray:
    data = path.read_bytes()
    if len(data) < 16:
        raise CorruptFileError(f"{path}: too short for a header")
    if data[:8] != magic:
        raise FormatError(f"{path}: bad magic {data[:8]!r}, expected {magic!r}")
    d, n = struct.unpack_from("<II", data, 8)
    expected = 16 + 4 * d * n
    if len(data) != expected:
        raise CorruptFileError(f"{path}: payload is {len(data)} bytes, expected {expected}")
    matrix = np.frombuffer(data, dtype="<f4", offset=16).reshape(n, d).astype(np.float64)
    if not np.isfinite(matrix).all():
        raise FormatError(f"{path}: contains NaN/Inf entries")
    return matrix


def _write_binary(path: Path, magic: bytes, matrix: np.ndarray) -> None:
    matrix = np.ascontiguousarray(matrix, dtype="<f4")
    if matrix.ndim != 2:
        raise DimensionError("expected a 2-D matrix")
    n, d = matrix.shape
    path.write_bytes(magic + struct.pack("<II", d, n) + matrix.tobytes())


def read_embedding_file(path: str | Path) -> np.ndarray:
    """Read one MIRAEMB1 file as a (frames, D) float matrix."""
    return _read_binary(Path(path), EMB_MAGIC)


def write_embedding_file(path: str | Path, matrix: np.ndarray) -> None:
    _write_binary(Path(path), EMB_MAGIC, np.asarray(matrix))


def read_prob_file(path: str | Path) -> np.ndarray:
    """Read one MIRAPRB1 file as an (N, K) matrix of distributions."""
    rows = _read_binary(Path(path), PRB_MAGIC)
    sums = rows.sum(axis=1)
    if (np.abs(sums - 1.0) > PROB_SUM_TOL).any() or (rows < 0).any():
        raise FormatError(f"{path}: rows are not probability distributions")
    return rows


def write_prob_file(path: str | Path, rows: np.ndarray) -> None:
    _write_binary(Path(path), PRB_MAGIC, np.asarray(rows))


def load_embedding_set(manifest: str | Path, model_id: str) -> EmbeddingSet:
    """Load all tracks listed in an embedding manifest, validating dims."""
    manifest = Path(manifest)
    spec = json.loads(manifest.read_text())
    if spec.get("model_id") != model_id:
        raise ConfigurationError(
            f"{manifest}: manifest is for model {spec.get('model_id')!r}, expected {model_id!r}"
        )
    entries: dict[str, np.ndarray] = {}
    dim = None
    for track_id, rel_path in spec.get("tracks", {}).items():
        path = manifest.parent / rel_path
        if not path.exists():
            raise MissingEntryError(f"track {track_id!r}: missing embedding file {path}")
        matrix = read_embedding_file(path)
        if dim is None:
            dim = matrix.shape[1]
        elif matrix.shape[1] != dim:
            raise FormatError(
                f"track {track_id!r}: dim {matrix.shape[1]} != {dim} of earlier tracks under model {model_id!r}"
            )
        entries[track_id] = matrix
    return EmbeddingSet(model_id, entries, dim or 0)


def aggregate_track(matrix: np.ndarray) -> np.ndarray:
    """Frame mean, then L2-normalized; the all-zero matrix stays zero."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] == 0:
        raise EmptyInputError("need at least one frame vector to aggregate")
    mean = matrix.mean(axis=0)
    norm = float(np.linalg.norm(mean))
    return mean / norm if norm > 0 else mean


def cosine_score(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity in [-1, 1]; higher means more similar."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"vector dims differ: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise DegenerateInputError("cosine of a zero vector is undefined; pair left unscored")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def _smooth(p: np.ndarray, eps: float) -> np.ndarray:
    s = p + eps
    return s / s.sum()


def kl_divergence(p: ProbDistribution, q: ProbDistribution, eps: float = KL_EPS) -> float:
    """Directed KL divergence (natural log) with additive smoothing."""
    if len(p) != len(q):
        raise DimensionError(f"distribution lengths differ: {len(p)} vs {len(q)}")
    ps = _smooth(p.probs, eps)
    qs = _smooth(q.probs, eps)
    return float(np.sum(ps * np.log(ps / qs)))


def symmetric_kl(p: ProbDistribution, q: ProbDistribution, eps: float = KL_EPS) -> float:
    """Average of both directed divergences; lower means more similar."""
    return 0.5 * (kl_divergence(p, q, eps) + kl_divergence(q, p, eps))
