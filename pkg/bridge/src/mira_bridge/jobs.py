"""Batch extraction: WAV directory in, MIRAEMB1/MIRAPRB1 files + manifest out.

Per-file failures are recorded in the manifest's error list and the job
continues; only a model load failure aborts the whole run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio import AudioDecodeError, load_wav_mono
from .backends import ModelBackend, resolve_backend
from .formats import write_embedding_file, write_prob_file


@dataclass(frozen=True)
class BridgeJob:
    input_dir: Path
    model: str
    checkpoint: str
    out_dir: Path


def _run(job: BridgeJob, backend: ModelBackend, suffix: str, writer) -> Path:
    wavs = sorted(Path(job.input_dir).glob("*.wav"))
    if not wavs:
        raise FileNotFoundError(f"{job.input_dir}: no .wav files to process")
    out_dir = Path(job.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    tracks: dict[str, str] = {}
    errors: list[dict] = []
    for wav in wavs:
        track_id = wav.stem
        try:
            samples = load_wav_mono(wav, backend.target_rate)
            matrix = backend.process(samples)
            rel = f"{track_id}.{suffix}"
            writer(out_dir / rel, matrix)
            tracks[track_id] = rel
        except (AudioDecodeError, ValueError, OSError) as exc:
            errors.append({"track_id": track_id, "file": str(wav), "error": f"{type(exc).__name__}: {exc}"})

    manifest = {
        "model_id": backend.model_id,
        "tracks": tracks,
        "errors": errors,
        "provenance": {
            "checkpoint": job.checkpoint,
            "input_rate": backend.target_rate,
            "window_s": backend.window_s,
            "hop_s": backend.hop_s,
        },
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest_path


def extract_embeddings(job: BridgeJob, backend: ModelBackend | None = None) -> Path:
    """One MIRAEMB1 per readable track plus manifest.json; returns its path."""
    backend = backend or resolve_backend(job.model, job.checkpoint)
    if backend.emits != "embeddings":
        raise ValueError(f"model {backend.model_id!r} emits {backend.emits}, not embeddings")
    return _run(job, backend, "emb", write_embedding_file)


def extract_label_probs(job: BridgeJob, backend: ModelBackend | None = None) -> Path:
    """One MIRAPRB1 per readable track (rows sum to 1) plus manifest.json."""
    backend = backend or resolve_backend(job.model, job.checkpoint)
    if backend.emits != "probs":
        raise ValueError(f"model {backend.model_id!r} emits {backend.emits}, not probabilities")

    def writer(path, matrix):
        probs = np.asarray(matrix, dtype=np.float64)
        if (probs < 0).any():
            raise ValueError(f"{path}: negative probabilities from backend")
        write_prob_file(path, probs)

    return _run(job, backend, "prb", writer)
