"""Set manifests: the JSON surface naming tracks, audio, and model files.

Schema: {"set_id": str, "tracks": [{"id": str, "audio": path?,
"embeddings": {model_id: path}, "probs": {model_id: path}}]}; paths are
relative to the manifest file.
"""

from __future__ import annotations

import json
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path

from .audio_io import AudioClip, load_wav
from .errors import ConfigurationError, FormatError
from .synth import CorpusManifest


@dataclass(frozen=True)
class TrackRef:
    id: str
    audio: Path | None = None
    embeddings: dict[str, Path] = field(default_factory=dict)
    probs: dict[str, Path] = field(default_factory=dict)


@dataclass(frozen=True)
class TrackSet:
    set_id: str
    tracks: tuple[TrackRef, ...]

    def ids(self) -> list[str]:
        return [t.id for t in self.tracks]


def load_set_manifest(path: str | Path) -> TrackSet:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: unreadable set manifest ({exc})") from exc
    if not isinstance(data, dict) or "tracks" not in data:
        raise FormatError(f"{path}: set manifest must be an object with a 'tracks' list")

    base = path.parent
    tracks = []
    seen = set()
    for entry in data["tracks"]:
        track_id = entry.get("id")
        if not track_id:
            raise FormatError(f"{path}: track entry without an id")
        if track_id in seen:
            raise FormatError(f"{path}: duplicate track id {track_id!r}")
        seen.add(track_id)
        tracks.append(
            TrackRef(
                id=track_id,
                audio=(base / entry["audio"]) if entry.get("audio") else None,
                embeddings={m: base / p for m, p in entry.get("embeddings", {}).items()},
                probs={m: base / p for m, p in entry.get("probs", {}).items()},
            )
        )
    return TrackSet(set_id=data.get("set_id", path.stem), tracks=tuple(tracks))


def write_set_manifest(path: str | Path, set_id: str, tracks: list[dict]) -> None:
    """Write a set manifest; each track dict may carry audio/embeddings/probs."""
    path = Path(path)
    payload = {"set_id": set_id, "tracks": tracks}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


class WavClipMap(Mapping):
    """Clips decoded from WAV files on demand; nothing cached, so large sets
    evaluate in bounded memory."""

    def __init__(self, paths: dict[str, Path], engine_rate: int):
        self._paths = dict(paths)
        self._rate = engine_rate

    def __getitem__(self, track_id: str) -> AudioClip:
        return load_wav(self._paths[track_id], target_rate=self._rate, clip_id=track_id)

    def __iter__(self):
        return iter(self._paths)

    def __len__(self):
        return len(self._paths)


@dataclass
class CorpusBundle:
    """A forced-replication corpus ready for evaluation; the clip maps may
    be plain dicts or lazy on-demand providers."""

    manifest: CorpusManifest
    references: Mapping[str, AudioClip]
    replicas: Mapping[str, AudioClip]


def load_corpus_bundle(corpus_json: str | Path, engine_rate: int) -> CorpusBundle:
    """Open a corpus written by `mira synth`, decoding clips on demand."""
    corpus_json = Path(corpus_json)
    data = json.loads(corpus_json.read_text())
    manifest = CorpusManifest.from_dict(data)
    base = corpus_json.parent

    reference_tracks = data.get("reference_tracks")
    replica_files = data.get("replica_files")
    if not reference_tracks or not replica_files:
        raise ConfigurationError(
            f"{corpus_json}: corpus manifest lacks reference_tracks/replica_files path tables"
        )
    return CorpusBundle(
        manifest=manifest,
        references=WavClipMap({tid: base / rel for tid, rel in reference_tracks.items()}, engine_rate),
        replicas=WavClipMap({rid: base / rel for rid, rel in replica_files.items()}, engine_rate),
    )
