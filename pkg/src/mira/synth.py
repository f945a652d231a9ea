"""Forced-replication corpus synthesis.

A replica is a mixture-set song with a contiguous window overwritten by an
exact copy of a reference-song segment, so duration never changes and the
spliced samples stay bit-identical to their source. Every replica carries a
full provenance record (offsets, proportion, seed), and can be rebuilt
exactly from that record: large corpora are planned first and materialized
lazily instead of held in memory.
"""

from __future__ import annotations

import json
from collections.abc import Mapping
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .audio_io import AudioClip
from .errors import InvalidProportionError, MissingEntryError, SampleRateError


@dataclass(frozen=True)
class ReplicationSpec:
    reference_id: str
    mixture_id: str
    replica_id: str
    proportion: float
    copy_start_s: float
    insert_at_s: float
    seed: int


@dataclass
class CorpusManifest:
    genre: str
    degrees: list[float]
    replicas_per_song: int
    seed: int
    crossfade_ms: float = 0.0
    specs: list[ReplicationSpec] = field(default_factory=list)

    def validate(self) -> None:
        degrees = set(self.degrees)
        for spec in self.specs:
            if spec.proportion not in degrees:
                raise InvalidProportionError(
                    f"replica {spec.replica_id!r} has proportion {spec.proportion} outside {sorted(degrees)}"
                )

    def to_dict(self) -> dict:
        return {
            "genre": self.genre,
            "degrees": list(self.degrees),
            "replicas_per_song": self.replicas_per_song,
            "seed": self.seed,
            "crossfade_ms": self.crossfade_ms,
            "specs": [asdict(s) for s in self.specs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CorpusManifest":
        return cls(
            genre=data["genre"],
            degrees=list(data["degrees"]),
            replicas_per_song=data["replicas_per_song"],
            seed=data["seed"],
            crossfade_ms=data.get("crossfade_ms", 0.0),
            specs=[ReplicationSpec(**s) for s in data["specs"]],
        )


def derive_seed(root_seed: int, *indices: int) -> int:
    """Stable per-replica substream seed; independent of scheduling order."""
    return int(np.random.SeedSequence([root_seed, *indices]).generate_state(1)[0])


def _segment_length(proportion: float, reference_len: int, mixture_len: int) -> int:
    if not 0.0 < proportion < 1.0:
        raise InvalidProportionError(f"proportion must be in (0, 1), got {proportion}")
    seg_len = int(round(proportion * reference_len))
    if seg_len < 1 or seg_len > reference_len or seg_len > mixture_len:
        raise InvalidProportionError(
            f"clips too short for a {proportion:.0%} splice ({seg_len} samples)"
        )
    return seg_len


def _splice(
    reference: np.ndarray,
    mixture: np.ndarray,
    copy_start: int,
    insert_at: int,
    seg_len: int,
    crossfade_samples: int,
) -> np.ndarray:
    out = mixture.copy()
    out[insert_at : insert_at + seg_len] = reference[copy_start : copy_start + seg_len]
    fade = min(crossfade_samples, seg_len // 2)
    if fade > 0:
        ramp = np.linspace(0.0, 1.0, fade, endpoint=False)
        seg = reference[copy_start : copy_start + seg_len]
        out[insert_at : insert_at + fade] = mixture[insert_at : insert_at + fade] * (1 - ramp) + seg[:fade] * ramp
        tail = slice(insert_at + seg_len - fade, insert_at + seg_len)
        out[tail] = seg[seg_len - fade :] * (1 - ramp[::-1]) + mixture[tail] * ramp[::-1]
    return out


def make_replica(
    reference: AudioClip,
    mixture: AudioClip,
    proportion: float,
    rng: np.random.Generator,
    replica_id: str | None = None,
    seed: int = 0,
    crossfade_ms: float = 0.0,
) -> tuple[AudioClip, ReplicationSpec]:
    """Overwrite a random mixture window with a random reference segment.

    The segment length is proportion * reference duration; both the copy
    source offset and the insertion offset are drawn uniformly over valid
    positions. With crossfade_ms == 0 (the default) the spliced window is
    bit-identical to the reference segment.
    """
    if reference.sample_rate != mixture.sample_rate:
        raise SampleRateError(
            f"sample rates differ: {reference.sample_rate} vs {mixture.sample_rate}"
        )
    rate = reference.sample_rate
    seg_len = _segment_length(proportion, len(reference), len(mixture))
    copy_start = int(rng.integers(0, len(reference) - seg_len + 1))
    insert_at = int(rng.integers(0, len(mixture) - seg_len + 1))

    replica_id = replica_id or f"{reference.id}__{mixture.id}__p{int(round(proportion * 1000))}"
    spec = ReplicationSpec(
        reference_id=reference.id,
        mixture_id=mixture.id,
        replica_id=replica_id,
        proportion=proportion,
        copy_start_s=copy_start / rate,
        insert_at_s=insert_at / rate,
        seed=seed,
    )
    samples = _splice(
        reference.samples,
        mixture.samples,
        copy_start,
        insert_at,
        seg_len,
        int(round(crossfade_ms / 1000.0 * rate)),
    )
    return AudioClip(replica_id, samples, rate), spec


def materialize_replica(
    spec: ReplicationSpec, reference: AudioClip, mixture: AudioClip, crossfade_ms: float = 0.0
) -> AudioClip:
    """Rebuild a replica exactly from its provenance record."""
    rate = reference.sample_rate
    seg_len = _segment_length(spec.proportion, len(reference), len(mixture))
    samples = _splice(
        reference.samples,
        mixture.samples,
        round(spec.copy_start_s * rate),
        round(spec.insert_at_s * rate),
        seg_len,
        int(round(crossfade_ms / 1000.0 * rate)),
    )
    return AudioClip(spec.replica_id, samples, rate)


def plan_corpus(
    reference_set: list[AudioClip],
    mixture_set: list[AudioClip],
    degrees: list[float],
    replicas_per_song: int,
    seed: int,
    genre: str = "unspecified",
    crossfade_ms: float = 0.0,
) -> CorpusManifest:
    """Draw every replica's mixture song and splice offsets without building
    audio. Each replica gets its own RNG substream keyed by (seed, ref index,
    degree index, replica index), so the plan is deterministic under any
    evaluation order.
    """
    if not reference_set or not mixture_set:
        raise InvalidProportionError("reference and mixture sets must be non-empty")
    if not degrees:
        raise InvalidProportionError("at least one replication degree is required")

    manifest = CorpusManifest(
        genre=genre,
        degrees=list(degrees),
        replicas_per_song=replicas_per_song,
        seed=seed,
        crossfade_ms=crossfade_ms,
    )
    for ref_idx, reference in enumerate(reference_set):
        for deg_idx, proportion in enumerate(degrees):
            for rep_idx in range(replicas_per_song):
                child_seed = derive_seed(seed, ref_idx, deg_idx, rep_idx)
                rng = np.random.default_rng(child_seed)
                mixture = mixture_set[int(rng.integers(0, len(mixture_set)))]  # with replacement
                rate = reference.sample_rate
                if rate != mixture.sample_rate:
                    raise SampleRateError(
                        f"sample rates differ: {rate} vs {mixture.sample_rate}"
                    )
                seg_len = _segment_length(proportion, len(reference), len(mixture))
                copy_start = int(rng.integers(0, len(reference) - seg_len + 1))
                insert_at = int(rng.integers(0, len(mixture) - seg_len + 1))
                manifest.specs.append(
                    ReplicationSpec(
                        reference_id=reference.id,
                        mixture_id=mixture.id,
                        replica_id=(
                            f"{reference.id}__{mixture.id}__p{int(round(proportion * 1000))}__r{rep_idx}"
                        ),
                        proportion=proportion,
                        copy_start_s=copy_start / rate,
                        insert_at_s=insert_at / rate,
                        seed=child_seed,
                    )
                )
    return manifest


class LazyReplicaMap(Mapping):
    """Replica clips rebuilt on demand from their specs; nothing is cached,
    so arbitrarily large corpora evaluate in bounded memory."""

    def __init__(
        self,
        manifest: CorpusManifest,
        references: Mapping[str, AudioClip],
        mixtures: Mapping[str, AudioClip],
    ):
        self._specs = {spec.replica_id: spec for spec in manifest.specs}
        self._crossfade_ms = manifest.crossfade_ms
        self._references = references
        self._mixtures = mixtures

    def __getitem__(self, replica_id: str) -> AudioClip:
        spec = self._specs[replica_id]
        try:
            reference = self._references[spec.reference_id]
            mixture = self._mixtures[spec.mixture_id]
        except KeyError as exc:
            raise MissingEntryError(f"replica {replica_id!r}: missing source track {exc}") from exc
        return materialize_replica(spec, reference, mixture, self._crossfade_ms)

    def __iter__(self):
        return iter(self._specs)

    def __len__(self):
        return len(self._specs)


def build_corpus(
    reference_set: list[AudioClip],
    mixture_set: list[AudioClip],
    degrees: list[float],
    replicas_per_song: int,
    seed: int,
    genre: str = "unspecified",
    crossfade_ms: float = 0.0,
) -> tuple[CorpusManifest, list[AudioClip]]:
    """Plan and materialize a whole corpus; total replicas =
    len(reference_set) * len(degrees) * replicas_per_song.

    Convenient for desk-scale corpora; use plan_corpus + LazyReplicaMap when
    the corpus does not fit in memory.
    """
    manifest = plan_corpus(
        reference_set, mixture_set, degrees, replicas_per_song, seed, genre, crossfade_ms
    )
    refs = {c.id: c for c in reference_set}
    mixes = {c.id: c for c in mixture_set}
    replicas = [
        materialize_replica(spec, refs[spec.reference_id], mixes[spec.mixture_id], crossfade_ms)
        for spec in manifest.specs
    ]
    return manifest, replicas


def save_corpus(
    manifest: CorpusManifest,
    replicas: Mapping[str, AudioClip] | list[AudioClip],
    out_dir: str | Path,
    reference_paths: dict[str, str] | None = None,
    mixture_paths: dict[str, str] | None = None,
) -> Path:
    """Write replica WAVs one at a time plus corpus.json; returns the
    manifest path. The track path tables let `mira stats` relocate the
    source audio without re-synthesizing.
    """
    from .audio_io import save_wav

    out_dir = Path(out_dir)
    replica_dir = out_dir / "replicas"
    replica_dir.mkdir(parents=True, exist_ok=True)
    items = replicas.items() if isinstance(replicas, Mapping) else ((c.id, c) for c in replicas)
    replica_files = {}
    for replica_id, clip in items:
        rel = f"replicas/{replica_id}.wav"
        save_wav(clip, out_dir / rel)
        replica_files[replica_id] = rel

    payload = manifest.to_dict()
    payload["replica_files"] = replica_files
    if reference_paths is not None:
        payload["reference_tracks"] = reference_paths
    if mixture_paths is not None:
        payload["mixture_tracks"] = mixture_paths
    manifest_path = out_dir / "corpus.json"
    manifest_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return manifest_path
