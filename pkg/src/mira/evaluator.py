"""Pairwise evaluation orchestration: metric registry, feature cache,
bounded worker pool, threshold flags, and the sensitivity experiment.

Per-pair results are independent of worker count: workers only change
scheduling, and the report is assembled in sorted (ref, tgt, metric) order.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__ as ENGINE_VERSION
from .audio_io import ENGINE_RATE, AudioClip, load_wav
from .cover import CoverIdParams, coverid_distance_from_chroma
from .dsp import BUILTIN_MODEL_ID, Chromagram, HpcpParams, analyze_track
from .embeddings import (
    EmbeddingSet,
    KL_EPS,
    PairScore,
    ProbDistribution,
    aggregate_track,
    cosine_score,
    read_embedding_file,
    read_prob_file,
    symmetric_kl,
)
from .errors import (
    AbortedRunError,
    ConfigurationError,
    EmptyInputError,
    MiraError,
    MissingEntryError,
)
from .fad import fad_score
from .manifests import CorpusBundle, TrackRef, load_set_manifest
from .stats import KWResult, PairwiseResult, SummaryStats, dunn_pairwise, kruskal_wallis, summarize

MAX_FAILURE_FRACTION = 0.10
REF_VS_TGT = "reference_vs_target"
REF_VS_CTL = "reference_vs_control"


@dataclass(frozen=True)
class MetricInfo:
    name: str
    higher_is_similar: bool
    family: str  # chroma | embedding | probs
    per_pair: bool
    experimental: bool = False
    default_binding: str | None = None


METRICS: dict[str, MetricInfo] = {
    "coverid": MetricInfo("coverid", False, "chroma", True, default_binding=BUILTIN_MODEL_ID),
    "kl": MetricInfo("kl", False, "probs", True, default_binding=BUILTIN_MODEL_ID),
    "clap_cos": MetricInfo("clap_cos", True, "embedding", True),
    "defnet_cos": MetricInfo("defnet_cos", True, "embedding", True),
    "builtin_cos": MetricInfo("builtin_cos", True, "embedding", True, default_binding=BUILTIN_MODEL_ID),
    "fad": MetricInfo("fad", False, "embedding", False, experimental=True, default_binding=BUILTIN_MODEL_ID),
}

# KW sensitivity runs on the per-pair metrics only; FAD stays experimental.
KW_METRICS = tuple(name for name, info in METRICS.items() if info.per_pair)


@dataclass
class EvaluationConfig:
    reference_manifest: Path
    target_manifest: Path
    control_manifest: Path | None = None
    metrics: tuple[str, ...] = ("coverid", "builtin_cos", "kl")
    bindings: dict[str, str] = field(default_factory=dict)
    thresholds: dict[str, float] = field(default_factory=dict)
    include_self_pairs: bool = False
    seed: int = 0
    workers: int = 1
    engine_rate: int = ENGINE_RATE
    hpcp: HpcpParams = field(default_factory=HpcpParams)
    coverid: CoverIdParams = field(default_factory=CoverIdParams)


def resolve_bindings(metrics: tuple[str, ...], bindings: dict[str, str]) -> dict[str, str]:
    """Fill default bindings and reject unknown/unbound metrics."""
    resolved = {}
    for name in metrics:
        info = METRICS.get(name)
        if info is None:
            raise ConfigurationError(f"unknown metric {name!r}; known: {sorted(METRICS)}")
        binding = bindings.get(name, info.default_binding)
        if binding is None:
            raise ConfigurationError(
                f"metric {name!r} needs an embedding model binding (e.g. --binding {name}=MODEL_ID)"
            )
        resolved[name] = binding
    for name in bindings:
        if name not in metrics:
            raise ConfigurationError(f"binding given for metric {name!r} which is not requested")
    return resolved


@dataclass(frozen=True)
class Flag:
    ref_id: str
    tgt_id: str
    metric: str
    value: float
    threshold: float


@dataclass(frozen=True)
class PairFailure:
    set_pair: str
    ref_id: str
    tgt_id: str
    metric: str
    message: str


@dataclass
class MetricStats:
    metric: str
    groups: dict[str, SummaryStats]
    kw: KWResult | None
    pairwise: list[PairwiseResult]


@dataclass
class StatsSection:
    degrees: list[float]
    metrics: dict[str, MetricStats]  # KW suite members only; never FAD
    fad_per_degree: dict[str, float] | None = None
    fad_experimental: bool = False


@dataclass
class EvaluationReport:
    per_pair: list[PairScore]
    set_pairs: dict[str, list[int]]  # set-pair label -> indices into per_pair
    global_stats: dict[str, dict[str, SummaryStats]]  # set-pair -> metric -> stats
    global_fad: dict[str, float] = field(default_factory=dict)
    flags: list[Flag] = field(default_factory=list)
    failures: list[PairFailure] = field(default_factory=list)
    stats: StatsSection | None = None
    provenance: dict[str, Any] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# feature extraction
# ---------------------------------------------------------------------------

_WORKER_STATE: dict[str, Any] = {}


def _init_worker(state: dict) -> None:
    _WORKER_STATE.clear()
    _WORKER_STATE.update(state)


def _needed_families(metrics: tuple[str, ...], bindings: dict[str, str], want_frames: bool) -> set[tuple[str, str]]:
    needs: set[tuple[str, str]] = set()
    for name in metrics:
        info = METRICS[name]
        binding = bindings[name]
        if info.family == "chroma":
            needs.add(("chroma", BUILTIN_MODEL_ID))
        elif info.family == "probs":
            needs.add(("probs", binding))
        elif info.per_pair:
            needs.add(("vector", binding))
        if name == "fad" and want_frames:
            needs.add(("frames", binding))
    return needs


def _features_from_clip(clip: AudioClip, needs: set[tuple[str, str]], hpcp: HpcpParams) -> dict:
    foreign = [b for _, b in needs if b != BUILTIN_MODEL_ID]
    if foreign:
        raise MissingEntryError(
            f"track {clip.id!r}: model {foreign[0]!r} features requested but only audio is available"
        )
    families = {f for f, _ in needs}
    analysis = analyze_track(
        clip,
        hpcp,
        want_embedding=bool(families & {"vector", "frames"}),
        want_distribution="probs" in families,
    )
    feats: dict[tuple[str, str], Any] = {}
    if "chroma" in families:
        feats[("chroma", BUILTIN_MODEL_ID)] = {
            "frames": analysis.chroma.frames,
            "frame_rate": analysis.chroma.frame_rate,
        }
    if "probs" in families:
        feats[("probs", BUILTIN_MODEL_ID)] = analysis.distribution
    if "vector" in families:
        feats[("vector", BUILTIN_MODEL_ID)] = aggregate_track(analysis.embedding)
    if "frames" in families:
        feats[("frames", BUILTIN_MODEL_ID)] = analysis.embedding
    return feats


def _features_from_track(track: TrackRef, needs: set[tuple[str, str]], rate: int, hpcp: HpcpParams) -> dict:
    builtin_needs = {(f, b) for f, b in needs if b == BUILTIN_MODEL_ID}
    feats: dict[tuple[str, str], Any] = {}
    if builtin_needs:
        if track.audio is None:
            raise MissingEntryError(f"track {track.id!r}: builtin features need an audio path")
        clip = load_wav(track.audio, target_rate=rate, clip_id=track.id)
        feats.update(_features_from_clip(clip, builtin_needs, hpcp))

    emb_cache: dict[str, np.ndarray] = {}
    for family, binding in sorted(needs - builtin_needs):
        if family in ("vector", "frames"):
            if binding not in emb_cache:
                path = track.embeddings.get(binding)
                if path is None:
                    raise MissingEntryError(f"track {track.id!r}: no embeddings for model {binding!r}")
                emb_cache[binding] = read_embedding_file(path)
            matrix = emb_cache[binding]
            feats[(family, binding)] = aggregate_track(matrix) if family == "vector" else matrix
        elif family == "probs":
            path = track.probs.get(binding)
            if path is None:
                raise MissingEntryError(f"track {track.id!r}: no probabilities for model {binding!r}")
            rows = read_prob_file(path)
            mean = rows.mean(axis=0)
            feats[(family, binding)] = mean / mean.sum()
    return feats


def _extract_task(args) -> tuple[str, str, dict | None, str | None]:
    (role, key), payload = args
    needs = _WORKER_STATE["needs"]
    hpcp = _WORKER_STATE["hpcp"]
    rate = _WORKER_STATE["rate"]
    try:
        if isinstance(payload, Exception):
            raise payload
        if isinstance(payload, TrackRef):
            feats = _features_from_track(payload, needs, rate, hpcp)
        else:
            feats = _features_from_clip(payload, needs, hpcp)
        return role, key, feats, None
    except (MiraError, OSError, ValueError) as exc:
        return role, key, None, f"{type(exc).__name__}: {exc}"


# ---------------------------------------------------------------------------
# pair scoring
# ---------------------------------------------------------------------------


def _score_pair_metric(metric: str, binding: str, ref_feats: dict, tgt_feats: dict, coverid_params: CoverIdParams) -> float:
    info = METRICS[metric]
    if info.family == "chroma":
        r = ref_feats[("chroma", BUILTIN_MODEL_ID)]
        t = tgt_feats[("chroma", BUILTIN_MODEL_ID)]
        return coverid_distance_from_chroma(
            Chromagram(r["frames"], r["frame_rate"]),
            Chromagram(t["frames"], t["frame_rate"]),
            coverid_params,
        )
    if info.family == "probs":
        return symmetric_kl(
            ProbDistribution(ref_feats[("probs", binding)]),
            ProbDistribution(tgt_feats[("probs", binding)]),
            KL_EPS,
        )
    return cosine_score(ref_feats[("vector", binding)], tgt_feats[("vector", binding)])


def _score_chunk(pairs: list[tuple[str, str, str, str, str]]) -> list[tuple]:
    features = _WORKER_STATE["features"]
    plan = _WORKER_STATE["plan"]
    coverid_params = _WORKER_STATE["coverid"]
    out = []
    for set_pair, ref_role, ref_id, tgt_role, tgt_id in pairs:
        ref_feats, ref_err = features[(ref_role, ref_id)]
        tgt_feats, tgt_err = features[(tgt_role, tgt_id)]
        for metric, binding in plan:
            err = ref_err or tgt_err
            if err is not None:
                out.append((set_pair, ref_id, tgt_id, metric, None, err))
                continue
            try:
                value = _score_pair_metric(metric, binding, ref_feats, tgt_feats, coverid_params)
                out.append((set_pair, ref_id, tgt_id, metric, float(value), None))
            except (MiraError, ValueError) as exc:
                out.append((set_pair, ref_id, tgt_id, metric, None, f"{type(exc).__name__}: {exc}"))
    return out


def _run_tasks(fn, tasks, workers: int, state: dict):
    """Map fn over tasks, inline or on a bounded process pool."""
    if workers <= 1 or len(tasks) <= 1:
        _init_worker(state)
        return [fn(t) for t in tasks]
    with concurrent.futures.ProcessPoolExecutor(
        max_workers=workers, initializer=_init_worker, initargs=(state,)
    ) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (workers * 4))))


def _run_streamed_tasks(fn, keys, payload_fn, workers: int, state: dict):
    """Map fn over (key, payload_fn(key)), materializing payloads just in
    time. Bounded in-flight window keeps memory flat even when payloads are
    whole audio clips rebuilt on demand."""
    if workers <= 1 or len(keys) <= 1:
        _init_worker(state)
        return [fn((key, payload_fn(key))) for key in keys]
    results = {}
    with concurrent.futures.ProcessPoolExecutor(
        max_workers=workers, initializer=_init_worker, initargs=(state,)
    ) as pool:
        pending: dict = {}
        key_iter = iter(keys)

        def submit_one() -> bool:
            try:
                key = next(key_iter)
            except StopIteration:
                return False
            pending[pool.submit(fn, (key, payload_fn(key)))] = key
            return True

        for _ in range(workers * 2):
            if not submit_one():
                break
        while pending:
            done, _ = concurrent.futures.wait(pending, return_when=concurrent.futures.FIRST_COMPLETED)
            for future in done:
                key = pending.pop(future)
                results[key] = future.result()
                submit_one()
    return [results[key] for key in keys]


def _extract_features(
    entries: list[tuple[str, str]],
    payload_fn,
    needs: set[tuple[str, str]],
    config: EvaluationConfig,
) -> dict[tuple[str, str], tuple[dict | None, str | None]]:
    def safe_payload(entry):
        try:
            return payload_fn(entry)
        except (MiraError, OSError, ValueError) as exc:  # surfaces as a per-track failure
            return exc

    state = {"needs": needs, "hpcp": config.hpcp, "rate": config.engine_rate}
    results = _run_streamed_tasks(_extract_task, entries, safe_payload, config.workers, state)
    return {(role, key): (feats, err) for role, key, feats, err in results}


def _score_pairs(
    pair_list: list[tuple[str, str, str, str, str]],
    features: dict,
    config: EvaluationConfig,
    plan: list[tuple[str, str]],
) -> list[tuple]:
    if not pair_list:
        return []
    n_chunks = max(1, min(len(pair_list), config.workers * 4))
    size = -(-len(pair_list) // n_chunks)
    chunks = [pair_list[i : i + size] for i in range(0, len(pair_list), size)]
    state = {"features": features, "plan": plan, "coverid": config.coverid}
    results = _run_tasks(_score_chunk, chunks, config.workers, state)
    flat = [row for chunk in results for row in chunk]
    flat.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    return flat


def _ordered_pairs(set_pair: str, ref_role: str, ref_ids: list[str], tgt_role: str, tgt_ids: list[str], include_self: bool):
    return [
        (set_pair, ref_role, r, tgt_role, t)
        for r in ref_ids
        for t in tgt_ids
        if include_self or r != t
    ]


def _provenance(config: EvaluationConfig, bindings: dict[str, str]) -> dict[str, Any]:
    return {
        "engine_version": ENGINE_VERSION,
        "config": {
            "reference_manifest": str(config.reference_manifest),
            "target_manifest": str(config.target_manifest),
            "control_manifest": str(config.control_manifest) if config.control_manifest else None,
            "metrics": list(config.metrics),
            "bindings": dict(sorted(bindings.items())),
            "thresholds": {k: float(v) for k, v in sorted(config.thresholds.items())},
            "include_self_pairs": config.include_self_pairs,
            "seed": config.seed,
            "engine_rate": config.engine_rate,
        },
        "metric_params": {
            "hpcp": asdict(config.hpcp),
            "coverid": asdict(config.coverid),
            "kl_eps": KL_EPS,
        },
        "fad_experimental": "fad" in config.metrics,
    }


def evaluate_pairwise(config: EvaluationConfig) -> EvaluationReport:
    """Score every (reference, target) pair under every requested per-pair
    metric; FAD, when requested, is attached as a set-level value.

    Unreadable tracks degrade to per-pair failure entries; the run aborts
    only when more than 10% of pair evaluations fail.
    """
    bindings = resolve_bindings(config.metrics, config.bindings)
    per_pair_metrics = [m for m in config.metrics if METRICS[m].per_pair]
    plan = [(m, bindings[m]) for m in per_pair_metrics]

    ref_set = load_set_manifest(config.reference_manifest)
    same_manifest = Path(config.target_manifest).resolve() == Path(config.reference_manifest).resolve()
    tgt_set = ref_set if same_manifest else load_set_manifest(config.target_manifest)
    ctl_set = load_set_manifest(config.control_manifest) if config.control_manifest else None

    needs = _needed_families(config.metrics, bindings, want_frames="fad" in config.metrics)
    track_index: dict[tuple[str, str], TrackRef] = {
        ("reference", t.id): t for t in ref_set.tracks
    }
    if not same_manifest:
        track_index.update({("target", t.id): t for t in tgt_set.tracks})
    if ctl_set is not None:
        track_index.update({("control", t.id): t for t in ctl_set.tracks})
    features = _extract_features(list(track_index), track_index.__getitem__, needs, config)
    if same_manifest:
        for tid in ref_set.ids():
            features[("target", tid)] = features[("reference", tid)]

    pair_list = _ordered_pairs(
        REF_VS_TGT, "reference", ref_set.ids(), "target", tgt_set.ids(), config.include_self_pairs
    )
    if ctl_set is not None:
        pair_list += _ordered_pairs(
            REF_VS_CTL, "reference", ref_set.ids(), "control", ctl_set.ids(), config.include_self_pairs
        )

    rows = _score_pairs(pair_list, features, config, plan)

    per_pair: list[PairScore] = []
    set_pairs: dict[str, list[int]] = {}
    failures: list[PairFailure] = []
    for set_pair, ref_id, tgt_id, metric, value, err in rows:
        if err is not None:
            failures.append(PairFailure(set_pair, ref_id, tgt_id, metric, err))
            continue
        set_pairs.setdefault(set_pair, []).append(len(per_pair))
        per_pair.append(PairScore(ref_id, tgt_id, metric, value, METRICS[metric].higher_is_similar))

    total_evals = len(pair_list) * max(1, len(plan))
    if total_evals and len(failures) / total_evals > MAX_FAILURE_FRACTION:
        raise AbortedRunError(
            f"{len(failures)} of {total_evals} pair evaluations failed "
            f"(> {MAX_FAILURE_FRACTION:.0%}); first: {failures[0].message}"
        )

    global_stats: dict[str, dict[str, SummaryStats]] = {}
    for set_pair, indices in set_pairs.items():
        by_metric: dict[str, list[float]] = {}
        for idx in indices:
            score = per_pair[idx]
            by_metric.setdefault(score.metric, []).append(score.value)
        global_stats[set_pair] = {m: summarize(vals) for m, vals in sorted(by_metric.items())}

    report = EvaluationReport(
        per_pair=per_pair,
        set_pairs=set_pairs,
        global_stats=global_stats,
        failures=failures,
        provenance=_provenance(config, bindings),
    )

    if "fad" in config.metrics:
        report.global_fad = _fad_from_features(features, bindings["fad"], ref_set, tgt_set, ctl_set)

    for metric, threshold in sorted(config.thresholds.items()):
        report.flags.extend(flag_pairs(report, metric, threshold))
    return report


def _pool_frames(features: dict, role: str, ids: list[str], binding: str) -> EmbeddingSet:
    entries = {}
    for tid in ids:
        feats, err = features[(role, tid)]
        if err is None and feats is not None and ("frames", binding) in feats:
            entries[tid] = feats[("frames", binding)]
    if not entries:
        raise EmptyInputError(f"no usable embedding frames in {role!r} set for model {binding!r}")
    return EmbeddingSet(binding, entries, next(iter(entries.values())).shape[1])


def _fad_from_features(features, binding, ref_set, tgt_set, ctl_set) -> dict[str, float]:
    ref_emb = _pool_frames(features, "reference", ref_set.ids(), binding)
    out = {REF_VS_TGT: fad_score(ref_emb, _pool_frames(features, "target", tgt_set.ids(), binding))}
    if ctl_set is not None:
        out[REF_VS_CTL] = fad_score(ref_emb, _pool_frames(features, "control", ctl_set.ids(), binding))
    return out


def evaluate_fad_global(config: EvaluationConfig) -> dict[str, float]:
    """Set-level FAD per (set, set) comparison; never per-pair."""
    bindings = resolve_bindings(("fad",), {k: v for k, v in config.bindings.items() if k == "fad"})
    ref_set = load_set_manifest(config.reference_manifest)
    tgt_set = load_set_manifest(config.target_manifest)
    ctl_set = load_set_manifest(config.control_manifest) if config.control_manifest else None

    needs = {("frames", bindings["fad"])}
    track_index: dict[tuple[str, str], TrackRef] = {
        ("reference", t.id): t for t in ref_set.tracks
    }
    track_index.update({("target", t.id): t for t in tgt_set.tracks})
    if ctl_set is not None:
        track_index.update({("control", t.id): t for t in ctl_set.tracks})
    features = _extract_features(list(track_index), track_index.__getitem__, needs, config)
    return _fad_from_features(features, bindings["fad"], ref_set, tgt_set, ctl_set)


def flag_pairs(report: EvaluationReport, metric: str, threshold: float) -> list[Flag]:
    """Pairs crossing the threshold in the metric's similarity direction,
    sorted most-suspicious first."""
    info = METRICS.get(metric)
    if info is None or not any(p.metric == metric for p in report.per_pair):
        raise ConfigurationError(f"metric {metric!r} not present in this report")
    hits = [
        p
        for p in report.per_pair
        if p.metric == metric and (p.value >= threshold if info.higher_is_similar else p.value <= threshold)
    ]
    hits.sort(key=lambda p: -p.value if info.higher_is_similar else p.value)
    return [Flag(p.ref_id, p.tgt_id, metric, p.value, threshold) for p in hits]


# ---------------------------------------------------------------------------
# sensitivity experiment
# ---------------------------------------------------------------------------


@dataclass
class SensitivityOutcome:
    """Per-degree group values and statistics for one corpus run."""

    degrees: list[float]
    group_labels: list[str]  # "baseline" first, then one label per degree
    values: dict[str, dict[str, list[float]]]  # metric -> label -> values
    stats: StatsSection


def degree_label(degree: float) -> str:
    return f"{degree * 100:g}%"


def sensitivity_experiment(
    bundle: CorpusBundle,
    metrics: tuple[str, ...] = ("coverid", "builtin_cos", "kl"),
    config: EvaluationConfig | None = None,
) -> SensitivityOutcome:
    """Baseline (reference-vs-reference) against per-degree replica groups.

    Each reference song is paired only with its own replicas. Kruskal-Wallis
    runs across {baseline} + degree groups per metric, with Dunn post-hoc
    comparisons; FAD, when requested, is computed per degree on pooled
    frames and kept out of the KW suite.
    """
    config = config or EvaluationConfig(reference_manifest=Path("."), target_manifest=Path("."))
    bindings = resolve_bindings(metrics, {k: v for k, v in config.bindings.items() if k in metrics})
    per_pair_metrics = [m for m in metrics if METRICS[m].per_pair]
    plan = [(m, bindings[m]) for m in per_pair_metrics]
    degrees = list(bundle.manifest.degrees)

    by_degree: dict[float, list] = {d: [] for d in degrees}
    for spec in bundle.manifest.specs:
        by_degree[spec.proportion].append(spec)
    for d in degrees:
        if not by_degree[d]:
            raise ConfigurationError(f"corpus has no replicas for degree {degree_label(d)}")

    needs = _needed_families(tuple(metrics), bindings, want_frames="fad" in metrics)
    entries = [("reference", rid) for rid in bundle.references]
    entries += [("replica", rid) for rid in bundle.replicas]

    def payload_fn(entry):
        role, key = entry
        return bundle.references[key] if role == "reference" else bundle.replicas[key]

    features = _extract_features(entries, payload_fn, needs, config)

    ref_ids = list(bundle.references.keys())
    pair_list = _ordered_pairs("baseline", "reference", ref_ids, "reference", ref_ids, config.include_self_pairs)
    for d in degrees:
        label = degree_label(d)
        pair_list += [
            (label, "reference", spec.reference_id, "replica", spec.replica_id) for spec in by_degree[d]
        ]

    rows = _score_pairs(pair_list, features, config, plan)
    labels = ["baseline"] + [degree_label(d) for d in degrees]
    values: dict[str, dict[str, list[float]]] = {m: {lb: [] for lb in labels} for m in per_pair_metrics}
    for group, _ref_id, _tgt_id, metric, value, err in rows:
        if err is not None:
            raise MiraError(f"sensitivity pair failed ({group}, {metric}): {err}")
        values[metric][group].append(value)

    metric_stats: dict[str, MetricStats] = {}
    for metric in per_pair_metrics:
        group_values = values[metric]
        stats_by_label = {lb: summarize(vals) for lb, vals in group_values.items()}
        kw = kruskal_wallis([group_values[lb] for lb in labels]) if metric in KW_METRICS else None
        pairwise = dunn_pairwise({lb: group_values[lb] for lb in labels}) if metric in KW_METRICS else []
        metric_stats[metric] = MetricStats(metric=metric, groups=stats_by_label, kw=kw, pairwise=pairwise)

    fad_per_degree = None
    if "fad" in metrics:
        binding = bindings["fad"]
        ref_emb = _pool_frames(features, "reference", ref_ids, binding)
        fad_per_degree = {}
        for d in degrees:
            replica_ids = [spec.replica_id for spec in by_degree[d]]
            fad_per_degree[degree_label(d)] = fad_score(
                ref_emb, _pool_frames(features, "replica", replica_ids, binding)
            )

    section = StatsSection(
        degrees=degrees,
        metrics=metric_stats,
        fad_per_degree=fad_per_degree,
        fad_experimental=fad_per_degree is not None,
    )
    return SensitivityOutcome(degrees=degrees, group_labels=labels, values=values, stats=section)
