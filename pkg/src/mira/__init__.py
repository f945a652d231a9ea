"""Model-independent audio similarity engine for replication assessment.

Compares a reference set (training-data stand-in) against a target set
(generated-output stand-in) under several similarity metrics, validates
metric sensitivity with forced-replication corpora, and reports global and
per-pair distances against user-set thresholds.
"""

__version__ = "0.1.0"

from .audio_io import ENGINE_RATE, AudioClip, load_wav, resample, save_wav
from .cover import (
    CoverIdParams,
    CrossRecurrencePlot,
    coverid_distance,
    coverid_distance_from_chroma,
    cross_recurrence,
    estimate_oti,
    qmax_score,
)
from .dsp import (
    BUILTIN_MODEL_ID,
    Chromagram,
    HpcpParams,
    SpectralFrame,
    builtin_distribution,
    builtin_embedding,
    compute_hpcp,
    spectral_peaks,
    stft,
)
from .embeddings import (
    EmbeddingSet,
    PairScore,
    ProbDistribution,
    aggregate_track,
    cosine_score,
    kl_divergence,
    load_embedding_set,
    read_embedding_file,
    read_prob_file,
    symmetric_kl,
    write_embedding_file,
    write_prob_file,
)
from .evaluator import (
    EvaluationConfig,
    EvaluationReport,
    METRICS,
    SensitivityOutcome,
    evaluate_fad_global,
    evaluate_pairwise,
    flag_pairs,
    sensitivity_experiment,
)
from .fad import GaussianFit, fad_score, fit_gaussian, frechet_distance, psd_sqrt
from .manifests import (
    CorpusBundle,
    TrackSet,
    WavClipMap,
    load_corpus_bundle,
    load_set_manifest,
    write_set_manifest,
)
from .reporting import load_report, write_report
from .stats import (
    KWResult,
    PairwiseResult,
    SummaryStats,
    chi2_sf,
    dunn_pairwise,
    kruskal_wallis,
    rank_with_ties,
    summarize,
)
from .synth import (
    CorpusManifest,
    LazyReplicaMap,
    ReplicationSpec,
    build_corpus,
    make_replica,
    materialize_replica,
    plan_corpus,
    save_corpus,
)
