"""Set-level Fréchet distance between embedding distributions.

Retained even though it performed poorly as a replication signal in-house:
the evaluator reports it under an "experimental" marker so the negative
finding stays reproducible.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingSet
from .errors import (
    ConfigurationError,
    DimensionError,
    EmptyInputError,
    InsufficientDataError,
    InvalidInputError,
    LowSampleWarning,
)

_SYMMETRY_TOL = 1e-6
_JITTER = 1e-10


@dataclass(frozen=True, eq=False)
class GaussianFit:
    mean: np.ndarray  # (D,)
    cov: np.ndarray  # (D, D), symmetric PSD


def fit_gaussian(embeddings: np.ndarray) -> GaussianFit:
    """Sample mean and unbiased covariance over pooled frame vectors.

    The covariance is symmetrized and eigenvalue-clamped at zero. Fitting
    with fewer vectors than dimensions succeeds but warns.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionError("expected a (vectors, D) matrix")
    n, d = x.shape
    if n < 2:
        raise InsufficientDataError(f"need >= 2 vectors to fit a Gaussian, got {n}")
    if n < d:
        warnings.warn(f"fitting a {d}-D Gaussian from only {n} vectors", LowSampleWarning, stacklevel=2)
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (n - 1)
    cov = 0.5 * (cov + cov.T)
    eigvals, eigvecs = np.linalg.eigh(cov)
    eigvals = np.clip(eigvals, 0.0, None)
    cov = (eigvecs * eigvals) @ eigvecs.T
    return GaussianFit(mean, 0.5 * (cov + cov.T))


def psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition with clamping."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError("expected a square matrix")
    if float(np.abs(m - m.T).max(initial=0.0)) > _SYMMETRY_TOL:
        raise InvalidInputError("matrix is not symmetric within 1e-6")
    eigvals, eigvecs = np.linalg.eigh(0.5 * (m + m.T))
    root = (eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))) @ eigvecs.T
    return 0.5 * (root + root.T)


def frechet_distance(g1: GaussianFit, g2: GaussianFit) -> float:
    """||mu1-mu2||^2 + Tr(C1 + C2 - 2 (C1^1/2 C2 C1^1/2)^1/2).

    Uses the stabilized symmetric inner square root rather than sqrtm of the
    raw product, re-trying with a small diagonal jitter when the inner
    matrix is numerically unusable.
    """
    if g1.mean.shape != g2.mean.shape:
        raise DimensionError(f"Gaussian dims differ: {g1.mean.shape} vs {g2.mean.shape}")
    diff = g1.mean - g2.mean
    s1 = psd_sqrt(g1.cov)
    inner = s1 @ g2.cov @ s1
    inner = 0.5 * (inner + inner.T)
    try:
        cross = psd_sqrt(inner)
    except InvalidInputError:
        jitter = _JITTER * np.eye(len(diff))
        cross = psd_sqrt(psd_sqrt(g1.cov + jitter) @ (g2.cov + jitter) @ psd_sqrt(g1.cov + jitter))
    value = float(diff @ diff + np.trace(g1.cov) + np.trace(g2.cov) - 2.0 * np.trace(cross))
    return max(0.0, value)


def fad_score(ref_set: EmbeddingSet, tgt_set: EmbeddingSet) -> float:
    """Fréchet distance between the pooled frame-vector distributions of two
    sets sharing one embedding model. Set-level only; no per-pair variant."""
    if ref_set.model_id != tgt_set.model_id:
        raise ConfigurationError(
            f"embedding models differ: {ref_set.model_id!r} vs {tgt_set.model_id!r}"
        )
    if not ref_set.entries or not tgt_set.entries:
        raise EmptyInputError("both embedding sets must be non-empty")
    ref_pool = np.vstack(list(ref_set.entries.values()))
    tgt_pool = np.vstack(list(tgt_set.entries.values()))
    return frechet_distance(fit_gaussian(ref_pool), fit_gaussian(tgt_pool))
