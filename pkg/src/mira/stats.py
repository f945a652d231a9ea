"""Nonparametric sensitivity statistics: Kruskal-Wallis with tie correction,
chi-square tail probabilities, and Dunn post-hoc pairwise comparisons with
Holm adjustment."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc
from scipy.stats import rankdata

from .errors import ConfigurationError, EmptyInputError


@dataclass(frozen=True)
class KWResult:
    H: float
    df: int
    p_value: float
    tie_correction: float


@dataclass(frozen=True)
class PairwiseResult:
    group_a: str
    group_b: str
    z: float
    p_adjusted: float


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    std: float
    n: int


def rank_with_ties(values) -> tuple[np.ndarray, list[int]]:
    """Ranks 1..N with average ranks for ties, plus the tie group sizes (>1)."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise EmptyInputError("cannot rank an empty sequence")
    ranks = rankdata(values, method="average")
    _, counts = np.unique(values, return_counts=True)
    return ranks, [int(c) for c in counts if c > 1]


def chi2_sf(x: float, df: int) -> float:
    """Upper-tail chi-square probability Q(df/2, x/2)."""
    if x < 0:
        raise ValueError("statistic must be non-negative")
    return float(gammaincc(df / 2.0, x / 2.0))


def kruskal_wallis(groups: list) -> KWResult:
    """Rank-based k-group test; H is tie-corrected, p from the chi-square tail.

    All-identical pooled values are degenerate, not an error: H=0, p=1.
    """
    if len(groups) < 2:
        raise ConfigurationError("Kruskal-Wallis needs at least 2 groups")
    arrays = [np.asarray(g, dtype=np.float64) for g in groups]
    if any(a.size == 0 for a in arrays):
        raise EmptyInputError("every group needs at least one value")

    pooled = np.concatenate(arrays)
    n_total = pooled.size
    df = len(arrays) - 1
    ranks, tie_sizes = rank_with_ties(pooled)

    correction = 1.0 - sum(t**3 - t for t in tie_sizes) / (n_total**3 - n_total)
    if correction <= 0.0:  # every value identical
        return KWResult(H=0.0, df=df, p_value=1.0, tie_correction=correction if correction > 0 else 1.0)

    h = 0.0
    offset = 0
    for a in arrays:
        r = ranks[offset : offset + a.size]
        h += r.sum() ** 2 / a.size
        offset += a.size
    h = (12.0 / (n_total * (n_total + 1)) * h - 3.0 * (n_total + 1)) / correction
    h = max(0.0, h)
    return KWResult(H=h, df=df, p_value=chi2_sf(h, df), tie_correction=correction)


def _holm(raw: list[float]) -> list[float]:
    m = len(raw)
    order = sorted(range(m), key=lambda i: raw[i])
    adjusted = [0.0] * m
    running = 0.0
    for rank, idx in enumerate(order):
        running = max(running, min(1.0, (m - rank) * raw[idx]))
        adjusted[idx] = running
    return adjusted


def dunn_pairwise(groups: dict[str, list], correction: str = "holm") -> list[PairwiseResult]:
    """Dunn z-statistics on pooled ranks with tie correction.

    Two-sided p-values are Holm-adjusted by default ("none" disables).
    """
    if len(groups) < 2:
        raise ConfigurationError("Dunn comparison needs at least 2 groups")
    if correction not in ("holm", "none"):
        raise ConfigurationError(f"unknown correction {correction!r}")
    labels = list(groups.keys())
    arrays = [np.asarray(groups[k], dtype=np.float64) for k in labels]
    if any(a.size == 0 for a in arrays):
        raise EmptyInputError("every group needs at least one value")

    pooled = np.concatenate(arrays)
    n_total = pooled.size
    ranks, tie_sizes = rank_with_ties(pooled)
    tie_sum = sum(t**3 - t for t in tie_sizes)

    mean_ranks = {}
    sizes = {}
    offset = 0
    for label, a in zip(labels, arrays):
        mean_ranks[label] = float(ranks[offset : offset + a.size].mean())
        sizes[label] = a.size
        offset += a.size

    base_var = n_total * (n_total + 1) / 12.0 - tie_sum / (12.0 * (n_total - 1)) if n_total > 1 else 0.0
    pairs = [(labels[i], labels[j]) for i in range(len(labels)) for j in range(i + 1, len(labels))]
    zs, raw_ps = [], []
    for a, b in pairs:
        var = base_var * (1.0 / sizes[a] + 1.0 / sizes[b])
        z = (mean_ranks[a] - mean_ranks[b]) / math.sqrt(var) if var > 0 else 0.0
        zs.append(z)
        raw_ps.append(math.erfc(abs(z) / math.sqrt(2.0)))

    adjusted = _holm(raw_ps) if correction == "holm" else [min(1.0, p) for p in raw_ps]
    return [
        PairwiseResult(group_a=a, group_b=b, z=z, p_adjusted=p)
        for (a, b), z, p in zip(pairs, zs, adjusted)
    ]


def summarize(values) -> SummaryStats:
    """Mean and population standard deviation (divisor n)."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise EmptyInputError("cannot summarize an empty sequence")
    return SummaryStats(mean=float(arr.mean()), std=float(arr.std(ddof=0)), n=int(arr.size))
