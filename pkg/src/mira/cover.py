"""Cover-song style composition similarity.

Pipeline: optimal transposition index over global chroma, binary cross
recurrence plot from mutual nearest neighbors, then a local-alignment
dynamic program (Qmax) whose best path length is turned into a distance.
Lower distance means more shared composition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .audio_io import AudioClip
from .dsp import Chromagram, HpcpParams, compute_hpcp
from .errors import EmptyInputError

_SCORE_EPS = 1e-9


@dataclass(frozen=True)
class CoverIdParams:
    kappa: float = 0.095
    gap_onset: float = 0.5
    gap_extend: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.kappa < 1.0:
            raise ValueError("kappa must be in (0, 1)")
        if self.gap_onset < 0 or self.gap_extend < 0:
            raise ValueError("gap penalties must be >= 0")


@dataclass(frozen=True, eq=False)
class CrossRecurrencePlot:
    matrix: np.ndarray  # (F_ref, F_tgt) uint8, entries 0/1


def _global_chroma(chroma: Chromagram) -> np.ndarray:
    g = chroma.frames.mean(axis=0)
    peak = g.max()
    return g / peak if peak > 0 else g


def estimate_oti(ref: Chromagram, tgt: Chromagram) -> int:
    """Circular shift k (0..11) best aligning tgt's key to ref's.

    Convention: shift k means target bin (b+k) mod 12 aligns with reference
    bin b. Ties resolve to the smallest k.
    """
    if len(ref) == 0 or len(tgt) == 0:
        raise EmptyInputError("cannot estimate transposition of an empty chromagram")
    g_ref = _global_chroma(ref)
    g_tgt = _global_chroma(tgt)
    scores = [float(np.dot(g_ref, np.roll(g_tgt, -k))) for k in range(12)]
    return int(np.argmax(scores))


def _knn_mask_rows(dist: np.ndarray, k: int) -> np.ndarray:
    """Boolean mask of the k smallest entries per row, ties to lower column index."""
    n = dist.shape[1]
    if k >= n:
        return np.ones(dist.shape, dtype=bool)
    kth = np.partition(dist, k - 1, axis=1)[:, k - 1 : k]
    smaller = dist < kth
    tied = dist == kth
    need = k - smaller.sum(axis=1, keepdims=True)
    mask = smaller | (tied & (np.cumsum(tied, axis=1) <= need))
    return mask


def cross_recurrence(
    ref: Chromagram, tgt: Chromagram, oti: int, params: CoverIdParams = CoverIdParams()
) -> CrossRecurrencePlot:
    """Binary mutual-nearest-neighbor plot between transposed chroma frames.

    Cell (i, j) is set iff j is among the kappa*F_tgt nearest target frames
    of reference frame i AND i is among the kappa*F_ref nearest reference
    frames of target frame j (Euclidean distance on 12-bin chroma).
    """
    if len(ref) == 0 or len(tgt) == 0:
        raise EmptyInputError("cannot build a recurrence plot from an empty chromagram")
    a = ref.frames.astype(np.float32)
    b = np.roll(tgt.frames, -oti, axis=1).astype(np.float32)
    # squared distances via GEMM; monotone in distance, so ranks are identical
    d = (a * a).sum(axis=1)[:, None] + (b * b).sum(axis=1)[None, :] - 2.0 * (a @ b.T)

    k_row = max(1, round(params.kappa * len(tgt)))
    k_col = max(1, round(params.kappa * len(ref)))
    mask = _knn_mask_rows(d, k_row) & _knn_mask_rows(d.T, k_col).T
    return CrossRecurrencePlot(mask.astype(np.uint8))


@njit(cache=True)
def _qmax(crp: np.ndarray, gap_onset: float, gap_extend: float) -> float:
    nx, ny = crp.shape
    q = np.zeros((nx, ny), dtype=np.float64)
    best = 0.0
    for i in range(nx):
        for j in range(ny):
            if crp[i, j]:
                m = 0.0
                if i >= 1 and j >= 1 and q[i - 1, j - 1] > m:
                    m = q[i - 1, j - 1]
                if i >= 2 and j >= 1 and q[i - 2, j - 1] > m:
                    m = q[i - 2, j - 1]
                if i >= 1 and j >= 2 and q[i - 1, j - 2] > m:
                    m = q[i - 1, j - 2]
                q[i, j] = m + 1.0
            else:
                m = 0.0
                if i >= 1 and j >= 1:
                    v = q[i - 1, j - 1] - (gap_onset if crp[i - 1, j - 1] else gap_extend)
                    if v > m:
                        m = v
                if i >= 2 and j >= 1:
                    v = q[i - 2, j - 1] - (gap_onset if crp[i - 2, j - 1] else gap_extend)
                    if v > m:
                        m = v
                if i >= 1 and j >= 2:
                    v = q[i - 1, j - 2] - (gap_onset if crp[i - 1, j - 2] else gap_extend)
                    if v > m:
                        m = v
                q[i, j] = m
            if q[i, j] > best:
                best = q[i, j]
    return best


def qmax_score(crp: CrossRecurrencePlot, params: CoverIdParams = CoverIdParams()) -> float:
    """Best cumulative local-alignment path value over the recurrence plot.

    Matches extend a path by 1 (predecessors (i-1,j-1), (i-2,j-1), (i-1,j-2),
    tolerating tempo deviation); mismatches pay the onset penalty when the
    predecessor cell was a match and the extension penalty otherwise, floored
    at zero so alignments can restart anywhere.
    """
    matrix = crp.matrix
    if matrix.size == 0:
        raise EmptyInputError("empty cross recurrence plot")
    return float(_qmax(np.ascontiguousarray(matrix, dtype=np.uint8), params.gap_onset, params.gap_extend))


def coverid_distance_from_chroma(
    ref: Chromagram, tgt: Chromagram, params: CoverIdParams = CoverIdParams()
) -> float:
    """Distance between precomputed chromagrams (cache-friendly entry point)."""
    oti = estimate_oti(ref, tgt)
    crp = cross_recurrence(ref, tgt, oti, params)
    score = qmax_score(crp, params)
    return float(np.sqrt(len(tgt)) / (score + _SCORE_EPS))


def coverid_distance(
    ref: AudioClip,
    tgt: AudioClip,
    params: CoverIdParams = CoverIdParams(),
    hpcp: HpcpParams = HpcpParams(),
) -> float:
    """Composition distance between two clips; lower means more similar.

    Normalized sqrt(F_tgt) / qmax, so the value grows without bound for
    unrelated material and the epsilon guard keeps zero-score pairs finite.
    """
    ref_chroma = compute_hpcp(ref, hpcp)
    tgt_chroma = compute_hpcp(tgt, hpcp)
    if len(ref_chroma) < 2 or len(tgt_chroma) < 2:
        raise EmptyInputError("need at least 2 chroma frames per clip")
    return coverid_distance_from_chroma(ref_chroma, tgt_chroma, params)
