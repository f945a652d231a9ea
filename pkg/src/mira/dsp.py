"""Spectral primitives: STFT, peak picking, HPCP chroma, built-in embedding.

The built-in 16-dimensional embedding (mean chroma + log energy + centroid,
rolloff, flatness) exists so the cosine/KL/FAD machinery runs with no neural
checkpoints. It is a self-contained stand-in, not a claim-equivalent
substitute for any pretrained model, and reports always label it "builtin".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio_io import AudioClip
from .errors import EmptyInputError

BUILTIN_MODEL_ID = "builtin"
BUILTIN_EMBEDDING_DIM = 16
CHROMA_BINS = 12

# Pitch class indices with C=0; the 440 Hz reference lands on A.
_A4_CLASS = 9
_A4_HZ = 440.0
_LOG_ENERGY_FLOOR = -10.0
_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class SpectralFrame:
    magnitudes: np.ndarray  # length frame_size/2 + 1, non-negative
    bin_hz: float


@dataclass(frozen=True, eq=False)
class Chromagram:
    """Per-frame 12-bin pitch class profiles, each frame max-normalized."""

    frames: np.ndarray  # (F, 12), entries in [0, 1]
    frame_rate: float

    def __len__(self) -> int:
        return len(self.frames)


@dataclass(frozen=True)
class HpcpParams:
    frame_size: int = 4096
    hop: int = 2048
    min_freq: float = 40.0
    max_freq: float = 5000.0
    n_harmonics: int = 8
    peak_threshold: float = 1e-5
    max_peaks: int = 100
    window_semitones: float = 4.0 / 3.0


def _stft_magnitudes(samples: np.ndarray, rate: int, frame_size: int, hop: int) -> tuple[np.ndarray, float]:
    if frame_size & (frame_size - 1):
        raise ValueError("frame_size must be a power of two")
    if hop > frame_size or hop <= 0:
        raise ValueError("hop must be in (0, frame_size]")
    if len(samples) < frame_size:
        raise EmptyInputError(f"clip of {len(samples)} samples is shorter than one {frame_size}-sample frame")
    frames = np.lib.stride_tricks.sliding_window_view(samples, frame_size)[::hop]
    window = np.hanning(frame_size)
    mags = np.abs(np.fft.rfft(frames * window, axis=1))
    return mags, rate / frame_size


def stft(clip: AudioClip, frame_size: int = 4096, hop: int = 2048) -> list[SpectralFrame]:
    """Hann-windowed magnitude spectra; floor((N-frame_size)/hop)+1 frames."""
    mags, bin_hz = _stft_magnitudes(clip.samples, clip.sample_rate, frame_size, hop)
    return [SpectralFrame(row, bin_hz) for row in mags]


def _peak_candidates(mags: np.ndarray, min_mag: float, lo_bin: int = 1, hi_bin: int | None = None):
    """Row/column indices of strict local maxima above threshold, all frames
    at once; the search can be limited to a bin band."""
    hi_bin = mags.shape[1] - 1 if hi_bin is None else min(hi_bin, mags.shape[1] - 1)
    lo_bin = max(1, lo_bin)
    band = mags[:, lo_bin - 1 : hi_bin + 1]
    interior = band[:, 1:-1]
    mask = (interior > band[:, :-2]) & (interior > band[:, 2:]) & (interior >= min_mag)
    rows, cols = np.nonzero(mask)
    return rows, cols + lo_bin


def _interpolate_peaks(mags: np.ndarray, rows: np.ndarray, cols: np.ndarray, bin_hz: float):
    alpha = mags[rows, cols - 1]
    beta = mags[rows, cols]
    gamma = mags[rows, cols + 1]
    denom = alpha - 2.0 * beta + gamma
    delta = np.where(np.abs(denom) > _EPS, 0.5 * (alpha - gamma) / np.where(denom == 0, 1.0, denom), 0.0)
    delta = np.clip(delta, -0.5, 0.5)
    freqs = (cols + delta) * bin_hz
    heights = beta - 0.25 * (alpha - gamma) * delta
    return freqs, heights


def _top_peaks_per_frame(rows, freqs, heights, max_peaks):
    """Keep at most max_peaks per frame, by descending height."""
    order = np.lexsort((-heights, rows))
    rows, freqs, heights = rows[order], freqs[order], heights[order]
    if len(rows):
        starts = np.flatnonzero(np.r_[True, rows[1:] != rows[:-1]])
        counts = np.diff(np.r_[starts, len(rows)])
        rank = np.arange(len(rows)) - np.repeat(starts, counts)
        keep = rank < max_peaks
        rows, freqs, heights = rows[keep], freqs[keep], heights[keep]
    return rows, freqs, heights


def spectral_peaks(frame: SpectralFrame, max_peaks: int = 100, min_mag: float = 1e-5) -> list[tuple[float, float]]:
    """Local spectral maxima with parabolic frequency interpolation.

    Returns (frequency Hz, magnitude) pairs sorted by magnitude descending,
    at most max_peaks of them.
    """
    mags = frame.magnitudes[None, :]
    rows, cols = _peak_candidates(mags, min_mag)
    freqs, heights = _interpolate_peaks(mags, rows, cols, frame.bin_hz)
    order = np.argsort(-heights, kind="stable")[:max_peaks]
    return [(float(freqs[i]), float(heights[i])) for i in order]


def _hpcp_from_mags(mags: np.ndarray, bin_hz: float, params: HpcpParams) -> np.ndarray:
    n_frames = mags.shape[0]
    lo_bin = int(np.floor(params.min_freq / bin_hz))
    hi_bin = int(np.ceil(params.max_freq / bin_hz)) + 1
    rows, cols = _peak_candidates(mags, params.peak_threshold, lo_bin, hi_bin)
    freqs, heights = _interpolate_peaks(mags, rows, cols, bin_hz)
    in_band = (freqs >= params.min_freq) & (freqs <= params.max_freq)
    rows, freqs, heights = rows[in_band], freqs[in_band], heights[in_band]
    rows, freqs, heights = _top_peaks_per_frame(rows, freqs, heights, params.max_peaks)

    chroma = np.zeros(n_frames * CHROMA_BINS)
    if len(rows):
        energies = heights**2
        base_class = _A4_CLASS + CHROMA_BINS * np.log2(freqs / _A4_HZ)
        w = params.window_semitones
        # only bins within +-w semitones get weight; 2*n_off+1 candidates suffice
        n_off = int(np.floor(w + 0.5))
        offsets = np.arange(-n_off, n_off + 1)
        for k in range(1, params.n_harmonics + 1):
            pitch_class = (base_class - CHROMA_BINS * np.log2(k)) % CHROMA_BINS
            nearest = np.round(pitch_class)
            for off in offsets:
                target = nearest + off
                dist = pitch_class - target
                weight = np.cos((np.pi / 2) * (dist / w)) ** 2
                weight[np.abs(dist) > w] = 0.0
                flat = rows * CHROMA_BINS + (target.astype(np.int64) % CHROMA_BINS)
                chroma += np.bincount(flat, weights=energies / k * weight, minlength=chroma.size)
    chroma = chroma.reshape(n_frames, CHROMA_BINS)

    peak_per_frame = chroma.max(axis=1)
    nonsilent = peak_per_frame > 0
    chroma[nonsilent] /= peak_per_frame[nonsilent, None]
    return chroma


def compute_hpcp(clip: AudioClip, params: HpcpParams = HpcpParams()) -> Chromagram:
    """Harmonic pitch class profile chromagram.

    Each spectral peak inside [min_freq, max_freq] contributes cos^2-weighted
    energy (squared magnitude) to the pitch classes of its first n_harmonics
    subharmonics f/k, weighted 1/k, within +-window_semitones of the class.
    Frames are max-normalized; silent frames stay all-zero.
    """
    mags, bin_hz = _stft_magnitudes(clip.samples, clip.sample_rate, params.frame_size, params.hop)
    return Chromagram(_hpcp_from_mags(mags, bin_hz, params), clip.sample_rate / params.hop)


def _band_features(power: np.ndarray, bin_hz: float, nyquist: float) -> tuple[float, float, float]:
    """(centroid, rolloff, flatness), the Hz features normalized by Nyquist."""
    total = power.sum()
    freqs = np.arange(len(power)) * bin_hz
    centroid = float((freqs * power).sum() / (total + _EPS)) / nyquist
    cumulative = np.cumsum(power)
    rolloff_idx = int(np.searchsorted(cumulative, 0.85 * total))
    rolloff = float(min(rolloff_idx, len(power) - 1) * bin_hz) / nyquist
    flatness = float(np.exp(np.mean(np.log(power + _EPS))) / (power.mean() + _EPS))
    return centroid, rolloff, flatness


def _embedding_from_analysis(
    clip: AudioClip, chroma: np.ndarray, mags: np.ndarray, bin_hz: float, params: HpcpParams
) -> np.ndarray:
    rate = clip.sample_rate
    n_windows = len(clip.samples) // rate
    if n_windows == 0:
        return np.zeros((0, BUILTIN_EMBEDDING_DIM))

    centers = np.arange(mags.shape[0]) * params.hop + params.frame_size // 2
    window_of_frame = np.minimum(centers // rate, n_windows - 1)
    nyquist = rate / 2.0

    out = np.zeros((n_windows, BUILTIN_EMBEDDING_DIM))
    for w in range(n_windows):
        seg = clip.samples[w * rate : (w + 1) * rate]
        frame_sel = window_of_frame == w
        if frame_sel.any():
            out[w, :CHROMA_BINS] = chroma[frame_sel].mean(axis=0)
            power = (mags[frame_sel] ** 2).mean(axis=0)
        else:
            power = np.zeros(mags.shape[1])
        energy = float(np.mean(seg**2))
        out[w, 12] = max(_LOG_ENERGY_FLOOR, np.log(energy)) if energy > 0 else _LOG_ENERGY_FLOOR
        out[w, 13], out[w, 14], out[w, 15] = _band_features(power, bin_hz, nyquist)
    return out


def _distribution_from_chroma(chroma: np.ndarray) -> np.ndarray:
    mean = chroma.mean(axis=0) if len(chroma) else np.zeros(CHROMA_BINS)
    total = mean.sum()
    if total <= 0:
        return np.full(CHROMA_BINS, 1.0 / CHROMA_BINS)
    return mean / total


def builtin_embedding(clip: AudioClip, params: HpcpParams = HpcpParams()) -> np.ndarray:
    """Deterministic per-second feature rows: 12 mean chroma + log energy +
    centroid + rolloff + flatness (D=16). A 30 s clip yields 30 rows."""
    if len(clip.samples) // clip.sample_rate == 0:
        return np.zeros((0, BUILTIN_EMBEDDING_DIM))
    mags, bin_hz = _stft_magnitudes(clip.samples, clip.sample_rate, params.frame_size, params.hop)
    chroma = _hpcp_from_mags(mags, bin_hz, params)
    return _embedding_from_analysis(clip, chroma, mags, bin_hz, params)


def builtin_distribution(clip: AudioClip, params: HpcpParams = HpcpParams()) -> np.ndarray:
    """Pitch-class probability distribution: normalized mean chroma (K=12).

    Fully silent clips fall back to the uniform distribution.
    """
    return _distribution_from_chroma(compute_hpcp(clip, params).frames)


@dataclass(frozen=True, eq=False)
class TrackAnalysis:
    """Everything the built-in metrics need, from one STFT pass."""

    chroma: Chromagram
    embedding: np.ndarray | None
    distribution: np.ndarray | None


def analyze_track(
    clip: AudioClip,
    params: HpcpParams = HpcpParams(),
    want_embedding: bool = True,
    want_distribution: bool = True,
) -> TrackAnalysis:
    mags, bin_hz = _stft_magnitudes(clip.samples, clip.sample_rate, params.frame_size, params.hop)
    chroma = _hpcp_from_mags(mags, bin_hz, params)
    embedding = (
        _embedding_from_analysis(clip, chroma, mags, bin_hz, params) if want_embedding else None
    )
    distribution = _distribution_from_chroma(chroma) if want_distribution else None
    return TrackAnalysis(
        chroma=Chromagram(chroma, clip.sample_rate / params.hop),
        embedding=embedding,
        distribution=distribution,
    )
