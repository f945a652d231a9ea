"""WAV decoding/encoding and band-limited resampling.

Everything downstream consumes mono clips at one canonical analysis rate
(ENGINE_RATE unless a caller overrides it), so decoding always mixes down
and resamples in one step.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CorruptFileError, FormatError

ENGINE_RATE = 44100

# Windowed-sinc interpolation kernel: zero crossings kept per side, and the
# Kaiser shape parameter (beta 8.6 ~ 90 dB stopband).
SINC_TAPS_PER_SIDE = 32
KAISER_BETA = 8.6

_RESAMPLE_CHUNK = 1 << 15


@dataclass(frozen=True, eq=False)
class AudioClip:
    """Decoded mono audio with a stable identity.

    Samples are float64 in [-1, 1]; clips are immutable after construction
    and safe to share across threads/processes.
    """

    id: str
    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("AudioClip samples must be one-dimensional")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if samples.size and float(np.abs(samples).max()) > 1.0 + 1e-6:
            raise ValueError("sample magnitudes exceed 1.0")
        object.__setattr__(self, "samples", samples)

    @property
    def duration_seconds(self) -> float:
        return len(self.samples) / self.sample_rate

    def __len__(self) -> int:
        return len(self.samples)


def _parse_riff_chunks(data: bytes, path: Path) -> dict[bytes, bytes]:
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise FormatError(f"{path}: not a RIFF/WAVE file")
    chunks: dict[bytes, bytes] = {}
    offset = 12
    while offset + 8 <= len(data):
        ckid = data[offset : offset + 4]
        (size,) = struct.unpack_from("<I", data, offset + 4)
        payload = data[offset + 8 : offset + 8 + size]
        if len(payload) < size:
            raise CorruptFileError(f"{path}: truncated {ckid!r} chunk")
        if ckid not in chunks:  # first occurrence wins
            chunks[ckid] = payload
        offset += 8 + size + (size & 1)
    return chunks


def _decode_pcm(payload: bytes, fmt_tag: int, bits: int, path: Path) -> np.ndarray:
    if fmt_tag == 1 and bits == 16:
        ints = np.frombuffer(payload, dtype="<i2").astype(np.float64)
        return np.clip(ints / 32767.0, -1.0, 1.0)
    if fmt_tag == 1 and bits == 24:
        raw = np.frombuffer(payload, dtype=np.uint8).reshape(-1, 3)
        ints = (
            raw[:, 0].astype(np.int32)
            | (raw[:, 1].astype(np.int32) << 8)
            | (raw[:, 2].astype(np.int32) << 16)
        )
        ints = np.where(ints >= 1 << 23, ints - (1 << 24), ints)
        return np.clip(ints.astype(np.float64) / float((1 << 23) - 1), -1.0, 1.0)
    if fmt_tag == 3 and bits == 32:
        vals = np.frombuffer(payload, dtype="<f4").astype(np.float64)
        if not np.isfinite(vals).all():
            raise CorruptFileError(f"{path}: non-finite float samples")
        return np.clip(vals, -1.0, 1.0)
    raise FormatError(f"{path}: unsupported codec (format tag {fmt_tag}, {bits}-bit)")


def load_wav(path: str | Path, target_rate: int = ENGINE_RATE, clip_id: str | None = None) -> AudioClip:
    """Decode a RIFF/WAVE file to a mono clip at target_rate.

    Supports 16/24-bit integer and 32-bit float PCM, 1-2 channels; channels
    are averaged to mono. The clip id defaults to the file stem.
    """
    path = Path(path)
    data = path.read_bytes()
    chunks = _parse_riff_chunks(data, path)
    if b"fmt " not in chunks or b"data" not in chunks:
        raise CorruptFileError(f"{path}: missing fmt/data chunk")

    fmt = chunks[b"fmt "]
    if len(fmt) < 16:
        raise CorruptFileError(f"{path}: fmt chunk too short")
    fmt_tag, channels, rate, _byte_rate, block_align, bits = struct.unpack_from("<HHIIHH", fmt, 0)
    if fmt_tag == 0xFFFE:
        # WAVE_FORMAT_EXTENSIBLE: the real tag is the leading word of the GUID
        if len(fmt) < 40:
            raise CorruptFileError(f"{path}: extensible fmt chunk too short")
        (fmt_tag,) = struct.unpack_from("<H", fmt, 24)
    if channels not in (1, 2):
        raise FormatError(f"{path}: {channels} channels unsupported (expect 1-2)")
    if rate <= 0:
        raise CorruptFileError(f"{path}: invalid sample rate {rate}")

    payload = chunks[b"data"]
    bytes_per_frame = channels * (bits // 8)
    if bytes_per_frame == 0 or len(payload) % bytes_per_frame:
        raise CorruptFileError(f"{path}: data size not a whole number of frames")

    samples = _decode_pcm(payload, fmt_tag, bits, path)
    if channels == 2:
        samples = samples.reshape(-1, 2).mean(axis=1)

    clip = AudioClip(clip_id or path.stem, samples, rate)
    if rate != target_rate:
        clip = resample(clip, target_rate)
    return clip


def save_wav(clip: AudioClip, path: str | Path) -> None:
    """Write a clip as 16-bit PCM mono; values are clamped, never wrapped."""
    path = Path(path)
    ints = np.round(np.clip(clip.samples, -1.0, 1.0) * 32767.0).astype("<i2")
    payload = ints.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(payload),
        b"WAVE",
        b"fmt ",
        16,
        1,  # PCM
        1,  # mono
        clip.sample_rate,
        clip.sample_rate * 2,
        2,
        16,
        b"data",
        len(payload),
    )
    path.write_bytes(header + payload)


def _kaiser(x: np.ndarray, half_width: float) -> np.ndarray:
    inside = np.clip(1.0 - (x / half_width) ** 2, 0.0, None)
    return np.i0(KAISER_BETA * np.sqrt(inside)) / np.i0(KAISER_BETA)


def resample(clip: AudioClip, new_rate: int) -> AudioClip:
    """Band-limited windowed-sinc resampling to new_rate.

    The kernel keeps SINC_TAPS_PER_SIDE zero crossings per side and is
    renormalized per output sample so DC gain is exactly one.
    """
    if new_rate <= 0:
        raise ValueError("new_rate must be positive")
    if new_rate == clip.sample_rate:
        return clip

    x = clip.samples
    n_in = len(x)
    ratio = new_rate / clip.sample_rate
    n_out = int(round(n_in * ratio))
    if n_in == 0 or n_out == 0:
        return AudioClip(clip.id, np.zeros(n_out), new_rate)

    cutoff = min(1.0, ratio)  # relative to the input Nyquist
    half = int(np.ceil(SINC_TAPS_PER_SIDE / cutoff))
    taps = np.arange(-half + 1, half + 1, dtype=np.float64)

    padded = np.concatenate([np.zeros(half), x, np.zeros(half + 1)])
    out = np.empty(n_out, dtype=np.float64)
    for start in range(0, n_out, _RESAMPLE_CHUNK):
        stop = min(start + _RESAMPLE_CHUNK, n_out)
        t = np.arange(start, stop, dtype=np.float64) / ratio
        base = np.floor(t).astype(np.int64)
        offsets = base[:, None] + taps[None, :] - t[:, None]
        kernel = cutoff * np.sinc(cutoff * offsets) * _kaiser(offsets, half)
        kernel /= kernel.sum(axis=1, keepdims=True)
        gathered = padded[base[:, None] + taps[None, :].astype(np.int64) + half]
        out[start:stop] = (kernel * gathered).sum(axis=1)

    np.clip(out, -1.0, 1.0, out=out)
    return AudioClip(clip.id, out, new_rate)
