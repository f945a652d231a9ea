"""Minimal WAV decoding and rate conversion for model input preparation."""

from __future__ import annotations

import struct
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.signal import resample_poly


class AudioDecodeError(Exception):
    pass


def load_wav_mono(path: str | Path, target_rate: int) -> np.ndarray:
    """Decode a RIFF/WAVE file (16/24-bit PCM or 32-bit float, 1-2 channels)
    to mono float32 at target_rate."""
    path = Path(path)
    data = path.read_bytes()
    if len(data) < 44 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise AudioDecodeError(f"{path}: not a RIFF/WAVE file")

    fmt = payload = None
    offset = 12
    while offset + 8 <= len(data):
        ckid = data[offset : offset + 4]
        (size,) = struct.unpack_from("<I", data, offset + 4)
        chunk = data[offset + 8 : offset + 8 + size]
        if len(chunk) < size:
            raise AudioDecodeError(f"{path}: truncated {ckid!r} chunk")
        if ckid == b"fmt " and fmt is None:
            fmt = chunk
        elif ckid == b"data" and payload is None:
            payload = chunk
        offset += 8 + size + (size & 1)
    if fmt is None or payload is None:
        raise AudioDecodeError(f"{path}: missing fmt/data chunk")

    fmt_tag, channels, rate, _, _, bits = struct.unpack_from("<HHIIHH", fmt, 0)
    if fmt_tag == 0xFFFE and len(fmt) >= 40:
        (fmt_tag,) = struct.unpack_from("<H", fmt, 24)
    if channels not in (1, 2):
        raise AudioDecodeError(f"{path}: {channels} channels unsupported")

    if fmt_tag == 1 and bits == 16:
        samples = np.frombuffer(payload, dtype="<i2").astype(np.float32) / 32767.0
    elif fmt_tag == 1 and bits == 24:
        raw = np.frombuffer(payload, dtype=np.uint8).reshape(-1, 3)
        ints = (
            raw[:, 0].astype(np.int32)
            | (raw[:, 1].astype(np.int32) << 8)
            | (raw[:, 2].astype(np.int32) << 16)
        )
        ints = np.where(ints >= 1 << 23, ints - (1 << 24), ints)
        samples = ints.astype(np.float32) / float((1 << 23) - 1)
    elif fmt_tag == 3 and bits == 32:
        samples = np.frombuffer(payload, dtype="<f4").astype(np.float32)
    else:
        raise AudioDecodeError(f"{path}: unsupported codec (tag {fmt_tag}, {bits}-bit)")

    if channels == 2:
        samples = samples.reshape(-1, 2).mean(axis=1)
    samples = np.clip(samples, -1.0, 1.0)

    if rate != target_rate:
        ratio = Fraction(target_rate, rate)
        samples = resample_poly(samples, ratio.numerator, ratio.denominator).astype(np.float32)
        samples = np.clip(samples, -1.0, 1.0)
    return samples
