import numpy as np
import pytest

from mira import AudioClip


def tone(freq_hz: float, duration_s: float = 1.0, rate: int = 44100, amp: float = 0.5, clip_id: str = "tone") -> AudioClip:
    t = np.arange(int(duration_s * rate)) / rate
    return AudioClip(clip_id, amp * np.sin(2 * np.pi * freq_hz * t), rate)


def vibrato_tone(freq_hz: float, duration_s: float = 2.0, rate: int = 44100, clip_id: str = "vib") -> AudioClip:
    """Tone with +-30 cent vibrato: one pitch class, but chroma frames are
    distinct over time, avoiding the all-tied degenerate recurrence case."""
    t = np.arange(int(duration_s * rate)) / rate
    inst = freq_hz * 2.0 ** (0.025 * np.sin(2 * np.pi * 0.7 * t) / 12.0 * 6.0)
    phase = 2 * np.pi * np.cumsum(inst) / rate
    return AudioClip(clip_id, 0.5 * np.sin(phase), rate)


def melody_clip(seed: int, semitone_offset: float = 0.0, duration_s: float = 8.0,
                rate: int = 44100, clip_id: str = "melody") -> AudioClip:
    """Three-voice sine progression with the voices octaves apart, so their
    spectral lobes never interact; transposing via semitone_offset then
    rotates the chromagram almost exactly. No noise, no shared partials."""
    gen = np.random.default_rng(seed)
    samples = np.zeros(int(duration_s * rate))
    voices = [(110.0, 0.40, 0.50), (440.0, 0.25, 0.35), (1760.0, 0.15, 0.25)]  # base Hz, gain, note secs
    for base_hz, gain, note_s in voices:
        note_len = int(note_s * rate)
        n_notes = int(np.ceil(len(samples) / note_len))
        classes = gen.integers(0, 12, size=n_notes)
        for idx, cls in enumerate(classes):
            start = idx * note_len
            seg = min(note_len, len(samples) - start)
            if seg <= 0:
                break
            t = np.arange(seg) / rate
            freq = base_hz * 2.0 ** ((float(cls) + semitone_offset) / 12.0)
            fade = np.minimum(np.minimum(t / 0.01, (seg / rate - t) / 0.01), 1.0)
            samples[start : start + seg] += gain * fade * np.sin(2 * np.pi * freq * t)
    return AudioClip(clip_id, samples, rate)


@pytest.fixture
def tone_440():
    return tone(440.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
