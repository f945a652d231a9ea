"""Procedural multi-tone + noise "songs" for desk-scale experiments.

Each song draws its own scale, tempo, tuning offset, partials, and melodic
walks from a seeded RNG, so reference material is mutually distinct. All
songs in a bank share a dominant tonal anchor (the bass mostly holds the
root), the way genre-matched corpora share tonal conventions; this pins the
pairwise transposition estimate at zero so a low-degree splice is not
rotated out of alignment by its host mixture's key. Everything else --
scales, chord walks, accidentals, rubato, per-song detune -- varies freely.
"""

from __future__ import annotations

import numpy as np

from mira import AudioClip

_SCALES = {
    "major": (0, 2, 4, 5, 7, 9, 11),
    "minor": (0, 2, 3, 5, 7, 8, 10),
    "pentatonic": (0, 2, 4, 7, 9),
    "hexatonic": (0, 3, 5, 6, 7, 10),
}


def _note_hz(semitone_from_a4: float) -> float:
    return 440.0 * 2.0 ** (semitone_from_a4 / 12.0)


def make_song(
    song_id: str,
    seed: int,
    duration_s: float = 30.0,
    rate: int = 44100,
    transpose_semitones: int = 0,
) -> AudioClip:
    rng = np.random.default_rng(seed)
    n = int(duration_s * rate)
    out = np.zeros(n)

    detune = float(rng.uniform(-0.2, 0.2)) + transpose_semitones  # per-song tuning system
    scale = list(_SCALES.values())[int(rng.integers(0, len(_SCALES)))]
    base_seg_dur = float(rng.uniform(0.22, 0.65))
    n_partials = int(rng.integers(2, 6))
    partials = rng.uniform(0.15, 1.0, size=n_partials)
    partials[0] = 1.0
    accidental_prob = float(rng.uniform(0.1, 0.25))
    noise_level = float(rng.uniform(0.005, 0.03))
    gain_scale = rng.uniform(0.7, 1.3, size=4)
    lead_octave = 12 if rng.uniform() < 0.35 else 0

    mid_deg = int(rng.integers(0, len(scale)))
    lead_deg = int(rng.integers(0, len(scale)))

    pos = 0
    while pos < n:
        seg_dur = base_seg_dur * float(rng.uniform(0.8, 1.25))
        seg_len = min(int(seg_dur * rate), n - pos)
        t = np.arange(seg_len) / rate
        envelope = np.minimum(t / 0.01, 1.0) * np.exp(-t / (seg_dur * 0.9))
        seg = np.zeros(seg_len)

        # bass anchors the bank's shared tonal center (root 75%, fifth 25%)
        bass_semi = (0 if rng.uniform() < 0.75 else 7) - 24 - 9 + detune
        notes = [(bass_semi, 0.38 * gain_scale[0])]

        mid_deg = (mid_deg + int(rng.integers(-3, 4))) % len(scale)
        mid_semi = scale[mid_deg] - 12 - 9 + detune
        notes.append((mid_semi, 0.20 * gain_scale[1]))
        notes.append((mid_semi + (3 if rng.uniform() < 0.5 else 4), 0.14 * gain_scale[2]))  # stacked third

        lead_deg = (lead_deg + int(rng.integers(-4, 5))) % len(scale)
        if rng.uniform() < accidental_prob:
            lead_semi = int(rng.integers(0, 12)) - 9 + detune  # chromatic accidental
        else:
            lead_semi = scale[lead_deg] - 9 + detune
        notes.append((lead_semi + lead_octave, 0.16 * gain_scale[3]))

        for semi, gain in notes:
            hz = _note_hz(semi)
            phase = rng.uniform(0, 2 * np.pi)
            for p, amp in enumerate(partials, start=1):
                if p * hz < rate / 2:
                    seg += gain * amp * np.sin(2 * np.pi * p * hz * t + phase)
        out[pos : pos + seg_len] += seg * envelope
        pos += seg_len

    out += noise_level * rng.standard_normal(n)
    peak = np.abs(out).max()
    if peak > 0:
        out *= 0.7 / peak
    return AudioClip(song_id, out, rate)


def make_song_bank(prefix: str, count: int, seed: int, duration_s: float = 30.0, rate: int = 44100) -> list[AudioClip]:
    return [
        make_song(f"{prefix}{i:02d}", int(np.random.SeedSequence([seed, i]).generate_state(1)[0]), duration_s, rate)
        for i in range(count)
    ]
