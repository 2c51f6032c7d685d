"""Deterministic synthetic speech-like corpora for the test suite.

Utterances concatenate 4-8 segments of 200-400 ms, alternating among three
spectrally distinct textures: two tones and a bandpass-filtered noise burst.
Textures are built as loops whose period equals the analysis hop, so frames
inside a segment are bit-identical and the transition contour is exactly
flat between boundaries; every contour feature then comes from the
construction points. `jitter_db` mixes in per-sample noise when a corpus
with in-segment variability is wanted instead.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from stmseg import AudioBuffer, BoundarySet
from stmseg.signal_io import write_wav

SAMPLE_RATE = 16000
HOP_SAMPLES = 160  # 10 ms at 16 kHz, the default analysis hop

MIN_SEGMENTS, MAX_SEGMENTS = 4, 8
MIN_HOPS, MAX_HOPS = 20, 40  # 200..400 ms per segment

TEXTURE_LABELS = ("lo", "hi", "nz")


def texture_bank(rng: np.random.Generator) -> list[np.ndarray]:
    """One hop-long loop per texture: a low tone, a high tone, and noise
    brickwall-bandpassed between them. Tone frequencies sit on the loop's
    line spacing so each loop tiles seamlessly."""
    k = np.arange(HOP_SAMPLES)
    lo = 0.3 * np.sin(2 * np.pi * 500.0 * k / SAMPLE_RATE)
    hi = 0.3 * np.sin(2 * np.pi * 2600.0 * k / SAMPLE_RATE)
    spec = np.fft.rfft(rng.standard_normal(HOP_SAMPLES))
    freqs = np.fft.rfftfreq(HOP_SAMPLES, 1.0 / SAMPLE_RATE)
    spec[(freqs < 1000.0) | (freqs > 1900.0)] = 0.0
    nz = np.fft.irfft(spec, HOP_SAMPLES)
    nz = 0.3 * nz / np.max(np.abs(nz))
    return [lo, hi, nz]


def make_utterance(
    rng: np.random.Generator, jitter_db: float | None = None
) -> tuple[AudioBuffer, list[tuple[int, int, str]]]:
    """One synthetic utterance plus its labelled sample intervals."""
    bank = texture_bank(rng)
    n_seg = int(rng.integers(MIN_SEGMENTS, MAX_SEGMENTS + 1))
    labels = [int(rng.integers(0, len(bank)))]
    while len(labels) < n_seg:
        c = int(rng.integers(0, len(bank)))
        if c != labels[-1]:
            labels.append(c)
    pieces: list[np.ndarray] = []
    entries: list[tuple[int, int, str]] = []
    pos = 0
    for lab in labels:
        hops = int(rng.integers(MIN_HOPS, MAX_HOPS + 1))
        pieces.append(np.tile(bank[lab], hops))
        entries.append((pos, pos + hops * HOP_SAMPLES, TEXTURE_LABELS[lab]))
        pos += hops * HOP_SAMPLES
    samples = np.concatenate(pieces)
    if jitter_db is not None:
        power = float(np.mean(samples**2))
        sigma = np.sqrt(power / 10.0 ** (jitter_db / 10.0))
        samples = samples + sigma * rng.standard_normal(samples.size)
    return AudioBuffer(samples, SAMPLE_RATE), entries


def construction_boundaries(entries: list[tuple[int, int, str]]) -> BoundarySet:
    edges = np.array([e[1] for e in entries[:-1]], dtype=np.float64)
    return BoundarySet(edges / SAMPLE_RATE)


def build_corpus(
    n_utterances: int, seed: int, jitter_db: float | None = None
) -> list[tuple[AudioBuffer, BoundarySet]]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_utterances):
        audio, entries = make_utterance(rng, jitter_db)
        out.append((audio, construction_boundaries(entries)))
    return out


def write_corpus(
    corpus_dir: Path, n_utterances: int, seed: int, jitter_db: float | None = None
) -> list[tuple[AudioBuffer, BoundarySet]]:
    """Write wav/phn pairs and return the in-memory corpus."""
    corpus_dir = Path(corpus_dir)
    corpus_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n_utterances):
        audio, entries = make_utterance(rng, jitter_db)
        write_wav(corpus_dir / f"utt{i:03d}.wav", audio)
        with open(corpus_dir / f"utt{i:03d}.phn", "w", encoding="utf-8") as fh:
            for start, end, label in entries:
                fh.write(f"{start} {end} {label}\n")
        out.append((audio, construction_boundaries(entries)))
    return out
