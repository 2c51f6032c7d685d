"""Simulated recording degradations: amplitude clipping at a target clipped
percentage, and additive white Gaussian noise at a target SNR.

Degraded buffers intentionally keep whatever range the math produces; noisy
signals may leave [-1, +1]. Writing them to WAV saturates, so callers who
sweep low SNRs should pre-scale with normalize_peak first (the CLI does).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateSignalError, ParameterError
from .signal_io import AudioBuffer


@dataclass(frozen=True)
class ClipSpec:
    """Target percentage of samples to clip."""

    percent: float

    def __post_init__(self) -> None:
        if not 0.0 < self.percent < 100.0:
            raise ParameterError(f"percent must be in (0, 100), got {self.percent}")


@dataclass(frozen=True)
class NoiseSpec:
    """Target signal-to-noise ratio and the seed that makes it repeatable."""

    snr_db: float
    seed: int

    def __post_init__(self) -> None:
        if not math.isfinite(self.snr_db):
            raise ParameterError("snr_db must be finite")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must fit in an unsigned 64-bit integer")


def clip_threshold(audio: AudioBuffer, spec: ClipSpec) -> float:
    """Magnitude threshold tau = nearest-rank (100 - percent)-th percentile
    of |x|, so the fraction of samples with |x| >= tau is the smallest
    achievable fraction at or above percent/100."""
    mags = np.abs(audio.samples)
    if not mags.any():
        raise DegenerateSignalError("all-zero signal has no clip threshold")
    n = mags.size
    q = (100.0 - spec.percent) / 100.0
    # ceil with a small slack so exact rank boundaries (e.g. 0.6*5) are not
    # pushed up a rank by binary rounding of q.
    rank = math.ceil(q * n - 1e-9)
    rank = min(max(rank, 1), n)
    return float(np.partition(mags, rank - 1)[rank - 1])


def clip_at(audio: AudioBuffer, tau: float) -> AudioBuffer:
    """Saturate at magnitude tau: x if |x| < tau else tau*sgn(x)."""
    if tau < 0:
        raise ParameterError("tau must be >= 0")
    x = audio.samples
    clipped = np.where(np.abs(x) < tau, x, tau * np.sign(x))
    return replace(audio, samples=clipped)


def apply_clipping(audio: AudioBuffer, spec: ClipSpec) -> AudioBuffer:
    return clip_at(audio, clip_threshold(audio, spec))


def apply_awgn(audio: AudioBuffer, spec: NoiseSpec) -> AudioBuffer:
    """Add white Gaussian noise at spec.snr_db relative to the mean power of
    the whole signal (silence included). The sum is not re-clamped."""
    x = audio.samples
    power = float(np.mean(x**2))
    if power == 0.0:
        raise DegenerateSignalError("all-zero signal has no SNR reference")
    sigma = math.sqrt(power / 10.0 ** (spec.snr_db / 10.0))
    rng = np.random.default_rng(spec.seed)
    noise = rng.normal(0.0, sigma, size=x.size)
    return replace(audio, samples=x + noise)


def noise_sigma(audio: AudioBuffer, snr_db: float) -> float:
    """The noise standard deviation apply_awgn would use."""
    power = float(np.mean(audio.samples**2))
    if power == 0.0:
        raise DegenerateSignalError("all-zero signal has no SNR reference")
    return math.sqrt(power / 10.0 ** (snr_db / 10.0))


def normalize_peak(audio: AudioBuffer, peak: float = 0.5) -> AudioBuffer:
    """Scale so max|x| == peak; leaves headroom before noise is added."""
    if peak <= 0:
        raise ParameterError("peak must be > 0")
    top = float(np.max(np.abs(audio.samples)))
    if top == 0.0:
        raise DegenerateSignalError("all-zero signal cannot be normalized")
    return replace(audio, samples=audio.samples * (peak / top))
