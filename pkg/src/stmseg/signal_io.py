"""Reading and writing the on-disk formats: 16-bit PCM WAV, sample-indexed
phone transcriptions, and plain-text boundary lists.

Samples are exchanged with the codec through a fixed divisor of 32768, so
integer code k maps to k/32768 and +1.0 saturates to code 32767 on write.
"""

from __future__ import annotations

import wave
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import (
    FormatError,
    ParameterError,
    TranscriptionParseError,
    UnsupportedFormatError,
)

INT16_SCALE = 32768.0


@dataclass
class AudioBuffer:
    """Mono audio held as float64.

    Buffers read from WAV are confined to [-1, +1] by construction. Buffers
    produced by degradations may exceed that range on purpose; write_wav
    saturates at the codec boundary.
    """

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1 or self.samples.size < 1:
            raise ParameterError("samples must be a non-empty 1-D array")
        if self.sample_rate_hz <= 0:
            raise ParameterError("sample_rate_hz must be positive")

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


class PhoneEntry(NamedTuple):
    start_sample: int
    end_sample: int
    label: str


@dataclass
class PhoneTranscription:
    """Contiguous labelled sample intervals covering an utterance."""

    entries: list[PhoneEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class BoundarySet:
    """Strictly increasing boundary times in seconds."""

    times_s: np.ndarray

    def __post_init__(self) -> None:
        self.times_s = np.asarray(self.times_s, dtype=np.float64)
        if self.times_s.ndim != 1:
            raise ParameterError("times_s must be 1-D")
        if self.times_s.size:
            if np.any(self.times_s < 0):
                raise ParameterError("boundary times must be >= 0")
            if np.any(np.diff(self.times_s) <= 0):
                raise ParameterError("boundary times must be strictly increasing")

    def __len__(self) -> int:
        return int(self.times_s.size)


def read_wav(path: str | Path) -> AudioBuffer:
    """Read a mono 16-bit PCM RIFF/WAVE file.

    Raises FormatError for malformed containers and UnsupportedFormatError
    for layouts we refuse to convert implicitly (multichannel, widths other
    than 16-bit).
    """
    try:
        with wave.open(str(path), "rb") as wf:
            n_channels = wf.getnchannels()
            samp_width = wf.getsampwidth()
            rate = wf.getframerate()
            n_frames = wf.getnframes()
            if n_channels != 1:
                raise UnsupportedFormatError(
                    f"{path}: {n_channels} channels; only mono is supported"
                )
            if samp_width != 2:
                raise UnsupportedFormatError(
                    f"{path}: {8 * samp_width}-bit samples; only 16-bit PCM is supported"
                )
            raw = wf.readframes(n_frames)
    except wave.Error as exc:
        raise FormatError(f"{path}: {exc}") from exc
    except EOFError as exc:
        raise FormatError(f"{path}: truncated WAV data") from exc
    codes = np.frombuffer(raw, dtype="<i2")
    if codes.size == 0:
        raise FormatError(f"{path}: no audio samples")
    if rate <= 0:
        raise FormatError(f"{path}: nonsensical sample rate {rate}")
    return AudioBuffer(codes.astype(np.float64) / INT16_SCALE, rate)


def write_wav(path: str | Path, audio: AudioBuffer) -> None:
    """Write a mono 16-bit PCM WAV file. Values outside [-1, +1] saturate
    at the int16 boundary, so a degraded buffer round-trips clamped."""
    codes = np.rint(audio.samples * INT16_SCALE)
    codes = np.clip(codes, -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(audio.sample_rate_hz)
        wf.writeframes(codes.tobytes())


def read_phone_transcription(path: str | Path, sample_rate_hz: int) -> PhoneTranscription:
    """Parse a transcription file, one `<start_sample> <end_sample> <label>`
    line per phone, intervals contiguous. Any violation raises
    TranscriptionParseError carrying the offending line number."""
    if sample_rate_hz <= 0:
        raise ParameterError("sample_rate_hz must be positive")
    entries: list[PhoneEntry] = []
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    lineno = 0
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            raise TranscriptionParseError("blank line", lineno)
        parts = line.split()
        if len(parts) != 3:
            raise TranscriptionParseError(
                f"expected 'start end label', got {line!r}", lineno
            )
        try:
            start, end = int(parts[0]), int(parts[1])
        except ValueError:
            raise TranscriptionParseError(
                f"non-integer sample index in {line!r}", lineno
            ) from None
        if start < 0:
            raise TranscriptionParseError(f"negative start sample {start}", lineno)
        if end <= start:
            raise TranscriptionParseError(
                f"empty or inverted interval [{start}, {end})", lineno
            )
        if entries and start != entries[-1].end_sample:
            raise TranscriptionParseError(
                f"interval starts at {start}, previous ended at "
                f"{entries[-1].end_sample}; intervals must be contiguous",
                lineno,
            )
        entries.append(PhoneEntry(start, end, parts[2]))
    if not entries:
        raise TranscriptionParseError("no entries", max(lineno, 1))
    return PhoneTranscription(entries)


def reference_boundaries(t: PhoneTranscription, sample_rate_hz: int) -> BoundarySet:
    """Boundary times at the shared edges between consecutive phones.

    The utterance start and end are not transitions between phones and are
    never included, so n entries yield n-1 boundaries.
    """
    if sample_rate_hz <= 0:
        raise ParameterError("sample_rate_hz must be positive")
    edges = np.array(
        [e.end_sample for e in t.entries[:-1]], dtype=np.float64
    )
    return BoundarySet(edges / sample_rate_hz)


def write_boundaries(path: str | Path, boundaries: BoundarySet) -> None:
    """One seconds value per line, six fractional digits, ascending."""
    with open(path, "w", encoding="utf-8") as fh:
        for t in boundaries.times_s:
            fh.write(f"{t:.6f}\n")


def read_boundaries(path: str | Path) -> BoundarySet:
    times: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                times.append(float(line))
            except ValueError:
                raise FormatError(
                    f"{path}: line {lineno}: not a time value: {line!r}"
                ) from None
    return BoundarySet(np.array(times, dtype=np.float64))
