"""Phonetic segmentation from spectral transitions.

The pipeline: cepstral features per frame, a per-frame transition measure
(mean squared slope of the feature trajectories), a median floor over the
contour, then peak picking. Companion modules simulate recording
degradations (clipping, additive Gaussian noise) and score detected
boundaries against reference transcriptions.
"""

from .degrade import (
    ClipSpec,
    NoiseSpec,
    apply_awgn,
    apply_clipping,
    clip_at,
    clip_threshold,
    normalize_peak,
)
from .errors import (
    DegenerateSignalError,
    FormatError,
    ParameterError,
    TooShortSignalError,
    TranscriptionParseError,
    UnsupportedFormatError,
)
from .evaluate import EvalConfig, EvalReport, corpus_eval, match_boundaries, score
from .features import (
    FeatureSequence,
    FrameConfig,
    extract,
    extract_mfcc,
    extract_plpcc,
    frame_signal,
)
from .signal_io import (
    AudioBuffer,
    BoundarySet,
    PhoneTranscription,
    read_boundaries,
    read_phone_transcription,
    read_wav,
    reference_boundaries,
    write_boundaries,
    write_wav,
)
from .stm import (
    StmConfig,
    StmContour,
    median_floor,
    pick_peaks,
    segment,
    spectral_rate,
    stm_contour,
)

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer",
    "BoundarySet",
    "ClipSpec",
    "DegenerateSignalError",
    "EvalConfig",
    "EvalReport",
    "FeatureSequence",
    "FormatError",
    "FrameConfig",
    "NoiseSpec",
    "ParameterError",
    "PhoneTranscription",
    "StmConfig",
    "StmContour",
    "TooShortSignalError",
    "TranscriptionParseError",
    "UnsupportedFormatError",
    "apply_awgn",
    "apply_clipping",
    "clip_at",
    "clip_threshold",
    "corpus_eval",
    "extract",
    "extract_mfcc",
    "extract_plpcc",
    "frame_signal",
    "match_boundaries",
    "median_floor",
    "normalize_peak",
    "pick_peaks",
    "read_boundaries",
    "read_phone_transcription",
    "read_wav",
    "reference_boundaries",
    "score",
    "segment",
    "spectral_rate",
    "stm_contour",
    "write_boundaries",
    "write_wav",
]
