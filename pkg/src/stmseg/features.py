"""Frame-level feature extraction: perceptual linear prediction cepstra and
mel-frequency cepstra.

Both extractors share the same framing rule (fixed-length windows on a fixed
hop, one zero-padded tail window when at least half a hop of samples remains)
and both drop the 0th cepstral coefficient, so overall frame energy never
enters the downstream transition measure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from .errors import ParameterError, TooShortSignalError
from .signal_io import AudioBuffer

SPECTRUM_FLOOR = 1e-10
PREEMPHASIS = 0.97
N_MEL_FILTERS = 26
DEFAULT_N_COEFFS = 12


@dataclass(frozen=True)
class FrameConfig:
    """Analysis window length and overlap, in milliseconds."""

    frame_len_ms: float = 30.0
    overlap_ms: float = 20.0

    def __post_init__(self) -> None:
        if not 0 < self.overlap_ms < self.frame_len_ms:
            raise ParameterError(
                f"need 0 < overlap_ms < frame_len_ms, got "
                f"overlap={self.overlap_ms}, frame={self.frame_len_ms}"
            )

    def frame_len_samples(self, sample_rate_hz: int) -> int:
        n = int(round(self.frame_len_ms * sample_rate_hz / 1000.0))
        if n < 1:
            raise ParameterError(
                f"frame of {self.frame_len_ms} ms is under one sample at "
                f"{sample_rate_hz} Hz"
            )
        return n

    def hop_samples(self, sample_rate_hz: int) -> int:
        overlap = int(round(self.overlap_ms * sample_rate_hz / 1000.0))
        hop = self.frame_len_samples(sample_rate_hz) - overlap
        if hop < 1:
            raise ParameterError(
                f"frame/overlap of {self.frame_len_ms}/{self.overlap_ms} ms "
                f"leaves no hop at {sample_rate_hz} Hz"
            )
        return hop


@dataclass
class FeatureSequence:
    """One feature vector per frame, plus the timing needed to map frame
    indices back to seconds."""

    frames: np.ndarray
    hop_s: float
    frame_len_s: float
    t0_s: float = 0.0

    def __post_init__(self) -> None:
        self.frames = np.asarray(self.frames, dtype=np.float64)
        if self.frames.ndim != 2:
            raise ParameterError("frames must be a 2-D array")

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def dim(self) -> int:
        return self.frames.shape[1]

    def frame_start_times(self) -> np.ndarray:
        return self.t0_s + np.arange(self.n_frames) * self.hop_s


def _frame_array(x: np.ndarray, frame_len: int, hop: int) -> np.ndarray:
    n = x.size
    if n < frame_len:
        raise TooShortSignalError(
            f"signal of {n} samples is shorter than one {frame_len}-sample frame"
        )
    m = 1 + (n - frame_len) // hop
    tail = n - ((m - 1) * hop + frame_len)
    if 2 * tail >= hop:
        m += 1
    last_end = (m - 1) * hop + frame_len
    padded = x
    if last_end > n:
        padded = np.zeros(last_end, dtype=np.float64)
        padded[:n] = x
    idx = np.arange(m)[:, None] * hop + np.arange(frame_len)[None, :]
    return padded[idx]


def frame_signal(audio: AudioBuffer, cfg: FrameConfig | None = None) -> np.ndarray:
    """Slice an utterance into overlapping analysis windows.

    Window i covers samples [i*hop, i*hop + frame_len); a final window is
    zero-padded in when at least hop/2 samples would otherwise be dropped.
    """
    cfg = cfg or FrameConfig()
    frame_len = cfg.frame_len_samples(audio.sample_rate_hz)
    hop = cfg.hop_samples(audio.sample_rate_hz)
    return _frame_array(audio.samples, frame_len, hop)


def _next_pow2(n: int) -> int:
    p = 1
    while p < n:
        p <<= 1
    return p


def hz_to_bark(f):
    return 7.0 * np.arcsinh(np.asarray(f, dtype=np.float64) / 650.0)


def bark_to_hz(b):
    return 650.0 * np.sinh(np.asarray(b, dtype=np.float64) / 7.0)


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def _triangular_filterbank(edges_hz: np.ndarray, freqs_hz: np.ndarray) -> np.ndarray:
    """Unit-peak triangles, filter i rising over [edge i, edge i+1] and
    falling over [edge i+1, edge i+2]."""
    n_bands = edges_hz.size - 2
    weights = np.zeros((n_bands, freqs_hz.size))
    for i in range(n_bands):
        lo, mid, hi = edges_hz[i], edges_hz[i + 1], edges_hz[i + 2]
        rising = (freqs_hz - lo) / (mid - lo)
        falling = (hi - freqs_hz) / (hi - mid)
        weights[i] = np.maximum(0.0, np.minimum(rising, falling))
    return weights


def _equal_loudness(f_hz: np.ndarray) -> np.ndarray:
    fsq = np.asarray(f_hz, dtype=np.float64) ** 2
    return ((fsq / (fsq + 1.6e5)) ** 2) * ((fsq + 1.44e6) / (fsq + 9.61e6))


def _power_spectrum(frames: np.ndarray, nfft: int) -> np.ndarray:
    window = np.hamming(frames.shape[1])
    return np.abs(np.fft.rfft(frames * window, nfft, axis=1)) ** 2


def levinson(r: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Levinson-Durbin recursion, row-wise over a batch of autocorrelation
    sequences.

    Parameters
    ----------
    r : array, shape (n, order+1) or (order+1,)
        Autocorrelation lags 0..order per row.
    order : int
        All-pole model order.

    Returns
    -------
    a : array, shape (n, order+1)
        Prediction polynomial coefficients, a[:, 0] == 1.
    err : array, shape (n,)
        Final prediction error power.
    """
    r = np.atleast_2d(np.asarray(r, dtype=np.float64))
    if order < 1:
        raise ParameterError("order must be >= 1")
    if r.shape[1] < order + 1:
        raise ParameterError(
            f"need {order + 1} autocorrelation lags, got {r.shape[1]}"
        )
    n = r.shape[0]
    a = np.zeros((n, order + 1))
    a[:, 0] = 1.0
    err = r[:, 0].copy()
    tiny = np.finfo(np.float64).tiny
    for i in range(1, order + 1):
        acc = r[:, i].copy()
        for j in range(1, i):
            acc += a[:, j] * r[:, i - j]
        k = -acc / np.maximum(err, tiny)
        a[:, 1:i] += k[:, None] * a[:, i - 1:0:-1].copy()
        a[:, i] = k
        err *= 1.0 - k**2
    return a, err


def lpc_to_cepstrum(a: np.ndarray) -> np.ndarray:
    """Cepstra of the all-pole model 1/A(z), coefficients 1..order (the 0th,
    which only carries gain, is not produced)."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    order = a.shape[1] - 1
    c = np.zeros((a.shape[0], order + 1))
    for m in range(1, order + 1):
        acc = a[:, m].copy()
        for k in range(1, m):
            acc += (k / m) * c[:, k] * a[:, m - k]
        c[:, m] = -acc
    return c[:, 1:]


def extract_plpcc(
    audio: AudioBuffer,
    cfg: FrameConfig | None = None,
    n_coeffs: int = DEFAULT_N_COEFFS,
) -> FeatureSequence:
    """Perceptual linear prediction cepstra, one vector per frame.

    Per frame: Hamming window, power spectrum (FFT length = next power of
    two at or above the frame length, floored at 1e-10), critical-band
    integration on a Bark-spaced triangular filterbank, equal-loudness
    weighting, cube-root compression, then an order-n all-pole fit whose
    cepstral expansion provides the coefficients. Edge bands are copied from
    their neighbours before the fit, as their triangles are truncated.
    """
    cfg = cfg or FrameConfig()
    if n_coeffs < 1:
        raise ParameterError("n_coeffs must be >= 1")
    sr = audio.sample_rate_hz
    frame_len = cfg.frame_len_samples(sr)
    hop = cfg.hop_samples(sr)
    nyquist = sr / 2.0
    n_bands = int(np.ceil(float(hz_to_bark(nyquist))))
    if n_coeffs + 1 > n_bands:
        raise ParameterError(
            f"{n_coeffs} coefficients need an order-{n_coeffs} fit, but only "
            f"{n_bands} critical bands fit below {nyquist:g} Hz"
        )
    frames = _frame_array(audio.samples, frame_len, hop)
    nfft = _next_pow2(frame_len)
    spectrum = _power_spectrum(frames, nfft) + SPECTRUM_FLOOR

    edges_hz = bark_to_hz(np.linspace(0.0, float(hz_to_bark(nyquist)), n_bands + 2))
    freqs_hz = np.fft.rfftfreq(nfft, 1.0 / sr)
    fb = _triangular_filterbank(edges_hz, freqs_hz)
    bands = spectrum @ fb.T
    bands *= _equal_loudness(edges_hz[1:-1])
    loudness = bands ** (1.0 / 3.0)
    loudness[:, 0] = loudness[:, 1]
    loudness[:, -1] = loudness[:, -2]

    # Autocorrelation lags come from the inverse DFT of the band spectrum
    # mirrored into an even sequence.
    mirrored = np.concatenate([loudness, loudness[:, -2:0:-1]], axis=1)
    autoc = np.fft.ifft(mirrored, axis=1).real[:, : n_coeffs + 1]
    a, _ = levinson(autoc, n_coeffs)
    ceps = lpc_to_cepstrum(a)
    return FeatureSequence(ceps, hop / sr, frame_len / sr)


def extract_mfcc(
    audio: AudioBuffer,
    cfg: FrameConfig | None = None,
    n_coeffs: int = DEFAULT_N_COEFFS,
) -> FeatureSequence:
    """Mel-frequency cepstra, one vector per frame.

    Pre-emphasis (0.97) on the whole signal, Hamming window, power spectrum,
    26 triangular mel filters spanning 0 Hz to Nyquist, log energies floored
    at 1e-10, orthonormal DCT-II keeping coefficients 1..n (0th dropped).
    """
    cfg = cfg or FrameConfig()
    if n_coeffs < 1:
        raise ParameterError("n_coeffs must be >= 1")
    if n_coeffs + 1 > N_MEL_FILTERS:
        raise ParameterError(
            f"at most {N_MEL_FILTERS - 1} coefficients from {N_MEL_FILTERS} filters"
        )
    sr = audio.sample_rate_hz
    frame_len = cfg.frame_len_samples(sr)
    hop = cfg.hop_samples(sr)
    x = np.empty_like(audio.samples)
    x[0] = audio.samples[0]
    x[1:] = audio.samples[1:] - PREEMPHASIS * audio.samples[:-1]
    frames = _frame_array(x, frame_len, hop)
    nfft = _next_pow2(frame_len)
    spectrum = _power_spectrum(frames, nfft)

    edges_hz = mel_to_hz(np.linspace(0.0, float(hz_to_mel(sr / 2.0)), N_MEL_FILTERS + 2))
    freqs_hz = np.fft.rfftfreq(nfft, 1.0 / sr)
    fb = _triangular_filterbank(edges_hz, freqs_hz)
    log_energies = np.log(spectrum @ fb.T + SPECTRUM_FLOOR)
    ceps = scipy.fft.dct(log_energies, type=2, norm="ortho", axis=1)
    return FeatureSequence(ceps[:, 1 : n_coeffs + 1], hop / sr, frame_len / sr)


EXTRACTORS = {"plp": extract_plpcc, "mfcc": extract_mfcc}


def extract(
    kind: str,
    audio: AudioBuffer,
    cfg: FrameConfig | None = None,
    n_coeffs: int = DEFAULT_N_COEFFS,
) -> FeatureSequence:
    try:
        fn = EXTRACTORS[kind]
    except KeyError:
        raise ParameterError(
            f"unknown feature kind {kind!r}, expected one of {sorted(EXTRACTORS)}"
        ) from None
    return fn(audio, cfg, n_coeffs)


def write_features_csv(path, feats: FeatureSequence) -> None:
    """One frame per row: window start time, then the coefficients."""
    header = "t_start_s," + ",".join(f"c{i}" for i in range(1, feats.dim + 1))
    times = feats.frame_start_times()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for t, row in zip(times, feats.frames):
            fh.write(",".join([repr(float(t))] + [repr(float(v)) for v in row]) + "\n")
