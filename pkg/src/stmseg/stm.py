"""Spectral transition contour and boundary picking.

Per frame, each feature trajectory is fitted with a least-squares line over a
short symmetric window; the contour value is the mean squared slope across
coefficients. Frames where the spectrum is in motion score high, steady-state
frames score near zero. Post-processing floors the contour at its median,
which flattens sub-median ripple so only peaks that clear the utterance-wide
noise floor survive.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import features as _features
from .errors import ParameterError
from .features import FeatureSequence, FrameConfig
from .signal_io import AudioBuffer, BoundarySet


@dataclass(frozen=True)
class StmConfig:
    regression_halfwidth: int = 2
    postprocess: bool = True

    def __post_init__(self) -> None:
        if self.regression_halfwidth < 1:
            raise ParameterError("regression_halfwidth must be >= 1")


@dataclass
class StmContour:
    """Transition measure per frame, with timing to map indices to seconds.

    `floored` marks a contour that has been clamped from below at `tau`;
    flooring is applied at most once.
    """

    values: np.ndarray
    hop_s: float
    frame_len_s: float
    t0_s: float = 0.0
    floored: bool = False
    tau: float | None = None

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1:
            raise ParameterError("contour values must be 1-D")
        if not np.all(np.isfinite(self.values)):
            raise ParameterError("contour values must be finite")
        if np.any(self.values < 0):
            raise ParameterError("contour values must be >= 0")

    def __len__(self) -> int:
        return int(self.values.size)

    def frame_center_times(self) -> np.ndarray:
        return (
            self.t0_s
            + np.arange(self.values.size) * self.hop_s
            + self.frame_len_s / 2.0
        )


def spectral_rate(feats: FeatureSequence, halfwidth: int = 2) -> np.ndarray:
    """Least-squares slope of every coefficient trajectory over a window of
    +-halfwidth frames around each frame, shape (n_frames, dim).

    With symmetric integer abscissae the fit reduces to a weighted sum,
    sum_n n * f(m+n) / sum_n n^2, accumulated as n * (f(m+n) - f(m-n)) so a
    constant trajectory cancels to exactly zero. Indices beyond either end
    are clamped to the edge frame, so the window never shrinks.
    """
    if halfwidth < 1:
        raise ParameterError("halfwidth must be >= 1")
    m = feats.n_frames
    rate = np.zeros_like(feats.frames)
    denom = 2.0 * sum(n * n for n in range(1, halfwidth + 1))
    base = np.arange(m)
    for n in range(1, halfwidth + 1):
        ahead = np.clip(base + n, 0, m - 1)
        behind = np.clip(base - n, 0, m - 1)
        rate += n * (feats.frames[ahead] - feats.frames[behind])
    rate /= denom
    return rate


def stm_contour(feats: FeatureSequence, cfg: StmConfig | None = None) -> StmContour:
    """Mean squared spectral rate across coefficients, per frame."""
    cfg = cfg or StmConfig()
    rate = spectral_rate(feats, cfg.regression_halfwidth)
    values = np.mean(rate**2, axis=1)
    return StmContour(values, feats.hop_s, feats.frame_len_s, feats.t0_s)


def floor_at(contour: StmContour, tau: float) -> StmContour:
    """Clamp the contour from below at tau."""
    return replace(
        contour,
        values=np.maximum(contour.values, tau),
        floored=True,
        tau=float(tau),
    )


def median_floor(contour: StmContour) -> StmContour:
    """Floor the contour at its own median (even lengths use the mean of the
    two central order statistics). Refuses to floor twice."""
    if contour.floored:
        raise ParameterError("contour is already floored")
    return floor_at(contour, float(np.median(contour.values)))


def pick_peaks(contour: StmContour) -> BoundarySet:
    """Boundary times at strict local maxima of the contour.

    A run of equal values strictly above both flanking values counts as one
    peak at the run's central index (floor of the midpoint). The first and
    last index are never peaks. Boundary time is the frame's center.
    """
    v = contour.values
    m = v.size
    peaks: list[int] = []
    i = 0
    while i < m:
        j = i
        while j + 1 < m and v[j + 1] == v[i]:
            j += 1
        if i > 0 and j < m - 1 and v[i - 1] < v[i] and v[j + 1] < v[i]:
            peaks.append((i + j) // 2)
        i = j + 1
    times = (
        contour.t0_s
        + np.asarray(peaks, dtype=np.float64) * contour.hop_s
        + contour.frame_len_s / 2.0
    )
    return BoundarySet(times)


def segment(
    audio: AudioBuffer,
    feature_kind: str = "plp",
    frame_cfg: FrameConfig | None = None,
    stm_cfg: StmConfig | None = None,
    n_coeffs: int = _features.DEFAULT_N_COEFFS,
) -> BoundarySet:
    """Full pipeline: features, transition contour, optional median floor,
    peak picking."""
    stm_cfg = stm_cfg or StmConfig()
    feats = _features.extract(feature_kind, audio, frame_cfg, n_coeffs)
    contour = stm_contour(feats, stm_cfg)
    if stm_cfg.postprocess:
        contour = median_floor(contour)
    return pick_peaks(contour)


def write_contour_csv(path, contour: StmContour, floored: StmContour | None = None) -> None:
    """Dump a contour as CSV; pass the floored variant to get both columns."""
    if floored is not None and len(floored) != len(contour):
        raise ParameterError("raw and floored contours differ in length")
    times = contour.frame_center_times()
    with open(path, "w", encoding="utf-8") as fh:
        if floored is None:
            fh.write("frame_index,t_center_s,stm_value\n")
            for i, (t, v) in enumerate(zip(times, contour.values)):
                fh.write(f"{i},{float(t)!r},{float(v)!r}\n")
        else:
            fh.write("frame_index,t_center_s,stm_value,stm_floored\n")
            for i, (t, v, w) in enumerate(zip(times, contour.values, floored.values)):
                fh.write(f"{i},{float(t)!r},{float(v)!r},{float(w)!r}\n")
