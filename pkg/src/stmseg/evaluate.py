"""Scoring detected boundaries against references with a tolerance window.

Matching is greedy one-to-one in reference order; precision, recall, and
F-score are percentages. Corpus results micro-aggregate the raw counts, then
compute the ratios once.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import asdict, dataclass

from .errors import ParameterError
from .signal_io import BoundarySet

# Distances are rounded to a picosecond before comparison so documented ties
# (e.g. 15 ms on both sides) behave as ties regardless of binary rounding.
_TIME_QUANTUM_DIGITS = 12


@dataclass(frozen=True)
class EvalConfig:
    tolerance_ms: float = 20.0

    def __post_init__(self) -> None:
        if self.tolerance_ms <= 0:
            raise ParameterError("tolerance_ms must be > 0")

    @property
    def tolerance_s(self) -> float:
        return self.tolerance_ms / 1000.0


@dataclass(frozen=True)
class EvalReport:
    tolerance_ms: float
    matched: int
    detected: int
    reference: int
    precision_pct: float
    recall_pct: float
    fscore_pct: float

    def to_dict(self) -> dict:
        return asdict(self)


def match_boundaries(
    reference: BoundarySet, detected: BoundarySet, cfg: EvalConfig | None = None
) -> list[tuple[float, float]]:
    """Greedy one-to-one matching.

    Reference times are visited in ascending order; each takes the nearest
    still-unmatched detected time within tolerance. Equal distances go to the
    earlier detected time. Deterministic by construction.
    """
    cfg = cfg or EvalConfig()
    tol = cfg.tolerance_s
    det = detected.times_s
    used = [False] * det.size
    pairs: list[tuple[float, float]] = []
    for r in reference.times_s:
        # Window is widened by a hair; the rounded distance test below is
        # what actually decides membership.
        lo = bisect_left(det, r - tol - 1e-9)
        hi = bisect_right(det, r + tol + 1e-9)
        best = -1
        best_dist = None
        for j in range(lo, hi):
            if used[j]:
                continue
            dist = round(abs(det[j] - r), _TIME_QUANTUM_DIGITS)
            if dist > tol:
                continue
            if best_dist is None or dist < best_dist:
                best, best_dist = j, dist
        if best >= 0:
            used[best] = True
            pairs.append((float(r), float(det[best])))
    return pairs


def score(
    reference: BoundarySet, detected: BoundarySet, cfg: EvalConfig | None = None
) -> EvalReport:
    cfg = cfg or EvalConfig()
    matched = len(match_boundaries(reference, detected, cfg))
    return _report_from_counts(matched, len(detected), len(reference), cfg)


def corpus_eval(
    pairs: list[tuple[BoundarySet, BoundarySet]], cfg: EvalConfig | None = None
) -> EvalReport:
    """Micro-aggregate over (reference, detected) pairs: counts are summed
    across utterances, then the ratios are computed once."""
    cfg = cfg or EvalConfig()
    if not pairs:
        raise ParameterError("corpus_eval needs at least one utterance")
    matched = detected = reference = 0
    for ref, det in pairs:
        matched += len(match_boundaries(ref, det, cfg))
        detected += len(det)
        reference += len(ref)
    return _report_from_counts(matched, detected, reference, cfg)


def _report_from_counts(
    matched: int, detected: int, reference: int, cfg: EvalConfig
) -> EvalReport:
    if detected == 0 and reference == 0:
        precision = recall = fscore = 100.0
    else:
        precision = 100.0 * matched / detected if detected else 0.0
        recall = 100.0 * matched / reference if reference else 0.0
        denom = precision + recall
        fscore = 2.0 * precision * recall / denom if denom else 0.0
    return EvalReport(
        tolerance_ms=cfg.tolerance_ms,
        matched=matched,
        detected=detected,
        reference=reference,
        precision_pct=precision,
        recall_pct=recall,
        fscore_pct=fscore,
    )
