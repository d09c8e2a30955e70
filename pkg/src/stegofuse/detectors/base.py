"""Shared detector types: outcomes, failure taxonomy, timing, root selection."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from enum import Enum
from functools import wraps
from typing import Callable

from ..images import SampleImage


class DetectorId(Enum):
    PRIMARY_SETS = "primary sets"
    CHI_SQUARE = "chi square"
    SAMPLE_PAIRS = "sample pairs"
    RS = "rs analysis"


class FailureReason(Enum):
    DEGENERATE_INPUT = "degenerate-input"
    NUMERICAL_INSTABILITY = "numerical-instability"
    NOT_APPLICABLE = "not-applicable"


class DetectorFailure(Exception):
    """Raised inside a detector to signal a structured (non-crash) failure."""

    def __init__(self, reason: FailureReason, message: str = ""):
        super().__init__(message or reason.value)
        self.reason = reason


@dataclass(frozen=True)
class DetectorOutcome:
    """Result of one detector on one image: a score in [0, 1] or a failure."""

    detector_id: DetectorId
    score: float | None
    failure_reason: FailureReason | None = None
    elapsed_ms: float = 0.0

    def __post_init__(self) -> None:
        if self.score is not None:
            if not (0.0 <= self.score <= 1.0):
                raise ValueError(f"score {self.score} outside [0, 1]")
            if self.failure_reason is not None:
                raise ValueError("a successful outcome cannot carry a failure reason")
        elif self.failure_reason is None:
            raise ValueError("a failed outcome needs a failure reason")

    @property
    def ok(self) -> bool:
        return self.score is not None


DetectorFunc = Callable[[SampleImage], DetectorOutcome]


def detector(detector_id: DetectorId) -> Callable[[Callable[[SampleImage], float]], DetectorFunc]:
    """Wrap a scoring function into a timed, never-raising detector.

    The wrapped function returns a raw score (clamped here) or raises
    DetectorFailure; any other exception is converted to a NotApplicable
    failure so one broken detector can never abort a batch run.
    """

    def deco(fn: Callable[[SampleImage], float]) -> DetectorFunc:
        @wraps(fn)
        def run(img: SampleImage) -> DetectorOutcome:
            start = time.perf_counter()
            try:
                score = clamp_unit(float(fn(img)))
                reason = None
            except DetectorFailure as exc:
                score, reason = None, exc.reason
            except Exception:
                score, reason = None, FailureReason.NOT_APPLICABLE
            elapsed_ms = (time.perf_counter() - start) * 1e3
            return DetectorOutcome(detector_id, score, reason, elapsed_ms)

        return run

    return deco


def clamp_unit(x: float) -> float:
    """Clamp an estimate into [0, 1]; values outside are numerical artifacts."""
    if math.isnan(x):
        raise DetectorFailure(FailureReason.NUMERICAL_INSTABILITY, "NaN estimate")
    return min(1.0, max(0.0, x))


def solve_rate_quadratic(
    a: float,
    b: float,
    c: float,
    to_rate: Callable[[float], float] | None = None,
) -> float:
    """Solve a*x^2 + b*x + c = 0 and pick the embedding-rate root.

    ``to_rate`` maps a raw root to a rate estimate (identity when the
    quadratic is already in the rate). Preference order: rate candidates
    inside [0, 1], smaller first; otherwise the candidate closest to the
    unit interval, left to the caller's clamp.
    """
    if to_rate is None:
        to_rate = lambda x: x
    if a == 0.0:
        if b == 0.0:
            raise DetectorFailure(FailureReason.DEGENERATE_INPUT, "quadratic fully degenerate")
        roots = [-c / b]
    else:
        disc = b * b - 4.0 * a * c
        if disc < 0.0:
            raise DetectorFailure(FailureReason.NUMERICAL_INSTABILITY, "no real root")
        sq = math.sqrt(disc)
        roots = [(-b + sq) / (2.0 * a), (-b - sq) / (2.0 * a)]
    candidates = []
    for root in roots:
        try:
            rate = to_rate(root)
        except ZeroDivisionError:
            continue
        if not math.isnan(rate):
            candidates.append(rate)
    if not candidates:
        raise DetectorFailure(FailureReason.NUMERICAL_INSTABILITY, "no usable root")
    in_range = [r for r in candidates if 0.0 <= r <= 1.0]
    if in_range:
        return min(in_range)
    # No candidate lands in the unit interval: take the one nearest to it.
    return min(candidates, key=lambda r: -r if r < 0.0 else r - 1.0)
