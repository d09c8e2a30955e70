"""Detector fusion: mean-of-scores and the four-stage early-exit cascade.

Both modes treat a failed detector identically: it is simply absent from
the arithmetic mean (zero weighting). The cascade classifies a file clean
the moment its running mean drops below threshold and never runs the
remaining detectors; a file is stego only if it survives all four stages
with the final mean still at or above threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

from .detectors import CASCADE_ORDER, DETECTOR_FUNCS, DetectorId, DetectorOutcome
from .images import SampleImage

DEFAULT_THRESHOLD = 0.2

DetectorSuite = Sequence[tuple[DetectorId, Callable[[SampleImage], DetectorOutcome]]]


class FusionMode(Enum):
    STANDARD = "standard"
    FAST = "fast"


class Verdict(Enum):
    STEGO = "stego"
    CLEAN = "clean"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class FusionConfig:
    mode: FusionMode = FusionMode.STANDARD
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self) -> None:
        # Out-of-range or non-finite thresholds fall back to the default.
        t = self.threshold
        if not isinstance(t, (int, float)) or not (0.0 <= t <= 1.0):
            object.__setattr__(self, "threshold", DEFAULT_THRESHOLD)


@dataclass(frozen=True)
class FusionStage:
    detector_id: DetectorId
    outcome: DetectorOutcome
    running_mean: float | None  # absent while every detector so far has failed


@dataclass(frozen=True)
class FusionTrace:
    mode: FusionMode
    stages: tuple[FusionStage, ...]
    exit_stage: int | None  # 1-based stage of a below-threshold clean exit
    fusion_score: float | None
    verdict: Verdict

    @property
    def detectors_run(self) -> int:
        return len(self.stages)

    def score_of(self, detector_id: DetectorId) -> float | None:
        for stage in self.stages:
            if stage.detector_id is detector_id:
                return stage.outcome.score
        return None


def _default_suite() -> DetectorSuite:
    return [(detector_id, DETECTOR_FUNCS[detector_id]) for detector_id in CASCADE_ORDER]


def _running_means(outcomes: Sequence[DetectorOutcome]) -> list[float | None]:
    means: list[float | None] = []
    total, count = 0.0, 0
    for outcome in outcomes:
        if outcome.ok:
            total += outcome.score
            count += 1
        means.append(total / count if count else None)
    return means


def standard_fusion(
    outcomes: Sequence[DetectorOutcome],
    threshold: float = DEFAULT_THRESHOLD,
) -> FusionTrace:
    """Arithmetic mean over successful detectors; failures are disregarded."""
    if len(outcomes) != 4:
        raise ValueError(f"standard fusion expects 4 outcomes, got {len(outcomes)}")
    means = _running_means(outcomes)
    score = means[-1]
    if score is None:
        verdict = Verdict.INDETERMINATE
    else:
        verdict = Verdict.STEGO if score >= threshold else Verdict.CLEAN
    stages = tuple(
        FusionStage(o.detector_id, o, m) for o, m in zip(outcomes, means)
    )
    return FusionTrace(FusionMode.STANDARD, stages, None, score, verdict)


def fast_fusion(
    img: SampleImage,
    threshold: float = DEFAULT_THRESHOLD,
    suite: DetectorSuite | None = None,
) -> FusionTrace:
    """Early-exit cascade; detectors past the exit stage are never executed.

    An undefined running mean (every detector so far failed) cannot justify
    a clean exit, so the cascade presses on to the next stage.
    """
    if suite is None:
        suite = _default_suite()
    stages: list[FusionStage] = []
    total, count = 0.0, 0
    for number, (detector_id, func) in enumerate(suite, start=1):
        outcome = func(img)
        if outcome.ok:
            total += outcome.score
            count += 1
        mean = total / count if count else None
        stages.append(FusionStage(detector_id, outcome, mean))
        if mean is not None and mean < threshold:
            return FusionTrace(FusionMode.FAST, tuple(stages), number, mean, Verdict.CLEAN)
    final = stages[-1].running_mean if stages else None
    if final is None:
        return FusionTrace(FusionMode.FAST, tuple(stages), None, None, Verdict.INDETERMINATE)
    return FusionTrace(FusionMode.FAST, tuple(stages), None, final, Verdict.STEGO)


def quantify_payload(fusion_score: float, file_size: int) -> int:
    """Estimated embedded payload in bytes: score times file size over three."""
    if not (0.0 <= fusion_score <= 1.0):
        raise ValueError(f"fusion score {fusion_score} outside [0, 1]")
    if file_size <= 0:
        raise ValueError("file_size must be positive")
    return int(fusion_score * file_size / 3.0 + 0.5)
