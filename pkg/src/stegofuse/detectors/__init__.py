"""The four component steganalysis detectors and their common result types."""

from __future__ import annotations

from ..images import SampleImage
from .base import (
    DetectorFailure,
    DetectorFunc,
    DetectorId,
    DetectorOutcome,
    FailureReason,
)
from .chi_square import chi_square_attack
from .primary_sets import primary_sets
from .rs import rs_analysis
from .sample_pairs import sample_pairs

# Column order used by reports (full-report CSV layout).
REPORT_ORDER: tuple[DetectorId, ...] = (
    DetectorId.PRIMARY_SETS,
    DetectorId.CHI_SQUARE,
    DetectorId.SAMPLE_PAIRS,
    DetectorId.RS,
)

# Stage order of the fast-fusion cascade (cheap and forgiving first).
CASCADE_ORDER: tuple[DetectorId, ...] = (
    DetectorId.PRIMARY_SETS,
    DetectorId.SAMPLE_PAIRS,
    DetectorId.CHI_SQUARE,
    DetectorId.RS,
)

DETECTOR_FUNCS: dict[DetectorId, DetectorFunc] = {
    DetectorId.PRIMARY_SETS: primary_sets,
    DetectorId.CHI_SQUARE: chi_square_attack,
    DetectorId.SAMPLE_PAIRS: sample_pairs,
    DetectorId.RS: rs_analysis,
}


def run_all_detectors(img: SampleImage) -> list[DetectorOutcome]:
    """Run all four detectors, each independently timed.

    Failures come back as values; one detector can never abort the others.
    """
    return [DETECTOR_FUNCS[detector_id](img) for detector_id in REPORT_ORDER]


__all__ = [
    "CASCADE_ORDER",
    "DETECTOR_FUNCS",
    "DetectorFailure",
    "DetectorFunc",
    "DetectorId",
    "DetectorOutcome",
    "FailureReason",
    "REPORT_ORDER",
    "chi_square_attack",
    "primary_sets",
    "rs_analysis",
    "run_all_detectors",
    "sample_pairs",
]
