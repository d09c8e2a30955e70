"""Shared test utilities: image builders, detector stubs, independent oracles.

The oracles here are deliberately naive re-implementations (brute force over
pairs, a plain-Python cascade) so they stay independent of the code paths
they check.
"""

from __future__ import annotations

import numpy as np

from stegofuse.detectors import DetectorId, DetectorOutcome, FailureReason
from stegofuse.images import SampleImage, image_from_planes

CASCADE_IDS = (
    DetectorId.PRIMARY_SETS,
    DetectorId.SAMPLE_PAIRS,
    DetectorId.CHI_SQUARE,
    DetectorId.RS,
)


def make_image(planes) -> SampleImage:
    return image_from_planes(np.asarray(planes, dtype=np.uint8))


def tiny_image() -> SampleImage:
    return make_image(np.arange(64, dtype=np.uint8).reshape(1, 8, 8))


def outcome(detector_id: DetectorId, score: float | None) -> DetectorOutcome:
    if score is None:
        return DetectorOutcome(detector_id, None, FailureReason.DEGENERATE_INPUT)
    return DetectorOutcome(detector_id, score)


def outcomes_from_scores(scores) -> list[DetectorOutcome]:
    """Four outcomes in report order from a list of float-or-None."""
    from stegofuse.detectors import REPORT_ORDER

    assert len(scores) == 4
    return [outcome(d, s) for d, s in zip(REPORT_ORDER, scores)]


class StubSuite:
    """A fake detector suite replaying fixed scores, counting executions."""

    def __init__(self, scores):
        assert len(scores) <= 4
        self.calls = [0] * len(scores)
        self._entries = []
        for index, (detector_id, score) in enumerate(zip(CASCADE_IDS, scores)):
            self._entries.append((detector_id, self._make(index, detector_id, score)))

    def _make(self, index, detector_id, score):
        def run(_img):
            self.calls[index] += 1
            return outcome(detector_id, score)

        return run

    @property
    def entries(self):
        return self._entries


def cascade_oracle(scores, threshold):
    """Plain re-implementation of the early-exit cascade.

    ``scores``: float-or-None per stage in cascade order. Returns
    (verdict, fusion_score, stages_run).
    """
    seen = []
    for number, score in enumerate(scores, start=1):
        seen.append(score)
        usable = [s for s in seen if s is not None]
        if usable:
            mean = sum(usable) / len(usable)
            if mean < threshold:
                return "clean", mean, number
    usable = [s for s in seen if s is not None]
    if not usable:
        return "indeterminate", None, len(scores)
    return "stego", sum(usable) / len(usable), len(scores)


def mann_whitney_auc(scored) -> float:
    """Brute-force AUC: P(stego > clean) + 0.5 * P(tie) over all pairs."""
    stego = [s for s, label in scored if label]
    clean = [s for s, label in scored if not label]
    if not stego or not clean:
        raise ValueError("need both classes")
    wins = 0.0
    for s in stego:
        for c in clean:
            if s > c:
                wins += 1.0
            elif s == c:
                wins += 0.5
    return wins / (len(stego) * len(clean))
