"""Chi-square attack on pairs of values (PoVs) in the sample histogram.

LSB replacement evens out each histogram pair (2i, 2i+1); the attack tests
the observed even-bin counts against those evened expectations and reports
the p-value, so untouched images score near 0 and saturated embeddings near
1. Computed on the whole-image histogram per channel, then averaged.
"""

from __future__ import annotations

import numpy as np

from ..images import SampleImage
from .base import DetectorFailure, DetectorId, FailureReason, detector
from .gamma import chi_square_sf

# Classical validity floor: PoV pairs whose expected count is not above
# this are skipped and the degrees of freedom reduced accordingly.
EXPECTED_COUNT_FLOOR = 4.0


def pov_statistic(histogram: np.ndarray) -> tuple[float, int]:
    """Chi-square statistic and degrees of freedom for one 256-bin histogram."""
    h = np.asarray(histogram, dtype=np.float64)
    even = h[0::2]
    expected = (h[0::2] + h[1::2]) / 2.0
    keep = expected > EXPECTED_COUNT_FLOOR
    retained = int(keep.sum())
    if retained < 2:
        raise DetectorFailure(
            FailureReason.DEGENERATE_INPUT, "no PoV pair passes the expected-count floor"
        )
    chi2 = float((((even - expected) ** 2)[keep] / expected[keep]).sum())
    return chi2, retained - 1


def _channel_score(plane: np.ndarray) -> float:
    histogram = np.bincount(plane.ravel(), minlength=256)
    chi2, df = pov_statistic(histogram)
    return chi_square_sf(chi2, df)


@detector(DetectorId.CHI_SQUARE)
def chi_square_attack(img: SampleImage) -> float:
    scores = []
    for plane in img.planes:
        try:
            scores.append(_channel_score(plane))
        except DetectorFailure:
            continue
    if not scores:
        raise DetectorFailure(
            FailureReason.DEGENERATE_INPUT, "no channel has testable PoV mass"
        )
    return float(np.mean(scores))
