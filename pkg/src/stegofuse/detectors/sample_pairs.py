"""Sample Pairs analysis over non-overlapping horizontally adjacent pairs."""

from __future__ import annotations

import numpy as np

from ..images import SampleImage
from .base import DetectorId, detector
from .pairs import average_channels, rate_from_pairs


def _channel_rate(plane: np.ndarray) -> float:
    width = plane.shape[1] - (plane.shape[1] % 2)
    u = plane[:, 0:width:2].ravel()
    v = plane[:, 1:width:2].ravel()
    return rate_from_pairs(u, v)


@detector(DetectorId.SAMPLE_PAIRS)
def sample_pairs(img: SampleImage) -> float:
    return average_channels(img.planes, _channel_rate)
