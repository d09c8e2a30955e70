"""Primary Sets analysis: the pair-parity identity over all adjacent pairs.

Uses the densest spatial-adjacency family (every overlapping horizontal and
vertical neighbour pair), which separates its estimate from Sample Pairs'
sparser non-overlapping family while leaning on the same statistical
identity between the parity sets of a natural image.
"""

from __future__ import annotations

import numpy as np

from ..images import SampleImage
from .base import DetectorId, detector
from .pairs import average_channels, rate_from_pairs


def _channel_rate(plane: np.ndarray) -> float:
    u = np.concatenate([plane[:, :-1].ravel(), plane[:-1, :].ravel()])
    v = np.concatenate([plane[:, 1:].ravel(), plane[1:, :].ravel()])
    return rate_from_pairs(u, v)


@detector(DetectorId.PRIMARY_SETS)
def primary_sets(img: SampleImage) -> float:
    return average_channels(img.planes, _channel_rate)
