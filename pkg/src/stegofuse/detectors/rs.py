"""RS analysis: regular/singular group counts under LSB and shifted flips.

Samples are grouped four-at-a-time along rows and classified by whether
flipping the masked positions raises or lowers the group's discrimination
(sum of absolute neighbour differences). Counts are taken on the image as
received and on its fully LSB-flipped twin, for both the LSB flip and the
shifted flip, which pins down the quadratic whose root encodes the
embedded message length. Estimates are averaged over every channel and
over overlapping and non-overlapping group layouts.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..images import SampleImage
from .base import DetectorFailure, DetectorId, FailureReason, detector, solve_rate_quadratic

_GROUP = 4
# Flip mask over each group of four consecutive samples.
_MASK = np.array([0, 1, 1, 0], dtype=bool)


def _lsb_flip(x: np.ndarray) -> np.ndarray:
    return x ^ 1


def _shifted_flip(x: np.ndarray) -> np.ndarray:
    # Pairs (-1,0), (1,2), ..., (255,256): even values step down, odd step up.
    return ((x + 1) ^ 1) - 1


def _variation(groups: np.ndarray) -> np.ndarray:
    return np.abs(np.diff(groups, axis=-1)).sum(axis=-1)


def _masked(groups: np.ndarray, flip) -> np.ndarray:
    out = groups.copy()
    out[..., _MASK] = flip(out[..., _MASK])
    return out


def _count_groups(plane: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Boolean regular/singular masks for all overlapping groups.

    Returns (positive_sign, negative_sign, usable) where the sign arrays
    hold +1 for regular, -1 for singular, 0 for unusable groups, laid out
    so that every fourth column reproduces the non-overlapping layout.
    """
    groups = sliding_window_view(plane, _GROUP, axis=1).astype(np.int16)
    base = _variation(groups)
    pos = _variation(_masked(groups, _lsb_flip))
    neg = _variation(_masked(groups, _shifted_flip))
    return np.sign(pos - base), np.sign(neg - base), int(base.sum())


def _deltas(sign_pos: np.ndarray, sign_neg: np.ndarray, overlap: bool) -> tuple[int, int]:
    if not overlap:
        sign_pos = sign_pos[:, ::_GROUP]
        sign_neg = sign_neg[:, ::_GROUP]
    # regular minus singular counts collapse to a plain sum of signs
    return int(sign_pos.sum()), int(sign_neg.sum())


def _message_length(x: float) -> float:
    return x / (x - 0.5)


def _channel_estimates(plane: np.ndarray) -> list[float]:
    """RS estimates for one channel, one per group layout."""
    if plane.shape[0] < 1 or plane.shape[1] < _GROUP:
        raise DetectorFailure(FailureReason.DEGENERATE_INPUT, "image too small for groups")
    sp0, sn0, texture = _count_groups(plane)
    if texture == 0:
        # Zero discrimination everywhere (constant content): no usable groups.
        raise DetectorFailure(FailureReason.DEGENERATE_INPUT, "flat channel")
    sp1, sn1, _ = _count_groups(plane ^ 1)  # all LSBs inverted

    estimates = []
    errors: list[DetectorFailure] = []
    for overlap in (True, False):
        d0, dn0 = _deltas(sp0, sn0, overlap)
        d1, dn1 = _deltas(sp1, sn1, overlap)
        a = 2.0 * (d1 + d0)
        b = float(dn0 - dn1 - d1 - 3 * d0)
        c = float(d0 - dn0)
        try:
            estimates.append(solve_rate_quadratic(a, b, c, to_rate=_message_length))
        except DetectorFailure as exc:
            errors.append(exc)
    if not estimates:
        raise errors[0]
    return estimates


@detector(DetectorId.RS)
def rs_analysis(img: SampleImage) -> float:
    estimates: list[float] = []
    failure: DetectorFailure | None = None
    for plane in img.planes:
        try:
            estimates.extend(_channel_estimates(plane.astype(np.int16)))
        except DetectorFailure as exc:
            # Keep the most specific reason if every channel ends up failing.
            if failure is None or exc.reason is FailureReason.NUMERICAL_INSTABILITY:
                failure = exc
    if not estimates:
        raise failure if failure is not None else DetectorFailure(
            FailureReason.DEGENERATE_INPUT, "no channels"
        )
    return float(np.mean(np.clip(estimates, 0.0, 1.0)))
