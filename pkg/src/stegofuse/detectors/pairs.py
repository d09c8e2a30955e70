"""Shared machinery for the two pair-based rate estimators.

Both Sample Pairs and Primary Sets partition pairs of neighbouring samples
into parity multisets: X (pairs whose even member is the larger), Y (even
member smaller), Z (equal pairs) and W (pairs inside one LSB bucket). LSB
replacement migrates pairs between X and Y at rates driven by the embedding
fraction p, and natural images satisfy |X| ~ |Y|, so p falls out of

    (|W| + |Z|)/2 * p^2 + (2|X| - |P|) * p + (|Y| - |X|) = 0.

The two detectors differ only in which pair family they feed in.
"""

from __future__ import annotations

import numpy as np

from .base import DetectorFailure, FailureReason, solve_rate_quadratic


def count_multisets(u: np.ndarray, v: np.ndarray) -> tuple[int, int, int, int, int]:
    """Count (P, X, Y, W, Z) over sample pairs (u, v).

    W here excludes equal pairs: it counts pairs that differ only in the LSB.
    """
    total = int(u.size)
    equal = u == v
    z = int(equal.sum())
    w = int(((u >> 1) == (v >> 1)).sum()) - z
    v_even = (v & 1) == 0
    x = int(((v_even & (u < v)) | (~v_even & (u > v))).sum())
    y = int(((v_even & (u > v)) | (~v_even & (u < v))).sum())
    return total, x, y, w, z


def rate_from_pairs(u: np.ndarray, v: np.ndarray) -> float:
    """Embedding-rate estimate from one channel's pair family."""
    total, x, y, w, z = count_multisets(u, v)
    if total == 0:
        raise DetectorFailure(FailureReason.DEGENERATE_INPUT, "no pairs")
    if x + y + w == 0:
        # Every pair identical: nothing for the parity statistics to bite on.
        raise DetectorFailure(FailureReason.DEGENERATE_INPUT, "trace multisets empty")
    a = 0.5 * (w + z)
    b = float(2 * x - total)
    c = float(y - x)
    return solve_rate_quadratic(a, b, c)


def average_channels(planes: np.ndarray, pair_rate) -> float:
    """Mean estimate over channels, skipping degenerate ones.

    ``pair_rate`` maps a single int16 plane to a rate estimate; a channel
    raising DetectorFailure is left out, and only if every channel fails is
    the failure propagated (most specific reason wins).
    """
    estimates = []
    failure: DetectorFailure | None = None
    for plane in planes:
        try:
            estimates.append(pair_rate(plane.astype(np.int16)))
        except DetectorFailure as exc:
            if failure is None or exc.reason is FailureReason.NUMERICAL_INSTABILITY:
                failure = exc
    if not estimates:
        raise failure if failure is not None else DetectorFailure(
            FailureReason.DEGENERATE_INPUT, "no channels"
        )
    return float(np.mean(np.clip(estimates, 0.0, 1.0)))
