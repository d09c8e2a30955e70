"""ROC/AUC evaluation, fusion-rule comparison, threshold tables, speed trials.

AUC is trapezoidal over every operating point (one threshold per distinct
score, plus the all-clean anchor), which makes it exactly the rank
statistic P(stego score > clean score) with half credit for ties. Scores
at or above a threshold classify as stego, matching the fusion boundary
rule.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .detectors import DETECTOR_FUNCS, DetectorId, DetectorOutcome, run_all_detectors
from .embedder import PoolManifest
from .fusion import DEFAULT_THRESHOLD, fast_fusion, standard_fusion
from .images import decode_image

Scored = Sequence[tuple[float, bool]]  # (score, is_stego)


class SingleClassInput(Exception):
    """ROC needs at least one stego and one clean score."""


@dataclass(frozen=True)
class RocPoint:
    threshold: float
    fall_out: float
    sensitivity: float


@dataclass(frozen=True)
class RocCurve:
    points: tuple[RocPoint, ...]
    auc: float


def _rates_at(scores: np.ndarray, labels: np.ndarray, threshold: float) -> tuple[float, float]:
    flagged = scores >= threshold
    sensitivity = float(flagged[labels].mean()) if labels.any() else 0.0
    fall_out = float(flagged[~labels].mean()) if (~labels).any() else 0.0
    return fall_out, sensitivity


def roc_curve(scored: Scored) -> RocCurve:
    """Sweep every distinct score as a threshold; trapezoidal AUC."""
    scores = np.array([s for s, _ in scored], dtype=np.float64)
    labels = np.array([bool(l) for _, l in scored])
    if len(scores) == 0 or labels.all() or not labels.any():
        raise SingleClassInput("need at least one stego and one clean score")
    thresholds = [math.inf] + sorted(set(scores.tolist()), reverse=True)
    points = []
    for threshold in thresholds:
        fall_out, sensitivity = _rates_at(scores, labels, threshold)
        points.append(RocPoint(threshold, fall_out, sensitivity))
    xs = [p.fall_out for p in points]
    ys = [p.sensitivity for p in points]
    auc = float(np.trapezoid(ys, xs))
    return RocCurve(tuple(points), auc)


def threshold_table(scored: Scored, thresholds: Iterable[float]) -> list[RocPoint]:
    """fall-out and sensitivity at each requested threshold."""
    scores = np.array([s for s, _ in scored], dtype=np.float64)
    labels = np.array([bool(l) for _, l in scored])
    rows = []
    for threshold in thresholds:
        fall_out, sensitivity = _rates_at(scores, labels, threshold)
        rows.append(RocPoint(threshold, fall_out, sensitivity))
    return rows


# ---------------------------------------------------------------------------
# Fusion-rule comparison
# ---------------------------------------------------------------------------

LabelledOutcomes = Sequence[tuple[bool, Sequence[DetectorOutcome]]]


@dataclass(frozen=True)
class RuleAuc:
    rule: str
    auc: float
    files_scored: int  # files the rule produced a score for


def _rule_scores(outcomes: Sequence[DetectorOutcome], rule: str) -> float | None:
    values = [o.score for o in outcomes if o.ok]
    if not values:
        return None
    if rule == "ArithmeticMean":
        return float(np.mean(values))
    if rule == "GeometricMean":
        return float(np.prod(values) ** (1.0 / len(values)))
    if rule == "Max":
        return float(max(values))
    raise ValueError(f"unknown rule {rule}")


FUSION_RULES = ("ArithmeticMean", "GeometricMean", "Max")


def compare_fusion_rules(labelled: LabelledOutcomes) -> list[RuleAuc]:
    """AUC for each fusion rule and each single detector over one pool.

    Files for which a rule has no usable score (the detector failed, or all
    four failed) are disregarded for that rule, mirroring how fusion itself
    treats failures.
    """
    results = []
    for rule in FUSION_RULES:
        scored = []
        for label, outcomes in labelled:
            score = _rule_scores(outcomes, rule)
            if score is not None:
                scored.append((score, label))
        results.append(RuleAuc(rule, roc_curve(scored).auc, len(scored)))
    for detector_id in DetectorId:
        scored = []
        for label, outcomes in labelled:
            for outcome in outcomes:
                if outcome.detector_id is detector_id and outcome.ok:
                    scored.append((outcome.score, label))
        results.append(RuleAuc(detector_id.value, roc_curve(scored).auc, len(scored)))
    return results


# ---------------------------------------------------------------------------
# Speed benchmark
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpeedEntry:
    name: str
    trials_ms: tuple[float, ...]
    images_processed: int

    @property
    def mean_ms(self) -> float:
        return sum(self.trials_ms) / len(self.trials_ms)


@dataclass(frozen=True)
class SpeedReport:
    entries: tuple[SpeedEntry, ...]
    pool_images: int
    pool_stego: int | None  # composition, when a manifest is available

    def entry(self, name: str) -> SpeedEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)


def _time_over_pool(paths: Sequence[Path], analyse: Callable, trials: int) -> tuple[float, ...]:
    times = []
    for _ in range(trials):
        start = time.perf_counter()
        for path in paths:
            analyse(decode_image(path))
        times.append((time.perf_counter() - start) * 1e3)
    return tuple(times)


def speed_benchmark(
    pool_dir: Path | str,
    threshold: float = DEFAULT_THRESHOLD,
    trials: int = 3,
    manifest: PoolManifest | None = None,
) -> SpeedReport:
    """Wall-clock trials per detector and per fusion mode, single worker.

    Each trial times the full pipeline (decode included) over every image in
    the pool; the per-entry mean of the three trials is the benchmark figure.
    """
    pool_dir = Path(pool_dir)
    if manifest is None:
        candidate = pool_dir / "manifest.csv"
        manifest = PoolManifest.load(candidate) if candidate.exists() else None
    if manifest is not None:
        paths = [pool_dir / row.path for row in manifest.rows]
        stego = len(manifest.stego_rows)
    else:
        paths = sorted(p for p in pool_dir.glob("*.png"))
        stego = None

    entries = []
    for detector_id, func in DETECTOR_FUNCS.items():
        entries.append(
            SpeedEntry(detector_id.value, _time_over_pool(paths, func, trials), len(paths))
        )
    entries.append(
        SpeedEntry(
            "standard fusion",
            _time_over_pool(paths, lambda img: standard_fusion(run_all_detectors(img), threshold), trials),
            len(paths),
        )
    )
    entries.append(
        SpeedEntry(
            "fast fusion",
            _time_over_pool(paths, lambda img: fast_fusion(img, threshold), trials),
            len(paths),
        )
    )
    return SpeedReport(tuple(entries), len(paths), stego)


# ---------------------------------------------------------------------------
# CSV table emission
# ---------------------------------------------------------------------------


def write_roc_csv(curve: RocCurve, path: Path | str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["threshold", "fall-out", "sensitivity"])
        for p in curve.points:
            writer.writerow([f"{p.threshold:.6f}", f"{p.fall_out:.6f}", f"{p.sensitivity:.6f}"])


def write_threshold_table_csv(rows: Sequence[RocPoint], path: Path | str) -> None:
    write_roc_csv(RocCurve(tuple(rows), auc=0.0), path)


def write_auc_table_csv(rows: Sequence[RuleAuc], path: Path | str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["rule", "auc", "files scored"])
        for row in rows:
            writer.writerow([row.rule, f"{row.auc:.6f}", row.files_scored])


def write_speed_csv(report: SpeedReport, path: Path | str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["detector", "trial 1 ms", "trial 2 ms", "trial 3 ms", "mean ms", "images"])
        for e in report.entries:
            trials = [f"{t:.3f}" for t in e.trials_ms] + [""] * (3 - len(e.trials_ms))
            writer.writerow([e.name, *trials[:3], f"{e.mean_ms:.3f}", e.images_processed])
