import math

import numpy as np
import pytest

from helpers import mann_whitney_auc, outcomes_from_scores

from stegofuse.embedder import Distribution, generate_pool
from stegofuse.evaluation import (
    RocPoint,
    SingleClassInput,
    compare_fusion_rules,
    roc_curve,
    speed_benchmark,
    threshold_table,
    write_auc_table_csv,
    write_roc_csv,
    write_speed_csv,
)


def test_perfect_separation_auc_one():
    curve = roc_curve([(0.9, True), (0.8, True), (0.4, False), (0.2, False)])
    assert curve.auc == pytest.approx(1.0)


def test_identical_scores_auc_half():
    curve = roc_curve([(0.5, True), (0.5, False), (0.5, True), (0.5, False)])
    assert curve.auc == pytest.approx(0.5)


def test_interleaved_scores_auc_three_quarters():
    # 3 of 4 (stego, clean) rank pairs concordant
    curve = roc_curve([(0.9, True), (0.6, False), (0.4, True), (0.2, False)])
    assert curve.auc == pytest.approx(0.75)


def test_curve_has_both_endpoints_and_is_monotone():
    rng = np.random.default_rng(0)
    scored = [(float(s), bool(l)) for s, l in zip(rng.random(50), rng.random(50) < 0.4)]
    curve = roc_curve(scored)
    assert (curve.points[0].fall_out, curve.points[0].sensitivity) == (0.0, 0.0)
    assert (curve.points[-1].fall_out, curve.points[-1].sensitivity) == (1.0, 1.0)
    fall = [p.fall_out for p in curve.points]
    sens = [p.sensitivity for p in curve.points]
    assert fall == sorted(fall) and sens == sorted(sens)
    thresholds = [p.threshold for p in curve.points]
    assert thresholds == sorted(thresholds, reverse=True)


def test_single_class_rejected():
    with pytest.raises(SingleClassInput):
        roc_curve([(0.5, True), (0.6, True)])
    with pytest.raises(SingleClassInput):
        roc_curve([])


def test_auc_matches_mann_whitney_bruteforce():
    rng = np.random.default_rng(42)
    for _ in range(20):
        n = int(rng.integers(10, 120))
        scores = np.round(rng.random(n), 2)  # rounding forces ties
        labels = rng.random(n) < 0.5
        if labels.all() or not labels.any():
            continue
        scored = list(zip(scores.tolist(), labels.tolist()))
        assert roc_curve(scored).auc == pytest.approx(
            mann_whitney_auc(scored), abs=1e-9
        )


def test_auc_invariant_under_monotone_transform():
    rng = np.random.default_rng(7)
    scores = rng.random(60)
    labels = rng.random(60) < 0.3
    scored = list(zip(scores.tolist(), labels.tolist()))
    warped = [(math.tanh(3 * s), l) for s, l in scored]
    assert roc_curve(scored).auc == pytest.approx(roc_curve(warped).auc, abs=1e-12)


# ---------------------------------------------------------------------------
# Threshold table
# ---------------------------------------------------------------------------


def test_threshold_zero_flags_everything():
    rows = threshold_table([(0.3, True), (0.1, False)], [0.0])
    assert rows == [RocPoint(0.0, 1.0, 1.0)]


def test_threshold_one_with_all_scores_below():
    rows = threshold_table([(0.3, True), (0.1, False)], [1.0])
    assert rows == [RocPoint(1.0, 0.0, 0.0)]


def test_threshold_table_is_monotone_in_threshold():
    rng = np.random.default_rng(3)
    scored = [(float(s), bool(l)) for s, l in zip(rng.random(80), rng.random(80) < 0.5)]
    rows = threshold_table(scored, [0.2, 0.4])
    assert rows[1].fall_out <= rows[0].fall_out
    assert rows[1].sensitivity <= rows[0].sensitivity


# ---------------------------------------------------------------------------
# Fusion-rule comparison
# ---------------------------------------------------------------------------


def _labelled_from_matrix(matrix, labels):
    return [
        (label, outcomes_from_scores(list(scores))) for scores, label in zip(matrix, labels)
    ]


def test_identical_detector_scores_make_rules_agree():
    rng = np.random.default_rng(9)
    rows = []
    labels = []
    for i in range(30):
        s = float(rng.random())
        rows.append([s, s, s, s])
        labels.append(i % 2 == 0)
    table = {r.rule: r.auc for r in compare_fusion_rules(_labelled_from_matrix(rows, labels))}
    assert table["ArithmeticMean"] == pytest.approx(table["GeometricMean"])
    assert table["ArithmeticMean"] == pytest.approx(table["Max"])


def test_geometric_mean_zero_absorbs():
    rows = [[0.0, 0.9, 0.9, 0.9], [0.5, 0.5, 0.5, 0.5]]
    labelled = _labelled_from_matrix(rows, [True, False])
    outcomes = labelled[0][1]
    from stegofuse.evaluation import _rule_scores

    assert _rule_scores(outcomes, "GeometricMean") == pytest.approx(0.0)


def test_failures_drop_files_per_rule():
    labelled = [
        (True, outcomes_from_scores([None, None, None, None])),
        (True, outcomes_from_scores([0.9, 0.8, 0.7, 0.6])),
        (False, outcomes_from_scores([0.1, 0.2, 0.1, 0.2])),
    ]
    for row in compare_fusion_rules(labelled):
        if row.rule in ("ArithmeticMean", "GeometricMean", "Max"):
            assert row.files_scored == 2


# ---------------------------------------------------------------------------
# Speed benchmark bookkeeping
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def mini_pool(tmp_path_factory):
    from stegofuse.synthetic import write_cover_corpus

    covers = tmp_path_factory.mktemp("bench_covers")
    write_cover_corpus(covers, count=4, seed=15, min_pixels=6_000, max_pixels=10_000)
    pool = tmp_path_factory.mktemp("bench_pool")
    generate_pool(covers, pool, 0.25, [0.5], [Distribution.PSEUDORANDOM], seed=2)
    return pool


def test_speed_report_records_three_trials(mini_pool):
    report = speed_benchmark(mini_pool, threshold=0.2, trials=3)
    names = {e.name for e in report.entries}
    assert {"standard fusion", "fast fusion", "rs analysis", "chi square",
            "sample pairs", "primary sets"} <= names
    for entry in report.entries:
        assert len(entry.trials_ms) == 3
        assert entry.mean_ms == pytest.approx(sum(entry.trials_ms) / 3)
        assert entry.images_processed == 4
    assert report.pool_images == 4
    assert report.pool_stego == 1


def test_table_writers_produce_csv(mini_pool, tmp_path):
    report = speed_benchmark(mini_pool, threshold=0.2, trials=1)
    write_speed_csv(report, tmp_path / "speed.csv")
    header = (tmp_path / "speed.csv").read_text().splitlines()[0]
    assert header.startswith("detector,")

    curve = roc_curve([(0.9, True), (0.1, False)])
    write_roc_csv(curve, tmp_path / "roc.csv")
    assert (tmp_path / "roc.csv").read_text().splitlines()[0] == "threshold,fall-out,sensitivity"

    labelled = _labelled_from_matrix([[0.9, 0.9, 0.9, 0.9], [0.1, 0.1, 0.1, 0.1]], [True, False])
    write_auc_table_csv(compare_fusion_rules(labelled), tmp_path / "auc.csv")
    assert "ArithmeticMean" in (tmp_path / "auc.csv").read_text()
