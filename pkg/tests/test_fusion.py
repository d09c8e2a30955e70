import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import StubSuite, cascade_oracle, outcomes_from_scores, tiny_image

from stegofuse.fusion import (
    FusionConfig,
    FusionMode,
    Verdict,
    fast_fusion,
    quantify_payload,
    standard_fusion,
)

score_or_failure = st.one_of(
    st.none(), st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
)
four_scores = st.lists(score_or_failure, min_size=4, max_size=4)
thresholds = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


# ---------------------------------------------------------------------------
# Standard fusion
# ---------------------------------------------------------------------------


def test_standard_mean_of_four():
    trace = standard_fusion(outcomes_from_scores([0.1, 0.2, 0.3, 0.4]), threshold=0.2)
    assert trace.fusion_score == pytest.approx(0.25)
    assert trace.verdict is Verdict.STEGO
    assert trace.detectors_run == 4
    assert trace.exit_stage is None


def test_standard_disregards_failures():
    trace = standard_fusion(outcomes_from_scores([0.3, None, 0.5, None]), threshold=0.2)
    assert trace.fusion_score == pytest.approx(0.4)
    assert trace.verdict is Verdict.STEGO


def test_standard_all_failures_is_indeterminate():
    trace = standard_fusion(outcomes_from_scores([None] * 4))
    assert trace.fusion_score is None
    assert trace.verdict is Verdict.INDETERMINATE


def test_standard_requires_four_outcomes():
    with pytest.raises(ValueError):
        standard_fusion(outcomes_from_scores([0.1, 0.2, 0.3, 0.4])[:3])


def test_standard_tie_at_threshold_is_stego():
    trace = standard_fusion(outcomes_from_scores([0.2, 0.2, 0.2, 0.2]), threshold=0.2)
    assert trace.verdict is Verdict.STEGO


# ---------------------------------------------------------------------------
# Fast fusion: the three worked examples, checked against the oracle too
# ---------------------------------------------------------------------------


def _run_fast(scores, threshold):
    suite = StubSuite(scores)
    trace = fast_fusion(tiny_image(), threshold, suite=suite.entries)
    return trace, suite


def test_fast_low_first_stage_exits_immediately():
    trace, suite = _run_fast([0.05, 0.9, 0.9, 0.9], threshold=0.2)
    assert trace.verdict is Verdict.CLEAN
    assert trace.exit_stage == 1
    assert trace.detectors_run == 1
    assert suite.calls == [1, 0, 0, 0]  # later stages never executed
    assert trace.fusion_score == pytest.approx(0.05)


def test_fast_all_stages_above_threshold():
    trace, _ = _run_fast([0.5, 0.4, 0.3, 0.35], threshold=0.2)
    assert [s.running_mean for s in trace.stages] == pytest.approx([0.5, 0.45, 0.4, 0.3875])
    assert trace.verdict is Verdict.STEGO
    assert trace.fusion_score == pytest.approx(0.3875)
    assert trace.exit_stage is None


def test_fast_zero_weights_failed_stage():
    trace, _ = _run_fast([0.5, None, 0.1, 0.02], threshold=0.2)
    assert [s.running_mean for s in trace.stages] == pytest.approx(
        [0.5, 0.5, 0.3, (0.5 + 0.1 + 0.02) / 3]
    )
    assert trace.verdict is Verdict.STEGO
    assert trace.fusion_score == pytest.approx(0.62 / 3)


@pytest.mark.parametrize(
    "scores,threshold",
    [
        ([0.05, 0.9, 0.9, 0.9], 0.2),
        ([0.5, 0.4, 0.3, 0.35], 0.2),
        ([0.5, None, 0.1, 0.02], 0.2),
    ],
)
def test_worked_examples_match_bruteforce_oracle(scores, threshold):
    trace, _ = _run_fast(scores, threshold)
    verdict, score, stages = cascade_oracle(scores, threshold)
    assert trace.verdict.value == verdict
    assert trace.detectors_run == stages
    if score is None:
        assert trace.fusion_score is None
    else:
        assert trace.fusion_score == pytest.approx(score, abs=1e-12)


def test_fast_all_failures_is_indeterminate():
    trace, suite = _run_fast([None] * 4, threshold=0.2)
    assert trace.verdict is Verdict.INDETERMINATE
    assert trace.fusion_score is None
    assert suite.calls == [1, 1, 1, 1]  # undefined mean cannot justify an exit


def test_fast_failed_prefix_continues_then_exits():
    trace, suite = _run_fast([None, None, 0.05, 0.9], threshold=0.2)
    assert trace.verdict is Verdict.CLEAN
    assert trace.exit_stage == 3
    assert suite.calls == [1, 1, 1, 0]


# ---------------------------------------------------------------------------
# Property suite
# ---------------------------------------------------------------------------


@settings(max_examples=300, deadline=None)
@given(scores=four_scores, threshold=thresholds)
def test_fast_agrees_with_oracle(scores, threshold):
    trace, suite = _run_fast(scores, threshold)
    verdict, score, stages = cascade_oracle(scores, threshold)
    assert trace.verdict.value == verdict
    assert trace.detectors_run == stages
    assert suite.calls == [1] * stages + [0] * (4 - stages)
    if score is None:
        assert trace.fusion_score is None
    else:
        assert trace.fusion_score == pytest.approx(score, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(scores=four_scores)
def test_completed_cascade_mean_equals_standard_fusion(scores):
    trace, _ = _run_fast(scores, threshold=0.0)  # threshold 0 never early-exits
    standard = standard_fusion(outcomes_from_scores(scores), threshold=0.0)
    assert trace.detectors_run == 4
    if standard.fusion_score is None:
        assert trace.fusion_score is None
    else:
        assert trace.fusion_score == pytest.approx(standard.fusion_score, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(scores=four_scores, low=thresholds, high=thresholds)
def test_raising_threshold_never_turns_clean_into_stego(scores, low, high):
    if low > high:
        low, high = high, low
    verdict_low = _run_fast(scores, low)[0].verdict
    verdict_high = _run_fast(scores, high)[0].verdict
    if verdict_high is Verdict.STEGO:
        assert verdict_low is Verdict.STEGO


@settings(max_examples=200, deadline=None)
@given(scores=four_scores, threshold=thresholds, position=st.integers(0, 3))
def test_zero_weighting_equals_absent_detector(scores, threshold, position):
    scores = list(scores)
    scores[position] = None
    with_failure, _ = _run_fast(scores, threshold)
    reduced = [s for i, s in enumerate(scores) if i != position]
    suite = StubSuite(reduced + [None])  # placeholder id mapping; only 3 run
    shorter = fast_fusion(tiny_image(), threshold, suite=suite.entries[:3])
    defined_full = [m.running_mean for m in with_failure.stages if m.running_mean is not None]
    defined_short = [m.running_mean for m in shorter.stages if m.running_mean is not None]
    # the failed stage contributes nothing: the defined running means coincide
    for mean in defined_short:
        assert any(math.isclose(mean, other, abs_tol=1e-12) for other in defined_full)
    assert (with_failure.fusion_score is None) == (shorter.fusion_score is None)
    if with_failure.fusion_score is not None:
        assert with_failure.fusion_score == pytest.approx(shorter.fusion_score, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(scores=st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=4, max_size=4))
def test_threshold_zero_never_exits_threshold_one_demands_perfection(scores):
    at_zero, suite_zero = _run_fast(scores, 0.0)
    assert suite_zero.calls == [1, 1, 1, 1]
    assert at_zero.verdict is Verdict.STEGO
    at_one, _ = _run_fast(scores, 1.0)
    if all(s == 1.0 for s in scores):
        assert at_one.verdict is Verdict.STEGO
    else:
        assert at_one.verdict is Verdict.CLEAN


# ---------------------------------------------------------------------------
# Config and payload quantification
# ---------------------------------------------------------------------------


def test_config_defaults_and_invalid_threshold():
    assert FusionConfig().threshold == 0.2
    assert FusionConfig(threshold=1.5).threshold == 0.2
    assert FusionConfig(threshold=-0.1).threshold == 0.2
    assert FusionConfig(threshold=0.35).threshold == 0.35
    assert FusionConfig(mode=FusionMode.FAST).mode is FusionMode.FAST


def test_quantify_payload_examples():
    assert quantify_payload(0.5, 3_000_000) == 500_000
    assert quantify_payload(0.0, 12345) == 0
    assert quantify_payload(1.0, 300) == 100


def test_quantify_payload_validates():
    with pytest.raises(ValueError):
        quantify_payload(1.5, 100)
    with pytest.raises(ValueError):
        quantify_payload(0.5, 0)
