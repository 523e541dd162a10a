import logging

import numpy as np
import pytest

from flowcorr.deepcorr import build_network
from flowcorr.evaluation import (
    BaselineCorrelator,
    NetworkCorrelator,
    auc,
    benchmark_correlation_time,
    curve_area,
    default_thresholds,
    prefix_sweep,
    raptor_accuracy,
    rates_at,
    rates_by_test_size,
    roc_sweep,
    score_matrix,
    summarize,
    tp_at_fp,
)
from flowcorr.exceptions import ParameterError
from flowcorr.models import PresetConfig, ScoreMatrix
from flowcorr.statcorr import MetricKind


def square(scores):
    scores = np.asarray(scores, dtype=float)
    ids = [f"r{i}" for i in range(scores.shape[0])]
    cols = [f"c{j}" for j in range(scores.shape[1])]
    return ScoreMatrix.diagonal_truth(ids, cols, scores)


# ---------- ROC ----------

def test_roc_at_half():
    curve = roc_sweep([0.9, 0.8], [0.1, 0.2], thresholds=[0.5])
    point = curve.points[0]
    assert (point.tp, point.fp) == (1.0, 0.0)


def test_roc_extremes():
    curve = roc_sweep([0.9, 0.3], [0.1, 0.6], thresholds=[-np.inf, 1.0])
    assert [(p.tp, p.fp) for p in curve.points] == [(1.0, 1.0), (0.0, 0.0)]


def test_roc_is_strict_at_ties():
    point = roc_sweep([0.5], [0.5], thresholds=[0.5]).points[0]
    assert (point.tp, point.fp) == (0.0, 0.0)


def test_roc_matches_brute_force(rng):
    pos = np.round(rng.uniform(size=200), 2)
    neg = np.round(rng.uniform(size=300) ** 2, 2)
    curve = roc_sweep(pos, neg)
    assert curve.etas.tolist() == default_thresholds(pos, neg).tolist()
    for point in curve.points:
        assert point.tp == sum(p > point.eta for p in pos) / pos.size
        assert point.fp == sum(p > point.eta for p in neg) / neg.size
    assert np.all(np.diff(curve.tp_rates) <= 0)
    assert np.all(np.diff(curve.fp_rates) <= 0)


def test_default_thresholds_include_bounds():
    assert default_thresholds([0.3, 0.3], [0.7]).tolist() == [0.0, 0.3, 0.7, 1.0]


def test_empty_scores_rejected():
    with pytest.raises(ParameterError):
        roc_sweep([], [0.1])
    with pytest.raises(ParameterError):
        auc([0.1], [])


# ---------- AUC ----------

def test_auc_known_values():
    assert auc([0.9, 0.8], [0.1, 0.2]) == 1.0
    assert auc([0.3, 0.6, 0.6], [0.6, 0.3, 0.6]) == 0.5
    assert auc([0.9, 0.4], [0.5, 0.1]) == 0.75


def test_auc_equals_trapezoid_area(rng):
    for _ in range(20):
        pos = np.round(rng.normal(1.0, 1.0, 60), 1)
        neg = np.round(rng.normal(0.0, 1.0, 90), 1)
        thresholds = np.concatenate([[-np.inf], default_thresholds(pos, neg)])
        area = curve_area(roc_sweep(pos, neg, thresholds))
        assert abs(area - auc(pos, neg)) < 1e-9


def test_tp_at_fp():
    curve = roc_sweep([0.9, 0.8, 0.4], [0.85, 0.1, 0.2, 0.3])
    assert tp_at_fp(curve, 0.0) == pytest.approx(1 / 3)
    assert tp_at_fp(curve, 0.25) == 1.0


# ---------- argmax accuracy ----------

def test_diagonal_dominant_is_perfect(rng):
    scores = rng.uniform(0, 0.5, (10, 10)) + np.eye(10)
    assert raptor_accuracy(square(scores)) == 1.0


def test_forty_seven_of_fifty(rng):
    scores = rng.uniform(0, 0.5, (50, 50)) + np.eye(50)
    for row in (3, 17, 41):
        scores[row, (row + 1) % 50] = 2.0
    assert raptor_accuracy(square(scores)) == pytest.approx(0.94)


def test_ties_pick_lowest_column():
    assert raptor_accuracy(square(np.full((4, 4), 0.3))) == 0.25


def test_accuracy_invariant_under_monotone_maps(rng):
    scores = rng.uniform(size=(20, 20))
    base = raptor_accuracy(square(scores))
    assert raptor_accuracy(square(np.exp(3 * scores) - 1)) == base


def test_accuracy_needs_square_matrix():
    with pytest.raises(ParameterError):
        raptor_accuracy(square(np.zeros((2, 3))))


def test_rates_at_threshold():
    matrix = square([[0.9, 0.2], [0.6, 0.4]])
    assert rates_at(matrix, 0.5) == (0.5, 0.5)


def test_summary_fields():
    summary = summarize(square([[0.9, 0.2], [0.1, 0.8]]))
    assert summary["auc"] == 1.0
    assert summary["raptor_accuracy"] == 1.0
    assert (summary["positive_pairs"], summary["negative_pairs"]) == (2, 2)
    assert "raptor_accuracy" not in summarize(square([[0.9, 0.2, 0.1]]))


# ---------- correlators over datasets ----------

def test_network_matrix_independent_of_jobs(small_dataset, tiny_tor_config):
    correlator = NetworkCorrelator(build_network(tiny_tor_config))
    one = score_matrix(correlator, small_dataset, jobs=1)
    many = score_matrix(correlator, small_dataset, jobs=4)
    assert one.scores.shape == (12, 12)
    assert np.array_equal(one.scores, many.scores)
    assert one.row_ids == tuple(small_dataset.manifest.entry_ids)
    assert np.all((one.scores > 0) & (one.scores < 1))


def test_score_one_matches_matrix(small_dataset, tiny_tor_config):
    correlator = NetworkCorrelator(build_network(tiny_tor_config))
    matrix = score_matrix(correlator, small_dataset)
    entries = correlator.features(small_dataset.entry_flows)
    exits = correlator.features(small_dataset.exit_flows)
    assert correlator.score_one(entries[2], exits[5]) == pytest.approx(matrix.scores[2, 5], rel=1e-9)


def test_baseline_pearson_finds_partners(small_dataset):
    matrix = score_matrix(BaselineCorrelator(MetricKind.PEARSON, flow_len=40), small_dataset)
    assert auc(matrix.positive_scores(), matrix.negative_scores()) > 0.8


def test_prefix_sweep(small_dataset):
    correlator = BaselineCorrelator(MetricKind.COSINE, flow_len=40)
    points = prefix_sweep(correlator, small_dataset, [40, 10, 10])
    assert [p.packets for p in points] == [10, 40]
    for point in points:
        assert 0.0 <= point.auc <= 1.0 and 0.0 <= point.accuracy <= 1.0


def test_rates_by_test_size(rng):
    matrix = square(rng.uniform(size=(30, 30)) + np.eye(30))
    rates = rates_by_test_size(matrix, [5, 30], eta=0.9, trials=3, seed=4)
    assert [(r.size, r.trial) for r in rates] == [(5, 0), (5, 1), (5, 2), (30, 0), (30, 1), (30, 2)]
    assert all(r.tp == 1.0 for r in rates)
    full = [r for r in rates if r.size == 30]
    assert len({(r.tp, r.fp) for r in full}) == 1
    assert rates == rates_by_test_size(matrix, [5, 30], eta=0.9, trials=3, seed=4)
    with pytest.raises(ParameterError):
        rates_by_test_size(matrix, [31])


# ---------- timing ----------

def test_benchmark_reports_positive_latency(small_dataset, caplog):
    correlator = BaselineCorrelator(MetricKind.PEARSON, flow_len=40)
    entries = correlator.features(small_dataset.entry_flows)
    exits = correlator.features(small_dataset.exit_flows)
    with caplog.at_level(logging.WARNING, logger="flowcorr"):
        report = benchmark_correlation_time(correlator, entries, exits, repetitions=2)
    assert report.name == "pearson"
    assert report.evaluations == 24
    assert report.mean > 0 and report.p95 >= 0
    assert "unreliable" in caplog.text


def test_benchmark_rejects_mismatched_inputs(small_dataset):
    correlator = BaselineCorrelator(MetricKind.PEARSON, flow_len=40)
    entries = correlator.features(small_dataset.entry_flows)
    with pytest.raises(ParameterError):
        benchmark_correlation_time(correlator, entries, entries[:3])


@pytest.mark.slow
def test_benchmark_is_stable_and_baselines_are_faster(small_dataset):
    config = PresetConfig.tor(flow_len=40, scale=0.05, w1=10, w2=5)
    deep = NetworkCorrelator(build_network(config))
    entries = deep.features(small_dataset.entry_flows)
    exits = deep.features(small_dataset.exit_flows)
    entries, exits = np.tile(entries, (10, 1, 1)), np.tile(exits, (10, 1, 1))

    short = benchmark_correlation_time(deep, entries, exits, repetitions=5)
    long = benchmark_correlation_time(deep, entries, exits, repetitions=10)
    assert abs(long.mean - short.mean) / short.mean < 0.2

    pearson = benchmark_correlation_time(BaselineCorrelator(MetricKind.PEARSON, flow_len=40), entries, exits, 5)
    assert pearson.mean < long.mean
