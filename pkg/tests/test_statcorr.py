import math

import numpy as np
import pytest

from flowcorr.exceptions import DimensionError, ParameterError
from flowcorr.flowdata import compute_features, stack_features
from flowcorr.models import Channel, FlowFeatures
from flowcorr.statcorr import (
    MetricKind,
    baseline_matrix,
    baseline_score,
    cosine,
    cosine_checked,
    mutual_information,
    pearson,
    spearman,
)


# ---------- textbook references ----------

def brute_pearson(x, y):
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def average_ranks(values):
    """1-based ranks; tied values share the mean of the positions they span."""
    order = sorted(range(len(values)), key=lambda k: values[k])
    ranks = [0.0] * len(values)
    start = 0
    while start < len(order):
        stop = start
        while stop + 1 < len(order) and values[order[stop + 1]] == values[order[start]]:
            stop += 1
        for k in order[start:stop + 1]:
            ranks[k] = (start + stop) / 2 + 1
        start = stop + 1
    return ranks


def brute_spearman(x, y):
    return brute_pearson(average_ranks(list(x)), average_ranks(list(y)))


def brute_cosine(x, y):
    dot = sum(a * b for a, b in zip(x, y))
    return dot / math.sqrt(sum(a * a for a in x) * sum(b * b for b in y))


def brute_mi(x, y, bins):
    def index(v, lo, hi):
        return 0 if hi == lo else min(int((v - lo) / (hi - lo) * bins), bins - 1)

    n = len(x)
    ix = [index(v, min(x), max(x)) for v in x]
    iy = [index(v, min(y), max(y)) for v in y]
    joint = {}
    for a, b in zip(ix, iy):
        joint[(a, b)] = joint.get((a, b), 0) + 1
    total = 0.0
    for (a, b), count in joint.items():
        pxy = count / n
        px = ix.count(a) / n
        py = iy.count(b) / n
        total += pxy * math.log2(pxy / (px * py))
    return total


# ---------- worked values ----------

def test_pearson_known_values():
    assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)
    assert pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)
    assert pearson([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8)


def test_pearson_constant_is_zero():
    assert pearson([1, 1, 1], [1, 2, 3]) == 0.0


def test_pearson_rejects_bad_lengths():
    with pytest.raises(DimensionError):
        pearson([1, 2], [1, 2, 3])
    with pytest.raises(DimensionError):
        pearson([1], [1])


def test_cosine_known_values():
    assert cosine([1, 0], [0, 1]) == 0.0
    assert cosine([2, 2], [1, 1]) == pytest.approx(1.0)
    assert cosine([3, 4], [4, 3]) == pytest.approx(0.96)


def test_cosine_flags_zero_vector():
    assert cosine_checked([0, 0], [1, 2]) == (0.0, True)
    assert cosine_checked([1, 2], [1, 2])[1] is False


def test_spearman_known_values(rng):
    x = np.sort(rng.uniform(-2, 2, 20))
    assert spearman(x, np.exp(x)) == pytest.approx(1.0)
    assert spearman(x, x[::-1]) == pytest.approx(-1.0)
    assert spearman([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8)


def test_spearman_uses_average_ranks():
    x = [1, 2, 2, 3]
    y = [4, 1, 3, 2]
    assert spearman(x, y) == pytest.approx(-3.0 / math.sqrt(22.5), abs=1e-12)
    assert spearman(x, y) == pytest.approx(brute_spearman(x, y), abs=1e-12)


def test_mutual_information_known_values():
    assert mutual_information(np.ones(16), np.arange(16.0), bins=4) == 0.0
    x = np.tile([0.0, 1.0, 2.0, 3.0], 5)
    assert mutual_information(x, x, bins=4) == 2.0


def test_mutual_information_independent_is_small(rng):
    x = rng.normal(size=10_000)
    y = rng.normal(size=10_000)
    assert mutual_information(x, y, bins=8) < 0.1


def test_mutual_information_parameter_errors():
    with pytest.raises(ParameterError):
        mutual_information([1, 2, 3], [1, 2, 3], bins=1)
    with pytest.raises(ParameterError):
        mutual_information([1, 2, 3], [1, 2, 3], bins=8)


def test_metrics_match_textbook_definitions(rng):
    for _ in range(200):
        n = int(rng.integers(8, 65))
        x = rng.normal(size=n)
        y = 0.5 * x + rng.normal(size=n)
        xs, ys = x.tolist(), y.tolist()
        assert pearson(x, y) == pytest.approx(brute_pearson(xs, ys), abs=1e-9)
        assert cosine(x, y) == pytest.approx(brute_cosine(xs, ys), abs=1e-9)
        assert spearman(x, y) == pytest.approx(brute_spearman(xs, ys), abs=1e-9)
        assert mutual_information(x, y, 8) == pytest.approx(brute_mi(xs, ys, 8), abs=1e-9)


def test_spearman_matches_average_rank_reference_with_ties(rng):
    for _ in range(100):
        x = np.round(rng.normal(size=40), 1)
        y = np.round(x + rng.normal(size=40), 1)
        assert spearman(x, y) == pytest.approx(brute_spearman(x.tolist(), y.tolist()), abs=1e-9)


def test_metrics_are_symmetric(rng):
    for _ in range(50):
        x = rng.normal(size=32)
        y = rng.normal(size=32)
        assert pearson(x, y) == pearson(y, x)
        assert cosine(x, y) == cosine(y, x)
        assert spearman(x, y) == spearman(y, x)
        assert mutual_information(x, y) == mutual_information(y, x)
        assert mutual_information(x, y) >= -1e-12


def test_pearson_affine_and_spearman_monotone_invariance(rng):
    x = rng.normal(size=40)
    y = rng.normal(size=40)
    assert pearson(3.0 * x + 7.0, y) == pytest.approx(pearson(x, y), abs=1e-12)
    assert spearman(np.exp(x), y) == spearman(x, y)


# ---------- channel means ----------

def features(ipd_up, size_up, ipd_down, size_down):
    return FlowFeatures.from_array(np.array([ipd_up, size_up, ipd_down, size_down], dtype=float))


def test_baseline_score_same_flow_is_one(rng):
    f = FlowFeatures.from_array(rng.uniform(0.1, 1.0, (4, 30)))
    assert baseline_score(f, f, MetricKind.PEARSON) == pytest.approx(1.0)


def test_baseline_score_single_channel(rng):
    fi = FlowFeatures.from_array(rng.uniform(size=(4, 10)))
    fj = FlowFeatures.from_array(rng.uniform(size=(4, 10)))
    value = baseline_score(fi, fj, MetricKind.COSINE, [Channel.IPD_UP])
    assert value == cosine(fi.ipd_up, fj.ipd_up)


def test_baseline_score_averages_channels():
    fi = features([1, 2, 3, 4], [1, 2, 3, 4], [0, 0, 0, 0], [0, 0, 0, 0])
    fj = features([1, 3, 2, 4], [1, 2, 3, 4], [0, 0, 0, 0], [0, 0, 0, 0])
    # 0.8 and 1.0 over the two IPD/size-up channels
    value = baseline_score(fi, fj, MetricKind.PEARSON, [Channel.IPD_UP, Channel.SIZE_UP])
    assert value == pytest.approx(0.9)


def test_baseline_score_rejects_empty_channels(rng):
    f = FlowFeatures.from_array(rng.uniform(size=(4, 10)))
    with pytest.raises(ParameterError):
        baseline_score(f, f, MetricKind.PEARSON, [])


@pytest.mark.parametrize("metric", list(MetricKind))
def test_baseline_matrix_matches_pairwise_scores(small_dataset, metric):
    entries = [compute_features(f, 40) for f in small_dataset.entry_flows[:5]]
    exits = [compute_features(f, 40) for f in small_dataset.exit_flows[:4]]
    matrix = baseline_matrix(stack_features(entries), stack_features(exits), metric, jobs=2)
    assert matrix.shape == (5, 4)
    for i, fi in enumerate(entries):
        for j, fj in enumerate(exits):
            assert matrix[i, j] == pytest.approx(baseline_score(fi, fj, metric), abs=1e-9)


def test_mutual_information_matrix_independent_of_jobs(small_dataset):
    entries = stack_features([compute_features(f, 40) for f in small_dataset.entry_flows])
    exits = stack_features([compute_features(f, 40) for f in small_dataset.exit_flows])
    serial = baseline_matrix(entries, exits, MetricKind.MUTUAL_INFORMATION, jobs=1)
    parallel = baseline_matrix(entries, exits, MetricKind.MUTUAL_INFORMATION, jobs=3)
    assert np.array_equal(serial, parallel)


def test_metric_kind_parse():
    assert MetricKind.parse("mutual_information") is MetricKind.MUTUAL_INFORMATION
    assert MetricKind.parse("Spearman") is MetricKind.SPEARMAN
