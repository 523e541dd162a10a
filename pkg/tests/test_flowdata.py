import numpy as np
import pytest

from flowcorr.exceptions import DimensionError, EmptyFlowError, ParameterError
from flowcorr.flowdata import compute_features, make_pair_matrix, stack_features, stack_pairs
from flowcorr.models import Direction, Flow, PairMode, ScalingConfig

UNIT = ScalingConfig.unit()


def test_ipds_start_at_zero_and_pad(flow_factory):
    flow = flow_factory("a", [0.0, 0.1, 0.3], [100, 200, 50])
    features = compute_features(flow, 5, UNIT)
    assert features.ipd_up == pytest.approx([0.0, 0.1, 0.2, 0.0, 0.0], abs=1e-15)
    assert features.size_up.tolist() == [100, 200, 50, 0, 0]
    assert features.ipd_down.tolist() == [0.0] * 5
    assert features.size_down.tolist() == [0.0] * 5


def test_exact_length_flow_is_unchanged(flow_factory):
    ts = np.arange(6) * 0.5
    features = compute_features(flow_factory("a", ts, [10] * 6), 6, UNIT)
    assert features.ipd_up.size == 6
    assert features.ipd_up[1:] == pytest.approx([0.5] * 5)
    assert np.all(features.size_up == 10)


def test_long_flow_keeps_first_packets(flow_factory):
    ts = np.arange(10) * 1.0
    sizes = np.arange(1, 11)
    features = compute_features(flow_factory("a", ts, sizes), 5, UNIT)
    assert features.size_up.tolist() == [1, 2, 3, 4, 5]


def test_both_directions(two_way_flow):
    features = compute_features(two_way_flow, 4, UNIT)
    assert features.ipd_down == pytest.approx([0.0, 0.2, 0.0, 0.0])
    assert features.size_down.tolist() == [1500, 600, 0, 0]
    assert features.size_up.tolist() == [100, 200, 50, 70]


def test_scaling_applied_last(flow_factory):
    flow = flow_factory("a", [0.0, 0.002], [1000, 500])
    features = compute_features(flow, 3, ScalingConfig(ipd_scale=1000.0, size_scale=1e-3))
    assert features.ipd_up == pytest.approx([0.0, 2.0, 0.0])
    assert features.size_up == pytest.approx([1.0, 0.5, 0.0])


def test_max_packets_truncates_before_padding(flow_factory):
    flow = flow_factory("a", np.arange(8) * 0.1, np.arange(1, 9))
    features = compute_features(flow, 6, UNIT, max_packets=3)
    assert features.size_up.tolist() == [1, 2, 3, 0, 0, 0]
    assert features.flow_len == 6


def test_ipd_sum_matches_span(rng):
    ts = np.sort(rng.uniform(0, 10, 50))
    flow = Flow.one_way("a", ts, np.full(50, 100))
    features = compute_features(flow, 30, UNIT)
    assert abs(features.ipd_up.sum() - (ts[29] - ts[0])) < 1e-12


def test_empty_flow_rejected():
    flow = Flow(id="empty", timestamps=np.array([]), sizes=np.array([]), upstream=np.array([], bool))
    with pytest.raises(EmptyFlowError):
        compute_features(flow, 5)


def test_non_positive_flow_len_rejected(two_way_flow):
    with pytest.raises(ParameterError):
        compute_features(two_way_flow, 0)


def test_features_deterministic(two_way_flow):
    assert compute_features(two_way_flow, 8) == compute_features(two_way_flow, 8)


def test_tor_pair_row_order(flow_factory, two_way_flow):
    other = flow_factory("g", [0.0, 0.2], [300, 400], [0.1], [900])
    fi = compute_features(two_way_flow, 6)
    fj = compute_features(other, 6)
    rows = make_pair_matrix(fi, fj, PairMode.TOR).rows
    expected = [
        fi.ipd_up, fj.ipd_up, fi.ipd_down, fj.ipd_down,
        fi.size_up, fj.size_up, fi.size_down, fj.size_down,
    ]
    assert rows.shape == (8, 6)
    for row, vector in zip(rows, expected):
        assert np.array_equal(row, vector)


def test_tor_pair_full_length(rng):
    flow = Flow.one_way("a", np.sort(rng.uniform(0, 5, 400)), np.full(400, 60))
    features = compute_features(flow, 300)
    pair = make_pair_matrix(features, features, PairMode.TOR)
    assert pair.rows.shape == (8, 300)
    assert np.array_equal(pair.rows[0], features.ipd_up)


def test_stepping_pair_uses_one_direction(two_way_flow, flow_factory):
    other = flow_factory("g", [0.0, 0.2], [300, 400], [0.1, 0.4], [900, 100])
    fi = compute_features(two_way_flow, 5)
    fj = compute_features(other, 5)
    up = make_pair_matrix(fi, fj, PairMode.STEPPING)
    down = make_pair_matrix(fi, fj, PairMode.STEPPING, Direction.DOWNSTREAM)
    assert up.rows.shape == (2, 5)
    assert np.array_equal(up.rows[0], fi.ipd_up) and np.array_equal(up.rows[1], fj.ipd_up)
    assert np.array_equal(down.rows[0], fi.ipd_down) and np.array_equal(down.rows[1], fj.ipd_down)


def test_self_pair_rows_repeat(two_way_flow):
    features = compute_features(two_way_flow, 5)
    rows = make_pair_matrix(features, features).rows
    assert np.array_equal(rows[0::2], rows[1::2])


def test_swapping_flows_swaps_rows(two_way_flow, flow_factory):
    other = flow_factory("g", [0.0, 0.2], [300, 400], [0.1], [900])
    fi = compute_features(two_way_flow, 5)
    fj = compute_features(other, 5)
    ij = make_pair_matrix(fi, fj).rows
    ji = make_pair_matrix(fj, fi).rows
    assert np.array_equal(ij[0::2], ji[1::2])
    assert np.array_equal(ij[1::2], ji[0::2])


def test_mismatched_lengths_rejected(two_way_flow):
    with pytest.raises(DimensionError):
        make_pair_matrix(compute_features(two_way_flow, 5), compute_features(two_way_flow, 6))


def test_stack_pairs_matches_single_pairs(two_way_flow, flow_factory):
    flows = [two_way_flow, flow_factory("g", [0.0, 0.2, 0.9], [300, 400, 50], [0.1], [900])]
    features = [compute_features(f, 7) for f in flows]
    stacked = stack_features(features)
    batch = stack_pairs(stacked, stacked[::-1], PairMode.TOR)
    assert batch.shape == (2, 1, 8, 7)
    assert np.array_equal(batch[0, 0], make_pair_matrix(features[0], features[1]).rows)
    assert np.array_equal(batch[1, 0], make_pair_matrix(features[1], features[0]).rows)
