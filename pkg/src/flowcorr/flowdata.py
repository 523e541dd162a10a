"""Flow features and pair matrices.

A flow becomes four length-ℓ vectors (upstream/downstream IPDs and sizes); two flows
become one pair matrix whose rows interleave the two flows channel by channel.
"""
from __future__ import annotations

import logging
from typing import Optional, Sequence

import numpy as np

from .models import Channel, Direction, Flow, FlowFeatures, PairMatrix, PairMode, ScalingConfig
from .exceptions import DimensionError, EmptyFlowError, ParameterError

logger = logging.getLogger(__name__)

# Row order of a tor-mode pair: T^u, T^d, S^u, S^d, each as (i, j).
TOR_CHANNEL_ORDER = (Channel.IPD_UP, Channel.IPD_DOWN, Channel.SIZE_UP, Channel.SIZE_DOWN)


def _pad(vector: np.ndarray, flow_len: int) -> np.ndarray:
    out = np.zeros(flow_len, dtype=np.float64)
    n = min(vector.size, flow_len)
    out[:n] = vector[:n]
    return out


def _direction_vectors(flow: Flow, direction: Direction, flow_len: int, max_packets: Optional[int]):
    timestamps, sizes = flow.direction(direction)
    keep = flow_len if max_packets is None else min(flow_len, max_packets)
    timestamps = timestamps[:keep]
    sizes = sizes[:keep]
    if timestamps.size:
        ipds = np.diff(timestamps, prepend=timestamps[0])
    else:
        ipds = timestamps
    return _pad(ipds, flow_len), _pad(sizes.astype(np.float64), flow_len)


def compute_features(
    flow: Flow,
    flow_len: int,
    scaling: ScalingConfig = ScalingConfig(),
    max_packets: Optional[int] = None,
) -> FlowFeatures:
    """Compute [T^u; S^u; T^d; S^d] for `flow`.

    IPD[0] is 0 and IPD[k] = t_k - t_{k-1}. Each direction keeps its first `flow_len`
    packets (or first `max_packets`, if smaller) and is zero-padded to `flow_len`;
    scaling is applied last.
    """
    if flow_len < 1:
        raise ParameterError(f"flow length must be positive, got {flow_len}")
    if max_packets is not None and max_packets < 1:
        raise ParameterError(f"max_packets must be positive, got {max_packets}")
    if len(flow) == 0:
        raise EmptyFlowError(f"flow {flow.id} has no packets")

    ipd_up, size_up = _direction_vectors(flow, Direction.UPSTREAM, flow_len, max_packets)
    ipd_down, size_down = _direction_vectors(flow, Direction.DOWNSTREAM, flow_len, max_packets)
    return FlowFeatures(
        ipd_up=ipd_up * scaling.ipd_scale,
        size_up=size_up * scaling.size_scale,
        ipd_down=ipd_down * scaling.ipd_scale,
        size_down=size_down * scaling.size_scale,
        flow_len=flow_len,
        scaling=scaling,
    )


def stack_features(features: Sequence[FlowFeatures]) -> np.ndarray:
    """Stack features into an `(n, 4, flow_len)` array."""
    if not features:
        raise ParameterError("no features to stack")
    flow_len = features[0].flow_len
    if any(f.flow_len != flow_len for f in features):
        raise DimensionError("features do not share one flow length")
    return np.stack([f.as_array() for f in features])


def _row_channels(mode: PairMode, direction: Direction):
    if mode is PairMode.TOR:
        return TOR_CHANNEL_ORDER
    return (Channel.IPD_UP if direction is Direction.UPSTREAM else Channel.IPD_DOWN,)


def stack_pairs(
    entry: np.ndarray,
    exit_: np.ndarray,
    mode: PairMode,
    direction: Direction = Direction.UPSTREAM,
) -> np.ndarray:
    """Assemble a batch of pair matrices with shape `(batch, 1, rows, flow_len)`.

    `entry` and `exit_` are `(batch, 4, flow_len)` arrays from `stack_features`.
    """
    if entry.shape != exit_.shape:
        raise DimensionError(f"entry shape {entry.shape} differs from exit shape {exit_.shape}")
    channels = [c.value for c in _row_channels(mode, direction)]
    batch, _, flow_len = entry.shape
    out = np.empty((batch, 1, 2 * len(channels), flow_len), dtype=np.float64)
    out[:, 0, 0::2, :] = entry[:, channels, :]
    out[:, 0, 1::2, :] = exit_[:, channels, :]
    return out


def make_pair_matrix(
    fi: FlowFeatures,
    fj: FlowFeatures,
    mode: PairMode = PairMode.TOR,
    direction: Direction = Direction.UPSTREAM,
) -> PairMatrix:
    """Build F_{i,j} (8 rows for tor mode, [T_i; T_j] for stepping mode)."""
    if fi.flow_len != fj.flow_len:
        raise DimensionError(f"flow lengths differ: {fi.flow_len} vs {fj.flow_len}")
    if fi.scaling != fj.scaling:
        raise DimensionError("features were computed with different scaling")
    rows = stack_pairs(fi.as_array()[None], fj.as_array()[None], mode, direction)[0, 0]
    return PairMatrix(rows=rows, mode=mode, scaling=fi.scaling)
