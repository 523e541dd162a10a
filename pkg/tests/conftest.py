"""Shared fixtures."""
from __future__ import annotations

import logging

import numpy as np
import pytest

from flowcorr.models import BaseFlowModel, ChannelModel, Flow, PresetConfig
from flowcorr.simnet import generate_paired_dataset


def make_flow(flow_id, up_ts, up_sizes, down_ts=(), down_sizes=()):
    """Flow from per-direction timestamp/size lists."""
    ts = np.concatenate([np.asarray(up_ts, float), np.asarray(down_ts, float)])
    sizes = np.concatenate([np.asarray(up_sizes, np.int64), np.asarray(down_sizes, np.int64)])
    upstream = np.concatenate([np.ones(len(up_ts), bool), np.zeros(len(down_ts), bool)])
    order = np.argsort(ts, kind="stable")
    return Flow(id=flow_id, timestamps=ts[order], sizes=sizes[order], upstream=upstream[order])


@pytest.fixture
def flow_factory():
    return make_flow


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def two_way_flow():
    return make_flow("f1", [0.0, 0.1, 0.3, 0.6], [100, 200, 50, 70], [0.05, 0.25], [1500, 600])


@pytest.fixture
def small_dataset():
    """Twelve noisy associations of 60-packet flows."""
    base = BaseFlowModel(packet_count=60, mean_ipd=0.02)
    channel = ChannelModel(jitter_std=0.001, drop_rate=0.01)
    return generate_paired_dataset(12, base, channel, seed=3)


@pytest.fixture
def small_stepping_config():
    """Stepping preset shrunk to run in well under a second per epoch."""
    return PresetConfig.stepping(
        flow_len=40, w1=5, k1=8, fc_sizes=(16, 8),
        n_neg=3, batch_size=16, epochs=3, learning_rate=1e-3, seed=11,
    )


@pytest.fixture
def tiny_tor_config():
    """Tor preset with k1=4, k2=4, FC 16/8/4 and flow length 20."""
    return PresetConfig.tor(
        flow_len=20, k1=4, k2=4, w1=5, w2=3, fc_sizes=(16, 8, 4), seed=5,
    )


@pytest.fixture(autouse=True)
def reset_flowcorr_logger():
    """Undo the CLI's handler setup so caplog sees package records."""
    yield
    logger = logging.getLogger("flowcorr")
    logger.handlers.clear()
    logger.setLevel(logging.NOTSET)
    logger.propagate = True
