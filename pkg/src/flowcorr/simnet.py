"""Synthetic correlated flow pairs through a noisy relay channel."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from itertools import repeat
from typing import Optional, Tuple

import numpy as np

from . import seeding
from .models import BaseFlowModel, ChannelModel, Dataset, Flow, PairManifest, Split
from .exceptions import EmptyFlowError, ParameterError

logger = logging.getLogger(__name__)


def _truncated_lognormal(model: BaseFlowModel, rng: np.random.Generator) -> np.ndarray:
    """Integer sizes from log-normal draws, redrawing those outside [min_size, max_size]."""
    sizes = np.rint(rng.lognormal(model.size_mu, model.size_sigma, model.packet_count)).astype(np.int64)
    bad = (sizes < model.min_size) | (sizes > model.max_size)
    while bad.any():
        redraw = np.rint(rng.lognormal(model.size_mu, model.size_sigma, int(bad.sum()))).astype(np.int64)
        sizes[bad] = redraw
        bad = (sizes < model.min_size) | (sizes > model.max_size)
    return sizes


def generate_base_flow(
    model: BaseFlowModel,
    rng: Optional[np.random.Generator] = None,
    flow_id: str = "flow",
) -> Flow:
    """One-directional flow starting at t=0 with exponential IPDs."""
    rng = rng or np.random.default_rng(model.seed)
    ipds = rng.exponential(model.mean_ipd, model.packet_count - 1)
    timestamps = np.concatenate([[0.0], np.cumsum(ipds)])
    return Flow.one_way(flow_id, timestamps, _truncated_lognormal(model, rng))


def apply_channel(
    flow: Flow,
    channel: ChannelModel,
    rng: Optional[np.random.Generator] = None,
    flow_id: Optional[str] = None,
) -> Flow:
    """Drop packets (Bernoulli) and jitter the survivors (Laplace), then re-sort by time.

    Noise and drop decisions are drawn for every packet so the two streams stay aligned.
    An identity channel returns a copy without consuming randomness.

    Timestamps stay non-negative: if jitter pushes the earliest survivor below zero, the
    whole egress flow is shifted by that amount so it starts at exactly 0. The shift is
    common to every packet, so IPD features are unchanged; for flows starting at t=0 it
    happens about half the time.
    """
    if len(flow) == 0:
        raise EmptyFlowError(f"flow {flow.id} has no packets")
    if channel.is_identity:
        return Flow(
            id=flow_id or flow.id,
            timestamps=flow.timestamps.copy(),
            sizes=flow.sizes.copy(),
            upstream=flow.upstream.copy(),
        )
    rng = rng or np.random.default_rng(channel.seed)
    n = len(flow)
    keep = rng.random(n) >= channel.drop_rate
    if channel.jitter_std > 0:
        timestamps = flow.timestamps + rng.laplace(0.0, channel.laplace_scale, n)
    else:
        timestamps = flow.timestamps.copy()
    if not keep.any():
        raise EmptyFlowError(f"all {n} packets of flow {flow.id} were dropped")

    timestamps = timestamps[keep]
    order = np.argsort(timestamps, kind="stable")
    timestamps = timestamps[order]
    if timestamps[0] < 0:
        timestamps = timestamps - timestamps[0]
    return Flow(
        id=flow_id or flow.id,
        timestamps=timestamps,
        sizes=flow.sizes[keep][order],
        upstream=flow.upstream[keep][order],
    )


def pair_ids(index: int, n_pairs: int) -> Tuple[str, str]:
    width = max(5, len(str(max(0, n_pairs - 1))))
    stem = f"c{index:0{width}d}"
    return f"{stem}-in", f"{stem}-out"


def _generate_pair(
    index: int,
    n_pairs: int,
    base_model: BaseFlowModel,
    channel: ChannelModel,
    seed_seq: np.random.SeedSequence,
) -> Tuple[Flow, Flow]:
    rng = np.random.default_rng(seed_seq)
    in_id, out_id = pair_ids(index, n_pairs)
    ingress = generate_base_flow(base_model, rng, in_id)
    try:
        return ingress, apply_channel(ingress, channel, rng, out_id)
    except EmptyFlowError:
        logger.debug("pair %d lost every packet, regenerating", index)
    ingress = generate_base_flow(base_model, rng, in_id)
    try:
        return ingress, apply_channel(ingress, channel, rng, out_id)
    except EmptyFlowError as e:
        raise EmptyFlowError(f"pair {index}: egress flow empty after one regeneration") from e


def generate_paired_dataset(
    n_pairs: int,
    base_model: BaseFlowModel,
    channel: ChannelModel,
    seed: int,
    jobs: int = 1,
) -> Dataset:
    """`n_pairs` (ingress, channel(ingress)) associations, each from its own seed stream.

    With `jobs > 1` pairs are generated in worker processes; the output does not
    depend on `jobs`.
    """
    if n_pairs < 1:
        raise ParameterError(f"n_pairs must be >= 1, got {n_pairs}")
    children = np.random.SeedSequence([int(seed), seeding.SIMULATION]).spawn(n_pairs)
    args = (range(n_pairs), repeat(n_pairs), repeat(base_model), repeat(channel), children)
    if jobs <= 1:
        pairs = list(map(_generate_pair, *args))
    else:
        chunksize = max(1, n_pairs // (4 * jobs))
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            pairs = list(executor.map(_generate_pair, *args, chunksize=chunksize))

    flows = {}
    for ingress, egress in pairs:
        flows[ingress.id] = ingress
        flows[egress.id] = egress
    manifest = PairManifest.from_pairs((ingress.id, egress.id) for ingress, egress in pairs)
    dropped = sum(len(a) - len(b) for a, b in pairs)
    logger.info(
        "simulated %d pairs (%s), %d packets dropped in total", n_pairs, channel, dropped
    )
    return Dataset(flows=flows, manifest=manifest, split=Split.CORPUS)
