"""Learned flow correlation: architecture presets, scoring, training and decisions."""
from __future__ import annotations

import logging
import math
import time
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm.auto import tqdm

from . import seeding
from .flowdata import compute_features, stack_features, stack_pairs
from .models import (
    Dataset,
    DetectionThreshold,
    Flow,
    LabeledPair,
    PairMatrix,
    PairMode,
    PresetConfig,
    PresetKind,
    ScalingConfig,
    TrainReport,
)
from .nn import (
    AdamState,
    LayerSpec,
    Network,
    adam_step,
    init_network,
    network_backward,
    network_forward,
    shape_trace,
)
from .exceptions import ConfigurationError, NumericError, ParameterError, ShapeError

logger = logging.getLogger(__name__)

SCORE_CHUNK = 256


# ---------------- architecture ----------------

def input_shape(config: PresetConfig) -> Tuple[int, int, int]:
    return (1, config.pair_mode.row_count, config.flow_len)


def preset_layer_specs(config: PresetConfig) -> List[LayerSpec]:
    """Layer list of the configured preset, widths multiplied by `config.scale`."""
    pool = LayerSpec.maxpool(config.pool_window, config.pool_stride)
    if config.preset is PresetKind.TOR:
        specs = [
            LayerSpec.conv2d(config.scaled_k1, (2, config.w1), (2, 1)),
            LayerSpec.relu(),
            pool,
            LayerSpec.conv2d(config.scaled_k2, (config.conv2_height, config.w2), (4, 1)),
            LayerSpec.relu(),
            pool,
        ]
    else:
        specs = [
            LayerSpec.conv2d(config.scaled_k1, (2, config.w1), (1, 1)),
            LayerSpec.relu(),
            pool,
        ]
    specs.append(LayerSpec.flatten())
    for width in config.scaled_fc_sizes:
        specs += [LayerSpec.dense(width), LayerSpec.relu()]
    specs += [LayerSpec.dense(1), LayerSpec.sigmoid()]
    return specs


def preset_shape_trace(config: PresetConfig) -> List[Tuple[int, ...]]:
    """Shape chain of a preset without allocating any weights."""
    if config.flow_len < config.w1:
        raise ConfigurationError(f"flow length {config.flow_len} is shorter than w1={config.w1}")
    try:
        return shape_trace(preset_layer_specs(config), input_shape(config))
    except ShapeError as e:
        raise ConfigurationError(f"{config.preset.value} preset does not fit flow length {config.flow_len}: {e}") from e


def build_network(config: PresetConfig, rng: Optional[np.random.Generator] = None) -> Network:
    """Initialize the preset's network; weights come from the seed's init stream."""
    preset_shape_trace(config)
    rng = rng or seeding.derive_rng(config.seed, seeding.INIT)
    net = init_network(
        preset_layer_specs(config),
        input_shape(config),
        rng,
        scaling=config.scaling,
        preset=config.preset.value,
        flow_len=config.flow_len,
        pair_direction=config.stepping_direction,
    )
    logger.debug("built %s", net)
    return net


# ---------------- scoring ----------------

def _rescale_rows(pair: PairMatrix, target: ScalingConfig) -> np.ndarray:
    rows = pair.rows
    if pair.scaling == target:
        return rows
    ipd_factor = target.ipd_scale / pair.scaling.ipd_scale
    size_factor = target.size_scale / pair.scaling.size_scale
    factors = np.full(rows.shape[0], ipd_factor)
    if pair.mode is PairMode.TOR:
        factors[4:] = size_factor
    return rows * factors[:, None]


def score_pair(net: Network, pair: PairMatrix) -> float:
    """p = Psi(F_ij), with the pair brought to the network's scaling first."""
    if net.pair_mode is not None and pair.mode is not net.pair_mode:
        raise ShapeError(f"{pair.mode.value} pair given to a {net.pair_mode.value} network")
    if pair.rows.shape != tuple(net.input_shape[1:]):
        raise ShapeError(f"pair shape {pair.rows.shape} does not match network input {net.input_shape[1:]}")
    return network_forward(net, _rescale_rows(pair, net.scaling)[None])


def _net_mode(net: Network) -> PairMode:
    mode = net.pair_mode
    if mode is None:
        raise ConfigurationError(f"network preset '{net.preset}' has no pair layout")
    return mode


def _flow_len(net: Network) -> int:
    return int(net.flow_len if net.flow_len is not None else net.input_shape[-1])


def score_flows(net: Network, entry: Flow, exit_: Flow) -> float:
    """Score two raw flows with the network's own flow length, scaling and layout."""
    flow_len = _flow_len(net)
    stacks = [compute_features(flow, flow_len, net.scaling).as_array()[None] for flow in (entry, exit_)]
    x = stack_pairs(stacks[0], stacks[1], _net_mode(net), net.pair_direction)
    return float(network_forward(net, x)[0])


def score_stacked(net: Network, entries: np.ndarray, exits: np.ndarray, chunk: int = SCORE_CHUNK) -> np.ndarray:
    """Scores of aligned `(n, 4, l)` entry/exit feature stacks, shape (n,)."""
    mode = _net_mode(net)
    out = np.empty(entries.shape[0])
    for start in range(0, entries.shape[0], chunk):
        stop = start + chunk
        x = stack_pairs(entries[start:stop], exits[start:stop], mode, net.pair_direction)
        out[start:stop] = network_forward(net, x)
    return out


def row_scorer(net: Network, entries: np.ndarray, exits: np.ndarray) -> Callable[[int], np.ndarray]:
    """Function mapping an entry row index to its scores against every exit."""
    def score_row(i: int) -> np.ndarray:
        repeated = np.broadcast_to(entries[i], exits.shape)
        return score_stacked(net, repeated, exits)

    return score_row


def decide(p: float, threshold: Union[DetectionThreshold, float] = DetectionThreshold()) -> bool:
    """Correlated iff p > eta (strict)."""
    eta = threshold.eta if isinstance(threshold, DetectionThreshold) else DetectionThreshold(float(threshold)).eta
    return bool(p > eta)


# ---------------- negatives ----------------

def negative_indices(count: int, n_neg: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Entry and exit indices of `n_neg` mismatched exits per entry, drawn without replacement."""
    if n_neg < 0:
        raise ParameterError(f"n_neg must be >= 0, got {n_neg}")
    if n_neg > count - 1:
        raise ParameterError(
            f"n_neg={n_neg} needs at least {n_neg + 1} associations, dataset has {count}"
        )
    entries = np.repeat(np.arange(count), n_neg)
    exits = np.empty(count * n_neg, dtype=np.int64)
    for i in range(count):
        picks = rng.choice(count - 1, size=n_neg, replace=False)
        # skip over the true partner at column i
        exits[i * n_neg:(i + 1) * n_neg] = picks + (picks >= i)
    return entries, exits


def sample_negatives(dataset: Dataset, n_neg: int, seed: int) -> List[LabeledPair]:
    """`n_neg` labeled non-associated pairs for every entry flow of `dataset`."""
    rng = seeding.derive_rng(seed, seeding.NEGATIVES, 0)
    entry_ids = dataset.manifest.entry_ids
    exit_ids = dataset.manifest.exit_ids
    rows, cols = negative_indices(len(dataset), n_neg, rng)
    return [LabeledPair(entry_ids[i], exit_ids[j], 0) for i, j in zip(rows, cols)]


# ---------------- training ----------------

def dataset_stacks(dataset: Dataset, flow_len: int, scaling: ScalingConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Feature stacks `(n, 4, l)` of the entry and exit flows, in manifest order."""
    entries = stack_features([compute_features(f, flow_len, scaling) for f in dataset.entry_flows])
    exits = stack_features([compute_features(f, flow_len, scaling) for f in dataset.exit_flows])
    return entries, exits


class _EarlyStop:
    def __init__(self, patience: Optional[int], tolerance: float):
        self.patience = patience
        self.tolerance = tolerance
        self.best = math.inf
        self.stale = 0

    def update(self, loss: float) -> bool:
        if loss < self.best - self.tolerance:
            self.best = loss
            self.stale = 0
        else:
            self.best = min(self.best, loss)
            self.stale += 1
        return self.patience is not None and self.stale >= self.patience


def train(
    dataset: Dataset,
    config: PresetConfig,
    progress: bool = False,
    network: Optional[Network] = None,
) -> TrainReport:
    """Minimize the mean cross-entropy over all positives plus sampled negatives with Adam.

    Each epoch draws fresh negatives from the `(seed, epoch)` stream unless
    `config.resample_negatives` is off, then walks the shuffled pairs in mini-batches.
    Stops after `config.epochs`, after `config.max_steps` Adam steps, or when the
    epoch loss stops improving.
    """
    if len(dataset) == 0:
        raise ParameterError("cannot train on an empty dataset")
    net = network or build_network(config)
    report = TrainReport(network=net, positive_pairs=len(dataset))
    if config.epochs == 0 or config.max_steps == 0:
        return report

    started = time.perf_counter()
    entries, exits = dataset_stacks(dataset, config.flow_len, config.scaling)
    mode = config.pair_mode
    count = len(dataset)
    positives = np.arange(count)
    fixed = None
    if not config.resample_negatives:
        fixed = negative_indices(count, config.n_neg, seeding.derive_rng(config.seed, seeding.NEGATIVES, 0))

    state = AdamState(learning_rate=config.learning_rate)
    params = net.parameters()
    stopper = _EarlyStop(config.early_stop_patience, config.early_stop_tolerance)
    logger.info("training %s on %d associations, %d negatives per entry", config, count, config.n_neg)

    epochs = tqdm(range(1, config.epochs + 1), desc="training", unit="epoch", disable=not progress)
    for epoch in epochs:
        neg_rows, neg_cols = fixed or negative_indices(
            count, config.n_neg, seeding.derive_rng(config.seed, seeding.NEGATIVES, epoch)
        )
        rows = np.concatenate([positives, neg_rows])
        cols = np.concatenate([positives, neg_cols])
        labels = np.concatenate([np.ones(count), np.zeros(neg_rows.size)])
        order = seeding.derive_rng(config.seed, seeding.SHUFFLE, epoch).permutation(rows.size)
        report.negative_pairs = int(neg_rows.size)

        total, seen = 0.0, 0
        for batch, start in enumerate(range(0, order.size, config.batch_size)):
            pick = order[start:start + config.batch_size]
            x = stack_pairs(entries[rows[pick]], exits[cols[pick]], mode, config.stepping_direction)
            loss, grads = network_backward(net, x, labels[pick])
            if not math.isfinite(loss):
                raise NumericError(epoch, batch, loss)
            adam_step(state, params, grads)
            report.step_losses.append(loss)
            total += loss * pick.size
            seen += pick.size
            if config.max_steps is not None and state.t >= config.max_steps:
                break

        epoch_loss = total / seen
        report.losses.append(epoch_loss)
        epochs.set_postfix(loss=f"{epoch_loss:.5f}")
        logger.info("epoch %d: loss %.6f over %d pairs", epoch, epoch_loss, seen)

        if config.max_steps is not None and state.t >= config.max_steps:
            logger.info("reached %d optimizer steps", state.t)
            break
        if stopper.update(epoch_loss):
            logger.info("early stop at epoch %d, no improvement for %d epochs", epoch, stopper.stale)
            report.stopped_early = True
            break

    report.duration = time.perf_counter() - started
    return report


def smoothed_losses(step_losses: Sequence[float], window: int = 100) -> np.ndarray:
    """Means of consecutive non-overlapping `window`-step blocks."""
    losses = np.asarray(step_losses, dtype=np.float64)
    blocks = losses.size // window
    return losses[:blocks * window].reshape(blocks, window).mean(axis=1)
