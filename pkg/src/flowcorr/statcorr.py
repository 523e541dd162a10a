"""Classical statistical correlation metrics used as baselines.

Degenerate inputs (zero variance, all-zero vectors) score 0 instead of NaN, since
zero-padded channels are common and must not poison a channel mean.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from itertools import repeat
from enum import Enum
from typing import Iterable, Sequence, Tuple

import numpy as np
from scipy.stats import rankdata

from .config import DEFAULT_MI_BINS
from .models import ALL_CHANNELS, Channel, FlowFeatures
from .exceptions import DimensionError, ParameterError

logger = logging.getLogger(__name__)


class MetricKind(Enum):
    """Baseline correlation metrics."""

    PEARSON = "pearson"
    COSINE = "cosine"
    SPEARMAN = "spearman"
    MUTUAL_INFORMATION = "mi"

    @classmethod
    def parse(cls, name: str) -> MetricKind:
        name = name.lower()
        if name == "mutual_information":
            return cls.MUTUAL_INFORMATION
        return cls(name)


def _as_pair(x, y, min_len: int) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size != y.size:
        raise DimensionError(f"vector lengths differ: {x.size} vs {y.size}")
    if x.size < min_len:
        raise DimensionError(f"vectors need at least {min_len} entries, got {x.size}")
    return x, y


def _pearson_unchecked(x: np.ndarray, y: np.ndarray) -> float:
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return 0.0
    xc = x - x.mean()
    yc = y - y.mean()
    r = np.sum(xc * yc) / np.sqrt(np.sum(xc * xc) * np.sum(yc * yc))
    return float(np.clip(r, -1.0, 1.0))


def pearson(x, y) -> float:
    """Sample Pearson coefficient; 0 when either vector is constant."""
    x, y = _as_pair(x, y, 2)
    return _pearson_unchecked(x, y)


def spearman(x, y) -> float:
    """Pearson coefficient of the average-rank vectors."""
    x, y = _as_pair(x, y, 2)
    return _pearson_unchecked(rankdata(x, method="average"), rankdata(y, method="average"))


def cosine_checked(x, y) -> Tuple[float, bool]:
    """Cosine similarity and a flag telling whether an all-zero input forced 0."""
    x, y = _as_pair(x, y, 1)
    nx = np.sqrt(np.sum(x * x))
    ny = np.sqrt(np.sum(y * y))
    if nx == 0 or ny == 0:
        return 0.0, True
    value = np.sum(x * y) / (nx * ny)
    return float(np.clip(value, -1.0, 1.0)), False


def cosine(x, y) -> float:
    value, degenerate = cosine_checked(x, y)
    if degenerate:
        logger.debug("cosine on an all-zero vector, scoring 0")
    return value


def _bin_indices(x: np.ndarray, bins: int) -> np.ndarray:
    """Equal-width bin index over the vector's own [min, max]."""
    lo, hi = x.min(), x.max()
    if hi == lo:
        return np.zeros(x.size, dtype=np.int64)
    idx = ((x - lo) / (hi - lo) * bins).astype(np.int64)
    return np.minimum(idx, bins - 1)


def _entropy(counts: np.ndarray, n: int) -> float:
    # sorting makes the sum independent of cell order (keeps MI exactly symmetric)
    p = np.sort(counts[counts > 0]) / n
    return float(-np.sum(p * np.log2(p)))


def _joint_entropy(ix: np.ndarray, iy: np.ndarray, bins: int) -> float:
    counts = np.bincount(ix * bins + iy, minlength=bins * bins)
    return _entropy(counts, ix.size)


def mutual_information(x, y, bins: int = DEFAULT_MI_BINS) -> float:
    """Plug-in MI estimate in bits over a `bins` x `bins` equal-width histogram."""
    if bins < 2:
        raise ParameterError(f"bins must be >= 2, got {bins}")
    x, y = _as_pair(x, y, 1)
    if x.size < bins:
        raise ParameterError(f"need at least {bins} samples for {bins} bins, got {x.size}")
    ix, iy = _bin_indices(x, bins), _bin_indices(y, bins)
    hx = _entropy(np.bincount(ix, minlength=bins), x.size)
    hy = _entropy(np.bincount(iy, minlength=bins), y.size)
    return (hx + hy) - _joint_entropy(ix, iy, bins)


def metric_function(metric: MetricKind, bins: int = DEFAULT_MI_BINS):
    if metric is MetricKind.PEARSON:
        return pearson
    if metric is MetricKind.COSINE:
        return cosine
    if metric is MetricKind.SPEARMAN:
        return spearman
    return lambda x, y: mutual_information(x, y, bins)


def _check_channels(channels: Iterable[Channel]) -> Tuple[Channel, ...]:
    channels = tuple(channels)
    if not channels:
        raise ParameterError("channel set must be non-empty")
    return channels


def baseline_score(
    fi: FlowFeatures,
    fj: FlowFeatures,
    metric: MetricKind,
    channels: Sequence[Channel] = ALL_CHANNELS,
    bins: int = DEFAULT_MI_BINS,
) -> float:
    """Mean of `metric` applied channel-wise between two flows' features."""
    channels = _check_channels(channels)
    if fi.flow_len != fj.flow_len:
        raise DimensionError(f"flow lengths differ: {fi.flow_len} vs {fj.flow_len}")
    fn = metric_function(metric, bins)
    return float(np.mean([fn(fi.channel(c), fj.channel(c)) for c in channels]))


# ---------------- all-pairs ----------------

def _normalized_rows(rows: np.ndarray, center: bool) -> np.ndarray:
    """Rows scaled to unit norm (centered first for Pearson); degenerate rows become 0."""
    out = rows - rows.mean(axis=1, keepdims=True) if center else rows.copy()
    norms = np.sqrt(np.sum(out * out, axis=1))
    degenerate = (np.ptp(rows, axis=1) == 0) if center else (norms == 0)
    norms[degenerate] = 1.0
    out /= norms[:, None]
    out[degenerate] = 0.0
    return out


def _mi_block(entry_idx, exit_idx, entry_h, exit_h, bins: int, rows: range) -> np.ndarray:
    block = np.empty((len(rows), exit_idx.shape[0]))
    for r, i in enumerate(rows):
        for j in range(exit_idx.shape[0]):
            block[r, j] = (entry_h[i] + exit_h[j]) - _joint_entropy(entry_idx[i], exit_idx[j], bins)
    return block


def baseline_matrix(
    entries: np.ndarray,
    exits: np.ndarray,
    metric: MetricKind,
    channels: Sequence[Channel] = ALL_CHANNELS,
    bins: int = DEFAULT_MI_BINS,
    jobs: int = 1,
) -> np.ndarray:
    """All-pairs `baseline_score` between `(n, 4, l)` entry and `(m, 4, l)` exit stacks."""
    channels = _check_channels(channels)
    if entries.shape[1:] != exits.shape[1:]:
        raise DimensionError(f"feature shapes differ: {entries.shape} vs {exits.shape}")
    total = np.zeros((entries.shape[0], exits.shape[0]))
    for channel in channels:
        x = entries[:, channel.value, :]
        y = exits[:, channel.value, :]
        if metric is MetricKind.MUTUAL_INFORMATION:
            total += _mi_channel(x, y, bins, jobs)
            continue
        if metric is MetricKind.SPEARMAN:
            x = rankdata(x, axis=1, method="average")
            y = rankdata(y, axis=1, method="average")
        center = metric is not MetricKind.COSINE
        total += np.clip(_normalized_rows(x, center) @ _normalized_rows(y, center).T, -1.0, 1.0)
    return total / len(channels)


def _mi_channel(x: np.ndarray, y: np.ndarray, bins: int, jobs: int) -> np.ndarray:
    """Pairwise MI for one channel; row blocks go to worker processes when `jobs > 1`."""
    if bins < 2:
        raise ParameterError(f"bins must be >= 2, got {bins}")
    if x.shape[1] < bins:
        raise ParameterError(f"need at least {bins} samples for {bins} bins, got {x.shape[1]}")
    x_idx = np.stack([_bin_indices(row, bins) for row in x])
    y_idx = np.stack([_bin_indices(row, bins) for row in y])
    x_h = [_entropy(np.bincount(row, minlength=bins), row.size) for row in x_idx]
    y_h = [_entropy(np.bincount(row, minlength=bins), row.size) for row in y_idx]
    n = x.shape[0]
    if jobs <= 1 or n < 2:
        return _mi_block(x_idx, y_idx, x_h, y_h, bins, range(n))
    chunk = -(-n // jobs)
    ranges = [range(start, min(n, start + chunk)) for start in range(0, n, chunk)]
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        blocks = list(executor.map(
            _mi_block, repeat(x_idx), repeat(y_idx), repeat(x_h), repeat(y_h), repeat(bins), ranges,
        ))
    return np.vstack(blocks)
