"""Evaluation protocol: threshold sweeps, AUC, argmax pairing accuracy and timing.

Every threshold comparison is strict (score > eta), matching `deepcorr.decide`.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import rankdata
from tqdm.auto import tqdm

from . import seeding
from .config import DEFAULT_MI_BINS, DEFAULT_FLOW_LEN, MIN_BENCH_EVALUATIONS
from .deepcorr import row_scorer, score_stacked
from .flowdata import compute_features, stack_features
from .models import (
    ALL_CHANNELS,
    Channel,
    Dataset,
    Flow,
    FlowFeatures,
    PrefixPoint,
    RocCurve,
    RocPoint,
    ScalingConfig,
    ScoreMatrix,
    SubsetRate,
    TimingReport,
)
from .nn import Network
from .statcorr import MetricKind, baseline_matrix, baseline_score
from .exceptions import ParameterError

logger = logging.getLogger(__name__)


def _scores(values, name: str) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64).ravel()
    if values.size == 0:
        raise ParameterError(f"{name} scores must be non-empty")
    return values


# ---------------- threshold sweeps ----------------

def default_thresholds(pos_scores, neg_scores) -> np.ndarray:
    """Every distinct observed score plus 0 and 1, ascending."""
    return np.unique(np.concatenate([np.ravel(pos_scores), np.ravel(neg_scores), [0.0, 1.0]]))


def _count_above(sorted_scores: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    return sorted_scores.size - np.searchsorted(sorted_scores, thresholds, side="right")


def roc_sweep(pos_scores, neg_scores, thresholds: Optional[Iterable[float]] = None) -> RocCurve:
    """TP and FP rates (score > eta) at each threshold, ordered by increasing eta."""
    pos = np.sort(_scores(pos_scores, "positive"))
    neg = np.sort(_scores(neg_scores, "negative"))
    if thresholds is None:
        etas = default_thresholds(pos, neg)
    else:
        etas = np.sort(np.asarray(list(thresholds), dtype=np.float64))
    tp = _count_above(pos, etas) / pos.size
    fp = _count_above(neg, etas) / neg.size
    return RocCurve(tuple(RocPoint(float(e), float(t), float(f)) for e, t, f in zip(etas, tp, fp)))


def auc(pos_scores, neg_scores) -> float:
    """Mann-Whitney statistic: P(pos > neg) with ties counted one half."""
    pos = _scores(pos_scores, "positive")
    neg = _scores(neg_scores, "negative")
    ranks = rankdata(np.concatenate([pos, neg]), method="average")
    u = ranks[:pos.size].sum() - pos.size * (pos.size + 1) / 2.0
    return float(u / (pos.size * neg.size))


def curve_area(curve: RocCurve) -> float:
    """Trapezoidal area under the curve's (FP, TP) points."""
    fp = curve.fp_rates[::-1]
    tp = curve.tp_rates[::-1]
    return float(np.sum(np.diff(fp) * (tp[1:] + tp[:-1]) / 2.0))


def tp_at_fp(curve: RocCurve, max_fp: float) -> float:
    """Best TP rate among thresholds whose FP rate is at most `max_fp`."""
    eligible = curve.tp_rates[curve.fp_rates <= max_fp]
    return float(eligible.max()) if eligible.size else 0.0


def raptor_accuracy(matrix: ScoreMatrix) -> float:
    """Fraction of rows whose argmax column (lowest index on ties) is the true partner."""
    if not matrix.is_square:
        raise ParameterError(f"argmax accuracy needs a square matrix, got {matrix.scores.shape}")
    if matrix.scores.shape[0] == 0:
        raise ParameterError("score matrix has no rows")
    return float(np.mean(np.argmax(matrix.scores, axis=1) == matrix.truth))


def rates_at(matrix: ScoreMatrix, eta: float) -> Tuple[float, float]:
    pos = matrix.positive_scores()
    neg = matrix.negative_scores()
    tp = float(np.mean(pos > eta))
    fp = float(np.mean(neg > eta)) if neg.size else 0.0
    return tp, fp


# ---------------- correlators ----------------

class Correlator:
    """Something that scores entry flows against exit flows."""

    name = "correlator"

    def __init__(self, flow_len: int, scaling: ScalingConfig):
        self.flow_len = flow_len
        self.scaling = scaling

    def features(self, flows: Sequence[Flow], max_packets: Optional[int] = None) -> np.ndarray:
        return stack_features([compute_features(f, self.flow_len, self.scaling, max_packets) for f in flows])

    def score_one(self, entry: np.ndarray, exit_: np.ndarray) -> float:
        """Score one `(4, l)` entry against one `(4, l)` exit."""
        raise NotImplementedError

    def matrix(self, entries: np.ndarray, exits: np.ndarray, jobs: int = 1, progress: bool = False) -> np.ndarray:
        raise NotImplementedError


class NetworkCorrelator(Correlator):
    name = "deepcorr"

    def __init__(self, net: Network):
        super().__init__(int(net.flow_len or net.input_shape[-1]), net.scaling)
        self.net = net

    def score_one(self, entry: np.ndarray, exit_: np.ndarray) -> float:
        return float(score_stacked(self.net, entry[None], exit_[None])[0])

    def matrix(self, entries, exits, jobs=1, progress=False):
        return fill_rows(row_scorer(self.net, entries, exits), entries.shape[0], jobs, progress)


class BaselineCorrelator(Correlator):
    def __init__(
        self,
        metric: MetricKind,
        flow_len: int = DEFAULT_FLOW_LEN,
        scaling: ScalingConfig = ScalingConfig(),
        channels: Sequence[Channel] = ALL_CHANNELS,
        bins: int = DEFAULT_MI_BINS,
    ):
        super().__init__(flow_len, scaling)
        self.metric = metric
        self.channels = tuple(channels)
        self.bins = bins
        self.name = metric.value

    def score_one(self, entry, exit_):
        fi = FlowFeatures.from_array(entry, self.scaling)
        fj = FlowFeatures.from_array(exit_, self.scaling)
        return baseline_score(fi, fj, self.metric, self.channels, self.bins)

    def matrix(self, entries, exits, jobs=1, progress=False):
        return baseline_matrix(entries, exits, self.metric, self.channels, self.bins, jobs)


def fill_rows(
    scorer: Callable[[int], np.ndarray],
    n_rows: int,
    jobs: int = 1,
    progress: bool = False,
) -> np.ndarray:
    """Stack `scorer(i)` for every row; workers run in parallel, rows keep their order."""
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as executor:
        rows = executor.map(scorer, range(n_rows))
        rows = list(tqdm(rows, total=n_rows, desc="scoring", unit="row", disable=not progress))
    return np.vstack(rows) if rows else np.empty((0, 0))


def score_matrix(
    correlator: Correlator,
    dataset: Dataset,
    jobs: int = 1,
    max_packets: Optional[int] = None,
    progress: bool = False,
) -> ScoreMatrix:
    """All-pairs scores of the dataset's entry flows against its exit flows."""
    entries = correlator.features(dataset.entry_flows, max_packets)
    exits = correlator.features(dataset.exit_flows, max_packets)
    scores = correlator.matrix(entries, exits, jobs, progress)
    logger.info("scored %d x %d pairs with %s", scores.shape[0], scores.shape[1], correlator.name)
    return ScoreMatrix.diagonal_truth(dataset.manifest.entry_ids, dataset.manifest.exit_ids, scores)


def summarize(matrix: ScoreMatrix, eta: float = 0.5) -> dict:
    """ROC-derived figures for one score matrix."""
    pos = matrix.positive_scores()
    neg = matrix.negative_scores()
    curve = roc_sweep(pos, neg)
    tp, fp = rates_at(matrix, eta)
    summary = {
        "auc": auc(pos, neg),
        "tp_at_fp_1e-2": tp_at_fp(curve, 1e-2),
        "tp_at_fp_1e-3": tp_at_fp(curve, 1e-3),
        "eta": eta,
        "tp_at_eta": tp,
        "fp_at_eta": fp,
        "positive_pairs": int(pos.size),
        "negative_pairs": int(neg.size),
    }
    if matrix.is_square:
        summary["raptor_accuracy"] = raptor_accuracy(matrix)
    return summary


# ---------------- experiments ----------------

def prefix_sweep(
    correlator: Correlator,
    dataset: Dataset,
    prefixes: Sequence[int],
    jobs: int = 1,
) -> List[PrefixPoint]:
    """AUC and argmax accuracy when each flow is cut to its first `k` packets per direction."""
    points = []
    for packets in sorted(set(prefixes)):
        matrix = score_matrix(correlator, dataset, jobs, max_packets=packets)
        points.append(PrefixPoint(
            packets=packets,
            auc=auc(matrix.positive_scores(), matrix.negative_scores()),
            accuracy=raptor_accuracy(matrix),
        ))
        logger.info("prefix %d packets: auc %.4f", packets, points[-1].auc)
    return points


def rates_by_test_size(
    matrix: ScoreMatrix,
    sizes: Sequence[int],
    eta: float = 0.5,
    trials: int = 5,
    seed: int = 0,
) -> List[SubsetRate]:
    """TP/FP at `eta` on random subsets of the test connections, `trials` per size."""
    n = len(matrix.row_ids)
    rng = seeding.derive_rng(seed, seeding.SUBSETS)
    rates = []
    for size in sizes:
        if not 2 <= size <= n:
            raise ParameterError(f"subset size must lie in [2, {n}], got {size}")
        for trial in range(trials):
            rows = np.sort(rng.choice(n, size=size, replace=False))
            tp, fp = rates_at(matrix.subset(rows), eta)
            rates.append(SubsetRate(size=size, trial=trial, tp=tp, fp=fp))
    return rates


def benchmark_correlation_time(
    correlator: Correlator,
    entries: np.ndarray,
    exits: np.ndarray,
    repetitions: int = 3,
) -> TimingReport:
    """Per-pair wall-clock latency over `repetitions` passes after one warm-up pass."""
    if entries.shape != exits.shape or entries.shape[0] == 0:
        raise ParameterError("benchmark needs equally many entry and exit flows, at least one")
    if repetitions < 1:
        raise ParameterError(f"repetitions must be >= 1, got {repetitions}")
    total = entries.shape[0] * repetitions
    if total < MIN_BENCH_EVALUATIONS:
        logger.warning(
            "only %d evaluations for %s, timings below %d are unreliable",
            total, correlator.name, MIN_BENCH_EVALUATIONS,
        )
    for entry, exit_ in zip(entries, exits):
        correlator.score_one(entry, exit_)

    times = np.empty(total)
    k = 0
    for _ in range(repetitions):
        for entry, exit_ in zip(entries, exits):
            started = time.perf_counter()
            correlator.score_one(entry, exit_)
            times[k] = time.perf_counter() - started
            k += 1
    return TimingReport(
        name=correlator.name,
        mean=float(times.mean()),
        p95=float(np.percentile(times, 95)),
        evaluations=total,
    )
