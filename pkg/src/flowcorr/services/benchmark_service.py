"""Service for per-correlation timing."""
from __future__ import annotations

import logging
from pathlib import Path
from typing import List, Optional, Sequence

from ..models import BaseFlowModel, ChannelModel, Dataset, TimingReport
from ..repositories import ResultsRepository
from ..evaluation import BaselineCorrelator, Correlator, NetworkCorrelator, benchmark_correlation_time
from ..nn import Network
from ..simnet import generate_paired_dataset
from ..statcorr import MetricKind
from ..config import DEFAULT_BENCH_PAIRS, DEFAULT_BENCH_REPETITIONS, NOISY_DROP_RATE, NOISY_JITTER_STD

logger = logging.getLogger(__name__)


class BenchmarkService:
    """Times the network and every baseline on one shared set of pairs."""

    def __init__(self, results_repo: Optional[ResultsRepository] = None):
        self.results_repo = results_repo or ResultsRepository()

    def bench_pairs(self, n_pairs: int = DEFAULT_BENCH_PAIRS, seed: int = 0, jobs: int = 1) -> Dataset:
        """Simulated 300-packet pairs through the noisy relay channel."""
        channel = ChannelModel(jitter_std=NOISY_JITTER_STD, drop_rate=NOISY_DROP_RATE)
        return generate_paired_dataset(n_pairs, BaseFlowModel(), channel, seed, jobs)

    def correlators(self, net: Network, metrics: Sequence[MetricKind] = tuple(MetricKind)) -> List[Correlator]:
        flow_len = int(net.flow_len or net.input_shape[-1])
        return [NetworkCorrelator(net)] + [BaselineCorrelator(m, flow_len, net.scaling) for m in metrics]

    def run(
        self,
        correlators: Sequence[Correlator],
        dataset: Dataset,
        repetitions: int = DEFAULT_BENCH_REPETITIONS,
        out_path: Optional[Path] = None,
    ) -> List[TimingReport]:
        reports = []
        for correlator in correlators:
            entries = correlator.features(dataset.entry_flows)
            exits = correlator.features(dataset.exit_flows)
            report = benchmark_correlation_time(correlator, entries, exits, repetitions)
            logger.info("%s: mean %.3g s, p95 %.3g s", report.name, report.mean, report.p95)
            reports.append(report)
        if out_path is not None:
            self.results_repo.save_bench(reports, out_path)
        return reports
