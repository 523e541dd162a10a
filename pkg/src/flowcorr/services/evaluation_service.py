"""Service for scoring test splits and writing evaluation outputs."""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

from ..models import Dataset, Split, SplitSpec
from ..repositories import DatasetRepository, ResultsRepository
from ..ingest import assemble_split
from ..evaluation import (
    Correlator,
    prefix_sweep,
    rates_by_test_size,
    roc_sweep,
    score_matrix,
    summarize,
)
from ..exceptions import ParameterError
from ..config import (
    DEFAULT_SPLIT_FRACTION,
    PREFIX_SWEEP_FILENAME,
    SCORE_MATRIX_FILENAME,
    SUBSET_RATES_FILENAME,
    SUMMARY_FILENAME,
)

logger = logging.getLogger(__name__)


def resolve_split(
    stored: Optional[SplitSpec],
    seed: Optional[int] = None,
    fraction: Optional[float] = None,
) -> SplitSpec:
    """The split to evaluate on.

    A split stored in a checkpoint wins; explicit values must agree with it.
    Without one, explicit values or the defaults are used.
    """
    if stored is None:
        return SplitSpec(
            seed=0 if seed is None else seed,
            fraction=DEFAULT_SPLIT_FRACTION if fraction is None else fraction,
        )
    conflicts = []
    if seed is not None and seed != stored.seed:
        conflicts.append(f"--seed {seed} (trained with {stored.seed})")
    if fraction is not None and fraction != stored.fraction:
        conflicts.append(f"--split-fraction {fraction} (trained with {stored.fraction})")
    if conflicts:
        raise ParameterError(
            "split differs from the checkpoint's training split: " + ", ".join(conflicts)
            + "; omit these options to evaluate on the held-out associations"
        )
    return stored


class EvaluationService:
    """Runs the evaluation protocol for one correlator."""

    def __init__(self, results_repo: Optional[ResultsRepository] = None):
        self.results_repo = results_repo or ResultsRepository()

    def load_split(self, data_dir: Path, split: Split, spec: SplitSpec) -> Dataset:
        """The requested part of the corpus, divided as `spec` describes."""
        corpus = DatasetRepository(data_dir).load()
        if split is Split.CORPUS:
            return corpus
        train_set, test_set = assemble_split(corpus.flows, corpus.manifest, spec)
        return train_set if split is Split.TRAIN else test_set

    def evaluate(
        self,
        correlator: Correlator,
        dataset: Dataset,
        roc_path: Path,
        out_dir: Path,
        eta: float = 0.5,
        jobs: int = 1,
        prefixes: Sequence[int] = (),
        subset_sizes: Sequence[int] = (),
        seed: int = 0,
        progress: bool = False,
    ) -> Dict[str, Any]:
        """Score all pairs, then write ROC, score matrix and summary (plus optional sweeps)."""
        matrix = score_matrix(correlator, dataset, jobs, progress=progress)
        curve = roc_sweep(matrix.positive_scores(), matrix.negative_scores())
        summary = summarize(matrix, eta)
        summary["correlator"] = correlator.name
        summary["connections"] = len(dataset)

        out_dir = Path(out_dir)
        self.results_repo.save_roc(curve, roc_path)
        self.results_repo.save_score_matrix(matrix, out_dir / SCORE_MATRIX_FILENAME)
        if prefixes:
            points = prefix_sweep(correlator, dataset, prefixes, jobs)
            self.results_repo.save_prefix_sweep(points, out_dir / PREFIX_SWEEP_FILENAME)
        if subset_sizes:
            rates = rates_by_test_size(matrix, subset_sizes, eta, seed=seed)
            self.results_repo.save_subset_rates(rates, out_dir / SUBSET_RATES_FILENAME)
        self.results_repo.save_summary(summary, out_dir / SUMMARY_FILENAME)
        logger.info("%s: auc %.4f over %d connections", correlator.name, summary["auc"], len(dataset))
        return summary
