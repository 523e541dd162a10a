"""Service for training correlation networks."""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Tuple

from ..models import Dataset, PresetConfig, SplitSpec, TrainReport
from ..repositories import CheckpointRepository, DatasetRepository, ResultsRepository
from ..ingest import assemble_split
from ..deepcorr import train
from ..config import LOSS_HISTORY_FILENAME

logger = logging.getLogger(__name__)


class TrainingService:
    """Loads a corpus, trains on its training split and stores the checkpoint."""

    def __init__(
        self,
        checkpoint_repo: Optional[CheckpointRepository] = None,
        results_repo: Optional[ResultsRepository] = None,
    ):
        self.checkpoint_repo = checkpoint_repo or CheckpointRepository()
        self.results_repo = results_repo or ResultsRepository()

    def load_splits(self, data_dir: Path, spec: SplitSpec) -> Tuple[Dataset, Dataset]:
        corpus = DatasetRepository(data_dir).load()
        return assemble_split(corpus.flows, corpus.manifest, spec)

    def train(
        self,
        data_dir: Path,
        config: PresetConfig,
        checkpoint: Path,
        split_fraction: float,
        train_size: Optional[int] = None,
        progress: bool = False,
    ) -> TrainReport:
        """Train on the training split; writes the checkpoint and its loss history.

        The split (seeded by `config.seed`) is stored in the checkpoint so evaluation
        scores exactly the associations training never saw.
        """
        spec = SplitSpec(seed=config.seed, fraction=split_fraction, train_size=train_size)
        train_set, _ = self.load_splits(data_dir, spec)
        report = train(train_set, config, progress=progress)
        report.network.split = spec
        self.checkpoint_repo.save(report.network, checkpoint)
        history = self.results_repo.save_loss_history(report, Path(checkpoint).parent / LOSS_HISTORY_FILENAME)
        logger.info("saved checkpoint %s (split %s) and loss history %s", checkpoint, spec, history)
        return report
