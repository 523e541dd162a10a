"""Service for generating synthetic corpora."""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

from ..models import BaseFlowModel, ChannelModel, Dataset
from ..repositories import DatasetRepository
from ..simnet import generate_paired_dataset

logger = logging.getLogger(__name__)


class SimulationService:
    """Generates paired datasets and stores them in the ingest formats."""

    def __init__(self, dataset_repo: Optional[DatasetRepository] = None):
        self.dataset_repo = dataset_repo

    def simulate(
        self,
        n_pairs: int,
        base_model: BaseFlowModel,
        channel: ChannelModel,
        seed: int,
        jobs: int = 1,
    ) -> Dataset:
        return generate_paired_dataset(n_pairs, base_model, channel, seed, jobs)

    def simulate_to(
        self,
        out_dir: Path,
        n_pairs: int,
        base_model: BaseFlowModel,
        channel: ChannelModel,
        seed: int,
        jobs: int = 1,
    ) -> Dataset:
        """Simulate and write `packets.csv`, `manifest.csv` and `simulation.json` into `out_dir`."""
        dataset = self.simulate(n_pairs, base_model, channel, seed, jobs)
        repo = self.dataset_repo or DatasetRepository(out_dir)
        repo.save(dataset)
        repo.save_simulation({
            "pairs": n_pairs,
            "seed": seed,
            "base_model": base_model.to_dict(),
            "channel": channel.to_dict(),
        })
        logger.info("wrote %s and %s", repo.packets_file, repo.manifest_file)
        return dataset
