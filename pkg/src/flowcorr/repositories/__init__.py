"""Repository layer for file persistence."""
from __future__ import annotations

from .dataset_repository import DatasetRepository
from .checkpoint_repository import CheckpointRepository, load_checkpoint, save_checkpoint
from .results_repository import ResultsRepository

__all__ = [
    "DatasetRepository",
    "CheckpointRepository",
    "load_checkpoint",
    "save_checkpoint",
    "ResultsRepository",
]
