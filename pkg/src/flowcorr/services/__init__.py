"""Service layer orchestrating the pipeline."""
from __future__ import annotations

from .simulation_service import SimulationService
from .training_service import TrainingService
from .evaluation_service import EvaluationService, resolve_split
from .benchmark_service import BenchmarkService

__all__ = [
    "SimulationService",
    "TrainingService",
    "EvaluationService",
    "resolve_split",
    "BenchmarkService",
]
