"""Evaluation and training result models."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, List, Sequence, Tuple

import numpy as np

from ..exceptions import ParameterError

if TYPE_CHECKING:  # pragma: no cover
    from ..nn.network import Network


@dataclass(frozen=True)
class RocPoint:
    eta: float
    tp: float
    fp: float


@dataclass(frozen=True)
class RocCurve:
    """(eta, TP rate, FP rate) points ordered by increasing eta."""

    points: Tuple[RocPoint, ...]

    @property
    def etas(self) -> np.ndarray:
        """Thresholds of the sweep."""
        return np.array([p.eta for p in self.points])

    @property
    def tp_rates(self) -> np.ndarray:
        """TP rate at each threshold."""
        return np.array([p.tp for p in self.points])

    @property
    def fp_rates(self) -> np.ndarray:
        """FP rate at each threshold."""
        return np.array([p.fp for p in self.points])

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True, eq=False)
class ScoreMatrix:
    """All-pairs scores: rows are entry flows, columns exit flows.

    `truth[i]` is the column index of row i's true partner.
    """

    row_ids: Tuple[str, ...]
    col_ids: Tuple[str, ...]
    scores: np.ndarray
    truth: np.ndarray

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        truth = np.asarray(self.truth, dtype=np.int64)
        if scores.shape != (len(self.row_ids), len(self.col_ids)):
            raise ParameterError(f"score shape {scores.shape} does not match the id lists")
        if truth.shape != (len(self.row_ids),):
            raise ParameterError("ground truth must name one column per row")
        if not np.all(np.isfinite(scores)):
            raise ParameterError("score matrix contains non-finite values")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "truth", truth)

    @classmethod
    def diagonal_truth(cls, row_ids: Sequence[str], col_ids: Sequence[str], scores: np.ndarray) -> ScoreMatrix:
        """Matrix whose row i is paired with column i."""
        return cls(tuple(row_ids), tuple(col_ids), scores, np.arange(len(row_ids)))

    @property
    def is_square(self) -> bool:
        """True when there are as many exit columns as entry rows."""
        return self.scores.shape[0] == self.scores.shape[1]

    def positive_scores(self) -> np.ndarray:
        """Each row's score against its true partner."""
        return self.scores[np.arange(len(self.row_ids)), self.truth]

    def negative_scores(self) -> np.ndarray:
        """Every cell except each row's true partner."""
        mask = np.ones(self.scores.shape, dtype=bool)
        mask[np.arange(len(self.row_ids)), self.truth] = False
        return self.scores[mask]

    def subset(self, rows: Sequence[int]) -> ScoreMatrix:
        """Restrict to the given rows and their true columns."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = self.truth[rows]
        return ScoreMatrix(
            row_ids=tuple(self.row_ids[i] for i in rows),
            col_ids=tuple(self.col_ids[j] for j in cols),
            scores=self.scores[np.ix_(rows, cols)],
            truth=np.arange(rows.size),
        )


@dataclass(frozen=True)
class TimingReport:
    """Per-correlation latency in seconds."""

    name: str
    mean: float
    p95: float
    evaluations: int

    def to_dict(self) -> Dict[str, Any]:
        """Convert TimingReport instance to dictionary."""
        return {
            "name": self.name,
            "mean_seconds": self.mean,
            "p95_seconds": self.p95,
            "evaluations": self.evaluations,
        }


@dataclass
class TrainReport:
    """Outcome of one training run."""

    network: "Network"
    losses: List[float] = field(default_factory=list)
    step_losses: List[float] = field(default_factory=list)
    duration: float = 0.0
    positive_pairs: int = 0
    negative_pairs: int = 0
    stopped_early: bool = False

    @property
    def epochs_run(self) -> int:
        """Completed epochs."""
        return len(self.losses)

    @property
    def final_loss(self) -> float:
        """Loss of the last completed epoch."""
        return self.losses[-1] if self.losses else float("nan")

    def __str__(self) -> str:
        """String representation for logs and CLI output."""
        return (
            f"{self.epochs_run} epochs, {len(self.step_losses)} steps, "
            f"final loss {self.final_loss:.6f}, {self.duration:.1f}s"
        )


@dataclass(frozen=True)
class PrefixPoint:
    """Accuracy when only the first `packets` packets of each flow are observed."""

    packets: int
    auc: float
    accuracy: float


@dataclass(frozen=True)
class SubsetRate:
    """TP/FP at a fixed threshold on a random subset of test connections."""

    size: int
    trial: int
    tp: float
    fp: float
