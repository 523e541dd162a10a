"""Repository for run outputs: CSV tables and JSON summaries."""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

from ..models import PrefixPoint, RocCurve, RunConfig, ScoreMatrix, SubsetRate, TimingReport, TrainReport
from ..config import RUN_CONFIG_TEMPLATE
from ..exceptions import StorageError


def _cell(value: Any) -> str:
    # repr keeps full double precision
    return repr(float(value)) if isinstance(value, float) else str(value)


class ResultsRepository:
    """Writes result files; every method takes the destination path."""

    def _write_rows(self, path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(header)
                for row in rows:
                    writer.writerow([_cell(v) for v in row])
        except OSError as e:
            raise StorageError(f"failed to write {path}: {e}") from e
        return path

    def _write_json(self, path: Path, data: Dict[str, Any]) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("w", encoding="utf-8") as f:
                json.dump(data, f, indent=2, sort_keys=True)
                f.write("\n")
        except (OSError, TypeError, ValueError) as e:
            raise StorageError(f"failed to write {path}: {e}") from e
        return path

    def save_roc(self, curve: RocCurve, path: Path) -> Path:
        return self._write_rows(path, ["eta", "tp", "fp"], ((p.eta, p.tp, p.fp) for p in curve.points))

    def save_score_matrix(self, matrix: ScoreMatrix, path: Path) -> Path:
        """Rows are entry ids, columns exit ids."""
        rows = ([row_id, *(float(v) for v in scores)] for row_id, scores in zip(matrix.row_ids, matrix.scores))
        return self._write_rows(path, ["entry_flow_id", *matrix.col_ids], rows)

    def save_loss_history(self, report: TrainReport, path: Path) -> Path:
        return self._write_rows(path, ["epoch", "loss"], ((k + 1, loss) for k, loss in enumerate(report.losses)))

    def save_prefix_sweep(self, points: List[PrefixPoint], path: Path) -> Path:
        return self._write_rows(path, ["packets", "auc", "accuracy"], ((p.packets, p.auc, p.accuracy) for p in points))

    def save_subset_rates(self, rates: List[SubsetRate], path: Path) -> Path:
        return self._write_rows(path, ["size", "trial", "tp", "fp"], ((r.size, r.trial, r.tp, r.fp) for r in rates))

    def save_summary(self, summary: Dict[str, Any], path: Path) -> Path:
        return self._write_json(path, summary)

    def save_bench(self, reports: List[TimingReport], path: Path) -> Path:
        return self._write_json(path, {"correlators": [r.to_dict() for r in reports]})

    def save_run_config(self, run_config: RunConfig, directory: Path) -> Path:
        """Write `run_config.<subcommand>.json` into `directory`."""
        path = Path(directory) / RUN_CONFIG_TEMPLATE.format(subcommand=run_config.subcommand)
        return self._write_json(path, run_config.to_dict())

    def load_run_config(self, path: Path) -> RunConfig:
        try:
            with Path(path).open("r", encoding="utf-8") as f:
                return RunConfig.from_dict(json.load(f))
        except (OSError, json.JSONDecodeError, KeyError) as e:
            raise StorageError(f"failed to load run config {path}: {e}") from e
