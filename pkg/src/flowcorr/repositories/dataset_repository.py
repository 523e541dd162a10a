"""Repository for corpus files: packet records plus the pairing manifest."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict

from ..models import Dataset
from ..ingest import parse_manifest, parse_packet_file, write_manifest, write_packet_file
from ..config import MANIFEST_FILENAME, PACKETS_FILENAME, SIMULATION_FILENAME, ensure_dir
from ..exceptions import StorageError


class DatasetRepository:
    """Reads and writes `packets.csv` / `manifest.csv` in one directory."""

    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self.packets_file = self.data_dir / PACKETS_FILENAME
        self.manifest_file = self.data_dir / MANIFEST_FILENAME
        self.simulation_file = self.data_dir / SIMULATION_FILENAME

    def load(self) -> Dataset:
        """Load the whole corpus; fails if either file is missing."""
        for path in (self.packets_file, self.manifest_file):
            if not path.exists():
                raise StorageError(f"dataset file not found: {path}")
        flows = parse_packet_file(self.packets_file)
        return Dataset(flows=flows, manifest=parse_manifest(self.manifest_file))

    def save(self, dataset: Dataset) -> None:
        try:
            ensure_dir(self.data_dir)
        except OSError as e:
            raise StorageError(f"cannot create {self.data_dir}: {e}") from e
        write_packet_file(dataset.flows, self.packets_file)
        write_manifest(dataset.manifest, self.manifest_file)

    def save_simulation(self, description: Dict[str, Any]) -> Path:
        """Record the generator settings of a simulated corpus."""
        try:
            with self.simulation_file.open("w", encoding="utf-8") as f:
                json.dump(description, f, indent=2)
        except OSError as e:
            raise StorageError(f"cannot write {self.simulation_file}: {e}") from e
        return self.simulation_file
