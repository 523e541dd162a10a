"""Repository for network checkpoints (JSON documents)."""
from __future__ import annotations

import json
from pathlib import Path

from ..nn import Network, network_from_dict, network_to_dict
from ..exceptions import CheckpointError


class CheckpointRepository:
    """Saves and loads checkpoints at explicit paths."""

    def save(self, net: Network, path: Path) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            # Python floats serialize via repr, which round-trips exactly
            with path.open("w", encoding="utf-8") as f:
                json.dump(network_to_dict(net), f)
        except (OSError, ValueError) as e:
            raise CheckpointError(f"failed to save checkpoint {path}: {e}") from e
        return path

    def load(self, path: Path) -> Network:
        path = Path(path)
        if not path.exists():
            raise CheckpointError(f"checkpoint not found: {path}")
        try:
            with path.open("r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise CheckpointError(f"malformed checkpoint {path}: {e}") from e
        except OSError as e:
            raise CheckpointError(f"cannot read checkpoint {path}: {e}") from e
        return network_from_dict(data)


def save_checkpoint(net: Network, path: Path) -> Path:
    return CheckpointRepository().save(net, path)


def load_checkpoint(path: Path) -> Network:
    return CheckpointRepository().load(path)
