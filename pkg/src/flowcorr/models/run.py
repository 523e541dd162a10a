"""Run configuration recorded next to every CLI output."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Sequence

from .. import __version__
from ..exceptions import DataError


@dataclass
class RunConfig:
    """Effective configuration of one CLI invocation."""

    subcommand: str
    options: Dict[str, Any] = field(default_factory=dict)
    version: str = __version__

    def validate_inputs(self, paths: Sequence[Path]) -> None:
        """Fail before any work if an input path is missing."""
        for path in paths:
            if path is not None and not Path(path).exists():
                raise DataError(f"input path does not exist: {path}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> RunConfig:
        """Create a RunConfig instance from dictionary data."""
        return cls(
            subcommand=data["subcommand"],
            options=dict(data.get("options", {})),
            version=data.get("version", __version__),
        )

    def to_dict(self) -> Dict[str, Any]:
        """Convert RunConfig instance to a JSON-ready dictionary."""
        options = {
            key: (str(value) if isinstance(value, Path) else value)
            for key, value in self.options.items()
        }
        return {"subcommand": self.subcommand, "version": self.version, "options": options}
