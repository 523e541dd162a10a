"""Ground-truth manifests and datasets."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple

from .packet import Flow
from ..config import DEFAULT_SPLIT_FRACTION
from ..exceptions import ManifestError, ParameterError


class Split(Enum):
    """Which part of a corpus a dataset holds."""

    TRAIN = "train"
    TEST = "test"
    CORPUS = "corpus"


@dataclass(frozen=True)
class SplitSpec:
    """How a corpus is divided into training and test associations.

    `train_size`, when set, keeps only the first `train_size` training associations
    of the seeded shuffle; the test split does not depend on it.
    """

    seed: int = 0
    fraction: float = DEFAULT_SPLIT_FRACTION
    train_size: Optional[int] = None

    def __post_init__(self):
        if not 0.0 < self.fraction < 1.0:
            raise ParameterError(f"split fraction must lie in (0, 1), got {self.fraction}")
        if self.train_size is not None and self.train_size < 1:
            raise ParameterError(f"train size must be >= 1, got {self.train_size}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> SplitSpec:
        """Create a SplitSpec instance from dictionary data."""
        train_size = data.get("train_size")
        return cls(
            seed=int(data.get("seed", 0)),
            fraction=float(data.get("fraction", DEFAULT_SPLIT_FRACTION)),
            train_size=None if train_size is None else int(train_size),
        )

    def to_dict(self) -> Dict[str, Any]:
        """Convert the split to dictionary format."""
        return {"seed": self.seed, "fraction": self.fraction, "train_size": self.train_size}

    def __str__(self) -> str:
        """String representation for logs and CLI output."""
        size = "" if self.train_size is None else f", {self.train_size} training associations"
        return f"seed {self.seed}, fraction {self.fraction}{size}"


@dataclass(frozen=True)
class PairManifest:
    """Ground-truth (entry_flow_id, exit_flow_id) associations."""

    entries: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self):
        entries = tuple((str(a), str(b)) for a, b in self.entries)
        seen = set()
        for entry_id, exit_id in entries:
            for flow_id in (entry_id, exit_id):
                if flow_id in seen:
                    raise ManifestError(f"flow id '{flow_id}' appears in more than one association")
                seen.add(flow_id)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[str, str]]) -> PairManifest:
        """Create a manifest from (entry id, exit id) pairs."""
        return cls(entries=tuple(pairs))

    @property
    def entry_ids(self) -> List[str]:
        """Entry flow ids in manifest order."""
        return [entry for entry, _ in self.entries]

    @property
    def exit_ids(self) -> List[str]:
        """Exit flow ids in manifest order."""
        return [exit_ for _, exit_ in self.entries]

    def flow_ids(self) -> List[str]:
        """Every referenced flow id, entry before exit for each association."""
        return [flow_id for pair in self.entries for flow_id in pair]

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class Dataset:
    """Flows plus the manifest pairing them; `manifest` order defines row order."""

    flows: Dict[str, Flow] = field(default_factory=dict)
    manifest: PairManifest = field(default_factory=PairManifest)
    split: Split = Split.CORPUS

    def __post_init__(self):
        missing = tuple(fid for fid in self.manifest.flow_ids() if fid not in self.flows)
        if missing:
            raise ManifestError("manifest references unknown flow ids", missing)

    @property
    def entry_flows(self) -> List[Flow]:
        """Entry flows in manifest order."""
        return [self.flows[fid] for fid in self.manifest.entry_ids]

    @property
    def exit_flows(self) -> List[Flow]:
        """Exit flows in manifest order."""
        return [self.flows[fid] for fid in self.manifest.exit_ids]

    def __len__(self) -> int:
        return len(self.manifest)

    def __str__(self) -> str:
        """String representation for logs and CLI output."""
        return f"{self.split.value} -> {len(self)} associations, {len(self.flows)} flows"
