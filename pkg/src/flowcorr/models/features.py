"""Feature vectors and pair matrices fed to correlators."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from ..config import DEFAULT_IPD_SCALE, DEFAULT_SIZE_SCALE


@dataclass(frozen=True)
class ScalingConfig:
    """Per-channel multipliers applied after padding."""

    ipd_scale: float = DEFAULT_IPD_SCALE
    size_scale: float = DEFAULT_SIZE_SCALE

    @classmethod
    def unit(cls) -> ScalingConfig:
        """Scaling that leaves features in seconds and bytes."""
        return cls(ipd_scale=1.0, size_scale=1.0)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> ScalingConfig:
        """Create a ScalingConfig instance from dictionary data."""
        return cls(
            ipd_scale=float(data.get("ipd_scale", DEFAULT_IPD_SCALE)),
            size_scale=float(data.get("size_scale", DEFAULT_SIZE_SCALE)),
        )

    def to_dict(self) -> Dict[str, Any]:
        """Convert ScalingConfig instance to dictionary."""
        return {"ipd_scale": self.ipd_scale, "size_scale": self.size_scale}


class Channel(Enum):
    """The four per-flow feature channels, valued by their row in `FlowFeatures.as_array`."""

    IPD_UP = 0
    SIZE_UP = 1
    IPD_DOWN = 2
    SIZE_DOWN = 3

    @classmethod
    def parse(cls, name: str) -> Channel:
        """Look a channel up by name, case-insensitive (`ipd_up`, `SIZE_DOWN`, ...)."""
        return cls[name.upper()]


ALL_CHANNELS = tuple(Channel)


@dataclass(frozen=True, eq=False)
class FlowFeatures:
    """The fixed-length vectors [T^u; S^u; T^d; S^d] of one flow."""

    ipd_up: np.ndarray
    size_up: np.ndarray
    ipd_down: np.ndarray
    size_down: np.ndarray
    flow_len: int
    scaling: ScalingConfig = ScalingConfig()

    def channel(self, channel: Channel) -> np.ndarray:
        """The vector of one channel."""
        return (self.ipd_up, self.size_up, self.ipd_down, self.size_down)[channel.value]

    def as_array(self) -> np.ndarray:
        """Stack the channels into a `(4, flow_len)` array in `Channel` order."""
        return np.stack([self.ipd_up, self.size_up, self.ipd_down, self.size_down])

    @classmethod
    def from_array(cls, array: np.ndarray, scaling: ScalingConfig = ScalingConfig()) -> FlowFeatures:
        """Inverse of `as_array`."""
        return cls(
            ipd_up=array[0], size_up=array[1], ipd_down=array[2], size_down=array[3],
            flow_len=int(array.shape[1]), scaling=scaling,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FlowFeatures):
            return NotImplemented
        return (
            self.flow_len == other.flow_len
            and self.scaling == other.scaling
            and np.array_equal(self.as_array(), other.as_array())
        )

    __hash__ = None  # type: ignore[assignment]


class PairMode(Enum):
    """Layout of a pair matrix."""

    TOR = "tor"
    STEPPING = "stepping"

    @property
    def row_count(self) -> int:
        """Rows of the pair matrix in this layout."""
        return 8 if self is PairMode.TOR else 2


@dataclass(frozen=True, eq=False)
class PairMatrix:
    """The input array F_{i,j} for one flow pair."""

    rows: np.ndarray
    mode: PairMode
    scaling: ScalingConfig = ScalingConfig()

    @property
    def flow_len(self) -> int:
        """Columns of the pair matrix."""
        return int(self.rows.shape[1])


@dataclass(frozen=True)
class LabeledPair:
    """A pair of flow ids with its ground-truth label (1 = same connection)."""

    entry_id: str
    exit_id: str
    label: int
    pair: Optional[PairMatrix] = None
