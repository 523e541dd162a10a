"""Packet and flow models."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, List, Tuple

import numpy as np

from ..exceptions import DataError


class Direction(Enum):
    """Direction of a packet inside a bidirectional flow."""

    UPSTREAM = "u"
    DOWNSTREAM = "d"

    @classmethod
    def parse(cls, token: str) -> Direction:
        """Map a CSV token (`u` / `d`) to a direction."""
        for member in cls:
            if member.value == token:
                return member
        raise ValueError(f"unknown direction '{token}'")


@dataclass(frozen=True)
class PacketRecord:
    """A single observed packet."""

    timestamp: float
    size: int
    direction: Direction

    def __post_init__(self):
        if self.size <= 0:
            raise DataError(f"packet size must be positive, got {self.size}")
        if self.timestamp < 0:
            raise DataError(f"packet timestamp must be non-negative, got {self.timestamp}")


@dataclass(frozen=True, eq=False)
class Flow:
    """A bidirectional flow stored column-wise.

    `timestamps`, `sizes` and `upstream` are parallel arrays; `upstream[k]` is True for
    upstream packets. Within each direction timestamps are non-decreasing.
    """

    id: str
    timestamps: np.ndarray
    sizes: np.ndarray
    upstream: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not self.id:
            raise DataError("flow id must be non-empty")
        ts = np.asarray(self.timestamps, dtype=np.float64)
        sizes = np.asarray(self.sizes, dtype=np.int64)
        up = np.asarray(self.upstream, dtype=bool)
        if not (ts.shape == sizes.shape == up.shape) or ts.ndim != 1:
            raise DataError(f"flow {self.id}: column lengths differ")
        if ts.size and (ts.min() < 0 or sizes.min() <= 0):
            raise DataError(f"flow {self.id}: negative timestamp or non-positive size")
        for mask in (up, ~up):
            if np.any(np.diff(ts[mask]) < 0):
                raise DataError(f"flow {self.id}: timestamps decrease within a direction")
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "upstream", up)

    @classmethod
    def from_packets(cls, flow_id: str, packets: Iterable[PacketRecord]) -> Flow:
        """Build a flow from packet records, sorting each direction by time."""
        ordered = sorted(packets, key=lambda p: p.timestamp)
        return cls(
            id=flow_id,
            timestamps=np.array([p.timestamp for p in ordered], dtype=np.float64),
            sizes=np.array([p.size for p in ordered], dtype=np.int64),
            upstream=np.array([p.direction is Direction.UPSTREAM for p in ordered], dtype=bool),
        )

    @classmethod
    def one_way(cls, flow_id: str, timestamps: np.ndarray, sizes: np.ndarray) -> Flow:
        """Build an upstream-only flow."""
        ts = np.asarray(timestamps, dtype=np.float64)
        return cls(id=flow_id, timestamps=ts, sizes=sizes, upstream=np.ones(ts.shape, dtype=bool))

    @property
    def packets(self) -> List[PacketRecord]:
        """Packet records in timestamp order."""
        return [
            PacketRecord(
                timestamp=float(t),
                size=int(s),
                direction=Direction.UPSTREAM if u else Direction.DOWNSTREAM,
            )
            for t, s, u in zip(self.timestamps, self.sizes, self.upstream)
        ]

    def direction(self, direction: Direction) -> Tuple[np.ndarray, np.ndarray]:
        """Return `(timestamps, sizes)` of one direction."""
        mask = self.upstream if direction is Direction.UPSTREAM else ~self.upstream
        return self.timestamps[mask], self.sizes[mask]

    def __len__(self) -> int:
        """Number of packets in both directions."""
        return int(self.timestamps.size)

    def __eq__(self, other: object) -> bool:
        """Flows are equal when id and every column match."""
        if not isinstance(other, Flow):
            return NotImplemented
        return (
            self.id == other.id
            and np.array_equal(self.timestamps, other.timestamps)
            and np.array_equal(self.sizes, other.sizes)
            and np.array_equal(self.upstream, other.upstream)
        )

    def __hash__(self) -> int:
        return hash((self.id, len(self)))

    def __str__(self) -> str:
        """String representation of the flow."""
        n_up = int(self.upstream.sum())
        return f"{self.id} -> {n_up} up / {len(self) - n_up} down packets"
