"""Synthetic flow and relay channel models."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict

from ..config import (
    DEFAULT_MEAN_IPD,
    DEFAULT_PACKET_COUNT,
    DEFAULT_SIZE_MU,
    DEFAULT_SIZE_SIGMA,
    MAX_PACKET_SIZE,
    MIN_PACKET_SIZE,
)
from ..exceptions import ParameterError


@dataclass(frozen=True)
class ChannelModel:
    """Per-packet Laplace jitter (given as a standard deviation) and Bernoulli drops."""

    jitter_std: float = 0.0
    drop_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.jitter_std < 0:
            raise ParameterError(f"jitter std must be >= 0, got {self.jitter_std}")
        if not 0.0 <= self.drop_rate <= 1.0:
            raise ParameterError(f"drop rate must lie in [0, 1], got {self.drop_rate}")

    @property
    def laplace_scale(self) -> float:
        """Laplace scale b giving the configured standard deviation."""
        # std of Laplace(b) is b * sqrt(2)
        return self.jitter_std / 2 ** 0.5

    @property
    def is_identity(self) -> bool:
        """True when the channel neither jitters nor drops."""
        return self.jitter_std == 0 and self.drop_rate == 0

    def to_dict(self) -> Dict[str, Any]:
        """Convert ChannelModel instance to dictionary."""
        return {"jitter_std": self.jitter_std, "drop_rate": self.drop_rate, "seed": self.seed}

    def __str__(self) -> str:
        """String representation for logs and CLI output."""
        return f"jitter std {self.jitter_std}s, drop rate {self.drop_rate:.2%}"


@dataclass(frozen=True)
class BaseFlowModel:
    """One-directional synthetic flow: exponential IPDs, truncated log-normal sizes."""

    packet_count: int = DEFAULT_PACKET_COUNT
    mean_ipd: float = DEFAULT_MEAN_IPD
    size_mu: float = DEFAULT_SIZE_MU
    size_sigma: float = DEFAULT_SIZE_SIGMA
    min_size: int = MIN_PACKET_SIZE
    max_size: int = MAX_PACKET_SIZE
    seed: int = 0

    def __post_init__(self):
        if self.packet_count < 1:
            raise ParameterError(f"packet count must be >= 1, got {self.packet_count}")
        if self.mean_ipd <= 0:
            raise ParameterError(f"mean IPD must be positive, got {self.mean_ipd}")
        if not 0 < self.min_size <= self.max_size:
            raise ParameterError("size bounds must satisfy 0 < min <= max")

    def to_dict(self) -> Dict[str, Any]:
        """Convert BaseFlowModel instance to dictionary."""
        return {
            "packet_count": self.packet_count,
            "mean_ipd": self.mean_ipd,
            "size_mu": self.size_mu,
            "size_sigma": self.size_sigma,
            "min_size": self.min_size,
            "max_size": self.max_size,
            "seed": self.seed,
        }
