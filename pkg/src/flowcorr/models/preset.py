"""Architecture presets and detection thresholds."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Optional, Tuple

from .features import PairMode, ScalingConfig
from .packet import Direction
from ..config import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_EPOCHS,
    DEFAULT_FLOW_LEN,
    DEFAULT_LEARNING_RATE,
    DEFAULT_N_NEG,
    EARLY_STOP_PATIENCE,
    EARLY_STOP_TOLERANCE,
)
from ..exceptions import ConfigurationError, ParameterError


class PresetKind(Enum):
    """The two published architectures."""

    TOR = "tor"
    STEPPING = "stepping"

    @property
    def pair_mode(self) -> PairMode:
        """Pair-matrix layout the preset consumes."""
        return PairMode.TOR if self is PresetKind.TOR else PairMode.STEPPING


def _scaled(width: int, scale: float) -> int:
    return max(1, int(math.floor(width * scale)))


@dataclass(frozen=True)
class PresetConfig:
    """Hyperparameters of one model and its training run.

    `k1`/`k2` and `fc_sizes` are the unscaled widths; `scale` multiplies all of them
    (floor, minimum 1). For the stepping preset `k1` is the single conv layer's
    kernel count and `k2`/`w2` are unused.
    """

    preset: PresetKind = PresetKind.TOR
    flow_len: int = DEFAULT_FLOW_LEN
    k1: int = 2000
    k2: int = 1000
    w1: int = 30
    w2: int = 10
    conv2_height: int = 4
    fc_sizes: Tuple[int, ...] = (3000, 800, 100)
    pool_window: Tuple[int, int] = (1, 5)
    pool_stride: Tuple[int, int] = (1, 1)
    n_neg: int = DEFAULT_N_NEG
    learning_rate: float = DEFAULT_LEARNING_RATE
    epochs: int = DEFAULT_EPOCHS
    batch_size: int = DEFAULT_BATCH_SIZE
    seed: int = 0
    scale: float = 1.0
    scaling: ScalingConfig = field(default_factory=ScalingConfig)
    stepping_direction: Direction = Direction.UPSTREAM
    resample_negatives: bool = True
    max_steps: Optional[int] = None
    early_stop_patience: Optional[int] = EARLY_STOP_PATIENCE
    early_stop_tolerance: float = EARLY_STOP_TOLERANCE

    def __post_init__(self):
        if self.scale <= 0:
            raise ConfigurationError(f"scale must be positive, got {self.scale}")
        if self.flow_len < 1:
            raise ConfigurationError(f"flow length must be positive, got {self.flow_len}")
        if self.conv2_height not in (2, 4):
            raise ConfigurationError(f"conv2 height must be 2 or 4, got {self.conv2_height}")
        if self.batch_size < 1 or self.epochs < 0 or self.n_neg < 0:
            raise ConfigurationError("batch size must be >= 1, epochs and n_neg >= 0")
        if self.learning_rate < 0:
            raise ConfigurationError("learning rate must be non-negative")

    @classmethod
    def tor(cls, **overrides: Any) -> PresetConfig:
        """Tor-traffic hyperparameters."""
        return cls(preset=PresetKind.TOR, **overrides)

    @classmethod
    def stepping(cls, **overrides: Any) -> PresetConfig:
        """Stepping-stone hyperparameters."""
        base = dict(preset=PresetKind.STEPPING, k1=200, w1=10, fc_sizes=(500, 100))
        base.update(overrides)
        return cls(**base)

    @classmethod
    def for_preset(cls, preset: PresetKind, **overrides: Any) -> PresetConfig:
        """Defaults of `preset` with `overrides` applied."""
        factory = cls.tor if preset is PresetKind.TOR else cls.stepping
        return factory(**overrides)

    def with_overrides(self, **overrides: Any) -> PresetConfig:
        """Copy with some fields replaced."""
        return replace(self, **overrides)

    @property
    def pair_mode(self) -> PairMode:
        """Pair-matrix layout of the configured preset."""
        return self.preset.pair_mode

    @property
    def scaled_k1(self) -> int:
        """Kernel count of the first conv layer after scaling."""
        return _scaled(self.k1, self.scale)

    @property
    def scaled_k2(self) -> int:
        """Kernel count of the second conv layer after scaling."""
        return _scaled(self.k2, self.scale)

    @property
    def scaled_fc_sizes(self) -> Tuple[int, ...]:
        """Hidden FC widths after scaling."""
        return tuple(_scaled(width, self.scale) for width in self.fc_sizes)

    def __str__(self) -> str:
        """String representation for logs and CLI output."""
        return (
            f"{self.preset.value} preset -> flow_len={self.flow_len}, scale={self.scale}, "
            f"k1={self.scaled_k1}, fc={list(self.scaled_fc_sizes)}"
        )


@dataclass(frozen=True)
class DetectionThreshold:
    """Decision threshold eta in [0, 1]."""

    eta: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ParameterError(f"threshold must lie in [0, 1], got {self.eta}")
