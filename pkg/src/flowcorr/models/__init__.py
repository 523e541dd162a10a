"""Data models for flowcorr."""
from __future__ import annotations

from .packet import Direction, PacketRecord, Flow
from .features import (
    ALL_CHANNELS,
    Channel,
    FlowFeatures,
    LabeledPair,
    PairMatrix,
    PairMode,
    ScalingConfig,
)
from .dataset import Dataset, PairManifest, Split, SplitSpec
from .preset import DetectionThreshold, PresetConfig, PresetKind
from .channel import BaseFlowModel, ChannelModel
from .results import (
    PrefixPoint,
    RocCurve,
    RocPoint,
    ScoreMatrix,
    SubsetRate,
    TimingReport,
    TrainReport,
)
from .run import RunConfig

__all__ = [
    "Direction",
    "PacketRecord",
    "Flow",
    "ALL_CHANNELS",
    "Channel",
    "FlowFeatures",
    "LabeledPair",
    "PairMatrix",
    "PairMode",
    "ScalingConfig",
    "Dataset",
    "PairManifest",
    "Split",
    "SplitSpec",
    "DetectionThreshold",
    "PresetConfig",
    "PresetKind",
    "BaseFlowModel",
    "ChannelModel",
    "PrefixPoint",
    "RocCurve",
    "RocPoint",
    "ScoreMatrix",
    "SubsetRate",
    "TimingReport",
    "TrainReport",
    "RunConfig",
]
