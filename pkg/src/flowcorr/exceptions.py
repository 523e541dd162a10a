"""Custom exceptions for flowcorr."""
from __future__ import annotations

from typing import Optional


class FlowCorrError(Exception):
    """Base exception for all flowcorr errors."""
    pass


class DataError(FlowCorrError):
    """Errors caused by input data (corpus files, manifests, checkpoints)."""
    pass


class PacketFormatError(DataError):
    """Raised when a packet-record or manifest line cannot be parsed."""

    def __init__(self, message: str, line: int, field: Optional[str] = None):
        location = f"line {line}" if field is None else f"line {line}, field '{field}'"
        super().__init__(f"{message} at {location}")
        self.line = line
        self.field = field


class ManifestError(DataError):
    """Raised when a pairing manifest is inconsistent with the corpus."""

    def __init__(self, message: str, missing_ids: tuple = ()):
        if missing_ids:
            message = f"{message}: {', '.join(missing_ids)}"
        super().__init__(message)
        self.missing_ids = tuple(missing_ids)


class EmptyFlowError(DataError):
    """Raised when a flow has no packets left to work with."""
    pass


class StorageError(DataError):
    """Errors related to reading or writing files."""
    pass


class CheckpointError(StorageError):
    """Raised when a checkpoint document is malformed or has the wrong version."""
    pass


class ShapeError(FlowCorrError):
    """Raised when tensor shapes do not compose."""

    def __init__(self, message: str, layer_index: Optional[int] = None):
        if layer_index is not None:
            message = f"layer {layer_index}: {message}"
        super().__init__(message)
        self.layer_index = layer_index


class DimensionError(ShapeError):
    """Raised when vectors that must share a length do not."""
    pass


class ParameterError(FlowCorrError):
    """Raised for invalid argument values."""
    pass


class ConfigurationError(ParameterError):
    """Raised when a preset or run configuration is unusable."""
    pass


class NumericError(FlowCorrError):
    """Raised when training produces a non-finite loss."""

    def __init__(self, epoch: int, batch: int, loss: float):
        super().__init__(f"non-finite loss {loss!r} at epoch {epoch}, batch {batch}")
        self.epoch = epoch
        self.batch = batch
        self.loss = loss
