"""Checkpoint documents: a network plus the metadata needed to score with it."""
from __future__ import annotations

from typing import Any, Dict

import numpy as np

from .network import Layer, LayerSpec, Network, shape_trace
from ..config import CHECKPOINT_FORMAT_VERSION
from ..models import Direction, ScalingConfig, SplitSpec
from ..exceptions import CheckpointError, ParameterError, ShapeError


def _layer_to_dict(layer: Layer) -> Dict[str, Any]:
    params = layer.spec.to_dict()
    kind = params.pop("kind")
    entry: Dict[str, Any] = {"kind": kind, "params": params}
    if layer.weights is not None:
        params["weights_shape"] = list(layer.weights.shape)
        # tolist() yields Python floats, which json writes with round-trip repr
        entry["weights"] = layer.weights.ravel().tolist()
        entry["bias"] = layer.bias.tolist()
    return entry


def network_to_dict(net: Network) -> Dict[str, Any]:
    return {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "preset": net.preset,
        "flow_len": net.flow_len,
        "pair_direction": net.pair_direction.value,
        "input_shape": list(net.input_shape),
        "scaling": net.scaling.to_dict(),
        "split": net.split.to_dict() if net.split is not None else None,
        "layers": [_layer_to_dict(layer) for layer in net.layers],
    }


def _layer_from_dict(index: int, data: Dict[str, Any]) -> Layer:
    params = dict(data.get("params") or {})
    weights_shape = params.pop("weights_shape", None)
    spec = LayerSpec.from_dict({"kind": data["kind"], **params})
    layer = Layer(spec)
    if spec.has_params:
        if weights_shape is None or "weights" not in data or "bias" not in data:
            raise CheckpointError(f"layer {index} ({spec.kind.value}) has no weights")
        weights = np.asarray(data["weights"], dtype=np.float64)
        if weights.size != int(np.prod(weights_shape)):
            raise CheckpointError(
                f"layer {index} stores {weights.size} weights for shape {tuple(weights_shape)}"
            )
        layer.weights = weights.reshape(weights_shape)
        layer.bias = np.asarray(data["bias"], dtype=np.float64)
    return layer


def network_from_dict(data: Dict[str, Any]) -> Network:
    """Rebuild a network; raises CheckpointError for a wrong version or a malformed document."""
    if not isinstance(data, dict):
        raise CheckpointError("checkpoint document must be an object")
    version = data.get("format_version")
    if version != CHECKPOINT_FORMAT_VERSION:
        raise CheckpointError(
            f"unsupported checkpoint format_version {version}, expected {CHECKPOINT_FORMAT_VERSION}"
        )
    try:
        layers = [_layer_from_dict(k, entry) for k, entry in enumerate(data["layers"])]
        net = Network(
            layers=layers,
            input_shape=tuple(int(d) for d in data["input_shape"]),
            scaling=ScalingConfig.from_dict(data.get("scaling") or {}),
            preset=str(data.get("preset", "custom")),
            flow_len=data.get("flow_len"),
            pair_direction=Direction(data.get("pair_direction", Direction.UPSTREAM.value)),
            split=SplitSpec.from_dict(data["split"]) if data.get("split") is not None else None,
        )
    except CheckpointError:
        raise
    except (KeyError, TypeError, ValueError, ParameterError) as e:
        raise CheckpointError(f"malformed checkpoint: {e!r}") from e

    try:
        shapes = shape_trace(net.specs, net.input_shape)
        for layer, in_shape in zip(net.layers, shapes[:-1]):
            expected = layer.spec.param_shapes(in_shape)
            if expected and (layer.weights.shape != expected["weights"] or layer.bias.shape != expected["bias"]):
                raise ShapeError(f"stored weights {layer.weights.shape} do not fit {expected['weights']}")
    except ShapeError as e:
        raise CheckpointError(f"inconsistent checkpoint: {e}") from e
    return net
