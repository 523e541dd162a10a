"""Layered feed-forward network: specs, initialization, forward and backward passes."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import layers as L
from .loss import cross_entropy_loss
from ..models import Direction, PairMode, ScalingConfig, SplitSpec
from ..exceptions import ParameterError, ShapeError

logger = logging.getLogger(__name__)

Shape = Tuple[int, ...]


class LayerKind(Enum):
    CONV2D = "conv2d"
    MAXPOOL = "maxpool"
    DENSE = "dense"
    RELU = "relu"
    SIGMOID = "sigmoid"
    FLATTEN = "flatten"


@dataclass(frozen=True)
class LayerSpec:
    """Kind plus kind-specific hyperparameters of one layer."""

    kind: LayerKind
    kernel_count: Optional[int] = None
    kernel_shape: Optional[Tuple[int, int]] = None
    stride: Optional[Tuple[int, int]] = None
    unit_count: Optional[int] = None
    pool_window: Optional[Tuple[int, int]] = None
    pool_stride: Optional[Tuple[int, int]] = None

    @classmethod
    def conv2d(cls, kernel_count: int, kernel_shape: Tuple[int, int], stride: Tuple[int, int]) -> LayerSpec:
        return cls(LayerKind.CONV2D, kernel_count=kernel_count, kernel_shape=tuple(kernel_shape), stride=tuple(stride))

    @classmethod
    def maxpool(cls, window: Tuple[int, int], stride: Tuple[int, int]) -> LayerSpec:
        return cls(LayerKind.MAXPOOL, pool_window=tuple(window), pool_stride=tuple(stride))

    @classmethod
    def dense(cls, unit_count: int) -> LayerSpec:
        return cls(LayerKind.DENSE, unit_count=unit_count)

    @classmethod
    def relu(cls) -> LayerSpec:
        return cls(LayerKind.RELU)

    @classmethod
    def sigmoid(cls) -> LayerSpec:
        return cls(LayerKind.SIGMOID)

    @classmethod
    def flatten(cls) -> LayerSpec:
        return cls(LayerKind.FLATTEN)

    @property
    def has_params(self) -> bool:
        return self.kind in (LayerKind.CONV2D, LayerKind.DENSE)

    def output_shape(self, input_shape: Shape) -> Shape:
        """Per-sample output shape; raises ShapeError when the layer does not fit."""
        kind = self.kind
        if kind in (LayerKind.RELU, LayerKind.SIGMOID):
            return tuple(input_shape)
        if kind is LayerKind.FLATTEN:
            return (int(np.prod(input_shape)),)
        if kind is LayerKind.DENSE:
            if len(input_shape) != 1:
                raise ShapeError(f"dense layer needs a flat input, got {input_shape}")
            if self.unit_count is None or self.unit_count < 1:
                raise ShapeError("dense layer needs a positive unit count")
            return (self.unit_count,)
        if len(input_shape) != 3:
            raise ShapeError(f"{kind.value} layer needs a (channels, height, width) input, got {input_shape}")
        channels, height, width = input_shape
        if kind is LayerKind.CONV2D:
            window, stride, channels = self.kernel_shape, self.stride, self.kernel_count
        else:
            window, stride = self.pool_window, self.pool_stride
        if min(window) < 1 or min(stride) < 1 or channels < 1:
            raise ShapeError(f"{kind.value} windows, strides and counts must be positive")
        if window[0] > height or window[1] > width:
            raise ShapeError(f"{kind.value} window {window} larger than input {(height, width)}")
        return (
            channels,
            L.output_length(height, window[0], stride[0]),
            L.output_length(width, window[1], stride[1]),
        )

    def param_shapes(self, input_shape: Shape) -> Dict[str, Shape]:
        if self.kind is LayerKind.CONV2D:
            return {
                "weights": (self.kernel_count, input_shape[0]) + tuple(self.kernel_shape),
                "bias": (self.kernel_count,),
            }
        if self.kind is LayerKind.DENSE:
            return {"weights": (self.unit_count, input_shape[0]), "bias": (self.unit_count,)}
        return {}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> LayerSpec:
        def pair(key):
            value = data.get(key)
            return tuple(value) if value is not None else None

        return cls(
            kind=LayerKind(data["kind"]),
            kernel_count=data.get("kernel_count"),
            kernel_shape=pair("kernel_shape"),
            stride=pair("stride"),
            unit_count=data.get("unit_count"),
            pool_window=pair("pool_window"),
            pool_stride=pair("pool_stride"),
        )

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind.value}
        for key in ("kernel_count", "kernel_shape", "stride", "unit_count", "pool_window", "pool_stride"):
            value = getattr(self, key)
            if value is not None:
                data[key] = list(value) if isinstance(value, tuple) else value
        return data


def shape_trace(specs: Sequence[LayerSpec], input_shape: Shape) -> List[Shape]:
    """Input shape followed by every layer's output shape."""
    shapes = [tuple(input_shape)]
    for index, spec in enumerate(specs):
        try:
            shapes.append(spec.output_shape(shapes[-1]))
        except ShapeError as e:
            raise ShapeError(str(e), layer_index=index) from None
    return shapes


@dataclass(eq=False)
class Layer:
    spec: LayerSpec
    weights: Optional[np.ndarray] = None
    bias: Optional[np.ndarray] = None


@dataclass(eq=False)
class Network:
    """A layered network ending in a single sigmoid unit.

    `split` records how the training corpus was divided, so evaluation can rebuild
    the matching test split.
    """

    layers: List[Layer]
    input_shape: Shape
    scaling: ScalingConfig = field(default_factory=ScalingConfig)
    preset: str = "custom"
    flow_len: Optional[int] = None
    pair_direction: Direction = Direction.UPSTREAM
    split: Optional[SplitSpec] = None

    @property
    def specs(self) -> List[LayerSpec]:
        return [layer.spec for layer in self.layers]

    @property
    def pair_mode(self) -> Optional[PairMode]:
        try:
            return PairMode(self.preset)
        except ValueError:
            return None

    def shape_trace(self) -> List[Shape]:
        return shape_trace(self.specs, self.input_shape)

    def parameters(self) -> Dict[str, np.ndarray]:
        """Parameter arrays keyed `"<layer index>.weights"` / `"<layer index>.bias"`."""
        params: Dict[str, np.ndarray] = {}
        for index, layer in enumerate(self.layers):
            if layer.spec.has_params:
                params[f"{index}.weights"] = layer.weights
                params[f"{index}.bias"] = layer.bias
        return params

    def parameter_count(self) -> int:
        return int(sum(p.size for p in self.parameters().values()))

    def __str__(self) -> str:
        trace = " -> ".join("x".join(str(d) for d in shape) for shape in self.shape_trace())
        return f"{self.preset} network ({self.parameter_count()} parameters): {trace}"


def glorot_uniform(shape: Shape, fan_in: int, fan_out: int, rng: np.random.Generator) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def init_network(
    specs: Sequence[LayerSpec],
    input_shape: Shape,
    rng: np.random.Generator,
    **metadata: Any,
) -> Network:
    """Allocate parameters: weights uniform in +-sqrt(6 / (fan_in + fan_out)), zero biases."""
    shapes = shape_trace(specs, input_shape)
    if shapes[-1] != (1,) or specs[-1].kind is not LayerKind.SIGMOID:
        raise ShapeError("network must end in a single-unit sigmoid")
    built = []
    for spec, in_shape in zip(specs, shapes[:-1]):
        layer = Layer(spec)
        if spec.kind is LayerKind.CONV2D:
            w_shape = spec.param_shapes(in_shape)["weights"]
            receptive = w_shape[2] * w_shape[3]
            layer.weights = glorot_uniform(w_shape, w_shape[1] * receptive, w_shape[0] * receptive, rng)
            layer.bias = np.zeros(w_shape[0])
        elif spec.kind is LayerKind.DENSE:
            w_shape = spec.param_shapes(in_shape)["weights"]
            layer.weights = glorot_uniform(w_shape, w_shape[1], w_shape[0], rng)
            layer.bias = np.zeros(w_shape[0])
        built.append(layer)
    return Network(layers=built, input_shape=tuple(input_shape), **metadata)


# ---------------- forward / backward ----------------

def _layer_forward(layer: Layer, x: np.ndarray) -> np.ndarray:
    spec = layer.spec
    kind = spec.kind
    if kind is LayerKind.CONV2D:
        return L.conv2d_forward(x, layer.weights, layer.bias, spec.stride)
    if kind is LayerKind.MAXPOOL:
        return L.maxpool_forward(x, spec.pool_window, spec.pool_stride)
    if kind is LayerKind.DENSE:
        return L.dense_forward(x, layer.weights, layer.bias)
    if kind is LayerKind.RELU:
        return L.relu_forward(x)
    if kind is LayerKind.SIGMOID:
        return L.sigmoid_forward(x)
    return L.flatten_forward(x)


def _layer_backward(layer: Layer, dout: np.ndarray, x: np.ndarray, need_input_grad: bool):
    spec = layer.spec
    kind = spec.kind
    if kind is LayerKind.CONV2D:
        return L.conv2d_backward(dout, x, layer.weights, spec.stride, need_input_grad)
    if kind is LayerKind.DENSE:
        return L.dense_backward(dout, x, layer.weights)
    if kind is LayerKind.MAXPOOL:
        return L.maxpool_backward(dout, x, spec.pool_window, spec.pool_stride), None, None
    if kind is LayerKind.RELU:
        return L.relu_backward(dout, x), None, None
    if kind is LayerKind.FLATTEN:
        return dout.reshape(x.shape), None, None
    raise ShapeError("sigmoid is only supported as the output layer")


def _as_input_batch(net: Network, x: np.ndarray) -> Tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    single = x.shape == tuple(net.input_shape)
    batch = x[None] if single else x
    if batch.shape[1:] != tuple(net.input_shape):
        raise ShapeError(f"input shape {x.shape} does not match {net.input_shape}", layer_index=0)
    return batch, single


def _forward_all(net: Network, batch: np.ndarray, stop: Optional[int] = None) -> List[np.ndarray]:
    activations = [batch]
    for index, layer in enumerate(net.layers[:stop]):
        try:
            activations.append(_layer_forward(layer, activations[-1]))
        except ShapeError as e:
            raise ShapeError(str(e), layer_index=index) from None
    return activations


def network_forward(net: Network, x: np.ndarray) -> Union[float, np.ndarray]:
    """p = Psi(x); a float for one sample, an array of shape (batch,) for a batch."""
    batch, single = _as_input_batch(net, x)
    p = _forward_all(net, batch)[-1].reshape(-1)
    return float(p[0]) if single else p


def network_logits(net: Network, x: np.ndarray) -> np.ndarray:
    """Pre-sigmoid outputs, shape (batch,)."""
    batch, _ = _as_input_batch(net, x)
    return _forward_all(net, batch, stop=-1)[-1].reshape(-1)


def network_backward(
    net: Network,
    x: np.ndarray,
    y,
    loss_kind: str = "cross_entropy",
) -> Tuple[float, Dict[str, np.ndarray]]:
    """Mean batch loss and its exact gradient for every parameter.

    The output sigmoid and the cross-entropy are differentiated together, so the
    gradient at the logit is (p - y) / batch. Clamping only affects the reported loss.
    """
    if loss_kind != "cross_entropy":
        raise ParameterError(f"unsupported loss '{loss_kind}'")
    if not net.layers or net.layers[-1].spec.kind is not LayerKind.SIGMOID:
        raise ShapeError("network must end in a sigmoid layer", layer_index=len(net.layers) - 1)
    batch, _ = _as_input_batch(net, x)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if y.size != batch.shape[0]:
        raise ShapeError(f"{y.size} labels for a batch of {batch.shape[0]}")

    activations = _forward_all(net, batch)
    p = activations[-1].reshape(-1)
    loss = float(np.mean(cross_entropy_loss(p, y)))

    grad = ((p - y) / y.size).reshape(activations[-2].shape)
    grads: Dict[str, np.ndarray] = {}
    for index in range(len(net.layers) - 2, -1, -1):
        layer = net.layers[index]
        grad, d_weights, d_bias = _layer_backward(layer, grad, activations[index], need_input_grad=index > 0)
        if d_weights is not None:
            grads[f"{index}.weights"] = d_weights
            grads[f"{index}.bias"] = d_bias
    return loss, grads
