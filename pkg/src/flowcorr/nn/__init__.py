"""Minimal neural engine: layers, manual backpropagation, Adam and checkpoints."""
from __future__ import annotations

from .layers import (
    conv2d_backward,
    conv2d_forward,
    dense_backward,
    dense_forward,
    maxpool_backward,
    maxpool_forward,
    output_length,
    relu_forward,
    sigmoid_forward,
)
from .loss import cross_entropy_loss, logit_cross_entropy
from .network import (
    Layer,
    LayerKind,
    LayerSpec,
    Network,
    init_network,
    network_backward,
    network_forward,
    network_logits,
    shape_trace,
)
from .optim import AdamState, adam_step
from .gradcheck import gradient_check
from .serialization import network_from_dict, network_to_dict

__all__ = [
    "conv2d_backward",
    "conv2d_forward",
    "dense_backward",
    "dense_forward",
    "maxpool_backward",
    "maxpool_forward",
    "output_length",
    "relu_forward",
    "sigmoid_forward",
    "cross_entropy_loss",
    "logit_cross_entropy",
    "Layer",
    "LayerKind",
    "LayerSpec",
    "Network",
    "init_network",
    "network_backward",
    "network_forward",
    "network_logits",
    "shape_trace",
    "AdamState",
    "adam_step",
    "gradient_check",
    "network_from_dict",
    "network_to_dict",
]
