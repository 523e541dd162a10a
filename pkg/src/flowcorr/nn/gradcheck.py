"""Finite-difference gradient check."""
from __future__ import annotations

import logging

import numpy as np

from .loss import logit_cross_entropy
from .network import Network, network_backward, network_logits

logger = logging.getLogger(__name__)


def gradient_check(net: Network, x: np.ndarray, y, h: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients.

    The relative error of each entry is |a - n| / max(|a|, |n|, 1e-8). The numeric
    side uses the unclamped loss, matching what backpropagation differentiates.
    """
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    _, analytic = network_backward(net, x, y)

    def loss() -> float:
        return logit_cross_entropy(network_logits(net, x), y)

    worst = 0.0
    for name, param in net.parameters().items():
        grad = analytic[name]
        flat = param.reshape(-1)
        flat_grad = grad.reshape(-1)
        for k in range(flat.size):
            saved = flat[k]
            flat[k] = saved + h
            upper = loss()
            flat[k] = saved - h
            lower = loss()
            flat[k] = saved
            numeric = (upper - lower) / (2.0 * h)
            a = flat_grad[k]
            error = abs(a - numeric) / max(abs(a), abs(numeric), 1e-8)
            if error > worst:
                worst = error
                logger.debug("gradient check %s[%d]: analytic %.3e numeric %.3e", name, k, a, numeric)
    return worst
