"""Binary cross-entropy."""
from __future__ import annotations

import numpy as np

from ..config import LOSS_EPSILON


def cross_entropy_loss(p, y):
    """-[y ln p + (1 - y) ln(1 - p)] with p clamped to [eps, 1 - eps].

    Accepts scalars or arrays; callers average over the batch.
    """
    p = np.clip(np.asarray(p, dtype=np.float64), LOSS_EPSILON, 1.0 - LOSS_EPSILON)
    y = np.asarray(y, dtype=np.float64)
    loss = -(y * np.log(p) + (1.0 - y) * np.log1p(-p))
    return float(loss) if loss.ndim == 0 else loss


def logit_cross_entropy(z, y) -> float:
    """Mean cross-entropy computed from logits, without clamping."""
    z = np.asarray(z, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return float(np.mean(np.logaddexp(0.0, z) - y * z))
