"""Layer primitives with manual backward passes.

Tensors are numpy float64 arrays. Spatial layers take `(batch, channels, height, width)`
and also accept a single `(channels, height, width)` sample; dense layers take
`(batch, features)` or `(features,)`. Only valid (unpadded) windows are used.
"""
from __future__ import annotations

from typing import Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit

from ..exceptions import ShapeError

Pair = Tuple[int, int]


def output_length(size: int, window: int, stride: int) -> int:
    """floor((size - window) / stride) + 1."""
    return (size - window) // stride + 1


def _as_batch(x: np.ndarray) -> Tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 3:
        return x[None], True
    if x.ndim != 4:
        raise ShapeError(f"expected a 3-D or 4-D tensor, got shape {x.shape}")
    return x, False


def _windows(x: np.ndarray, window: Pair, stride: Pair) -> np.ndarray:
    """Strided view `(batch, channels, out_h, out_w, win_h, win_w)` over `x`."""
    kh, kw = window
    _, _, h, w = x.shape
    if kh > h or kw > w:
        raise ShapeError(f"window {window} larger than input {(h, w)}")
    view = sliding_window_view(x, (kh, kw), axis=(2, 3))
    return view[:, :, ::stride[0], ::stride[1]]


def _scatter_windows(dx: np.ndarray, i: int, j: int, stride: Pair, values: np.ndarray) -> None:
    """Add `values` (batch, channels, out_h, out_w) at window offset (i, j)."""
    oh, ow = values.shape[2:]
    sh, sw = stride
    dx[:, :, i:i + sh * (oh - 1) + 1:sh, j:j + sw * (ow - 1) + 1:sw] += values


# ---------------- convolution ----------------

def conv2d_forward(x: np.ndarray, kernels: np.ndarray, bias: np.ndarray, stride: Pair) -> np.ndarray:
    """Cross-correlate `x` with `kernels` of shape (count, channels, kh, kw)."""
    xb, single = _as_batch(x)
    if kernels.ndim != 4 or kernels.shape[1] != xb.shape[1]:
        raise ShapeError(f"kernels {kernels.shape} do not match input channels {xb.shape[1]}")
    if stride[0] < 1 or stride[1] < 1:
        raise ShapeError(f"stride must be positive, got {stride}")
    win = _windows(xb, kernels.shape[2:], stride)
    out = np.tensordot(win, kernels, axes=([1, 4, 5], [1, 2, 3]))  # (n, oh, ow, k)
    out = np.ascontiguousarray(np.moveaxis(out, 3, 1)) + bias[None, :, None, None]
    return out[0] if single else out


def conv2d_backward(
    dout: np.ndarray,
    x: np.ndarray,
    kernels: np.ndarray,
    stride: Pair,
    need_input_grad: bool = True,
) -> Tuple[Optional[np.ndarray], np.ndarray, np.ndarray]:
    """Return `(dx, dkernels, dbias)`; dx is None when not requested."""
    win = _windows(x, kernels.shape[2:], stride)
    dkernels = np.tensordot(dout, win, axes=([0, 2, 3], [0, 2, 3]))
    dbias = dout.sum(axis=(0, 2, 3))
    if not need_input_grad:
        return None, dkernels, dbias
    dx = np.zeros_like(x)
    kh, kw = kernels.shape[2:]
    for i in range(kh):
        for j in range(kw):
            contrib = np.tensordot(dout, kernels[:, :, i, j], axes=([1], [0]))  # (n, oh, ow, c)
            _scatter_windows(dx, i, j, stride, np.moveaxis(contrib, 3, 1))
    return dx, dkernels, dbias


# ---------------- pooling ----------------

def maxpool_forward(x: np.ndarray, window: Pair, stride: Pair) -> np.ndarray:
    xb, single = _as_batch(x)
    out = _windows(xb, window, stride).max(axis=(4, 5))
    return out[0] if single else out


def maxpool_backward(dout: np.ndarray, x: np.ndarray, window: Pair, stride: Pair) -> np.ndarray:
    """Route each window's gradient to its first maximal element."""
    win = _windows(x, window, stride)
    kh, kw = window
    arg = win.reshape(win.shape[:4] + (kh * kw,)).argmax(axis=-1)
    dx = np.zeros_like(x)
    for i in range(kh):
        for j in range(kw):
            _scatter_windows(dx, i, j, stride, dout * (arg == i * kw + j))
    return dx


# ---------------- dense ----------------

def dense_forward(x: np.ndarray, weights: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Affine map W x + b; `weights` has shape (units, inputs)."""
    x = np.asarray(x, dtype=np.float64)
    if weights.ndim != 2 or x.shape[-1] != weights.shape[1]:
        raise ShapeError(f"weights {weights.shape} do not accept input of length {x.shape[-1]}")
    return x @ weights.T + bias


def dense_backward(dout: np.ndarray, x: np.ndarray, weights: np.ndarray):
    return dout @ weights, dout.T @ x, dout.sum(axis=0)


# ---------------- activations ----------------

def relu_forward(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def relu_backward(dout: np.ndarray, x: np.ndarray) -> np.ndarray:
    return dout * (x > 0)


def sigmoid_forward(x: np.ndarray) -> np.ndarray:
    return expit(x)


def flatten_forward(x: np.ndarray) -> np.ndarray:
    return x.reshape(x.shape[0], -1)
