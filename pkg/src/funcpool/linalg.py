"""Dense float64 matrix kernels.

A "matrix" here is simply a 2-D, C-ordered ``numpy.ndarray`` of dtype
float64. The helpers below add the shape checks and the finiteness guarantee
the rest of the package relies on; the arithmetic itself is numpy's.
"""

import numpy as np

from .errors import ShapeError


def as_matrix(x):
    """Return ``x`` as a 2-D float64 array, rejecting other ranks."""
    m = np.asarray(x, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def _check_finite(out, op):
    if not np.isfinite(out).all():
        raise FloatingPointError(f"{op} produced non-finite entries")
    return out


def identity(n):
    return np.eye(n, dtype=np.float64)


def matmul(a, b):
    """Matrix product ``a @ b``.

    Raises
    ------
    ShapeError
        If ``a.cols != b.rows``; the message names both shapes.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}")
    with np.errstate(over="ignore", invalid="ignore"):
        out = a @ b
    return _check_finite(out, "matmul")


def hconcat(a, b):
    """Horizontal concatenation ``[a | b]``; ``a`` occupies the left columns."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[0] != b.shape[0]:
        raise ShapeError(f"row mismatch in hconcat: {a.shape} vs {b.shape}")
    return np.concatenate([a, b], axis=1)


def relu(x):
    x = as_matrix(x)
    return np.maximum(x, 0.0)


def relu_backward(x, upstream):
    """Gradient of ``relu`` at ``x``. The subgradient at exactly 0 is 0."""
    x = as_matrix(x)
    upstream = as_matrix(upstream)
    if x.shape != upstream.shape:
        raise ShapeError(f"relu_backward shape mismatch: {x.shape} vs {upstream.shape}")
    return np.where(x > 0.0, upstream, 0.0)
