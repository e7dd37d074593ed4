"""Graph convolution layer: ``ReLU([h | A h] W + b)``.

The neighbourhood aggregate is the raw adjacency product (a sum over
neighbours); the self term enters through the concatenation, so no
self-loops are added to ``A``.
"""

import numpy as np

from .errors import ShapeError, StateError
from .linalg import as_matrix, hconcat, matmul, relu, relu_backward


class ConvCache:
    __slots__ = ("adj", "concat", "pre")

    def __init__(self, adj, concat, pre):
        self.adj = adj
        self.concat = concat
        self.pre = pre


class ConvLayer:
    """One convolution layer with weights of shape ``(2 * d_in, d_out)``."""

    def __init__(self, d_in, d_out, W=None, b=None):
        self.d_in = int(d_in)
        self.d_out = int(d_out)
        self.W = np.zeros((2 * self.d_in, self.d_out)) if W is None else as_matrix(W).copy()
        self.b = np.zeros(self.d_out) if b is None else np.asarray(b, dtype=np.float64).copy()
        if self.W.shape != (2 * self.d_in, self.d_out):
            raise ShapeError(f"conv weights must be {2 * self.d_in}x{self.d_out}, got {self.W.shape}")
        if self.b.shape != (self.d_out,):
            raise ShapeError(f"conv bias must have length {self.d_out}, got {self.b.shape}")
        self.grad_W = np.zeros_like(self.W)
        self.grad_b = np.zeros_like(self.b)

    def parameters(self):
        return [("W", self.W, self.grad_W), ("b", self.b, self.grad_b)]

    def zero_grad(self):
        self.grad_W.fill(0.0)
        self.grad_b.fill(0.0)

    def forward(self, adj, h):
        adj = as_matrix(adj)
        h = as_matrix(h)
        nv = h.shape[0]
        if adj.shape != (nv, nv):
            raise ShapeError(f"adjacency {adj.shape} does not match {nv} vertices")
        if h.shape[1] != self.d_in:
            raise ShapeError(f"conv expects {self.d_in} input features, got {h.shape[1]}")
        concat = hconcat(h, matmul(adj, h))
        pre = matmul(concat, self.W) + self.b
        return relu(pre), ConvCache(adj, concat, pre)

    def backward(self, cache, upstream):
        """Accumulate parameter gradients and return the gradient w.r.t. ``h``."""
        if cache is None:
            raise StateError("conv backward called before forward")
        upstream = as_matrix(upstream)
        if upstream.shape != cache.pre.shape:
            raise ShapeError(f"upstream {upstream.shape} does not match output {cache.pre.shape}")
        g_pre = relu_backward(cache.pre, upstream)
        self.grad_W += cache.concat.T @ g_pre
        self.grad_b += g_pre.sum(axis=0)
        g_concat = g_pre @ self.W.T
        g_self, g_agg = g_concat[:, : self.d_in], g_concat[:, self.d_in :]
        # d(A h)/dh contributes A^T g; A is symmetric for undirected graphs but
        # the transpose keeps this exact for any A.
        return g_self + cache.adj.T @ g_agg


def conv_forward(layer, adj, h):
    return layer.forward(adj, h)


def conv_backward(layer, cache, upstream):
    return layer.backward(cache, upstream)
