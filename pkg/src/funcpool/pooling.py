"""Global pooling layers.

:class:`FunctionPooling` turns an unordered set of vertex embeddings into a
function on the unit hypercube: every embedding is squashed into ``(0, 1)^n``
by the logistic sigmoid and becomes the centre of an isotropic Gaussian bump,
and the sum of the bumps is sampled on a regular grid of ``r`` points per
axis. The kernel width ``sigma`` is a learnable parameter, stored as
``log_sigma`` so that it stays positive under unconstrained updates.

:class:`SumPooling` and :class:`MeanPooling` are the usual summary-statistic
baselines.
"""

import math

import numpy as np

from .errors import ShapeError, StateError
from .linalg import as_matrix

_EPS = np.finfo(np.float64).eps


def sigmoid_map(D):
    """Elementwise logistic sigmoid, kept inside ``[eps, 1 - eps]``.

    Evaluated as ``1/(1+e^-|x|)`` or ``e^-|x|/(1+e^-|x|)`` depending on the
    sign, so large inputs never overflow.
    """
    D = as_matrix(D)
    e = np.exp(-np.abs(D))
    out = np.where(D >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return np.clip(out, _EPS, 1.0 - _EPS)


def gaussian_eval(u, z, sigma):
    """Gaussian bump centred at ``u`` evaluated at ``z``.

    The normalising constant is ``1 / (2 pi sigma^2)`` in every dimension
    (it is not the n-dimensional density constant).
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    u = np.asarray(u, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if u.shape != z.shape:
        raise ShapeError(f"point shapes differ: {u.shape} vs {z.shape}")
    d2 = 0.0
    for zk, uk in zip(z.tolist(), u.tolist()):
        diff = zk - uk
        d2 += diff * diff
    return float((1.0 / (2.0 * math.pi * sigma * sigma)) * np.exp(-d2 / (2.0 * sigma * sigma)))


def grid_axis(grid_res):
    """Cell-centre coordinates ``(2t + 1) / (2r)`` for ``t = 0..r-1``."""
    r = int(grid_res)
    return (2.0 * np.arange(r) + 1.0) / (2.0 * r)


def grid_indices(input_dim, grid_res):
    """Integer coordinates of all ``r**n`` grid points, last axis fastest."""
    n, r = int(input_dim), int(grid_res)
    return np.indices((r,) * n, dtype=np.int64).reshape(n, -1).T.copy()


class FunctionCache:
    __slots__ = ("u", "gauss", "dist2", "consumed")

    def __init__(self, u, gauss, dist2):
        self.u = u
        self.gauss = gauss
        self.dist2 = dist2
        self.consumed = False


class FunctionPooling:
    """Rasterised sum-of-Gaussians pooling.

    Parameters
    ----------
    input_dim : int
        Dimension ``n`` of the vertex embeddings.
    grid_res : int
        Grid points per axis ``r``; the output has length ``r**n``.
    sigma : float
        Initial kernel width.
    """

    def __init__(self, input_dim, grid_res=3, sigma=0.125):
        if input_dim < 1 or grid_res < 1:
            raise ValueError("input_dim and grid_res must be positive")
        if not sigma > 0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        self.input_dim = int(input_dim)
        self.grid_res = int(grid_res)
        self.axis = grid_axis(grid_res)
        self.index = grid_indices(input_dim, grid_res)
        self.grid = self.axis[self.index]
        self.log_sigma = np.array(math.log(sigma))
        self.grad_log_sigma = np.zeros(())

    @property
    def sigma(self):
        return float(np.exp(self.log_sigma))

    @property
    def output_dim(self):
        return self.grid_res**self.input_dim

    @property
    def cell_volume(self):
        return 1.0 / self.output_dim

    def parameters(self):
        return [("log_sigma", self.log_sigma, self.grad_log_sigma)]

    def zero_grad(self):
        self.grad_log_sigma.fill(0.0)

    def _squared_distances(self, u):
        """``|z_j - u_i|^2`` for every vertex ``i`` and grid point ``j``.

        The grid is a Cartesian product, so the per-axis squared offsets
        (``m x r`` each) are combined by outer sums, one axis at a time and in
        axis order; the result is laid out like ``self.grid``.
        """
        m = u.shape[0]
        acc = None
        for d in range(self.input_dim):
            diff = self.axis[None, :] - u[:, d, None]
            sq = diff * diff
            acc = sq if acc is None else (acc[:, :, None] + sq[:, None, :]).reshape(m, -1)
        return acc

    def forward(self, D):
        D = as_matrix(D)
        if D.shape[1] != self.input_dim:
            raise ShapeError(f"pooling expects {self.input_dim}-dim rows, got {D.shape[1]}")
        m = D.shape[0]
        if m == 0:
            empty = np.zeros((0, self.output_dim))
            return np.zeros(self.output_dim), FunctionCache(np.zeros((0, self.input_dim)), empty, empty)
        u = sigmoid_map(D)
        dist2 = self._squared_distances(u)
        sigma = self.sigma
        gauss = np.divide(dist2, -2.0 * sigma * sigma)
        np.exp(gauss, out=gauss)
        gauss *= 1.0 / (2.0 * math.pi * sigma * sigma)
        # row-by-row so the sum runs in vertex order whatever the array shape
        rho = gauss[0].copy()
        for row in gauss[1:]:
            rho += row
        return rho, FunctionCache(u, gauss, dist2)

    def backward(self, cache, upstream):
        """Return the gradient w.r.t. ``D``; accumulate ``grad_log_sigma``."""
        if cache is None or cache.consumed:
            raise StateError("pooling backward called without a fresh forward")
        upstream = np.asarray(upstream, dtype=np.float64).reshape(-1)
        if upstream.shape[0] != self.output_dim:
            raise ShapeError(f"upstream has length {upstream.shape[0]}, expected {self.output_dim}")
        cache.consumed = True
        u = cache.u
        if u.shape[0] == 0:
            return np.zeros((0, self.input_dim))
        s2 = self.sigma**2
        weighted = cache.gauss * upstream[None, :]
        row_mass = weighted.sum(axis=1)
        grad_u = (weighted @ self.grid - u * row_mass[:, None]) / s2
        # d g / d log(sigma) = g * (|z - u|^2 / sigma^2 - 2)
        self.grad_log_sigma += np.vdot(weighted, cache.dist2) / s2 - 2.0 * row_mass.sum()
        return grad_u * u * (1.0 - u)


class _StatCache:
    __slots__ = ("rows", "consumed")

    def __init__(self, rows):
        self.rows = rows
        self.consumed = False


class SumPooling:
    def __init__(self, input_dim):
        self.input_dim = int(input_dim)

    @property
    def output_dim(self):
        return self.input_dim

    def parameters(self):
        return []

    def zero_grad(self):
        pass

    def forward(self, D):
        D = as_matrix(D)
        if D.shape[1] != self.input_dim:
            raise ShapeError(f"pooling expects {self.input_dim}-dim rows, got {D.shape[1]}")
        return pool_sum(D), _StatCache(D.shape[0])

    def backward(self, cache, upstream):
        if cache is None or cache.consumed:
            raise StateError("pooling backward called without a fresh forward")
        cache.consumed = True
        return pool_sum_backward(cache.rows, upstream)


class MeanPooling(SumPooling):
    def forward(self, D):
        D = as_matrix(D)
        if D.shape[1] != self.input_dim:
            raise ShapeError(f"pooling expects {self.input_dim}-dim rows, got {D.shape[1]}")
        return pool_mean(D), _StatCache(D.shape[0])

    def backward(self, cache, upstream):
        if cache is None or cache.consumed:
            raise StateError("pooling backward called without a fresh forward")
        cache.consumed = True
        return pool_mean_backward(cache.rows, upstream)


def pool_sum(D):
    return as_matrix(D).sum(axis=0)


def pool_mean(D):
    D = as_matrix(D)
    if D.shape[0] == 0:
        raise ValueError("mean pooling of an empty set is undefined")
    return D.sum(axis=0) / D.shape[0]


def pool_sum_backward(rows, upstream):
    upstream = np.asarray(upstream, dtype=np.float64).reshape(1, -1)
    return np.repeat(upstream, rows, axis=0)


def pool_mean_backward(rows, upstream):
    if rows == 0:
        raise ValueError("mean pooling of an empty set is undefined")
    return pool_sum_backward(rows, upstream) / rows


def pool_forward(pool, D):
    return pool.forward(D)


def pool_backward(pool, cache, upstream):
    return pool.backward(cache, upstream)


def lp_distance(f, g, p=2.0, cell_volume=1.0):
    """Riemann-sum approximation of the L^p distance between two sampled functions."""
    f = np.asarray(f, dtype=np.float64).reshape(-1)
    g = np.asarray(g, dtype=np.float64).reshape(-1)
    if f.shape != g.shape:
        raise ShapeError(f"length mismatch: {f.shape[0]} vs {g.shape[0]}")
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    return float((np.sum(np.abs(f - g) ** p) * cell_volume) ** (1.0 / p))


def export_grid_csv(rho, grid_res, path):
    """Write a 2-D pooled function as an ``r x r`` CSV (row = first coordinate)."""
    rho = np.asarray(rho, dtype=np.float64)
    r = int(grid_res)
    if rho.size != r * r:
        raise ShapeError(f"expected {r * r} values for a {r}x{r} grid, got {rho.size}")
    np.savetxt(path, rho.reshape(r, r), delimiter=",", fmt="%.17g")
