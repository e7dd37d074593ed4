"""Independent scalar re-computations used as test oracles."""

import itertools
import math

import numpy as np

EPS = 2.0**-52


def scalar_sigmoid(x):
    if x >= 0:
        v = 1.0 / (1.0 + np.exp(-x))
    else:
        e = np.exp(x)
        v = e / (1.0 + e)
    return min(max(float(v), EPS), 1.0 - EPS)


def brute_force_pool(D, grid_res, sigma):
    """Evaluate the sum of Gaussians at every grid point with explicit loops.

    Grid points are enumerated with itertools.product (last axis fastest) and
    every (vertex, grid point) pair is visited in order, accumulating squared
    offsets axis by axis and the bumps vertex by vertex.
    """
    D = np.asarray(D, dtype=np.float64)
    m, n = D.shape
    centers = [(2 * t + 1) / (2 * grid_res) for t in range(grid_res)]
    grid = list(itertools.product(centers, repeat=n))
    us = [[scalar_sigmoid(float(x)) for x in row] for row in D]
    c = 1.0 / (2.0 * math.pi * sigma * sigma)
    rho = np.zeros(len(grid))
    for j, z in enumerate(grid):
        total = 0.0
        for u in us:
            d2 = 0.0
            for zk, uk in zip(z, u):
                diff = zk - uk
                d2 += diff * diff
            total += c * np.exp(-d2 / (2.0 * sigma * sigma))
        rho[j] = total
    return rho
