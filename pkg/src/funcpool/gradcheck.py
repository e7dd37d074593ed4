"""Finite-difference checks of every hand-written backward pass.

``run_self_test`` is what ``funcpool --self-test`` executes. Each check builds
a small random instance, reduces the layer output to a scalar through a fixed
random projection, and compares the analytic gradient with central
differences (step 1e-6).
"""

import time
from dataclasses import dataclass

import numpy as np

from .conv import ConvLayer
from .data import adjacency, make_graph
from .linalg import relu, relu_backward
from .model import DenseLayer, ModelConfig
from .optim import init_model
from .pooling import FunctionPooling

STEP = 1e-6
# Entries whose gradient magnitude is below this are compared absolutely:
# central differences carry roughly 1e-16 * |f| / STEP of rounding noise.
ABS_FLOOR = 1e-4


def numerical_gradient(f, x, step=STEP):
    """Central-difference gradient of scalar ``f()`` w.r.t. array ``x`` (perturbed in place)."""
    grad = np.zeros(x.shape)
    flat = x.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        old = flat[i]
        flat[i] = old + step
        fp = f()
        flat[i] = old - step
        fm = f()
        flat[i] = old
        gflat[i] = (fp - fm) / (2.0 * step)
    return grad


def relative_error(analytic, numeric, floor=ABS_FLOOR):
    """Max over entries of ``|a - n| / max(|a|, |n|, floor)``."""
    a = np.asarray(analytic, dtype=np.float64)
    n = np.asarray(numeric, dtype=np.float64)
    if a.size == 0:
        return 0.0
    denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
    return float(np.max(np.abs(a - n) / denom))


@dataclass
class CheckResult:
    name: str
    error: float
    tolerance: float

    @property
    def passed(self):
        return self.error < self.tolerance


def _random_graph(rng, nv, num_labels, num_classes=2, p=0.5):
    edges = [(i, j) for i in range(nv) for j in range(i + 1, nv) if rng.random() < p]
    labels = rng.integers(0, num_labels, nv)
    return make_graph(nv, edges, labels, int(rng.integers(0, num_classes)))


def check_relu(seed=0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((4, 4))
    proj = rng.standard_normal((4, 4))
    analytic = relu_backward(x, proj)
    numeric = numerical_gradient(lambda: float(np.sum(relu(x) * proj)), x)
    return relative_error(analytic, numeric)


def check_dense(seed=0, activation=True):
    rng = np.random.default_rng(seed)
    layer = DenseLayer(5, 4, activation=activation)
    layer.W[...] = rng.standard_normal(layer.W.shape)
    layer.b[...] = rng.standard_normal(layer.b.shape)
    x = rng.standard_normal((3, 5))
    proj = rng.standard_normal((3, 4))

    def f():
        return float(np.sum(layer.forward(x)[0] * proj))

    out, cache = layer.forward(x)
    layer.zero_grad()
    gx = layer.backward(cache, proj)
    errs = [
        relative_error(gx, numerical_gradient(f, x)),
        relative_error(layer.grad_W, numerical_gradient(f, layer.W)),
        relative_error(layer.grad_b, numerical_gradient(f, layer.b)),
    ]
    return max(errs)


def check_conv(seed=0, nv=4, d_in=3, d_out=5):
    rng = np.random.default_rng(seed)
    g = _random_graph(rng, nv, 2)
    a = adjacency(g)
    layer = ConvLayer(d_in, d_out)
    layer.W[...] = rng.standard_normal(layer.W.shape)
    layer.b[...] = rng.standard_normal(layer.b.shape)
    h = rng.standard_normal((nv, d_in))
    proj = rng.standard_normal((nv, d_out))

    def f():
        return float(np.sum(layer.forward(a, h)[0] * proj))

    _, cache = layer.forward(a, h)
    layer.zero_grad()
    gh = layer.backward(cache, proj)
    errs = [
        relative_error(gh, numerical_gradient(f, h)),
        relative_error(layer.grad_W, numerical_gradient(f, layer.W)),
        relative_error(layer.grad_b, numerical_gradient(f, layer.b)),
    ]
    return max(errs)


def check_pooling(seed=0, m=5, n=3, grid_res=3, sigma=0.125):
    rng = np.random.default_rng(seed)
    pool = FunctionPooling(n, grid_res, sigma)
    D = rng.standard_normal((m, n))
    proj = rng.standard_normal(pool.output_dim)

    def f():
        return float(np.dot(pool.forward(D)[0], proj))

    _, cache = pool.forward(D)
    pool.zero_grad()
    gD = pool.backward(cache, proj)
    errs = [
        relative_error(gD, numerical_gradient(f, D)),
        relative_error(pool.grad_log_sigma, numerical_gradient(f, pool.log_sigma)),
    ]
    return max(errs)


def check_model(seed=0, pooling="function", grid_res=2, embed_dim=3, nv=4, num_labels=3, num_classes=3):
    """Largest gradient error over every parameter of a small full model."""
    rng = np.random.default_rng(seed)
    g = _random_graph(rng, nv, num_labels, num_classes)
    config = ModelConfig(
        num_labels=num_labels,
        num_classes=num_classes,
        pooling=pooling,
        embed_dim=embed_dim,
        grid_res=grid_res,
    )
    model = init_model(config, seed)
    # move biases off zero so every path is exercised
    for name, p, _ in model.parameters():
        if name.endswith(".b"):
            p[...] = 0.1 * rng.standard_normal(p.shape)

    def f():
        return model.forward(g)[0].loss

    model.zero_grad()
    _, cache = model.forward(g)
    model.backward(cache)
    return max(relative_error(grad, numerical_gradient(f, p)) for _, p, grad in model.parameters())


def run_self_test(grid_res=2, seed=0, verbose=True):
    """Run every gradient check; returns ``(all_passed, results, seconds)``."""
    start = time.perf_counter()
    checks = [
        ("relu", lambda: check_relu(seed), 1e-6),
        ("dense", lambda: check_dense(seed, activation=False), 1e-5),
        ("dense+relu", lambda: check_dense(seed, activation=True), 1e-5),
        ("conv", lambda: check_conv(seed), 1e-5),
        ("pooling (D, log sigma)", lambda: check_pooling(seed, grid_res=max(grid_res, 1)), 1e-5),
        ("model/function", lambda: check_model(seed, "function", grid_res), 1e-4),
        ("model/sum", lambda: check_model(seed, "sum"), 1e-4),
        ("model/mean", lambda: check_model(seed, "mean"), 1e-4),
    ]
    results = []
    for name, fn, tol in checks:
        res = CheckResult(name, fn(), tol)
        results.append(res)
        if verbose:
            status = "PASS" if res.passed else "FAIL"
            print(f"{status}  {name:<24} max rel err {res.error:.3e}  (tol {tol:.0e})")
    elapsed = time.perf_counter() - start
    ok = all(r.passed for r in results)
    if verbose:
        print(f"{'all checks passed' if ok else 'GRADIENT CHECK FAILED'} in {elapsed:.2f} s")
    return ok, results, elapsed
