"""Compare every analytic gradient against central finite differences.

This is the same suite that ``funcpool --self-test`` runs. Each line reports
the largest relative error over the entries of one parameter or input.

Run: python demos/02_gradient_checks.py
"""

import numpy as np

from funcpool.gradcheck import check_pooling, numerical_gradient, relative_error, run_self_test
from funcpool.pooling import FunctionPooling

ok, results, seconds = run_self_test(grid_res=2, seed=0, verbose=True)
print(f"\nall within tolerance: {ok} ({seconds:.2f} s)")

# the helpers also work on their own, e.g. d(sum of pooled output)/d(log sigma)
pool = FunctionPooling(2, 4, 0.3)
D = np.random.default_rng(1).standard_normal((3, 2))


def total():
    return float(pool.forward(D)[0].sum())


# numerical_gradient perturbs pool.log_sigma in place and restores it
numeric = numerical_gradient(total, pool.log_sigma)
_, cache = pool.forward(D)
pool.backward(cache, np.ones(pool.output_dim))
print(f"\nlog_sigma: analytic {float(pool.grad_log_sigma):.8f}, numeric {float(numeric):.8f}, "
      f"rel err {relative_error(pool.grad_log_sigma, numeric):.1e}")
print(f"pooling layer alone, seed 3: max rel err {check_pooling(seed=3):.1e}")
