"""Ten-fold cross-validation, comparing function pooling with the baselines.

With a TU-format dataset on disk, pass its name and root, for example
``python demos/04_cross_validate.py MUTAG ~/datasets``. Without arguments the
demo uses a synthetic dataset and short training so it finishes quickly.
The full-size run is ``funcpool --dataset MUTAG``.
"""

import sys

from funcpool.data import locate_tu_dataset, parse_tu_dataset, toy_dataset
from funcpool.evaluate import cross_validate
from funcpool.optim import TrainConfig

if len(sys.argv) == 3:
    name, root = sys.argv[1], sys.argv[2]
    directory = locate_tu_dataset(name, root)
    if directory is None:
        sys.exit(f"{name} not found under {root}")
    ds, cfg, grid_res = parse_tu_dataset(directory, name), TrainConfig(seed=0), 3
else:
    ds = toy_dataset(30, num_classes=2, num_vertex_labels=3, vertices=(3, 7), noise=0.2, seed=2)
    cfg, grid_res = TrainConfig(epochs=3, seed=0), 2

for pooling in ("function", "mean", "sum"):
    report = cross_validate(ds, pooling, cfg, k=10, grid_res=grid_res)
    print(f"\n== {pooling} pooling ==")
    print(report.format_table())
