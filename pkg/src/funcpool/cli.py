"""Command-line entry point: ``funcpool`` / ``python -m funcpool``.

Runs k-fold cross-validation on a TU-format dataset and prints an aligned
table; ``--out`` additionally writes the JSON report. ``--self-test`` runs the
gradient checks instead and needs no data.
"""

import argparse
import os
import sys
from pathlib import Path

from .data import locate_tu_dataset, parse_tu_dataset
from .errors import FormatError, IngestionError
from .evaluate import cross_validate
from .gradcheck import run_self_test
from .model import POOLING_KINDS
from .optim import TrainConfig

DATA_ENV = "FUNCPOOL_DATA_DIR"
KNOWN_DATASETS = ("MUTAG", "PROTEINS", "ENZYMES")


def build_parser():
    p = argparse.ArgumentParser(
        prog="funcpool",
        description="Cross-validate a graph classifier with function-space pooling.",
    )
    p.add_argument("--dataset", help="MUTAG, PROTEINS, ENZYMES, or a directory of TU-format files")
    p.add_argument("--data-dir", help=f"root holding <NAME>/ dataset directories (default ${DATA_ENV} or ./data)")
    p.add_argument("--pooling", choices=POOLING_KINDS, default="function")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--epochs", type=int, default=350)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--l2", type=float, default=0.2)
    p.add_argument("--grid-res", type=int, default=3)
    p.add_argument("--sigma-init", type=float, default=0.125)
    p.add_argument("--batch-size", type=int, default=1)
    p.add_argument("--stratified", action="store_true", help="balance classes across folds")
    p.add_argument("--jobs", type=int, default=1, help="folds trained in parallel")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--timing", action="store_true", help="include wall-clock seconds in the JSON report")
    p.add_argument("--self-test", action="store_true", help="run the gradient-check suite and exit")
    return p


def resolve_dataset(parser, dataset, data_dir):
    """Map ``--dataset`` to ``(directory, name)``, erroring through ``parser``."""
    candidate = Path(dataset)
    if candidate.is_dir() and dataset not in KNOWN_DATASETS:
        return candidate, candidate.name
    root = Path(data_dir or os.environ.get(DATA_ENV) or "data")
    directory = locate_tu_dataset(dataset, root)
    if directory is not None:
        return directory, dataset
    parser.error(f"dataset {dataset!r} not found under {root} (set --data-dir or ${DATA_ENV})")


def run_cli(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.self_test:
        ok, _, _ = run_self_test(grid_res=args.grid_res, seed=args.seed)
        return 0 if ok else 1

    if not args.dataset:
        parser.error("--dataset is required unless --self-test is given")
    if args.folds < 2:
        parser.error("--folds must be at least 2")
    if args.grid_res < 1 or args.sigma_init <= 0 or args.jobs < 1:
        parser.error("--grid-res and --jobs must be positive and --sigma-init > 0")

    directory, name = resolve_dataset(parser, args.dataset, args.data_dir)
    try:
        dataset = parse_tu_dataset(directory, name)
    except (IngestionError, FormatError) as exc:
        print(f"funcpool: error: {exc}", file=sys.stderr)
        return 2

    cfg = TrainConfig(
        epochs=args.epochs,
        seed=args.seed,
        l2_weight=args.l2,
        lr=args.lr,
        batch_size=args.batch_size,
    )
    report = cross_validate(
        dataset,
        pooling=args.pooling,
        cfg=cfg,
        k=args.folds,
        grid_res=args.grid_res,
        sigma_init=args.sigma_init,
        stratified=args.stratified,
        jobs=args.jobs,
    )
    print(report.format_table())
    if args.out:
        Path(args.out).write_text(report.to_json(include_timing=args.timing))
    return 1 if report.failed_folds else 0


def main():
    sys.exit(run_cli())
