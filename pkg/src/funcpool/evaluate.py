"""k-fold cross-validation and report formatting."""

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .data import kfold_split
from .errors import TrainingDivergedError
from .model import ModelConfig
from .optim import TrainConfig, init_model, train


def accuracy(model, graphs):
    """Fraction of graphs whose argmax class (lowest index on ties) is correct."""
    graphs = list(graphs)
    if not graphs:
        raise ValueError("cannot score an empty set of graphs")
    hits = sum(model.predict(g).predicted_class == g.class_label for g in graphs)
    return hits / len(graphs)


@dataclass
class FoldResult:
    fold: int
    seed: int
    n_train: int
    n_test: int
    accuracy: float | None
    best_epoch: int | None = None
    best_loss: float | None = None
    sigma: float | None = None
    error: str | None = None

    @property
    def failed(self):
        return self.accuracy is None


@dataclass
class CVReport:
    dataset: str
    pooling: str
    seed: int
    folds: list = field(default_factory=list)
    elapsed_seconds: float = 0.0
    config: dict = field(default_factory=dict)

    @property
    def k(self):
        return len(self.folds)

    @property
    def fold_accuracies(self):
        return [f.accuracy for f in self.folds]

    @property
    def failed_folds(self):
        return [f.fold for f in self.folds if f.failed]

    def _ok(self):
        return np.array([f.accuracy for f in self.folds if not f.failed], dtype=np.float64)

    @property
    def mean(self):
        ok = self._ok()
        return float(ok.mean()) if ok.size else float("nan")

    @property
    def std(self):
        ok = self._ok()
        return float(ok.std()) if ok.size else float("nan")

    def to_dict(self, include_timing=False):
        out = {
            "dataset": self.dataset,
            "pooling": self.pooling,
            "seed": self.seed,
            "k": self.k,
            "config": self.config,
            "fold_accuracies": self.fold_accuracies,
            "mean": self.mean,
            "std": self.std,
            "failed_folds": self.failed_folds,
            "folds": [vars(f).copy() for f in self.folds],
        }
        if include_timing:
            out["elapsed_seconds"] = self.elapsed_seconds
        return out

    def to_json(self, include_timing=False):
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True) + "\n"

    def format_table(self):
        lines = [
            f"dataset {self.dataset}  pooling {self.pooling}  seed {self.seed}  k {self.k}",
            f"{'fold':>4}  {'train':>5}  {'test':>4}  {'acc':>6}  {'epoch':>5}  {'sigma':>9}",
        ]
        for f in self.folds:
            acc = "FAILED" if f.failed else f"{f.accuracy:.4f}"
            epoch = "-" if f.best_epoch is None else str(f.best_epoch)
            sigma = "-" if f.sigma is None else f"{f.sigma:.5f}"
            lines.append(f"{f.fold:>4}  {f.n_train:>5}  {f.n_test:>4}  {acc:>6}  {epoch:>5}  {sigma:>9}")
        lines.append(f"mean {self.mean:.4f} +/- {self.std:.4f}  ({self.elapsed_seconds:.1f} s)")
        if self.failed_folds:
            lines.append(f"WARNING: {len(self.failed_folds)} fold(s) failed: {self.failed_folds}")
        return "\n".join(lines)


def _run_fold(fold, train_graphs, test_graphs, model_config, cfg):
    try:
        model = init_model(model_config, cfg.seed)
        best, history = train(model, train_graphs, cfg)
    except TrainingDivergedError as exc:
        return FoldResult(fold, cfg.seed, len(train_graphs), len(test_graphs), None, error=str(exc))
    return FoldResult(
        fold,
        cfg.seed,
        len(train_graphs),
        len(test_graphs),
        accuracy(best, test_graphs),
        best_epoch=history.best_epoch,
        best_loss=history.best.mean_loss,
        sigma=best.sigma,
    )


def cross_validate(
    dataset,
    pooling="function",
    cfg=None,
    k=10,
    grid_res=3,
    sigma_init=0.125,
    stratified=False,
    jobs=1,
):
    """Run k-fold cross-validation of a freshly initialised model per fold.

    The fold split uses ``cfg.seed``; fold ``i`` is initialised and trained
    with seed ``cfg.seed + i``, so serial and parallel runs agree. A fold whose
    training diverges is recorded as failed and the remaining folds still run.
    """
    cfg = TrainConfig() if cfg is None else cfg
    if len(dataset) == 0:
        raise ValueError("dataset is empty")
    model_config = ModelConfig(
        num_labels=dataset.num_vertex_labels,
        num_classes=dataset.num_classes,
        pooling=pooling,
        grid_res=grid_res,
        sigma_init=sigma_init,
        l2_weight=cfg.l2_weight,
    )
    splits = kfold_split(len(dataset), k, cfg.seed, dataset.labels if stratified else None)
    tasks = [
        (i, dataset.subset(tr), dataset.subset(te), model_config, replace(cfg, seed=cfg.seed + i))
        for i, (tr, te) in enumerate(splits)
    ]
    start = time.perf_counter()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            folds = list(pool.map(_run_fold, *zip(*tasks)))
    else:
        folds = [_run_fold(*t) for t in tasks]
    report = CVReport(
        dataset=dataset.name,
        pooling=pooling,
        seed=cfg.seed,
        folds=folds,
        elapsed_seconds=time.perf_counter() - start,
        config={
            "epochs": cfg.epochs,
            "lr": cfg.lr,
            "l2": cfg.l2_weight,
            "batch_size": cfg.batch_size,
            "grid_res": grid_res,
            "sigma_init": sigma_init,
            "stratified": stratified,
        },
    )
    return report
