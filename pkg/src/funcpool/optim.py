"""Initialisation, Adam, and the training loop."""

import csv
import copy
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .data import adjacency, one_hot_features
from .errors import ShapeError, TrainingDivergedError
from .model import Model, ModelConfig


def init_model(config, seed):
    """Build a :class:`Model` with Kaiming-normal weights and zero biases.

    Every weight matrix of shape ``(fan_in, fan_out)`` is drawn from
    ``N(0, 2 / fan_in)``; ``log_sigma`` starts at ``log(config.sigma_init)``.
    The result depends only on ``config`` and ``seed``.
    """
    if not isinstance(config, ModelConfig):
        config = ModelConfig(**config)
    model = Model(config)
    rng = np.random.default_rng(seed)
    for name, p, _ in model.parameters():
        if name.endswith(".W"):
            p[...] = rng.standard_normal(p.shape) * math.sqrt(2.0 / p.shape[0])
        elif name.endswith(".b"):
            p.fill(0.0)
        elif name.endswith("log_sigma"):
            p[...] = math.log(config.sigma_init)
    return model


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)
    # per-parameter work buffers, so a step allocates nothing
    scratch: list = field(default_factory=list, repr=False)

    @classmethod
    def for_params(cls, params, **hyper):
        state = cls(**hyper)
        state.m = [np.zeros_like(p) for p in params]
        state.v = [np.zeros_like(p) for p in params]
        state.scratch = [np.empty_like(p) for p in params]
        return state


def adam_step(state, params, grads):
    """One bias-corrected Adam update, applied in place to ``params``."""
    if not (len(params) == len(grads) == len(state.m)):
        raise ShapeError("params, grads and Adam buffers differ in length")
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1**state.t
    bc2 = 1.0 - b2**state.t
    step_size = state.lr / bc1
    root_bc2 = math.sqrt(bc2)
    if len(state.scratch) != len(params):
        state.scratch = [np.empty_like(p) for p in params]
    for p, g, m, v, s in zip(params, grads, state.m, state.v, state.scratch):
        if p.shape != g.shape or p.shape != m.shape:
            raise ShapeError(f"Adam shape mismatch: param {p.shape}, grad {g.shape}")
        m *= b1
        m += np.multiply(g, 1.0 - b1, out=s)
        v *= b2
        np.multiply(g, g, out=s)
        s *= 1.0 - b2
        v += s
        # p -= lr * m_hat / (sqrt(v_hat) + eps), without materialising m_hat, v_hat
        denom = np.sqrt(v, out=s)
        denom /= root_bc2
        denom += state.eps
        np.divide(m, denom, out=denom)
        denom *= step_size
        p -= denom


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 350
    seed: int = 0
    l2_weight: float = 0.2
    lr: float = 1e-3
    shuffle_each_epoch: bool = True
    batch_size: int = 1
    # fraction of the training graphs held out for model selection; 0 selects
    # on the mean training loss
    holdout_fraction: float = 0.0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not 0.0 <= self.holdout_fraction < 1.0:
            raise ValueError("holdout_fraction must be in [0, 1)")


@dataclass
class EpochRecord:
    epoch: int
    mean_loss: float
    sigma: float | None
    holdout_loss: float | None = None


@dataclass
class History:
    records: list = field(default_factory=list)
    best_epoch: int = 0

    def __len__(self):
        return len(self.records)

    def __getitem__(self, idx):
        return self.records[idx]

    @property
    def losses(self):
        return [r.mean_loss for r in self.records]

    @property
    def best(self):
        return self.records[self.best_epoch - 1]


def _prepare(graphs, num_labels):
    return [(g, one_hot_features(g, num_labels), adjacency(g)) for g in graphs]


def train(model, train_set, cfg):
    """Optimise ``model`` on ``train_set`` and return ``(best_model, history)``.

    Each epoch visits the graphs in a seeded shuffled order and takes one Adam
    step per ``cfg.batch_size`` graphs. The returned model is a copy of the
    parameters at the end of the epoch with the lowest mean training loss
    (or holdout loss, when ``cfg.holdout_fraction > 0``); ``model`` itself is
    left at its final state.

    Raises
    ------
    TrainingDivergedError
        If any per-graph loss is NaN or infinite.
    """
    train_set = list(train_set)
    if not train_set:
        raise ValueError("training set is empty")
    model.config = replace(model.config, l2_weight=cfg.l2_weight)
    rng = np.random.default_rng(cfg.seed)

    holdout = []
    if cfg.holdout_fraction > 0:
        perm = rng.permutation(len(train_set))
        n_hold = max(1, int(round(cfg.holdout_fraction * len(train_set))))
        if n_hold >= len(train_set):
            raise ValueError("holdout leaves no training graphs")
        holdout = _prepare([train_set[i] for i in perm[:n_hold]], model.config.num_labels)
        train_set = [train_set[i] for i in sorted(perm[n_hold:])]

    prepared = _prepare(train_set, model.config.num_labels)
    names_params_grads = model.parameters()
    params = [p for _, p, _ in names_params_grads]
    grads = [g for _, _, g in names_params_grads]
    state = AdamState.for_params(params, lr=cfg.lr)

    history = History()
    best_score = math.inf
    best_state = model.state_dict()
    order = np.arange(len(prepared))
    for epoch in range(1, cfg.epochs + 1):
        if cfg.shuffle_each_epoch:
            order = rng.permutation(len(prepared))
        total = 0.0
        for start in range(0, len(order), cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            model.zero_grad()
            for idx in batch:
                g, x, a = prepared[idx]
                try:
                    result, cache = model.forward(g, features=x, adj=a)
                except FloatingPointError:
                    raise TrainingDivergedError(epoch, int(idx), model.sigma, math.nan) from None
                if not math.isfinite(result.loss):
                    raise TrainingDivergedError(epoch, int(idx), model.sigma, result.loss)
                total += result.loss
                model.backward(cache)
            if len(batch) > 1:
                for gr in grads:
                    gr /= len(batch)
            adam_step(state, params, grads)
        record = EpochRecord(epoch, total / len(prepared), model.sigma)
        score = record.mean_loss
        if holdout:
            record.holdout_loss = float(
                np.mean([model.forward(g, features=x, adj=a)[0].loss for g, x, a in holdout])
            )
            score = record.holdout_loss
        history.records.append(record)
        if score < best_score:
            best_score = score
            best_state = model.state_dict()
            history.best_epoch = epoch

    best = copy.deepcopy(model)
    best.load_state_dict(best_state)
    best.zero_grad()
    return best, history


def write_history_csv(history, path):
    """Write ``epoch, mean_loss, sigma`` rows (sigma blank for baseline poolings)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "mean_loss", "sigma"])
        for r in history.records:
            writer.writerow([r.epoch, repr(r.mean_loss), "" if r.sigma is None else repr(r.sigma)])
