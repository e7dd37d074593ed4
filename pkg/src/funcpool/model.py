"""The graph classifier and its loss.

Layer stack, applied to one graph at a time::

    one-hot labels (|V| x |Sigma|)
    -> ConvLayer(|Sigma| -> 20) -> ConvLayer(20 -> 20)
    -> DenseLayer(20 -> 10), applied per vertex, no activation
    -> pooling (function: 10 -> r**10, sum/mean: 20 -> 20)
    -> DenseLayer(pooled -> 20) + ReLU
    -> DenseLayer(20 -> C) -> softmax

The loss is the cross-entropy of the true class plus ``l2_weight`` times the
squared Frobenius norm of every weight matrix (biases and ``log_sigma`` are
not regularised).

Checkpoints are ``.npz`` archives holding one array per parameter, keyed by
its dotted name (``conv1.W``, ``pool.log_sigma``, ...), plus a ``__meta__``
entry: a JSON string with ``format_version`` and the :class:`ModelConfig`
fields. Arrays are stored as raw float64, so a save/load round trip is
bit-exact.
"""

import json
from dataclasses import asdict, dataclass

import numpy as np

from .conv import ConvLayer
from .data import adjacency, one_hot_features
from .errors import ShapeError, StateError
from .linalg import as_matrix, matmul, relu, relu_backward
from .pooling import FunctionPooling, MeanPooling, SumPooling

POOLING_KINDS = ("function", "sum", "mean")
CHECKPOINT_VERSION = 1


class DenseLayer:
    """Affine map ``x W + b`` with an optional ReLU, applied row-wise."""

    def __init__(self, d_in, d_out, activation=False):
        self.d_in = int(d_in)
        self.d_out = int(d_out)
        self.activation = bool(activation)
        self.W = np.zeros((self.d_in, self.d_out))
        self.b = np.zeros(self.d_out)
        self.grad_W = np.zeros_like(self.W)
        self.grad_b = np.zeros_like(self.b)

    def parameters(self):
        return [("W", self.W, self.grad_W), ("b", self.b, self.grad_b)]

    def zero_grad(self):
        self.grad_W.fill(0.0)
        self.grad_b.fill(0.0)

    def forward(self, x):
        x = as_matrix(x)
        if x.shape[1] != self.d_in:
            raise ShapeError(f"dense layer expects {self.d_in} inputs, got {x.shape[1]}")
        pre = matmul(x, self.W) + self.b
        out = relu(pre) if self.activation else pre
        return out, (x, pre)

    def backward(self, cache, upstream):
        if cache is None:
            raise StateError("dense backward called before forward")
        x, pre = cache
        g = relu_backward(pre, upstream) if self.activation else as_matrix(upstream)
        self.grad_W += x.T @ g
        self.grad_b += g.sum(axis=0)
        return g @ self.W.T


@dataclass(frozen=True)
class ModelConfig:
    num_labels: int
    num_classes: int
    pooling: str = "function"
    conv_dim: int = 20
    embed_dim: int = 0  # 0 -> 10 for function pooling, 20 for the baselines
    grid_res: int = 3
    hidden_dim: int = 20
    sigma_init: float = 0.125
    l2_weight: float = 0.2
    embed_relu: bool = False
    hidden_relu: bool = True

    def __post_init__(self):
        if self.pooling not in POOLING_KINDS:
            raise ValueError(f"unknown pooling {self.pooling!r}; choose from {POOLING_KINDS}")
        if self.num_labels < 1 or self.num_classes < 1:
            raise ShapeError("num_labels and num_classes must be positive")
        if self.embed_dim == 0:
            object.__setattr__(self, "embed_dim", 10 if self.pooling == "function" else 20)


@dataclass
class PredictionResult:
    class_probabilities: np.ndarray
    predicted_class: int
    loss: float
    logits: np.ndarray


def softmax(logits):
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def cross_entropy(logits, true_class):
    z = np.asarray(logits, dtype=np.float64)
    shift = z.max()
    return float(shift + np.log(np.sum(np.exp(z - shift))) - z[true_class])


def l2_penalty(model):
    return model.config.l2_weight * sum(float(np.vdot(W, W)) for W in model.weight_matrices())


def loss(pred_logits, true_class, params):
    """Cross-entropy of ``true_class`` plus the L2 penalty of model ``params``."""
    if not 0 <= true_class < len(pred_logits):
        raise IndexError(f"class {true_class} out of range for {len(pred_logits)} logits")
    return cross_entropy(pred_logits, true_class) + l2_penalty(params)


class ForwardCache:
    __slots__ = ("caches", "probs", "true_class", "consumed")

    def __init__(self, caches, probs, true_class):
        self.caches = caches
        self.probs = probs
        self.true_class = true_class
        self.consumed = False


class Model:
    """Six-layer graph classifier. Parameters start at zero; see ``optim.init_model``."""

    def __init__(self, config):
        self.config = config
        c = config
        self.conv1 = ConvLayer(c.num_labels, c.conv_dim)
        self.conv2 = ConvLayer(c.conv_dim, c.conv_dim)
        self.pre_linear = DenseLayer(c.conv_dim, c.embed_dim, activation=c.embed_relu)
        if c.pooling == "function":
            self.pool = FunctionPooling(c.embed_dim, c.grid_res, c.sigma_init)
        elif c.pooling == "sum":
            self.pool = SumPooling(c.embed_dim)
        else:
            self.pool = MeanPooling(c.embed_dim)
        self.post_linear = DenseLayer(self.pool.output_dim, c.hidden_dim, activation=c.hidden_relu)
        self.head = DenseLayer(c.hidden_dim, c.num_classes)

    def layers(self):
        return [
            ("conv1", self.conv1),
            ("conv2", self.conv2),
            ("pre_linear", self.pre_linear),
            ("pool", self.pool),
            ("post_linear", self.post_linear),
            ("head", self.head),
        ]

    def parameters(self):
        """``(name, array, grad)`` triples in a fixed order."""
        return [
            (f"{lname}.{pname}", p, g)
            for lname, layer in self.layers()
            for pname, p, g in layer.parameters()
        ]

    def weight_matrices(self):
        return [p for name, p, _ in self.parameters() if name.endswith(".W")]

    def zero_grad(self):
        for _, layer in self.layers():
            layer.zero_grad()

    @property
    def sigma(self):
        return self.pool.sigma if isinstance(self.pool, FunctionPooling) else None

    def state_dict(self):
        return {name: p.copy() for name, p, _ in self.parameters()}

    def load_state_dict(self, state):
        for name, p, _ in self.parameters():
            src = np.asarray(state[name], dtype=np.float64)
            if src.shape != p.shape:
                raise ShapeError(f"{name}: expected shape {p.shape}, got {src.shape}")
            p[...] = src

    def forward(self, g, features=None, adj=None):
        """Run the network on graph ``g``; returns ``(PredictionResult, cache)``.

        ``features`` and ``adj`` may be passed in precomputed (e.g. by the
        training loop) to skip rebuilding them from ``g``.
        """
        x = one_hot_features(g, self.config.num_labels) if features is None else features
        a = adjacency(g) if adj is None else adj
        h1, c1 = self.conv1.forward(a, x)
        h2, c2 = self.conv2.forward(a, h1)
        h3, c3 = self.pre_linear.forward(h2)
        v, cp = self.pool.forward(h3)
        h5, c5 = self.post_linear.forward(v.reshape(1, -1))
        logits, c6 = self.head.forward(h5)
        logits = logits[0]
        probs = softmax(logits)
        value = loss(logits, g.class_label, self)
        result = PredictionResult(
            class_probabilities=probs,
            predicted_class=int(np.argmax(probs)),
            loss=value,
            logits=logits,
        )
        return result, ForwardCache((c1, c2, c3, cp, c5, c6), probs, g.class_label)

    def predict(self, g):
        return self.forward(g)[0]

    def backward(self, cache, true_class=None):
        """Accumulate gradients of the loss into every parameter's grad slot."""
        if cache is None or cache.consumed:
            raise StateError("model backward called without a fresh forward")
        cache.consumed = True
        c1, c2, c3, cp, c5, c6 = cache.caches
        y = cache.true_class if true_class is None else true_class
        g = cache.probs.copy()
        g[y] -= 1.0
        g = self.head.backward(c6, g.reshape(1, -1))
        g = self.post_linear.backward(c5, g)
        g = self.pool.backward(cp, g[0])
        g = self.pre_linear.backward(c3, g)
        g = self.conv2.backward(c2, g)
        self.conv1.backward(c1, g)
        scale = 2.0 * self.config.l2_weight
        if scale:
            for name, p, grad in self.parameters():
                if name.endswith(".W"):
                    grad += scale * p


def model_forward(m, g):
    return m.forward(g)


def model_backward(m, cache, true_class=None):
    m.backward(cache, true_class)


def save_checkpoint(model, path, seed=None):
    meta = {"format_version": CHECKPOINT_VERSION, "config": asdict(model.config), "seed": seed}
    arrays = {name: p for name, p, _ in model.parameters()}
    with open(path, "wb") as fh:
        np.savez(fh, __meta__=np.array(json.dumps(meta, sort_keys=True)), **arrays)


def load_checkpoint(path):
    """Rebuild a :class:`Model` from a checkpoint; returns ``(model, seed)``."""
    with np.load(path, allow_pickle=False) as archive:
        meta = json.loads(str(archive["__meta__"]))
        if meta.get("format_version") != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {meta.get('format_version')!r}")
        model = Model(ModelConfig(**meta["config"]))
        model.load_state_dict({name: archive[name] for name, _, _ in model.parameters()})
    return model, meta.get("seed")
