"""A small fully-connected classifier with dropout.

This is the stochastic-prediction substrate for the estimator: rectifier
hidden layers, softmax output, inverted dropout on hidden activations only.
Training is plain mini-batch SGD on cross-entropy with dropout active.

Everything is deterministic given its seed.  Dropout masks are drawn from
per-(pass, sample) derived streams, so Monte-Carlo prediction gives the
same label matrix no matter how the work is batched or parallelized.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigError, InvalidInputError
from .lvr import LabelMatrix
from .seeding import derive_seed, spawn_rng

__all__ = [
    "MlpModel",
    "TrainConfig",
    "init_model",
    "forward_deterministic",
    "forward_dropout",
    "predict_proba",
    "predict_labels",
    "hidden_features",
    "mc_predict",
    "loss_and_gradients",
    "train_sgd",
    "evaluate_accuracy",
]


@dataclass(frozen=True)
class MlpModel:
    """Weights, biases and dropout rate of a fully-connected classifier.

    ``weights[l]`` has shape ``(layer_sizes[l], layer_sizes[l+1])`` and maps
    activations of layer ``l`` to pre-activations of layer ``l + 1``.
    """

    layer_sizes: tuple
    weights: tuple
    biases: tuple
    dropout_rate: float

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        if len(sizes) < 2:
            raise InvalidConfigError("a model needs at least an input and an output layer")
        if any(s < 1 for s in sizes):
            raise InvalidConfigError(f"layer sizes must be positive, got {sizes}")
        if len(self.weights) != len(sizes) - 1 or len(self.biases) != len(sizes) - 1:
            raise InvalidConfigError(
                f"{len(sizes)} layer sizes imply {len(sizes) - 1} weight matrices, "
                f"got {len(self.weights)} weights and {len(self.biases)} biases"
            )
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (sizes[l], sizes[l + 1]):
                raise InvalidConfigError(
                    f"weight matrix {l} has shape {w.shape}, expected {(sizes[l], sizes[l + 1])}"
                )
            if b.shape != (sizes[l + 1],):
                raise InvalidConfigError(
                    f"bias vector {l} has shape {b.shape}, expected {(sizes[l + 1],)}"
                )
        if not 0.0 <= self.dropout_rate < 1.0:
            raise InvalidConfigError(f"dropout rate must lie in [0, 1), got {self.dropout_rate}")
        object.__setattr__(self, "layer_sizes", sizes)

    @property
    def num_classes(self) -> int:
        return self.layer_sizes[-1]

    @property
    def hidden_sizes(self) -> tuple:
        return self.layer_sizes[1:-1]


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 30
    batch_size: int = 32
    seed: int = 0
    init_scale: float = 1.0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise InvalidConfigError(f"learning rate must be positive, got {self.learning_rate}")
        if self.epochs < 0:
            raise InvalidConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 1:
            raise InvalidConfigError(f"batch size must be >= 1, got {self.batch_size}")


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _check_features(model: MlpModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.layer_sizes[0]:
        raise InvalidInputError(
            f"expected feature matrix with {model.layer_sizes[0]} columns, got shape {X.shape}"
        )
    return X


def _hidden_masks(rng: np.random.Generator, model: MlpModel, n_rows: int):
    """Draw one dropout keep-mask per hidden layer, in layer order.

    The draw order is part of the determinism contract: the single-sample
    and batched paths must consume the stream identically.
    """
    p = model.dropout_rate
    return [rng.random((n_rows, width)) >= p for width in model.hidden_sizes]


def _forward(model: MlpModel, X: np.ndarray, masks=None) -> np.ndarray:
    """Forward pass; ``masks`` is one keep-mask per hidden layer or None."""
    scale = 1.0 / (1.0 - model.dropout_rate) if model.dropout_rate > 0 else 1.0
    a = X
    last = len(model.weights) - 1
    for l, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ w + b
        if l == last:
            return _softmax(z)
        a = np.maximum(z, 0.0)
        if masks is not None:
            a = a * (masks[l] * scale)
    raise AssertionError("unreachable")


def forward_deterministic(model: MlpModel, x) -> np.ndarray:
    """Class probabilities for one feature vector, dropout disabled."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != model.layer_sizes[0]:
        raise InvalidInputError(
            f"expected a feature vector of length {model.layer_sizes[0]}, got shape {x.shape}"
        )
    return _forward(model, x[None, :])[0]


def forward_dropout(model: MlpModel, x, pass_seed: int) -> np.ndarray:
    """Class probabilities for one stochastic pass.

    Each hidden unit is zeroed independently with probability
    ``model.dropout_rate``; survivors are scaled by ``1/(1-p)`` so the
    expected pre-activations downstream match the deterministic pass.
    Fully deterministic given ``(model, x, pass_seed)``.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != model.layer_sizes[0]:
        raise InvalidInputError(
            f"expected a feature vector of length {model.layer_sizes[0]}, got shape {x.shape}"
        )
    rng = spawn_rng(pass_seed)
    masks = [m[0] for m in _hidden_masks(rng, model, 1)]
    return _forward(model, x[None, :], [m[None, :] for m in masks])[0]


def predict_proba(model: MlpModel, X) -> np.ndarray:
    """Deterministic class probabilities for a batch of samples."""
    return _forward(model, _check_features(model, X))


def predict_labels(model: MlpModel, X) -> np.ndarray:
    """Deterministic predicted labels (argmax, ties toward lower class)."""
    return np.argmax(predict_proba(model, X), axis=1)


def hidden_features(model: MlpModel, X) -> np.ndarray:
    """Activations of the last hidden layer under the deterministic pass.

    This is the representation the selection baselines work in.
    """
    X = _check_features(model, X)
    a = X
    for w, b in zip(model.weights[:-1], model.biases[:-1]):
        a = np.maximum(a @ w + b, 0.0)
    return a


def mc_predict(model: MlpModel, X, num_passes: int, master_seed: int) -> LabelMatrix:
    """Monte-Carlo dropout prediction: a label per sample per pass.

    Entry ``(i, k)`` is the argmax of ``forward_dropout`` on sample ``i``
    with the seed derived from ``(master_seed, k, i)``.  Because every
    (pass, sample) cell has its own derived stream, the result is
    independent of batching and evaluation order.
    """
    if num_passes < 1:
        raise InvalidConfigError(f"number of passes must be >= 1, got {num_passes}")
    X = _check_features(model, X)
    n = X.shape[0]
    labels = np.empty((n, num_passes), dtype=np.int64)
    for k in range(num_passes):
        masks = [np.empty((n, width), dtype=bool) for width in model.hidden_sizes]
        for i in range(n):
            rng = spawn_rng(derive_seed(master_seed, k, i))
            for m, drawn in zip(masks, _hidden_masks(rng, model, 1)):
                m[i] = drawn[0]
        probs = _forward(model, X, masks)
        labels[:, k] = np.argmax(probs, axis=1)
    return LabelMatrix(labels=labels, num_classes=model.num_classes)


def init_model(layer_sizes, dropout_rate: float, seed: int, init_scale: float = 1.0) -> MlpModel:
    """Fresh model with fan-in-scaled symmetric uniform weights, zero biases."""
    rng = spawn_rng(seed)
    sizes = tuple(int(s) for s in layer_sizes)
    weights = []
    biases = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = init_scale / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(
        layer_sizes=sizes,
        weights=tuple(weights),
        biases=tuple(biases),
        dropout_rate=float(dropout_rate),
    )


def loss_and_gradients(model: MlpModel, X, y, masks=None):
    """Mean cross-entropy loss and its gradients for a batch.

    ``masks`` fixes the dropout masks (one boolean array per hidden layer);
    ``None`` disables dropout, which is also what makes the analytic
    gradients directly checkable against finite differences.
    """
    X = _check_features(model, X)
    y = np.asarray(y)
    n = X.shape[0]
    if y.shape[0] != n:
        raise InvalidInputError(f"{n} samples but {y.shape[0]} labels")
    scale = 1.0 / (1.0 - model.dropout_rate) if model.dropout_rate > 0 else 1.0

    # forward, keeping intermediates
    activations = [X]
    pre_relu = []
    a = X
    for l, (w, b) in enumerate(zip(model.weights[:-1], model.biases[:-1])):
        z = a @ w + b
        pre_relu.append(z)
        a = np.maximum(z, 0.0)
        if masks is not None:
            a = a * (masks[l] * scale)
        activations.append(a)
    logits = a @ model.weights[-1] + model.biases[-1]
    probs = _softmax(logits)
    loss = float(-np.mean(np.log(probs[np.arange(n), y])))

    # backward
    grad_w = [None] * len(model.weights)
    grad_b = [None] * len(model.biases)
    delta = probs.copy()
    delta[np.arange(n), y] -= 1.0
    delta /= n
    for l in range(len(model.weights) - 1, -1, -1):
        grad_w[l] = activations[l].T @ delta
        grad_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = delta @ model.weights[l].T
            if masks is not None:
                delta = delta * (masks[l - 1] * scale)
            delta = delta * (pre_relu[l - 1] > 0)
    return loss, grad_w, grad_b


def train_sgd(
    features,
    labels,
    cfg: TrainConfig = TrainConfig(),
    *,
    hidden=(64, 64),
    dropout_rate: float = 0.5,
    num_classes: int | None = None,
) -> MlpModel:
    """Train by mini-batch SGD with dropout active; deterministic given seed.

    With ``epochs=0`` the freshly initialized model is returned unchanged.
    """
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    if X.ndim != 2 or X.shape[0] < 1:
        raise InvalidInputError(f"expected a nonempty N x D feature matrix, got shape {X.shape}")
    if y.shape[0] != X.shape[0]:
        raise InvalidInputError(f"{X.shape[0]} samples but {y.shape[0]} labels")
    if num_classes is None:
        num_classes = int(y.max()) + 1
    layer_sizes = (X.shape[1], *hidden, num_classes)

    model = init_model(layer_sizes, dropout_rate, derive_seed(cfg.seed, 0), cfg.init_scale)
    weights = [w.copy() for w in model.weights]
    biases = [b.copy() for b in model.biases]
    rng = spawn_rng(cfg.seed, 1)
    n = X.shape[0]

    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            batch = MlpModel(
                layer_sizes=layer_sizes,
                weights=tuple(weights),
                biases=tuple(biases),
                dropout_rate=dropout_rate,
            )
            masks = _hidden_masks(rng, batch, len(idx)) if dropout_rate > 0 else None
            _, grad_w, grad_b = loss_and_gradients(batch, X[idx], y[idx], masks)
            for l in range(len(weights)):
                weights[l] -= cfg.learning_rate * grad_w[l]
                biases[l] -= cfg.learning_rate * grad_b[l]

    return MlpModel(
        layer_sizes=layer_sizes,
        weights=tuple(w.copy() for w in weights),
        biases=tuple(b.copy() for b in biases),
        dropout_rate=dropout_rate,
    )


def evaluate_accuracy(model: MlpModel, X, true_labels) -> float:
    """Fraction of samples whose deterministic argmax matches the label."""
    X = _check_features(model, X)
    y = np.asarray(true_labels)
    if y.shape[0] != X.shape[0]:
        raise InvalidInputError(f"{X.shape[0]} samples but {y.shape[0]} labels")
    return float(np.mean(predict_labels(model, X) == y))
