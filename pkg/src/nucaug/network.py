"""Dense feedforward network built directly on numpy.

The whole parameter set lives in one flat float64 vector; per-layer weight
matrices and bias vectors are reshaped views into it. That keeps the
optimizers to a handful of whole-vector array operations per step, which is
what makes the full sweeps tractable on a single core.

Conventions, fixed for reproducibility:
* Glorot-normal weights, std sqrt(2 / (fan_in + fan_out)); biases start at 0.
* hidden activations: relu, tanh or sigmoid; the output layer is affine.
* ReLU derivative at exactly 0 is 0.
* gradients are batch means, so the learning rate is batch-size independent.
* the last incomplete batch of an epoch is trained, not dropped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .augment import ORIGIN_ORIGINAL, AugmentedTrainingSet
from .errors import ConfigurationError, TrainingDivergedError
from .optimizers import OptimizerConfig, init_state, optimizer_step

ACTIVATIONS = ("relu", "tanh", "sigmoid")

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class NetworkSpec:
    hidden_widths: tuple[int, ...]
    activation: str = "relu"
    input_dim: int = 2
    output_dim: int = 1

    def __post_init__(self):
        object.__setattr__(self, "hidden_widths", tuple(int(w) for w in self.hidden_widths))
        if not self.hidden_widths or any(w < 1 for w in self.hidden_widths):
            raise ConfigurationError(f"hidden widths must be >= 1, got {self.hidden_widths}")
        if self.activation not in ACTIVATIONS:
            raise ConfigurationError(f"unknown activation {self.activation!r}")
        if self.input_dim < 1 or self.output_dim < 1:
            raise ConfigurationError("input_dim and output_dim must be >= 1")

    def layer_dims(self) -> list[tuple[int, int]]:
        widths = (self.input_dim, *self.hidden_widths, self.output_dim)
        return list(zip(widths[:-1], widths[1:]))

    @property
    def arch_label(self) -> str:
        return "-".join(str(w) for w in self.hidden_widths)


def param_count(spec: NetworkSpec) -> int:
    """Total scalar parameters: sum over layers of (fan_in + 1) * fan_out."""
    return sum((fi + 1) * fo for fi, fo in spec.layer_dims())


class NetworkParams:
    """Flat parameter vector plus per-layer weight/bias views into it."""

    def __init__(self, spec: NetworkSpec, flat: np.ndarray):
        if flat.shape != (param_count(spec),) or flat.dtype != np.float64:
            raise ConfigurationError(
                f"flat vector must be float64 of length {param_count(spec)}")
        self.spec = spec
        self.flat = flat
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        off = 0
        for fi, fo in spec.layer_dims():
            self.weights.append(flat[off:off + fi * fo].reshape(fi, fo))
            off += fi * fo
            self.biases.append(flat[off:off + fo])
            off += fo

    def copy(self) -> "NetworkParams":
        return NetworkParams(self.spec, self.flat.copy())


def init_network(spec: NetworkSpec, init_seed: int) -> NetworkParams:
    """Glorot-normal weights, zero biases, deterministic under init_seed."""
    rng = np.random.default_rng(init_seed)
    params = NetworkParams(spec, np.zeros(param_count(spec)))
    for W in params.weights:
        fi, fo = W.shape
        W[...] = rng.normal(0.0, np.sqrt(2.0 / (fi + fo)), size=(fi, fo))
    return params


def _activate(name: str, a: np.ndarray) -> np.ndarray:
    if name == "relu":
        return np.maximum(a, 0.0)
    if name == "tanh":
        return np.tanh(a)
    return 1.0 / (1.0 + np.exp(-a))  # sigmoid


def _activate_grad_from_output(name: str, h: np.ndarray) -> np.ndarray:
    # all three derivatives are expressible from the activation output
    if name == "relu":
        return (h > 0.0).astype(np.float64)
    if name == "tanh":
        return 1.0 - h * h
    return h * (1.0 - h)


def forward(params: NetworkParams, X: np.ndarray) -> np.ndarray:
    """Predictions for a batch of (already standardized) inputs, shape (B, in)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != params.spec.input_dim:
        raise ConfigurationError(
            f"input dim {X.shape[1]} != spec input_dim {params.spec.input_dim}")
    act = params.spec.activation
    h = X
    last = len(params.weights) - 1
    for i, (W, b) in enumerate(zip(params.weights, params.biases)):
        h = h @ W + b
        if i < last:
            h = _activate(act, h)
    return h[:, 0]


def loss_mse(predictions, targets) -> float:
    predictions = np.asarray(predictions, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if predictions.shape != targets.shape or predictions.size == 0:
        raise ConfigurationError("loss_mse needs equal-length nonempty inputs")
    d = predictions - targets
    return float(np.mean(d * d))


def backward(params: NetworkParams, X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Exact gradient of batch-mean MSE, as a flat vector matching params.flat."""
    grad = np.empty_like(params.flat)
    gview = NetworkParams(params.spec, grad)
    _forward_backward(params, gview, X, y)
    return grad


def _forward_backward(params: NetworkParams, grad: NetworkParams,
                      X: np.ndarray, y: np.ndarray) -> float:
    """Fill grad's views with the batch-mean MSE gradient; return the loss."""
    act = params.spec.activation
    last = len(params.weights) - 1
    h = X
    hs = [X]
    for i, (W, b) in enumerate(zip(params.weights, params.biases)):
        h = h @ W + b
        if i < last:
            h = _activate(act, h)
        hs.append(h)
    pred = hs[-1][:, 0]
    diff = pred - y
    loss = float(diff @ diff) / diff.size

    # delta holds dL/d(pre-activation of layer i) while walking backwards
    delta = (2.0 / diff.size) * diff[:, None]
    for i in range(last, -1, -1):
        grad.weights[i][...] = hs[i].T @ delta
        grad.biases[i][...] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ params.weights[i].T) * _activate_grad_from_output(act, hs[i])
    return loss


@dataclass(frozen=True)
class TrainConfig:
    epochs: int
    batch_size: int
    init_seed: int = 0
    shuffle_seed: int = 0
    input_standardize: bool = True
    target_standardize: bool = True

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigurationError("epochs and batch_size must be >= 1")


@dataclass
class TrainedModel:
    params: NetworkParams
    input_mean: np.ndarray   # per-input-feature, from the original training rows
    input_std: np.ndarray
    target_mean: float = 0.0
    target_std: float = 1.0
    loss_history: list[float] = field(default_factory=list)  # MeV^2 per epoch

    def predict(self, z, a) -> np.ndarray:
        X = np.column_stack([np.asarray(z, dtype=np.float64).ravel(),
                             np.asarray(a, dtype=np.float64).ravel()])
        raw = forward(self.params, (X - self.input_mean) / self.input_std)
        return raw * self.target_std + self.target_mean


def train(spec: NetworkSpec, train_set: AugmentedTrainingSet,
          config: TrainConfig, opt: OptimizerConfig) -> TrainedModel:
    """Mini-batch training; fully deterministic given data, seeds and configs.

    If standardization is on, inputs (Z, A) and targets are z-scored with
    the mean/std of the ORIGINAL (pre-augmentation) rows only, and those
    statistics travel with the model; predictions and the loss history are
    always reported back in raw MeV. Raw-target training is available via
    config.target_standardize = False, but with MeV-scale structure on top
    of GeV-scale energies the constant-step optimizers plateau far above
    the achievable error, so the scaled mode is the default.
    """
    rows = train_set.rows
    if not rows:
        raise ConfigurationError("training set is empty")
    X = np.array([[r.z, r.a] for r in rows], dtype=np.float64)
    y = np.array([r.energy for r in rows], dtype=np.float64)

    orig = np.array([r.origin == ORIGIN_ORIGINAL for r in rows])
    if not orig.any():
        orig = np.ones(len(rows), dtype=bool)
    if config.input_standardize:
        base = X[orig]
        mean = base.mean(axis=0)
        std = base.std(axis=0)
        std[std == 0.0] = 1.0
    else:
        mean = np.zeros(X.shape[1])
        std = np.ones(X.shape[1])
    Xs = (X - mean) / std
    if config.target_standardize:
        t_mean = float(y[orig].mean())
        t_std = float(y[orig].std()) or 1.0
    else:
        t_mean, t_std = 0.0, 1.0
    ys_all = (y - t_mean) / t_std

    params = init_network(spec, config.init_seed)
    grad_flat = np.empty_like(params.flat)
    grad = NetworkParams(spec, grad_flat)
    state = init_state(opt, params.flat.size)
    shuffle_rng = np.random.default_rng(config.shuffle_seed)

    n = len(rows)
    bs = config.batch_size
    history = []
    for epoch in range(config.epochs):
        perm = shuffle_rng.permutation(n)
        Xe = Xs[perm]
        ye = ys_all[perm]
        total = 0.0
        for start in range(0, n, bs):
            xb = Xe[start:start + bs]
            yb = ye[start:start + bs]
            loss = _forward_backward(params, grad, xb, yb)
            total += loss * len(yb)
            optimizer_step(state, opt, params.flat, grad_flat)
        epoch_loss = total / n * (t_std * t_std)  # back to MeV^2
        if not np.isfinite(epoch_loss):
            raise TrainingDivergedError(
                f"non-finite training loss at epoch {epoch + 1}")
        history.append(epoch_loss)
    return TrainedModel(params=params, input_mean=mean, input_std=std,
                        target_mean=t_mean, target_std=t_std,
                        loss_history=history)


def save_model(model: TrainedModel, path) -> None:
    """Self-describing flat file; loading reproduces predictions bit-exactly."""
    meta = {
        "format_version": MODEL_FORMAT_VERSION,
        "hidden_widths": list(model.params.spec.hidden_widths),
        "activation": model.params.spec.activation,
        "input_dim": model.params.spec.input_dim,
        "output_dim": model.params.spec.output_dim,
        "loss_history": model.loss_history,
    }
    np.savez(path,
             meta=np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8),
             flat=model.params.flat,
             input_mean=model.input_mean,
             input_std=model.input_std,
             target_stats=np.array([model.target_mean, model.target_std]))


def load_model(path) -> TrainedModel:
    with np.load(path) as data:
        meta = json.loads(bytes(data["meta"]).decode())
        if meta["format_version"] != MODEL_FORMAT_VERSION:
            raise ConfigurationError(
                f"unsupported model format version {meta['format_version']}")
        spec = NetworkSpec(hidden_widths=tuple(meta["hidden_widths"]),
                           activation=meta["activation"],
                           input_dim=meta["input_dim"],
                           output_dim=meta["output_dim"])
        return TrainedModel(params=NetworkParams(spec, data["flat"].copy()),
                            input_mean=data["input_mean"].copy(),
                            input_std=data["input_std"].copy(),
                            target_mean=float(data["target_stats"][0]),
                            target_std=float(data["target_stats"][1]),
                            loss_history=list(meta["loss_history"]))
