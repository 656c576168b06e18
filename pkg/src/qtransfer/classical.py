"""Dense layers, log-softmax cross entropy and Adam, in plain numpy."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ArityError, LabelError, ShapeError

TANH = "tanh"
IDENTITY = "identity"
RELU = "relu"
ACTIVATIONS = (TANH, IDENTITY, RELU)


def activate(z, activation):
    if activation == TANH:
        return np.tanh(z)
    if activation == RELU:
        return np.maximum(z, 0.0)
    if activation == IDENTITY:
        return z
    raise ValueError(f"unknown activation {activation!r}")


def activation_grad(z, activation):
    """Derivative of the activation evaluated at the pre-activation ``z``."""
    if activation == TANH:
        return 1.0 - np.tanh(z) ** 2
    if activation == RELU:
        return (z > 0).astype(np.float64)
    if activation == IDENTITY:
        return np.ones_like(z)
    raise ValueError(f"unknown activation {activation!r}")


@dataclass
class DenseLayer:
    W: np.ndarray  # (n_out, n_in)
    b: np.ndarray  # (n_out,)
    activation: str = IDENTITY
    frozen: bool = False

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        if self.W.ndim != 2 or self.b.shape != (self.W.shape[0],):
            raise ShapeError(f"inconsistent layer shapes W{self.W.shape}, b{self.b.shape}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if not (np.all(np.isfinite(self.W)) and np.all(np.isfinite(self.b))):
            raise ValueError("layer parameters must be finite")

    @property
    def n_in(self) -> int:
        return self.W.shape[1]

    @property
    def n_out(self) -> int:
        return self.W.shape[0]

    def copy(self) -> "DenseLayer":
        return DenseLayer(self.W.copy(), self.b.copy(), self.activation, self.frozen)


def init_dense(n_in: int, n_out: int, activation: str, rng: np.random.Generator) -> DenseLayer:
    """Uniform(-1/sqrt(n_in), 1/sqrt(n_in)) for both weights and biases."""
    bound = 1.0 / np.sqrt(n_in)
    W = rng.uniform(-bound, bound, size=(n_out, n_in))
    b = rng.uniform(-bound, bound, size=n_out)
    return DenseLayer(W, b, activation)


def _check_input(layer, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1:] != (layer.n_in,):
        raise ArityError(f"layer expects {layer.n_in} inputs, got shape {x.shape}")
    return x


def dense_forward(layer: DenseLayer, x) -> np.ndarray:
    """``activation(W x + b)``; ``x`` may be a vector or a ``(B, n_in)`` batch."""
    x = _check_input(layer, x)
    return activate(x @ layer.W.T + layer.b, layer.activation)


def dense_backward(layer: DenseLayer, x, upstream):
    """Gradients of ``upstream . dense_forward(layer, x)``.

    Returns ``(dW, db, dx)``.  For a batch, ``dW`` and ``db`` are summed over
    rows and ``dx`` keeps the batch axis.
    """
    x = _check_input(layer, x)
    upstream = np.asarray(upstream, dtype=np.float64)
    if upstream.shape[-1:] != (layer.n_out,) or upstream.shape[:-1] != x.shape[:-1]:
        raise ArityError(f"upstream shape {upstream.shape} does not match output of layer for input {x.shape}")
    z = x @ layer.W.T + layer.b
    delta = upstream * activation_grad(z, layer.activation)
    if x.ndim == 1:
        dW = np.outer(delta, x)
        db = delta.copy()
    else:
        dW = delta.T @ x
        db = delta.sum(axis=0)
    dx = delta @ layer.W
    return dW, db, dx


def log_softmax(logits) -> np.ndarray:
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def softmax(logits) -> np.ndarray:
    return np.exp(log_softmax(logits))


def cross_entropy_loss(logits, label: int):
    """Return ``(loss, dloss/dlogits)`` for a single sample."""
    logits = np.asarray(logits, dtype=np.float64)
    if not (0 <= int(label) < logits.shape[-1]) or int(label) != label:
        raise LabelError(f"label {label} out of range for {logits.shape[-1]} classes")
    logp = log_softmax(logits)
    grad = np.exp(logp)
    grad[label] -= 1.0
    return float(-logp[label]), grad


def batch_cross_entropy(logits, labels):
    """Mean cross entropy over a batch and its gradient (already divided by B)."""
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels)
    batch, n_classes = logits.shape
    if labels.shape != (batch,):
        raise LabelError(f"{labels.shape} labels for {batch} logit rows")
    if np.any(labels < 0) or np.any(labels >= n_classes):
        raise LabelError(f"labels must lie in [0, {n_classes})")
    logp = log_softmax(logits)
    rows = np.arange(batch)
    loss = -logp[rows, labels].mean()
    grad = np.exp(logp)
    grad[rows, labels] -= 1.0
    return float(loss), grad / batch


@dataclass
class AdamState:
    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step_count: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adam_step(state: AdamState, params: dict, grads: dict):
    """One bias-corrected Adam update, applied to ``params`` in place.

    ``params`` and ``grads`` map names to arrays of identical shape and must
    have the same keys.  Frozen parameters are simply left out of both.
    """
    if set(params) != set(grads):
        raise ShapeError(f"parameter keys {sorted(params)} != gradient keys {sorted(grads)}")
    for name, p in params.items():
        if np.shape(grads[name]) != np.shape(p):
            raise ShapeError(f"{name}: gradient shape {np.shape(grads[name])} != parameter shape {np.shape(p)}")
        if name in state.m and state.m[name].shape != np.shape(p):
            raise ShapeError(f"{name}: optimizer state shape {state.m[name].shape} != {np.shape(p)}")

    state.step_count += 1
    t = state.step_count
    bc1 = 1.0 - state.beta1**t
    bc2 = 1.0 - state.beta2**t
    for name, p in params.items():
        g = np.asarray(grads[name], dtype=np.float64)
        if name not in state.m:
            state.m[name] = np.zeros_like(p, dtype=np.float64)
            state.v[name] = np.zeros_like(p, dtype=np.float64)
        state.m[name] = state.beta1 * state.m[name] + (1.0 - state.beta1) * g
        state.v[name] = state.beta2 * state.v[name] + (1.0 - state.beta2) * g * g
        m_hat = state.m[name] / bc1
        v_hat = state.v[name] / bc2
        p -= state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)
    return params, state


def step_decay(base_lr: float, epoch: int, factor: float = 1.0, period: int | None = None) -> float:
    """Learning rate after multiplying by ``factor`` every ``period`` epochs."""
    if not period:
        return base_lr
    return base_lr * factor ** (epoch // period)
