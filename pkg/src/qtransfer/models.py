"""Trainable models and the shared training loop.

* :class:`DressedCircuit` - dense ``tanh`` pre-layer, bare circuit, linear head.
* :class:`ClassicalBaseline` - a plain stack of dense layers.
* :class:`QQCircuit` - a bare circuit whose first rows are frozen and whose
  first ``n_classes`` readouts are the logits.
* :class:`QCModel` - a frozen bare circuit used as feature extractor for a
  classical head.

Every model exposes ``logits(X)`` on ``(B, n_in)`` batches, ``params()`` (all
arrays, by name), ``trainable_params()`` (views onto the unfrozen arrays, safe
to update in place) and ``loss_and_grads(X, y)``.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from . import classical as cl
from .circuit import BareCircuitSpec, run_bare_batch
from .classical import DenseLayer, dense_backward, dense_forward
from .data import Dataset, batches, epoch_seed
from .errors import ArityError, BatchError, ConfigError
from .gradients import batch_jacobians

QUANTUM_INIT_STD = 0.01


def init_quantum_weights(depth: int, n_qubits: int, rng: np.random.Generator) -> np.ndarray:
    return rng.normal(0.0, QUANTUM_INIT_STD, size=(depth, n_qubits))


def _as_batch(X, n_in):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != n_in:
        raise ArityError(f"model expects (B, {n_in}) inputs, got shape {X.shape}")
    return X


def _check_batch(X, y):
    if len(X) == 0:
        raise BatchError("empty batch")
    if len(y) != len(X):
        raise BatchError(f"{len(y)} labels for {len(X)} samples")


@dataclass
class DressedCircuit:
    pre: DenseLayer
    bare: BareCircuitSpec
    post: DenseLayer
    quantum_frozen: bool = False

    def __post_init__(self):
        if not (self.pre.n_out == self.bare.n_qubits == self.post.n_in):
            raise ArityError(
                f"pre-layer outputs {self.pre.n_out}, circuit has {self.bare.n_qubits} qubits, "
                f"post-layer takes {self.post.n_in}")

    @property
    def n_inputs(self):
        return self.pre.n_in

    @property
    def n_outputs(self):
        return self.post.n_out

    def logits(self, X):
        X = _as_batch(X, self.n_inputs)
        return dense_forward(self.post, run_bare_batch(self.bare.weights, dense_forward(self.pre, X)))

    def params(self):
        return {"pre.W": self.pre.W, "pre.b": self.pre.b, "bare.weights": self.bare.weights,
                "post.W": self.post.W, "post.b": self.post.b}

    def trainable_params(self):
        out = {}
        if not self.pre.frozen:
            out.update({"pre.W": self.pre.W, "pre.b": self.pre.b})
        if not self.quantum_frozen and self.bare.depth:
            out["bare.weights"] = self.bare.weights
        if not self.post.frozen:
            out.update({"post.W": self.post.W, "post.b": self.post.b})
        return out

    def loss_and_grads(self, X, y):
        X = _as_batch(X, self.n_inputs)
        _check_batch(X, y)
        a = dense_forward(self.pre, X)
        q = run_bare_batch(self.bare.weights, a)
        loss, dlogits = cl.batch_cross_entropy(dense_forward(self.post, q), y)

        grads = {}
        dW, db, dq = dense_backward(self.post, q, dlogits)
        if not self.post.frozen:
            grads["post.W"], grads["post.b"] = dW, db
        need_w = not self.quantum_frozen and self.bare.depth > 0
        need_x = not self.pre.frozen
        if need_w or need_x:
            dY_dW, dY_dX = batch_jacobians(
                self.bare.weights, a, layers=range(self.bare.depth) if need_w else (), inputs=need_x)
            if need_w:
                grads["bare.weights"] = np.einsum("bi,bilk->lk", dq, dY_dW)
            if need_x:
                da = np.einsum("bi,bik->bk", dq, dY_dX)
                grads["pre.W"], grads["pre.b"], _ = dense_backward(self.pre, X, da)
        return loss, grads


@dataclass
class ClassicalBaseline:
    layers: list

    def __post_init__(self):
        if not self.layers:
            raise ArityError("baseline needs at least one layer")
        for a, b in zip(self.layers, self.layers[1:]):
            if a.n_out != b.n_in:
                raise ArityError(f"layer output {a.n_out} does not feed layer input {b.n_in}")

    @property
    def n_inputs(self):
        return self.layers[0].n_in

    @property
    def n_outputs(self):
        return self.layers[-1].n_out

    def logits(self, X):
        h = _as_batch(X, self.n_inputs)
        for layer in self.layers:
            h = dense_forward(layer, h)
        return h

    def params(self):
        out = {}
        for i, layer in enumerate(self.layers):
            out[f"layers.{i}.W"] = layer.W
            out[f"layers.{i}.b"] = layer.b
        return out

    def trainable_params(self):
        return {k: v for k, v in self.params().items()
                if not self.layers[int(k.split(".")[1])].frozen}

    def loss_and_grads(self, X, y):
        X = _as_batch(X, self.n_inputs)
        _check_batch(X, y)
        inputs = [X]
        for layer in self.layers:
            inputs.append(dense_forward(layer, inputs[-1]))
        loss, up = cl.batch_cross_entropy(inputs[-1], y)
        grads = {}
        for i in reversed(range(len(self.layers))):
            dW, db, up = dense_backward(self.layers[i], inputs[i], up)
            if not self.layers[i].frozen:
                grads[f"layers.{i}.W"], grads[f"layers.{i}.b"] = dW, db
        return loss, grads


@dataclass
class QQCircuit:
    """Bare circuit classifier; rows ``[0, frozen_depth)`` of the weights never train."""

    bare: BareCircuitSpec
    frozen_depth: int = 0
    n_classes: int = 2
    readout_scale: float = 1.0

    def __post_init__(self):
        if not (0 <= self.frozen_depth <= self.bare.depth):
            raise ArityError(f"frozen_depth {self.frozen_depth} outside [0, {self.bare.depth}]")
        if not (1 <= self.n_classes <= self.bare.n_qubits):
            raise ArityError(f"cannot read {self.n_classes} classes from {self.bare.n_qubits} qubits")

    @property
    def n_inputs(self):
        return self.bare.n_qubits

    @property
    def n_outputs(self):
        return self.n_classes

    @property
    def frozen_mask(self):
        return np.arange(self.bare.depth) < self.frozen_depth

    def logits(self, X):
        X = _as_batch(X, self.n_inputs)
        return self.readout_scale * run_bare_batch(self.bare.weights, X)[:, :self.n_classes]

    def params(self):
        return {"bare.weights": self.bare.weights}

    def trainable_params(self):
        if self.frozen_depth == self.bare.depth:
            return {}
        return {"bare.weights": self.bare.weights[self.frozen_depth:]}

    def loss_and_grads(self, X, y):
        X = _as_batch(X, self.n_inputs)
        _check_batch(X, y)
        loss, dlogits = cl.batch_cross_entropy(self.logits(X), y)
        if self.frozen_depth == self.bare.depth:
            return loss, {}
        dY_dW, _ = batch_jacobians(self.bare.weights, X,
                                   layers=range(self.frozen_depth, self.bare.depth), inputs=False)
        dq = self.readout_scale * dlogits
        grad = np.einsum("bi,bilk->lk", dq, dY_dW[:, :self.n_classes])
        return loss, {"bare.weights": grad}


@dataclass
class QCModel:
    """Frozen circuit features ``<Z>`` fed into a trainable classical head."""

    extractor: BareCircuitSpec
    head: ClassicalBaseline

    def __post_init__(self):
        if self.head.n_inputs != self.extractor.n_qubits:
            raise ArityError("head input width must equal the extractor's qubit count")

    @property
    def n_inputs(self):
        return self.extractor.n_qubits

    @property
    def n_outputs(self):
        return self.head.n_outputs

    def features(self, X):
        return run_bare_batch(self.extractor.weights, _as_batch(X, self.n_inputs))

    def logits(self, X):
        return self.head.logits(self.features(X))

    def params(self):
        out = {"extractor.weights": self.extractor.weights}
        out.update({f"head.{k}": v for k, v in self.head.params().items()})
        return out

    def trainable_params(self):
        return {f"head.{k}": v for k, v in self.head.trainable_params().items()}

    def loss_and_grads(self, X, y):
        loss, grads = self.head.loss_and_grads(self.features(X), y)
        return loss, {f"head.{k}": v for k, v in grads.items()}


# -- construction --------------------------------------------------------------

def make_dressed(n_in: int, n_qubits: int, depth: int, n_out: int, rng) -> DressedCircuit:
    pre = cl.init_dense(n_in, n_qubits, cl.TANH, rng)
    weights = init_quantum_weights(depth, n_qubits, rng)
    post = cl.init_dense(n_qubits, n_out, cl.IDENTITY, rng)
    return DressedCircuit(pre, BareCircuitSpec(n_qubits, weights), post)


def make_baseline(sizes, rng, hidden=cl.TANH) -> ClassicalBaseline:
    """Dense stack ``sizes[0] -> sizes[1] -> ... -> sizes[-1]``; last layer linear."""
    layers = []
    for i, (a, b) in enumerate(zip(sizes, sizes[1:])):
        act = cl.IDENTITY if i == len(sizes) - 2 else hidden
        layers.append(cl.init_dense(a, b, act, rng))
    return ClassicalBaseline(layers)


def make_head(n_in: int, n_out: int, depth: int, rng) -> ClassicalBaseline:
    """Head of ``depth`` layers; hidden layers keep width ``n_in``."""
    if depth < 1:
        raise ConfigError("head depth must be >= 1")
    return make_baseline([n_in] * depth + [n_out], rng)


# -- generic operations --------------------------------------------------------

def forward(model, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.n_inputs,):
        raise ArityError(f"model expects {model.n_inputs} inputs, got shape {x.shape}")
    return model.logits(x[None, :])[0]


def predict(model, x) -> int:
    """Index of the largest logit; ties go to the lowest index."""
    return int(np.argmax(forward(model, x)))


def predict_batch(model, X) -> np.ndarray:
    return np.argmax(model.logits(X), axis=1)


def accuracy(model, dataset: Dataset) -> float:
    return float(np.mean(predict_batch(model, dataset.features) == dataset.labels))


def mean_loss(model, dataset: Dataset) -> float:
    return cl.batch_cross_entropy(model.logits(dataset.features), dataset.labels)[0]


def loss_and_grads(model, batch):
    """Mean cross entropy and gradients of every trainable parameter.

    ``batch`` is a :class:`Dataset` or an ``(X, y)`` pair.
    """
    X, y = (batch.features, batch.labels) if isinstance(batch, Dataset) else batch
    return model.loss_and_grads(np.asarray(X, dtype=np.float64), np.asarray(y))


# -- training ------------------------------------------------------------------

@dataclass
class TrainConfig:
    """Either ``iterations`` or ``epochs`` fixes the budget.

    ``decay_period`` is measured in epochs.  ``eval_every`` counts iterations;
    ``None`` evaluates once per epoch.  ``loss_on="full"`` records the whole
    training-set loss after every update instead of the mini-batch loss.
    """

    iterations: int | None = None
    epochs: int | None = None
    batch_size: int = 10
    learning_rate: float = 0.01
    decay_factor: float = 1.0
    decay_period: int | None = None
    seed: int = 0
    eval_every: int | None = None
    keep_best: bool = False
    loss_on: str = "batch"

    def validate(self):
        if (self.iterations is None) == (self.epochs is None):
            raise ConfigError("set exactly one of iterations and epochs")
        budget = self.iterations if self.iterations is not None else self.epochs
        if budget < 0:
            raise ConfigError("training budget must be non-negative")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if self.learning_rate < 0 or not np.isfinite(self.learning_rate):
            raise ConfigError("learning_rate must be a non-negative number")
        if self.decay_period is not None and self.decay_period < 1:
            raise ConfigError("decay_period must be >= 1 epoch")
        if self.eval_every is not None and self.eval_every < 1:
            raise ConfigError("eval_every must be >= 1")
        if self.loss_on not in ("batch", "full"):
            raise ConfigError("loss_on must be 'batch' or 'full'")

    def total_iterations(self, n_samples: int) -> int:
        if self.iterations is not None:
            return self.iterations
        return self.epochs * -(-n_samples // self.batch_size)


@dataclass
class TrainTrace:
    """Row ``i`` describes the state after ``i`` updates; row 0 is the initialization."""

    iterations: list = field(default_factory=list)
    epochs: list = field(default_factory=list)
    losses: list = field(default_factory=list)
    accuracy: dict = field(default_factory=dict)  # iteration -> evaluation accuracy
    best_accuracy: float | None = None
    best_iteration: int | None = None
    best_model: object = None

    @property
    def final_accuracy(self):
        return self.accuracy[self.iterations[-1]] if self.iterations else None

    def rows(self):
        for it, ep, loss in zip(self.iterations, self.epochs, self.losses):
            yield it, ep, loss, self.accuracy.get(it)


def train(model, dataset: Dataset, config: TrainConfig, eval_data: Dataset | None = None) -> TrainTrace:
    """Adam over seeded, shuffled mini-batches.  The model is updated in place.

    Accuracy is measured on ``eval_data`` (default: the training set) at
    iteration 0, every ``eval_every`` iterations (or epoch boundary) and at
    the end.  With ``keep_best`` the trace holds a copy of the model at its
    best evaluation.
    """
    config.validate()
    if len(dataset) == 0:
        raise ConfigError("training dataset is empty")
    eval_data = dataset if eval_data is None else eval_data
    n = len(dataset)
    per_epoch = -(-n // config.batch_size)
    total = config.total_iterations(n)
    eval_every = config.eval_every or per_epoch

    params = model.trainable_params()
    adam = cl.AdamState(learning_rate=config.learning_rate)
    trace = TrainTrace()

    def evaluate(it):
        acc = accuracy(model, eval_data)
        trace.accuracy[it] = acc
        if trace.best_accuracy is None or acc > trace.best_accuracy:
            trace.best_accuracy, trace.best_iteration = acc, it
            if config.keep_best:
                trace.best_model = copy.deepcopy(model)

    trace.iterations.append(0)
    trace.epochs.append(0)
    trace.losses.append(mean_loss(model, dataset))
    evaluate(0)

    order = []
    for it in range(1, total + 1):
        epoch = (it - 1) // per_epoch
        if (it - 1) % per_epoch == 0:
            order = batches(n, config.batch_size, epoch_seed(config.seed, epoch))
        idx = order[(it - 1) % per_epoch]
        loss, grads = model.loss_and_grads(dataset.features[idx], dataset.labels[idx])
        adam.learning_rate = cl.step_decay(config.learning_rate, epoch, config.decay_factor, config.decay_period)
        if params:
            cl.adam_step(adam, params, grads)
        if config.loss_on == "full":
            loss = mean_loss(model, dataset)
        trace.iterations.append(it)
        trace.epochs.append(epoch)
        trace.losses.append(loss)
        if it % eval_every == 0 or it == total:
            evaluate(it)
    return trace
