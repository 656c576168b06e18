"""Transfer learning across the classical/quantum boundary.

The generic recipe: take a pre-trained network ``A``, cut off its final
layers to get ``A'``, bolt a fresh trainable block ``B`` onto ``A'`` and train
only ``B`` on the new dataset.  Three hybrid variants are provided:

``CQ``
    ``A'`` is a classical feature extractor living outside this package; its
    outputs arrive as a feature file and ``B`` is a dressed circuit.
``QC``
    ``A'`` is a truncated bare circuit whose ``<Z>`` readouts feed a small
    classical head.
``QQ``
    ``A'`` is a truncated bare circuit and ``B`` is a stack of fresh
    variational layers appended to it; compared against training a circuit
    of the same total depth from scratch.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import models as m
from .circuit import BareCircuitSpec, run_bare_batch
from .data import Dataset
from .errors import ArityError, ConfigError, FormatError, RangeError

CQ, QC, QQ = "CQ", "QC", "QQ"
SCHEMES = (CQ, QC, QQ)


@dataclass
class TransferPlan:
    """Everything needed to run one transfer experiment.

    ``source`` is the pre-trained network ``A`` (a :class:`BareCircuitSpec`, a
    :class:`~qtransfer.models.QQCircuit` or a checkpoint path); CQ has none.
    ``head`` configures block ``B``:

    * CQ: ``n_qubits``, ``depth``, optional ``n_inputs`` (expected feature width)
    * QC: ``depths`` (list of head depths to sweep)
    * QQ: ``trainable_depth``
    """

    scheme: str
    dataset_b: tuple  # (train, test)
    config: m.TrainConfig
    source: object = None
    truncate_to: int | None = None
    head: dict = field(default_factory=dict)
    dataset_a: tuple | None = None
    pretrain_config: m.TrainConfig | None = None
    seed: int = 0

    def validate(self, scheme):
        if self.scheme != scheme:
            raise ConfigError(f"plan has scheme {self.scheme!r}, expected {scheme!r}")
        if len(self.dataset_b) != 2:
            raise ConfigError("dataset_b must be a (train, test) pair")
        train, test = self.dataset_b
        if train.width != test.width:
            raise FormatError(f"train width {train.width} != test width {test.width}")


def truncate_quantum(spec: BareCircuitSpec, keep: int) -> BareCircuitSpec:
    """Keep the first ``keep`` variational layers (copied)."""
    if not (0 <= keep <= spec.depth):
        raise RangeError(f"keep={keep} outside [0, {spec.depth}]")
    return BareCircuitSpec(spec.n_qubits, spec.weights[:keep].copy())


def compose_qq(frozen: BareCircuitSpec, trainable_depth: int, seed=0, n_classes: int = 2,
               readout_scale: float = 1.0, n_qubits: int | None = None) -> m.QQCircuit:
    """Append ``trainable_depth`` freshly initialised layers to a frozen circuit."""
    if n_qubits is not None and n_qubits != frozen.n_qubits:
        raise ArityError(f"frozen block has {frozen.n_qubits} qubits, head expects {n_qubits}")
    if trainable_depth < 0:
        raise ConfigError("trainable_depth must be non-negative")
    rng = np.random.default_rng(seed)
    fresh = m.init_quantum_weights(trainable_depth, frozen.n_qubits, rng)
    weights = np.vstack([frozen.weights, fresh])
    return m.QQCircuit(BareCircuitSpec(frozen.n_qubits, weights), frozen.depth, n_classes, readout_scale)


def _resolve_source(source) -> BareCircuitSpec:
    if isinstance(source, (str, Path)):
        from .checkpoint import load_checkpoint
        source = load_checkpoint(source)
    if isinstance(source, m.QQCircuit):
        return source.bare
    if isinstance(source, m.QCModel):
        return source.extractor
    if isinstance(source, BareCircuitSpec):
        return source
    raise ConfigError(f"cannot use {type(source).__name__} as a quantum source network")


def count_params(params: dict) -> int:
    return int(sum(np.size(v) for v in params.values()))


# -- CQ ------------------------------------------------------------------------

@dataclass
class CQReport:
    model: m.DressedCircuit
    trace: m.TrainTrace
    train_accuracy: float
    test_accuracy: float
    best_test_accuracy: float


def run_cq(plan: TransferPlan) -> CQReport:
    plan.validate(CQ)
    train, test = plan.dataset_b
    width = plan.head.get("n_inputs")
    if width is not None and width != train.width:
        raise FormatError(f"feature width {train.width} does not match pre-layer input {width}")
    n_classes = max(train.n_classes, test.n_classes)
    rng = np.random.default_rng(plan.seed)
    model = m.make_dressed(train.width, plan.head.get("n_qubits", 4), plan.head.get("depth", 6), n_classes, rng)
    trace = m.train(model, train, plan.config, test)
    return CQReport(model, trace, m.accuracy(model, train), trace.final_accuracy, trace.best_accuracy)


# -- QC ------------------------------------------------------------------------

@dataclass
class QCReport:
    extractor: BareCircuitSpec
    rows: list  # one dict per head depth
    models: list


def quantum_features(spec: BareCircuitSpec, dataset: Dataset) -> Dataset:
    return Dataset(run_bare_batch(spec.weights, dataset.features), dataset.labels, dataset.n_classes)


def run_qc(plan: TransferPlan) -> QCReport:
    plan.validate(QC)
    source = _resolve_source(plan.source)
    keep = source.depth if plan.truncate_to is None else plan.truncate_to
    extractor = truncate_quantum(source, keep)
    train, test = plan.dataset_b
    if train.width != extractor.n_qubits:
        raise FormatError(f"inputs have width {train.width}, extractor has {extractor.n_qubits} qubits")
    frozen_before = extractor.weights.copy()
    f_train, f_test = quantum_features(extractor, train), quantum_features(extractor, test)
    n_classes = max(train.n_classes, test.n_classes)

    rows, trained = [], []
    for depth in plan.head.get("depths", [1]):
        head = m.make_head(extractor.n_qubits, n_classes, depth, np.random.default_rng(plan.seed))
        trace = m.train(head, f_train, plan.config, f_test)
        rows.append({"head_depth": depth, "quantum_depth": keep,
                     "train_accuracy": m.accuracy(head, f_train),
                     "test_accuracy": trace.final_accuracy,
                     "best_test_accuracy": trace.best_accuracy, "trace": trace})
        trained.append(m.QCModel(extractor, head))
    assert np.array_equal(frozen_before, extractor.weights)
    return QCReport(extractor, rows, trained)


# -- QQ ------------------------------------------------------------------------

@dataclass
class QQReport:
    transfer: m.TrainTrace
    scratch: m.TrainTrace | None
    pretrain: m.TrainTrace | None
    transfer_model: m.QQCircuit
    scratch_model: m.QQCircuit | None
    source: BareCircuitSpec
    n_trainable_transfer: int
    n_trainable_scratch: int

    def loss_at(self, iteration: int):
        return self.transfer.losses[iteration], self.scratch.losses[iteration]


def pretrain_qq(dataset_a: tuple, depth: int, config: m.TrainConfig, seed=0, n_classes=2,
                readout_scale=1.0):
    """Train a fully trainable bare circuit of ``depth`` layers on task A."""
    train, test = dataset_a
    rng = np.random.default_rng(seed)
    model = m.QQCircuit(BareCircuitSpec(train.width, m.init_quantum_weights(depth, train.width, rng)),
                        0, n_classes, readout_scale)
    trace = m.train(model, train, config, test)
    return model, trace


def run_qq(plan: TransferPlan, with_scratch: bool = True) -> QQReport:
    """Pre-train on task A (unless ``source`` is given), truncate, freeze, append
    fresh layers and train on task B; then train the same total depth from scratch
    (skipped when ``with_scratch`` is false)."""
    plan.validate(QQ)
    train_b, test_b = plan.dataset_b
    trainable_depth = plan.head.get("trainable_depth", 2)
    readout_scale = plan.head.get("readout_scale", 1.0)
    n_classes = max(train_b.n_classes, test_b.n_classes)

    pre_trace = None
    if plan.source is None:
        if plan.dataset_a is None or plan.truncate_to is None:
            raise ConfigError("QQ needs either a source network or dataset_a plus truncate_to")
        pre_depth = plan.head.get("source_depth", plan.truncate_to + trainable_depth)
        pre_cfg = plan.pretrain_config or plan.config
        source_model, pre_trace = pretrain_qq(plan.dataset_a, pre_depth, pre_cfg, plan.seed,
                                              n_classes, readout_scale)
        source = source_model.bare
    else:
        source = _resolve_source(plan.source)
    keep = source.depth if plan.truncate_to is None else plan.truncate_to
    frozen = truncate_quantum(source, keep)
    if frozen.n_qubits != train_b.width:
        raise ArityError(f"task B has width {train_b.width}, source circuit has {frozen.n_qubits} qubits")

    # identical fresh-layer initialisation protocol in both arms
    fresh_seed = np.random.SeedSequence([plan.seed, 1])
    transfer_model = compose_qq(frozen, trainable_depth, fresh_seed, n_classes, readout_scale)
    total_depth = transfer_model.bare.depth
    scratch_model = compose_qq(BareCircuitSpec(frozen.n_qubits, np.zeros((0, frozen.n_qubits))),
                               total_depth, fresh_seed, n_classes, readout_scale)

    frozen_rows = transfer_model.bare.weights[:keep].copy()
    transfer = m.train(transfer_model, train_b, plan.config, test_b)
    assert np.array_equal(frozen_rows, transfer_model.bare.weights[:keep])
    if not with_scratch:
        return QQReport(transfer, None, pre_trace, transfer_model, None, source,
                        count_params(transfer_model.trainable_params()), 0)
    scratch = m.train(scratch_model, train_b, plan.config, test_b)
    return QQReport(transfer, scratch, pre_trace, transfer_model, scratch_model, source,
                    count_params(transfer_model.trainable_params()),
                    count_params(scratch_model.trainable_params()))
