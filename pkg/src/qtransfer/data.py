"""Datasets: two spirals, Gaussian feature blobs, circuit-labelled qubit tasks,
CSV feature files and deterministic mini-batching.

Feature files are UTF-8 CSV with LF endings::

    label,f0,f1,...,f{w-1}
    0,1.2345678901234567e-01,...

Labels are integers; values are written with 17 significant digits so that
loading a saved file reproduces every float bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import errors
from .circuit import BareCircuitSpec, run_bare_batch
from .errors import ConfigError


@dataclass
class Dataset:
    features: np.ndarray  # (n_samples, width)
    labels: np.ndarray  # (n_samples,) ints in [0, n_classes)
    n_classes: int

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise ConfigError(f"features must be 2-D, got shape {self.features.shape}")
        if self.labels.shape != (self.features.shape[0],):
            raise ConfigError(f"{self.labels.shape[0]} labels for {self.features.shape[0]} samples")
        if self.n_classes < 1:
            raise ConfigError("n_classes must be positive")
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= self.n_classes):
            raise ConfigError(f"labels must lie in [0, {self.n_classes})")

    def __len__(self):
        return self.features.shape[0]

    @property
    def width(self) -> int:
        return self.features.shape[1]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.features[idx], self.labels[idx], self.n_classes)


# -- two spirals -------------------------------------------------------------

T_MIN = 0.05


@dataclass
class SpiralsConfig:
    n_train: int = 2000
    n_test: int = 200
    turns: float = 1.0
    noise_sigma: float = 0.05
    seed: int = 0

    def validate(self):
        if self.n_train < 1 or self.n_test < 1:
            raise ConfigError("sample counts must be positive")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be non-negative")
        if not math.isfinite(self.turns):
            raise ConfigError("turns must be finite")


def spiral_points(t, labels, turns: float) -> np.ndarray:
    """Noise-free spiral coordinates at curve parameter ``t`` for each class."""
    t = np.asarray(t, dtype=np.float64)
    theta = 2 * np.pi * turns * t + np.pi * np.asarray(labels)
    return np.stack([t * np.cos(theta), t * np.sin(theta)], axis=1)


def _spiral_sample(n, turns, sigma, rng):
    labels = np.arange(n) % 2
    # (T_MIN, 1]: 1 - U[0, 1) lies in (0, 1]
    t = T_MIN + (1.0 - T_MIN) * (1.0 - rng.random(n))
    pts = spiral_points(t, labels, turns) + rng.normal(0.0, sigma, size=(n, 2))
    return Dataset(pts, labels, 2)


def gen_spirals(config: SpiralsConfig | None = None, **kwargs):
    """Two interleaved Archimedean spirals, returned as ``(train, test)``.

    Sample ``i`` has class ``i % 2``, radius ``t`` drawn from ``(0.05, 1]`` and
    angle ``2*pi*turns*t + pi*class``, plus isotropic Gaussian jitter.
    """
    config = config or SpiralsConfig(**kwargs)
    config.validate()
    rng = np.random.default_rng(config.seed)
    train = _spiral_sample(config.n_train, config.turns, config.noise_sigma, rng)
    test = _spiral_sample(config.n_test, config.turns, config.noise_sigma, rng)
    return train, test


# -- Gaussian feature blobs --------------------------------------------------

def blob_direction(width: int) -> np.ndarray:
    """The fixed unit vector separating the two blobs: all coordinates equal."""
    return np.full(width, 1.0 / np.sqrt(width))


def gen_feature_blobs(width: int, n_train: int, n_test: int, separation: float,
                      sigma: float = 1.0, seed: int = 0):
    """Two isotropic Gaussian classes at ``+/- (separation / 2) * u``.

    ``u`` is :func:`blob_direction`, so ``separation = sqrt(width)`` puts the
    class means at ``+/- 0.5`` in every coordinate.  Classes alternate.
    """
    if width < 1:
        raise ConfigError("width must be >= 1")
    if n_train < 1 or n_test < 1:
        raise ConfigError("sample counts must be positive")
    if sigma < 0 or separation < 0:
        raise ConfigError("sigma and separation must be non-negative")
    u = blob_direction(width)
    rng = np.random.default_rng(seed)

    def sample(n):
        labels = np.arange(n) % 2
        sign = np.where(labels == 1, 1.0, -1.0)[:, None]
        feats = sign * (separation / 2.0) * u + rng.normal(0.0, sigma, size=(n, width))
        return Dataset(feats, labels, 2)

    return sample(n_train), sample(n_test)


# -- circuit-labelled qubit tasks ---------------------------------------------

def circuit_labels(weights: np.ndarray, X: np.ndarray, n_classes: int = 2) -> np.ndarray:
    """Class = index of the largest of the first ``n_classes`` readouts of a teacher circuit."""
    return np.argmax(run_bare_batch(weights, X)[:, :n_classes], axis=1).astype(np.int64)


def gen_qubit_tasks(n_qubits: int = 4, shared_depth: int = 2, head_depth_a: int = 0,
                    head_depth_b: int = 2, n_train: int = 200, n_test: int = 100, seed: int = 0,
                    n_classes: int = 2, head_angle: float = np.pi / 4):
    """Two related classification tasks on circuit inputs ``x`` in ``[-1, 1]^n``.

    Each task is labelled by a random teacher circuit with the same readout
    rule the circuit classifiers use: the argmax of the first ``n_classes``
    ``<Z>`` values.  The two teachers share their first ``shared_depth``
    layers (angles uniform in ``[-pi, pi)``) and then append independent
    heads of ``head_depth_a`` and ``head_depth_b`` layers with angles in
    ``[-head_angle, head_angle)``; a small ``head_angle`` makes the heads
    mild changes of measurement basis on top of the shared block.  Inputs for
    the two tasks are drawn independently.

    Returns ``((train_a, test_a), (train_b, test_b), (teacher_a, teacher_b))``.
    """
    if min(n_qubits, n_train, n_test) < 1 or min(shared_depth, head_depth_a, head_depth_b) < 0:
        raise ConfigError("invalid qubit-task configuration")
    if not (1 <= n_classes <= n_qubits):
        raise ConfigError("n_classes must lie in [1, n_qubits]")
    rng = np.random.default_rng(seed)
    shared = rng.uniform(-np.pi, np.pi, size=(shared_depth, n_qubits))
    teachers, tasks = [], []
    for head_depth in (head_depth_a, head_depth_b):
        head = rng.uniform(-head_angle, head_angle, size=(head_depth, n_qubits))
        teacher = BareCircuitSpec(n_qubits, np.vstack([shared, head]))
        X = rng.uniform(-1.0, 1.0, size=(n_train + n_test, n_qubits))
        y = circuit_labels(teacher.weights, X, n_classes)
        teachers.append(teacher)
        tasks.append((Dataset(X[:n_train], y[:n_train], n_classes),
                      Dataset(X[n_train:], y[n_train:], n_classes)))
    return tasks[0], tasks[1], tuple(teachers)


def gen_linear_feature_task(extractor: BareCircuitSpec, n_train: int = 200, n_test: int = 100,
                            seed: int = 0, margin: float = 0.05):
    """Binary task on circuit inputs whose label is a linear function of the circuit's readouts.

    A random hyperplane ``v . f(x) = c`` (``c`` the median projection) splits
    the readouts ``f(x)`` of ``extractor``; points within ``margin`` of the
    hyperplane are redrawn, so the classes are linearly separable in feature
    space.  Returns ``(train, test, (v, c))``.
    """
    if min(n_train, n_test) < 1 or margin < 0:
        raise ConfigError("invalid linear-task configuration")
    rng = np.random.default_rng(seed)
    n = extractor.n_qubits
    v = rng.normal(size=n)
    v /= np.linalg.norm(v)
    probe = run_bare_batch(extractor.weights, rng.uniform(-1.0, 1.0, size=(1000, n))) @ v
    c = float(np.median(probe))
    need = n_train + n_test
    kept = []
    while sum(len(k) for k in kept) < need:
        X = rng.uniform(-1.0, 1.0, size=(2 * need, n))
        proj = run_bare_batch(extractor.weights, X) @ v - c
        kept.append(X[np.abs(proj) > margin])
    X = np.vstack(kept)[:need]
    y = (run_bare_batch(extractor.weights, X) @ v > c).astype(np.int64)
    return Dataset(X[:n_train], y[:n_train], 2), Dataset(X[n_train:], y[n_train:], 2), (v, c)


# -- feature files -----------------------------------------------------------

def save_feature_file(dataset: Dataset, path):
    header = ",".join(["label"] + [f"f{i}" for i in range(dataset.width)])
    lines = [header]
    for label, row in zip(dataset.labels, dataset.features):
        lines.append(",".join([str(int(label))] + [format(float(v), ".16e") for v in row]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def load_feature_file(path, n_classes: int | None = None) -> Dataset:
    """Parse a feature CSV; raises a :class:`~qtransfer.errors.FormatError` subclass on bad input.

    ``n_classes`` defaults to ``max(label) + 1``.
    """
    path = Path(path)
    if not path.is_file():
        raise errors.MissingFileError("no such feature file", path=path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise errors.FormatError(f"not UTF-8: {exc}", path=path) from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise errors.EmptyFileError("file is empty", path=path)

    header = lines[0].rstrip("\r").split(",")
    width = len(header) - 1
    expected = ["label"] + [f"f{i}" for i in range(width)]
    if width < 1 or header != expected:
        raise errors.HeaderError("header must be 'label,f0,f1,...'", path=path, line=1)
    if len(lines) == 1:
        raise errors.EmptyFileError("file has a header but no samples", path=path)

    feats = np.empty((len(lines) - 1, width))
    labels = np.empty(len(lines) - 1, dtype=np.int64)
    for i, line in enumerate(lines[1:]):
        lineno = i + 2
        cells = line.rstrip("\r").split(",")
        if len(cells) - 1 != width:
            raise errors.RaggedWidthError(
                f"expected {width} feature values, found {len(cells) - 1}", path=path, line=lineno)
        try:
            labels[i] = int(cells[0])
        except ValueError:
            raise errors.LabelFormatError(f"label {cells[0]!r} is not an integer", path=path, line=lineno) from None
        try:
            feats[i] = [float(c) for c in cells[1:]]
        except ValueError as exc:
            raise errors.MalformedRowError(f"bad value: {exc}", path=path, line=lineno) from None
        if labels[i] < 0:
            raise errors.LabelFormatError(f"negative label {labels[i]}", path=path, line=lineno)
    if n_classes is None:
        n_classes = int(labels.max()) + 1
    elif labels.max() >= n_classes:
        raise errors.LabelFormatError(
            f"label {labels.max()} not below n_classes={n_classes}", path=path)
    return Dataset(feats, labels, n_classes)


# -- batching ----------------------------------------------------------------

def epoch_seed(seed: int, epoch: int) -> np.random.SeedSequence:
    """Independent, reproducible stream for a given (run seed, epoch counter)."""
    return np.random.SeedSequence([int(seed), int(epoch)])


def batches(dataset, batch_size: int, epoch_seed) -> list:
    """A seeded permutation of all sample indices, cut into chunks of ``batch_size``.

    ``dataset`` may be a :class:`Dataset` or a sample count.  The last chunk is
    kept even when short.
    """
    if batch_size < 1:
        raise ConfigError("batch_size must be >= 1")
    n = dataset if isinstance(dataset, (int, np.integer)) else len(dataset)
    perm = np.random.default_rng(epoch_seed).permutation(n)
    return [perm[i:i + batch_size] for i in range(0, n, batch_size)]
