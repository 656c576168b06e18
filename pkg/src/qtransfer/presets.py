"""Named experiment settings.

``spirals`` is the 2-D dressed-circuit benchmark (4 qubits, depth 5, 1000
Adam iterations of batch 10).  ``ants-bees``, ``dogs-cats`` and
``planes-cars`` are the CQ image-head settings: quantum depth, epochs, batch
size and learning rate per dataset, with best-epoch tracking on.  ``qc`` and
``qq`` configure the circuit-to-classical and circuit-to-circuit transfer
runs.
"""
from __future__ import annotations

from .errors import ConfigError

PRESETS = {
    "spirals": dict(
        experiment="spirals", model="dressed", n_qubits=4, depth=5,
        iterations=1000, batch_size=10, learning_rate=0.02,
        n_train=2000, n_test=200, eval_every=100, keep_best=False,
    ),
    "spirals-baseline": dict(
        experiment="spirals", model="baseline", n_qubits=4, depth=5,
        iterations=1000, batch_size=10, learning_rate=0.02,
        n_train=2000, n_test=200, eval_every=100, keep_best=False,
    ),
    "ants-bees": dict(
        experiment="cq", n_qubits=4, depth=6, epochs=30, batch_size=4,
        learning_rate=0.0004, decay_factor=0.1, decay_period=10, keep_best=True,
    ),
    "dogs-cats": dict(
        experiment="cq", n_qubits=4, depth=5, epochs=3, batch_size=8,
        learning_rate=0.001, keep_best=True,
    ),
    "planes-cars": dict(
        experiment="cq", n_qubits=4, depth=4, epochs=3, batch_size=8,
        learning_rate=0.0007, keep_best=True,
    ),
    "qc": dict(
        experiment="qc", n_qubits=4, depth=3, truncate_to=3, head_depth=1,
        iterations=1000, batch_size=7, learning_rate=0.01, n_train=200, n_test=100,
    ),
    "qq": dict(
        experiment="qq", n_qubits=4, truncate_to=2, trainable_depth=2,
        iterations=500, batch_size=8, learning_rate=0.01,
        pretrain_iterations=1000, pretrain_learning_rate=0.05,
        n_train=200, n_test=100,
    ),
}


def get_preset(name: str) -> dict:
    try:
        return dict(PRESETS[name])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}") from None
