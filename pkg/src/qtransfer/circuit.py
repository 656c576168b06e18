"""Bare variational circuits: angle embedding, RY layers with a CNOT chain, Z readout.

A bare circuit maps ``x`` (one real per qubit) to the vector of per-qubit
``<Z>`` values of::

    L_q ... L_1 E(x) |0...0>

where ``E(x) = prod_k RY(x_k * pi / 2) H`` and each layer applies ``RY(w_k)``
to every qubit followed by the entangler ``CNOT(0,1) CNOT(1,2) ...``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import simulator as sim
from .errors import ArityError, QubitIndexError
from .simulator import StateVector

INPUT_SCALE = np.pi / 2


@dataclass
class BareCircuitSpec:
    n_qubits: int
    weights: np.ndarray  # (depth, n_qubits), radians

    def __post_init__(self):
        sim._check_n_qubits(self.n_qubits)
        w = np.asarray(self.weights, dtype=np.float64)
        if w.size == 0:
            w = w.reshape(0, self.n_qubits)
        if w.ndim != 2 or w.shape[1] != self.n_qubits:
            raise ArityError(
                f"weights must have shape (depth, {self.n_qubits}), got {w.shape}"
            )
        self.weights = w

    @property
    def depth(self) -> int:
        return self.weights.shape[0]

    def copy(self) -> "BareCircuitSpec":
        return BareCircuitSpec(self.n_qubits, self.weights.copy())


def entangler_pairs(n_qubits: int) -> tuple:
    return tuple((k, k + 1) for k in range(n_qubits - 1))


def _check_arity(x, n_qubits, what="input"):
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1:] != (n_qubits,):
        raise ArityError(f"{what} has length {x.shape[-1:]}, circuit has {n_qubits} qubits")
    return x


def embed(x, n_qubits: int | None = None) -> StateVector:
    x = np.asarray(x, dtype=np.float64)
    n = len(x) if n_qubits is None else n_qubits
    x = _check_arity(x, n)
    state = sim.init_zero(n)
    for k in range(n):
        state = sim.apply_gate(state, sim.hadamard(k))
        state = sim.apply_gate(state, sim.rot_y(k, x[k] * INPUT_SCALE))
    return state


def entangler(state: StateVector) -> StateVector:
    for control, target in entangler_pairs(state.n_qubits):
        state = sim.apply_gate(state, sim.cnot(control, target))
    return state


def variational_layer(state: StateVector, w_row) -> StateVector:
    w_row = _check_arity(w_row, state.n_qubits, "weight row")
    for k in range(state.n_qubits):
        state = sim.apply_gate(state, sim.rot_y(k, w_row[k]))
    return entangler(state)


def run_bare_batch(weights: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluate many bare circuits at once.

    ``weights`` is ``(depth, n)`` (shared) or ``(B, depth, n)`` (one circuit per
    row); ``x`` is ``(B, n)``.  Returns the ``(B, n)`` array of ``<Z>`` values.
    """
    x = np.asarray(x, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if x.ndim != 2:
        raise ArityError(f"batched input must be 2-D, got shape {x.shape}")
    n = weights.shape[-1]
    _check_arity(x, n)
    batch = x.shape[0]
    depth = weights.shape[-2]
    shared = weights.ndim == 2
    if not shared and weights.shape[0] != batch:
        raise ArityError(f"{weights.shape[0]} weight sets for {batch} inputs")

    # H|0> on every qubit is the uniform state; real arithmetic suffices for {H, RY, CNOT}
    psi = np.full((batch, 2**n), 2.0 ** (-n / 2))
    for k in range(n):
        sim.rot_y_batch(psi, k, x[:, k] * INPUT_SCALE)
    perm = sim.cnot_chain_permutation(n, entangler_pairs(n))
    for layer in range(depth):
        for k in range(n):
            angles = np.full(batch, weights[layer, k]) if shared else weights[:, layer, k]
            sim.rot_y_batch(psi, k, angles)
        psi = psi[:, perm]
    return sim.expect_z_batch(psi, n)


def run_bare(spec: BareCircuitSpec, x) -> np.ndarray:
    x = _check_arity(x, spec.n_qubits)
    return run_bare_batch(spec.weights, x[None, :])[0]


def run_bare_trace(spec: BareCircuitSpec, x) -> list:
    """Measure ``<Z>`` after the embedding and after every layer.

    Entry ``l`` of the result is the readout of the circuit truncated to its
    first ``l`` layers, computed along a single forward pass.
    """
    x = _check_arity(x, spec.n_qubits)
    state = embed(x)
    out = [sim.expect_z_all(state)]
    for row in spec.weights:
        state = variational_layer(state, row)
        out.append(sim.expect_z_all(state))
    return out


def check_layer_qubit(spec: BareCircuitSpec, layer: int, qubit: int):
    if not (0 <= layer < spec.depth):
        raise QubitIndexError(f"layer {layer} out of range for depth {spec.depth}")
    sim._check_qubit(qubit, spec.n_qubits)
