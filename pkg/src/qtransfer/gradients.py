"""Parameter-shift derivatives of bare-circuit outputs.

Every trainable gate is an RY rotation, so for any angle ``a``::

    d<Z_i>/da = [f(a + pi/2) - f(a - pi/2)] / 2

exactly.  Inputs enter through ``RY(x_k * pi / 2)``; shifting the angle by
``pi/2`` is the same as shifting ``x_k`` by 1, and the chain rule adds a
factor ``pi/2``.

All functions take an optional ``runner`` with the signature of
:func:`qtransfer.circuit.run_bare_batch`.  One batched call evaluates every
shifted circuit; the number of rows it receives is the number of bare-circuit
evaluations.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import INPUT_SCALE, BareCircuitSpec, _check_arity, check_layer_qubit, run_bare_batch
from .simulator import _check_qubit

SHIFT = np.pi / 2


@dataclass
class QuantumJacobians:
    dY_dW: np.ndarray  # (n_out, depth, n_qubits)
    dY_dX: np.ndarray  # (n_out, n_qubits)


def shift_grad_weight(spec: BareCircuitSpec, x, layer: int, qubit: int, runner=run_bare_batch) -> np.ndarray:
    """Derivative of every ``<Z_i>`` with respect to ``weights[layer, qubit]``."""
    check_layer_qubit(spec, layer, qubit)
    x = _check_arity(x, spec.n_qubits)
    w = np.stack([spec.weights, spec.weights])
    w[0, layer, qubit] += SHIFT
    w[1, layer, qubit] -= SHIFT
    out = runner(w, np.stack([x, x]))
    return (out[0] - out[1]) / 2.0


def shift_grad_input(spec: BareCircuitSpec, x, qubit: int, runner=run_bare_batch) -> np.ndarray:
    """Derivative of every ``<Z_i>`` with respect to input ``x[qubit]``."""
    _check_qubit(qubit, spec.n_qubits)
    x = _check_arity(x, spec.n_qubits)
    xs = np.stack([x, x])
    xs[0, qubit] += SHIFT / INPUT_SCALE
    xs[1, qubit] -= SHIFT / INPUT_SCALE
    out = runner(spec.weights, xs)
    return INPUT_SCALE * (out[0] - out[1]) / 2.0


def batch_jacobians(weights: np.ndarray, X: np.ndarray, layers=None, inputs: bool = True,
                    runner=run_bare_batch):
    """Jacobians for a batch of inputs sharing one weight matrix.

    ``layers`` selects which weight rows to differentiate (default: all);
    ``inputs=False`` skips the input Jacobian.  Returns ``(dY_dW, dY_dX)`` of
    shapes ``(B, n, len(layers), n)`` and ``(B, n, n)`` (``None`` when skipped).
    Costs ``2 * B * (len(layers) * n + n * inputs)`` circuit evaluations.
    """
    weights = np.asarray(weights, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    depth, n = weights.shape
    layers = list(range(depth)) if layers is None else list(layers)
    batch = X.shape[0]
    n_w = len(layers) * n
    n_x = n if inputs else 0
    n_cfg = 2 * (n_w + n_x)
    if n_cfg == 0 or batch == 0:
        return np.zeros((batch, n, len(layers), n)), (np.zeros((batch, n, n)) if inputs else None)

    # configuration c: weight shift deltas dw[c], input shift deltas dx[c]; (+, -) pairs
    dw = np.zeros((n_cfg, depth, n))
    dx = np.zeros((n_cfg, n))
    for p in range(n_w):
        layer, qubit = layers[p // n], p % n
        dw[2 * p, layer, qubit] = SHIFT
        dw[2 * p + 1, layer, qubit] = -SHIFT
    for k in range(n_x):
        c = 2 * (n_w + k)
        dx[c, k] = SHIFT / INPUT_SCALE
        dx[c + 1, k] = -SHIFT / INPUT_SCALE

    w_rows = np.broadcast_to(weights + dw, (batch, n_cfg, depth, n)).reshape(batch * n_cfg, depth, n)
    x_rows = (X[:, None, :] + dx[None, :, :]).reshape(-1, n)
    out = runner(w_rows, x_rows).reshape(batch, n_cfg, n)
    diff = (out[:, 0::2, :] - out[:, 1::2, :]) / 2.0  # (B, n_w + n_x, n)

    dY_dW = diff[:, :n_w, :].reshape(batch, len(layers), n, n).transpose(0, 3, 1, 2)
    dY_dX = INPUT_SCALE * diff[:, n_w:, :].transpose(0, 2, 1) if inputs else None
    return np.ascontiguousarray(dY_dW), dY_dX


def bare_jacobians(spec: BareCircuitSpec, x, runner=run_bare_batch) -> QuantumJacobians:
    x = _check_arity(x, spec.n_qubits)
    dW, dX = batch_jacobians(spec.weights, x[None, :], runner=runner)
    return QuantumJacobians(dY_dW=dW[0], dY_dX=dX[0])
