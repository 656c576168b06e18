"""Exact statevector simulation for the gate set {H, RY, CNOT}.

Qubit ordering is little-endian: qubit ``k`` is bit ``k`` of the amplitude
index, so basis index ``b`` has qubit ``k`` in state ``(b >> k) & 1``.

RY follows the half-angle convention::

    RY(theta) = [[cos(theta/2), -sin(theta/2)],
                 [sin(theta/2),  cos(theta/2)]]

Single states are wrapped in the immutable :class:`StateVector`.  The
``*_batch`` kernels below operate in place on raw ``(B, 2**n)`` arrays and are
what the circuit layer uses for fast evaluation of many circuits at once.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import cos, sin, sqrt
from typing import Optional

import numpy as np

from .errors import QubitIndexError, SizeError

MAX_QUBITS = 24

HADAMARD = "H"
ROT_Y = "RY"
CNOT = "CNOT"
_KINDS = (HADAMARD, ROT_Y, CNOT)

_SQRT2_INV = 1.0 / sqrt(2.0)


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.shape != (2**self.n_qubits,):
            raise SizeError(
                f"expected {2**self.n_qubits} amplitudes for {self.n_qubits} qubits, got shape {amps.shape}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class GateOp:
    """A single gate. ``angle`` is only meaningful for RY, ``control`` only for CNOT."""

    kind: str
    target: int
    control: Optional[int] = None
    angle: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind == CNOT:
            if self.control is None:
                raise ValueError("CNOT needs a control qubit")
            if self.control == self.target:
                raise ValueError("CNOT control and target must differ")
        elif self.control is not None:
            raise ValueError(f"{self.kind} takes no control qubit")

    def qubits(self):
        return (self.target,) if self.control is None else (self.control, self.target)


def hadamard(target: int) -> GateOp:
    return GateOp(HADAMARD, target)


def rot_y(target: int, angle: float) -> GateOp:
    return GateOp(ROT_Y, target, angle=float(angle))


def cnot(control: int, target: int) -> GateOp:
    return GateOp(CNOT, target, control=control)


def _check_n_qubits(n_qubits: int):
    if not (1 <= n_qubits <= MAX_QUBITS):
        raise SizeError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")


def _check_qubit(qubit: int, n_qubits: int):
    if not (0 <= qubit < n_qubits):
        raise QubitIndexError(f"qubit {qubit} out of range for {n_qubits} qubits")


def init_zero(n_qubits: int) -> StateVector:
    """The reference state |0...0>."""
    _check_n_qubits(n_qubits)
    amps = np.zeros(2**n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def _blocks(amps: np.ndarray, qubit: int) -> np.ndarray:
    # (..., high, bit, low) view: bit axis is qubit `qubit`, stride 2**qubit
    return amps.reshape(amps.shape[:-1] + (-1, 2, 2**qubit))


def apply_gate_inplace(amps: np.ndarray, n_qubits: int, gate: GateOp) -> np.ndarray:
    """Mutating variant of :func:`apply_gate` working on a raw amplitude array.

    ``amps`` may carry leading batch axes; the last axis must be ``2**n_qubits``.
    """
    for q in gate.qubits():
        _check_qubit(q, n_qubits)
    if gate.kind == CNOT:
        v = _blocks(amps, gate.target)
        c = gate.control
        # index along the flattened (high, low) pair where the control bit is set
        idx = np.arange(2**n_qubits).reshape(-1, 2, 2**gate.target)[:, 0, :]
        ctrl_set = ((idx >> c) & 1).astype(bool)
        a0 = v[..., :, 0, :]
        a1 = v[..., :, 1, :]
        tmp = a0[..., ctrl_set].copy()
        a0[..., ctrl_set] = a1[..., ctrl_set]
        a1[..., ctrl_set] = tmp
        return amps
    v = _blocks(amps, gate.target)
    a0 = v[..., :, 0, :].copy()
    a1 = v[..., :, 1, :]
    if gate.kind == HADAMARD:
        v[..., :, 0, :] = (a0 + a1) * _SQRT2_INV
        v[..., :, 1, :] = (a0 - a1) * _SQRT2_INV
    else:
        c, s = cos(gate.angle / 2.0), sin(gate.angle / 2.0)
        v[..., :, 0, :] = c * a0 - s * a1
        v[..., :, 1, :] = s * a0 + c * a1
    return amps


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    """Return ``gate`` applied to ``state``; ``state`` itself is untouched."""
    amps = np.array(state.amplitudes)
    apply_gate_inplace(amps, state.n_qubits, gate)
    return StateVector(state.n_qubits, amps)


@lru_cache(maxsize=None)
def z_signs(n_qubits: int) -> np.ndarray:
    """Matrix ``S[b, k]`` = eigenvalue of Z on qubit ``k`` for basis index ``b``."""
    b = np.arange(2**n_qubits)[:, None]
    k = np.arange(n_qubits)[None, :]
    signs = 1.0 - 2.0 * ((b >> k) & 1)
    signs.setflags(write=False)
    return signs


def expect_z(state: StateVector, qubit: int) -> float:
    _check_qubit(qubit, state.n_qubits)
    probs = np.abs(state.amplitudes) ** 2
    return float(probs @ z_signs(state.n_qubits)[:, qubit])


def expect_z_all(state: StateVector) -> np.ndarray:
    return expect_z_batch(state.amplitudes[None, :], state.n_qubits)[0]


# -- batched in-place kernels ------------------------------------------------

def hadamard_all_batch(psi: np.ndarray, n_qubits: int) -> np.ndarray:
    for k in range(n_qubits):
        apply_gate_inplace(psi, n_qubits, GateOp(HADAMARD, k))
    return psi


def rot_y_batch(psi: np.ndarray, qubit: int, angles: np.ndarray) -> np.ndarray:
    """RY on ``qubit`` with a separate angle per batch row of ``psi`` (shape (B, 2**n))."""
    v = _blocks(psi, qubit)
    half = np.asarray(angles, dtype=np.float64)[:, None, None] / 2.0
    c, s = np.cos(half), np.sin(half)
    a0 = v[:, :, 0, :].copy()
    a1 = v[:, :, 1, :]
    v[:, :, 0, :] = c * a0 - s * a1
    v[:, :, 1, :] = s * a0 + c * a1
    return psi


@lru_cache(maxsize=None)
def cnot_chain_permutation(n_qubits: int, pairs: tuple) -> np.ndarray:
    """Gather index ``p`` such that ``psi[..., p]`` applies the CNOTs in ``pairs`` in order."""
    perm = np.arange(2**n_qubits)
    for control, target in pairs:
        _check_qubit(control, n_qubits)
        _check_qubit(target, n_qubits)
        # new[b] = old[b ^ (ctrl_bit << target)]; compose as gathers
        idx = np.arange(2**n_qubits)
        src = idx ^ (((idx >> control) & 1) << target)
        perm = perm[src]
    perm.setflags(write=False)
    return perm


def expect_z_batch(psi: np.ndarray, n_qubits: int) -> np.ndarray:
    probs = psi.real**2 + psi.imag**2
    return probs @ z_signs(n_qubits)
