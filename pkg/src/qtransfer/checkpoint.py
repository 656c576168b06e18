"""Versioned JSON checkpoints.

Layout::

    {
      "format_version": 1,
      "model_kind": "dressed" | "baseline" | "bare_qq" | "qc",
      "architecture": {...},          # arities, depths, activations
      "parameters": {name: nested lists},
      "frozen_masks": {...},
      "optimizer_state": null | {...},
      "rng_seed": int
    }

Floats are written with Python's shortest round-trip repr, so a reloaded
model reproduces forward outputs bit for bit.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import models as m
from .circuit import BareCircuitSpec
from .classical import AdamState, DenseLayer
from .errors import CheckpointParseError, CheckpointShapeError, CheckpointVersionError

FORMAT_VERSION = 1
KINDS = ("dressed", "baseline", "bare_qq", "qc")


def _layers_arch(layers):
    return {"sizes": [layers[0].n_in] + [layer.n_out for layer in layers],
            "activations": [layer.activation for layer in layers]}


def _tolist(params):
    return {k: np.asarray(v).tolist() for k, v in params.items()}


def model_to_dict(model, optimizer: AdamState | None = None, rng_seed: int = 0) -> dict:
    if isinstance(model, m.DressedCircuit):
        kind = "dressed"
        arch = {"n_inputs": model.n_inputs, "n_qubits": model.bare.n_qubits, "depth": model.bare.depth,
                "n_outputs": model.n_outputs, "pre_activation": model.pre.activation,
                "post_activation": model.post.activation}
        frozen = {"pre": model.pre.frozen, "quantum": model.quantum_frozen, "post": model.post.frozen}
    elif isinstance(model, m.ClassicalBaseline):
        kind = "baseline"
        arch = _layers_arch(model.layers)
        frozen = {"layers": [layer.frozen for layer in model.layers]}
    elif isinstance(model, m.QQCircuit):
        kind = "bare_qq"
        arch = {"n_qubits": model.bare.n_qubits, "depth": model.bare.depth,
                "n_classes": model.n_classes, "readout_scale": model.readout_scale}
        frozen = {"rows": model.frozen_mask.tolist()}
    elif isinstance(model, m.QCModel):
        kind = "qc"
        arch = {"n_qubits": model.extractor.n_qubits, "extractor_depth": model.extractor.depth,
                "head": _layers_arch(model.head.layers)}
        frozen = {"extractor": True, "head": [layer.frozen for layer in model.head.layers]}
    else:
        raise TypeError(f"cannot checkpoint {type(model).__name__}")

    opt = None
    if optimizer is not None:
        opt = {"step_count": optimizer.step_count, "learning_rate": optimizer.learning_rate,
               "beta1": optimizer.beta1, "beta2": optimizer.beta2, "epsilon": optimizer.epsilon,
               "m": _tolist(optimizer.m), "v": _tolist(optimizer.v)}
    return {"format_version": FORMAT_VERSION, "model_kind": kind, "architecture": arch,
            "parameters": _tolist(model.params()), "frozen_masks": frozen,
            "optimizer_state": opt, "rng_seed": int(rng_seed)}


def save_checkpoint(model, path, optimizer: AdamState | None = None, rng_seed: int = 0):
    doc = model_to_dict(model, optimizer, rng_seed)
    Path(path).write_text(json.dumps(doc, indent=1, allow_nan=False) + "\n", encoding="utf-8")


def _array(params, name, shape):
    if name not in params:
        raise CheckpointParseError(f"missing parameter {name!r}")
    try:
        arr = np.array(params[name], dtype=np.float64)
    except (TypeError, ValueError):
        raise CheckpointShapeError(f"parameter {name!r} is not a rectangular numeric array") from None
    if arr.shape != tuple(shape):
        raise CheckpointShapeError(f"parameter {name!r} has shape {arr.shape}, architecture needs {tuple(shape)}")
    return arr


def _build_layers(params, arch, frozen, prefix):
    sizes, acts = arch["sizes"], arch["activations"]
    if len(acts) != len(sizes) - 1 or len(frozen) != len(acts):
        raise CheckpointShapeError("layer sizes, activations and frozen flags disagree")
    layers = []
    for i, act in enumerate(acts):
        W = _array(params, f"{prefix}layers.{i}.W", (sizes[i + 1], sizes[i]))
        b = _array(params, f"{prefix}layers.{i}.b", (sizes[i + 1],))
        layers.append(DenseLayer(W, b, act, bool(frozen[i])))
    return m.ClassicalBaseline(layers)


def model_from_dict(doc: dict):
    if not isinstance(doc, dict):
        raise CheckpointParseError("checkpoint root must be a JSON object")
    if "format_version" not in doc:
        raise CheckpointParseError("missing format_version")
    if doc["format_version"] != FORMAT_VERSION:
        raise CheckpointVersionError(
            f"unsupported checkpoint format_version {doc['format_version']!r} (expected {FORMAT_VERSION})")
    try:
        kind, arch, params, frozen = (doc["model_kind"], doc["architecture"], doc["parameters"],
                                      doc["frozen_masks"])
    except KeyError as exc:
        raise CheckpointParseError(f"missing field {exc.args[0]!r}") from None
    try:
        if kind == "dressed":
            n_in, n_q, depth, n_out = arch["n_inputs"], arch["n_qubits"], arch["depth"], arch["n_outputs"]
            pre = DenseLayer(_array(params, "pre.W", (n_q, n_in)), _array(params, "pre.b", (n_q,)),
                             arch["pre_activation"], bool(frozen["pre"]))
            post = DenseLayer(_array(params, "post.W", (n_out, n_q)), _array(params, "post.b", (n_out,)),
                              arch["post_activation"], bool(frozen["post"]))
            bare = BareCircuitSpec(n_q, _array(params, "bare.weights", (depth, n_q)))
            return m.DressedCircuit(pre, bare, post, bool(frozen["quantum"]))
        if kind == "baseline":
            return _build_layers(params, arch, frozen["layers"], "")
        if kind == "bare_qq":
            n_q, depth = arch["n_qubits"], arch["depth"]
            rows = [bool(r) for r in frozen["rows"]]
            n_frozen = sum(rows)
            if len(rows) != depth or rows != [True] * n_frozen + [False] * (depth - n_frozen):
                raise CheckpointShapeError("frozen rows must be a prefix mask of length depth")
            bare = BareCircuitSpec(n_q, _array(params, "bare.weights", (depth, n_q)))
            return m.QQCircuit(bare, n_frozen, arch["n_classes"], float(arch["readout_scale"]))
        if kind == "qc":
            n_q = arch["n_qubits"]
            extractor = BareCircuitSpec(n_q, _array(params, "extractor.weights", (arch["extractor_depth"], n_q)))
            head = _build_layers(params, arch["head"], frozen["head"], "head.")
            return m.QCModel(extractor, head)
    except KeyError as exc:
        raise CheckpointParseError(f"missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, CheckpointShapeError):
            raise
        raise CheckpointShapeError(str(exc)) from None
    raise CheckpointParseError(f"unknown model_kind {kind!r}")


def optimizer_from_dict(doc: dict) -> AdamState | None:
    opt = doc.get("optimizer_state")
    if opt is None:
        return None
    return AdamState(learning_rate=opt["learning_rate"], beta1=opt["beta1"], beta2=opt["beta2"],
                     epsilon=opt["epsilon"], step_count=opt["step_count"],
                     m={k: np.array(v) for k, v in opt["m"].items()},
                     v={k: np.array(v) for k, v in opt["v"].items()})


def read_checkpoint(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CheckpointParseError(f"cannot read checkpoint {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CheckpointParseError(f"{path}: invalid JSON ({exc})") from None


def load_checkpoint(path):
    return model_from_dict(read_checkpoint(path))
