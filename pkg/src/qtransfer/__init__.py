"""Hybrid classical-quantum neural networks on a NumPy statevector simulator.

Quick tour::

    import numpy as np
    from qtransfer import gen_spirals, make_dressed, train, TrainConfig
    train_set, test_set = gen_spirals()
    model = make_dressed(2, 4, 5, 2, np.random.default_rng(0))
    trace = train(model, train_set, TrainConfig(iterations=1000, learning_rate=0.02), test_set)
"""
from .checkpoint import load_checkpoint, save_checkpoint
from .circuit import BareCircuitSpec, embed, entangler, run_bare, run_bare_batch, run_bare_trace, variational_layer
from .classical import AdamState, DenseLayer, adam_step, batch_cross_entropy, cross_entropy_loss, dense_backward, dense_forward
from .data import Dataset, SpiralsConfig, gen_feature_blobs, gen_spirals, load_feature_file, save_feature_file
from .errors import QTransferError
from .gradients import bare_jacobians, batch_jacobians, shift_grad_input, shift_grad_weight
from .models import (ClassicalBaseline, DressedCircuit, QCModel, QQCircuit, TrainConfig, TrainTrace, accuracy,
                     forward, loss_and_grads, make_baseline, make_dressed, predict, predict_batch, train)
from .simulator import GateOp, StateVector, apply_gate, expect_z, expect_z_all, init_zero
from .transfer import TransferPlan, compose_qq, run_cq, run_qc, run_qq, truncate_quantum

__version__ = "0.1.0"
