"""Quantum-to-classical transfer: a frozen circuit as feature extractor.

A random 4-qubit circuit of depth 3 plays the pre-trained network.  Its <Z>
readouts are the features; the label of each input is a linear function of
those features, so a classical head of depth 1 should be enough.  Deeper
heads are trained too, for comparison.

    python3 demos/qc_feature_extractor.py
"""
import numpy as np

from qtransfer import BareCircuitSpec, TrainConfig
from qtransfer.data import gen_linear_feature_task
from qtransfer.transfer import QC, TransferPlan, run_qc

source = BareCircuitSpec(4, np.random.default_rng(0).uniform(-np.pi, np.pi, (3, 4)))
train, test, _ = gen_linear_feature_task(source, seed=0)
plan = TransferPlan(QC, (train, test), TrainConfig(iterations=1000, batch_size=7, learning_rate=0.01),
                    source=source, truncate_to=3, head={"depths": [1, 2, 3]})
report = run_qc(plan)
for row in report.rows:
    print(f"head depth {row['head_depth']}: train {row['train_accuracy']:.3f}  test {row['test_accuracy']:.3f}")
