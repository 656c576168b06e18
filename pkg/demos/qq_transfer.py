"""Quantum-to-quantum transfer vs. training from scratch.

Task A and task B are labelled by two teacher circuits that share their first
two layers.  A depth-2 circuit is first trained on task A; its layers are then
frozen and two fresh layers are appended and trained on task B.  The control
arm trains all four layers of an equally deep circuit from scratch, starting
from the same initialization protocol.

    python3 demos/qq_transfer.py [seed]
"""
import sys

from qtransfer import TrainConfig
from qtransfer.data import gen_qubit_tasks
from qtransfer.transfer import QQ, TransferPlan, run_qq

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
task_a, task_b, _ = gen_qubit_tasks(4, n_train=200, n_test=100, seed=seed)
plan = TransferPlan(
    QQ, task_b, TrainConfig(iterations=500, batch_size=8, learning_rate=0.01, seed=seed, loss_on="full"),
    truncate_to=2, head={"trainable_depth": 2, "source_depth": 2}, dataset_a=task_a,
    pretrain_config=TrainConfig(iterations=1000, batch_size=8, learning_rate=0.05, seed=seed), seed=seed)
report = run_qq(plan)

print(f"task A accuracy after pre-training: {report.pretrain.final_accuracy:.3f}")
print(f"trainable parameters: transfer {report.n_trainable_transfer}, scratch {report.n_trainable_scratch}")
print(" iter  transfer  scratch")
for it in range(0, 501, 50):
    a, b = report.loss_at(it)
    print(f"{it:5d}  {a:8.4f}  {b:7.4f}")
print(f"test accuracy: transfer {report.transfer.final_accuracy:.3f}, scratch {report.scratch.final_accuracy:.3f}")
