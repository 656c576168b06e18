"""Classical-to-quantum transfer: a dressed circuit trained on frozen features.

The pre-trained classical extractor lives outside this package; what it
hands over is a file of 512-dimensional feature vectors.  Here synthetic
Gaussian blobs stand in for those features, written to and read back from
the CSV format the CLI uses.

    python3 demos/cq_feature_head.py
"""
import math
import tempfile
from pathlib import Path

from qtransfer import TrainConfig, gen_feature_blobs, load_feature_file, save_feature_file
from qtransfer.transfer import CQ, TransferPlan, run_cq

tmp = Path(tempfile.mkdtemp())
train, test = gen_feature_blobs(512, 245, 153, separation=math.sqrt(512), seed=0)
save_feature_file(train, tmp / "train.csv")
save_feature_file(test, tmp / "test.csv")
train, test = load_feature_file(tmp / "train.csv"), load_feature_file(tmp / "test.csv")

# depth 6, lr 0.0004 cut by 10x every 10 epochs, 30 epochs of batch 4
cfg = TrainConfig(epochs=30, batch_size=4, learning_rate=0.0004, decay_factor=0.1, decay_period=10,
                  keep_best=True)
report = run_cq(TransferPlan(CQ, (train, test), cfg, head={"n_qubits": 4, "depth": 6, "n_inputs": 512}))
for it in sorted(report.trace.accuracy)[::5]:
    print(f"iter {it:5d}  test acc {report.trace.accuracy[it]:.3f}")
print(f"train {report.train_accuracy:.3f}  test {report.test_accuracy:.3f}  best {report.best_test_accuracy:.3f}")
