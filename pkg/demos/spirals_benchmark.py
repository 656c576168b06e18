"""Dressed quantum circuit vs. a small classical network on two spirals.

Both models get the same budget: 1000 Adam steps on mini-batches of 10
points drawn from 2000 training samples.  The dressed circuit is a tanh layer
2 -> 4, a 4-qubit circuit of depth 5 and a linear layer 4 -> 2; the classical
net is 2 -> 4 -> 4 -> 2 with tanh hidden units.

    python3 demos/spirals_benchmark.py [seed]
"""
import sys

import numpy as np

from qtransfer import TrainConfig, accuracy, gen_spirals, make_baseline, make_dressed, train

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
train_set, test_set = gen_spirals(seed=seed)
cfg = TrainConfig(iterations=1000, batch_size=10, learning_rate=0.02, eval_every=100, seed=seed)

dressed = make_dressed(2, 4, 5, 2, np.random.default_rng(seed))
trace = train(dressed, train_set, cfg, test_set)
for it in sorted(trace.accuracy):
    print(f"iter {it:4d}  loss {trace.losses[it]:.4f}  test acc {trace.accuracy[it]:.3f}")

classical = make_baseline([2, 4, 4, 2], np.random.default_rng(seed))
train(classical, train_set, cfg, test_set)

print(f"\ndressed circuit : {accuracy(dressed, test_set):.3f}")
print(f"classical net   : {accuracy(classical, test_set):.3f}")

# a coarse text rendering of the learned decision regions
axis = np.linspace(-1.1, 1.1, 23)
grid = np.array([[x, y] for y in axis[::-1] for x in axis])
labels = np.argmax(dressed.logits(grid), axis=1).reshape(len(axis), len(axis))
print("\n".join("".join(".#"[c] for c in row) for row in labels))
