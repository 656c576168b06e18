import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qtransfer import classical as cl
from qtransfer.errors import ArityError, LabelError, ShapeError

from ._oracles import central_diff

finite = st.floats(-50, 50, allow_nan=False)


def hand_adam(grads, lr, b1=0.9, b2=0.999, eps=1e-8, p=0.0):
    """Scalar Adam written out longhand, one float at a time."""
    m = v = 0.0
    out = []
    for t, g in enumerate(grads, start=1):
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        mh = m / (1 - b1**t)
        vh = v / (1 - b2**t)
        p = p - lr * mh / (math.sqrt(vh) + eps)
        out.append(p)
    return out


def test_uniform_logits_give_ln2():
    loss, grad = cl.cross_entropy_loss([0.0, 0.0], 1)
    assert abs(loss - math.log(2)) < 1e-9
    assert np.allclose(grad, [0.5, -0.5])


def test_extreme_logits_stay_finite():
    loss, grad = cl.cross_entropy_loss([1000.0, -1000.0], 1)
    assert np.isfinite(loss) and loss == pytest.approx(2000.0)
    assert np.all(np.isfinite(grad))


def test_bad_labels():
    with pytest.raises(LabelError):
        cl.cross_entropy_loss([0.0, 1.0], 2)
    with pytest.raises(LabelError):
        cl.batch_cross_entropy(np.zeros((2, 2)), [0, -1])
    with pytest.raises(LabelError):
        cl.batch_cross_entropy(np.zeros((2, 2)), [0])


@settings(max_examples=80, deadline=None)
@given(logits=st.lists(finite, min_size=2, max_size=6), shift=finite, data=st.data())
def test_softmax_and_shift_invariance(logits, shift, data):
    label = data.draw(st.integers(0, len(logits) - 1))
    p = cl.softmax(logits)
    assert abs(p.sum() - 1) < 1e-12
    assert np.all(p >= 0) and np.all(p <= 1)
    a, ga = cl.cross_entropy_loss(logits, label)
    b, gb = cl.cross_entropy_loss(np.array(logits) + shift, label)
    assert abs(a - b) < 1e-9
    assert np.max(np.abs(ga - gb)) < 1e-9


def test_softmax_strictly_inside_unit_interval_for_moderate_logits():
    p = cl.softmax([3.0, -2.0, 0.5])
    assert np.all((p > 0) & (p < 1))


def test_cross_entropy_gradient_fd():
    rng = np.random.default_rng(0)
    for _ in range(20):
        logits = rng.normal(size=4)
        label = int(rng.integers(4))
        _, grad = cl.cross_entropy_loss(logits, label)
        fd = central_diff(lambda z: cl.cross_entropy_loss(z, label)[0], logits, 1e-6)
        assert np.max(np.abs(fd - grad)) < 1e-6


def test_batch_cross_entropy_is_mean():
    rng = np.random.default_rng(1)
    Z = rng.normal(size=(5, 3))
    y = rng.integers(0, 3, 5)
    loss, grad = cl.batch_cross_entropy(Z, y)
    singles = [cl.cross_entropy_loss(Z[i], y[i]) for i in range(5)]
    assert loss == pytest.approx(np.mean([s[0] for s in singles]), abs=1e-14)
    assert np.allclose(grad, np.array([s[1] for s in singles]) / 5, atol=1e-15)


def test_dense_backward_fd_50_draws():
    rng = np.random.default_rng(42)
    for _ in range(50):
        n_in, n_out = rng.integers(1, 9, size=2)
        act = cl.ACTIVATIONS[int(rng.integers(len(cl.ACTIVATIONS)))]
        layer = cl.init_dense(int(n_in), int(n_out), act, rng)
        x = rng.normal(size=n_in)
        up = rng.normal(size=n_out)
        dW, db, dx = cl.dense_backward(layer, x, up)

        def f_w(w):
            return up @ cl.dense_forward(cl.DenseLayer(w.reshape(layer.W.shape), layer.b, act), x)

        def f_b(b):
            return up @ cl.dense_forward(cl.DenseLayer(layer.W, b, act), x)

        assert np.max(np.abs(central_diff(f_w, layer.W.ravel(), 1e-6) - dW.ravel())) < 1e-6
        assert np.max(np.abs(central_diff(f_b, layer.b, 1e-6) - db)) < 1e-6
        assert np.max(np.abs(central_diff(lambda z: up @ cl.dense_forward(layer, z), x, 1e-6) - dx)) < 1e-6


def test_dense_batch_sums_gradients():
    rng = np.random.default_rng(3)
    layer = cl.init_dense(3, 2, cl.TANH, rng)
    X, U = rng.normal(size=(4, 3)), rng.normal(size=(4, 2))
    dW, db, dx = cl.dense_backward(layer, X, U)
    per = [cl.dense_backward(layer, X[i], U[i]) for i in range(4)]
    assert np.allclose(dW, sum(p[0] for p in per))
    assert np.allclose(db, sum(p[1] for p in per))
    assert np.allclose(dx, np.array([p[2] for p in per]))


def test_dense_shape_errors():
    layer = cl.init_dense(3, 2, cl.TANH, np.random.default_rng(0))
    with pytest.raises(ArityError):
        cl.dense_forward(layer, np.zeros(4))
    with pytest.raises(ArityError):
        cl.dense_backward(layer, np.zeros(3), np.zeros(3))
    with pytest.raises(ShapeError):
        cl.DenseLayer(np.zeros((2, 3)), np.zeros(3))


def test_init_bounds():
    layer = cl.init_dense(16, 5, cl.IDENTITY, np.random.default_rng(0))
    assert np.all(np.abs(layer.W) <= 0.25) and np.all(np.abs(layer.b) <= 0.25)


def test_adam_matches_hand_recursion():
    grads = [0.3, -1.2, 0.05, 2.0, -0.7, 0.0, 1e-3, -4.0, 0.9, 0.25]
    state = cl.AdamState(learning_rate=0.01)
    p = {"w": np.array([0.0])}
    expected = hand_adam(grads, 0.01)
    for g, want in zip(grads, expected):
        cl.adam_step(state, p, {"w": np.array([g])})
        assert abs(p["w"][0] - want) < 1e-12
    assert state.step_count == 10


def test_adam_first_step_moves_by_lr():
    # bias correction makes |step 1| = lr * |g| / (|g| + eps)
    p = {"w": np.array([1.0, 1.0])}
    cl.adam_step(cl.AdamState(learning_rate=0.1), p, {"w": np.array([3.0, -0.5])})
    assert np.allclose(p["w"], [0.9, 1.1], atol=1e-8)


def test_adam_shape_and_key_errors():
    state = cl.AdamState(learning_rate=0.1)
    with pytest.raises(ShapeError):
        cl.adam_step(state, {"w": np.zeros(2)}, {"w": np.zeros(3)})
    with pytest.raises(ShapeError):
        cl.adam_step(state, {"w": np.zeros(2)}, {"v": np.zeros(2)})
    assert state.step_count == 0


def test_frozen_layer_untouched_by_adam():
    rng = np.random.default_rng(0)
    frozen = cl.init_dense(3, 3, cl.TANH, rng)
    frozen.frozen = True
    live = cl.init_dense(3, 2, cl.IDENTITY, rng)
    W0, b0 = frozen.W.copy(), frozen.b.copy()
    state = cl.AdamState(learning_rate=0.5)
    for _ in range(25):
        cl.adam_step(state, {"W": live.W, "b": live.b}, {"W": rng.normal(size=(2, 3)), "b": rng.normal(size=2)})
    assert np.array_equal(frozen.W, W0) and np.array_equal(frozen.b, b0)


def test_step_decay():
    assert cl.step_decay(0.0004, 0, 0.1, 10) == 0.0004
    assert cl.step_decay(0.0004, 9, 0.1, 10) == 0.0004
    assert cl.step_decay(0.0004, 10, 0.1, 10) == pytest.approx(0.00004)
    assert cl.step_decay(0.0004, 25, 0.1, 10) == pytest.approx(0.000004)
    assert cl.step_decay(0.01, 99) == 0.01
