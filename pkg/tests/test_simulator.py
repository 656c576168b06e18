import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qtransfer import simulator as sim
from qtransfer.errors import QubitIndexError, SizeError

from ._oracles import H, cnot as dense_cnot, random_state, ry, single


def _all_gates(n, rng):
    gates = []
    for k in range(n):
        gates.append((sim.hadamard(k), single(H, k, n)))
        a = rng.uniform(-2 * np.pi, 2 * np.pi)
        gates.append((sim.rot_y(k, a), single(ry(a), k, n)))
        for c in range(n):
            if c != k:
                gates.append((sim.cnot(c, k), dense_cnot(c, k, n)))
    return gates


def test_init_zero():
    s = sim.init_zero(3)
    assert s.amplitudes[0] == 1 and np.count_nonzero(s.amplitudes) == 1
    assert np.allclose(sim.expect_z_all(s), 1.0)


@pytest.mark.parametrize("n", [0, -1, sim.MAX_QUBITS + 1])
def test_init_zero_rejects_bad_size(n):
    with pytest.raises(SizeError):
        sim.init_zero(n)


def test_statevector_shape_checked():
    with pytest.raises(SizeError):
        sim.StateVector(2, np.ones(3))


def test_statevector_is_read_only():
    s = sim.init_zero(2)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0.0


@pytest.mark.parametrize("gate", [sim.hadamard(2), sim.rot_y(-1, 0.3), sim.cnot(0, 5)])
def test_bad_qubit_index(gate):
    with pytest.raises(QubitIndexError):
        sim.apply_gate(sim.init_zero(2), gate)


def test_gateop_validation():
    with pytest.raises(ValueError):
        sim.GateOp("CNOT", 1)
    with pytest.raises(ValueError):
        sim.cnot(1, 1)
    with pytest.raises(ValueError):
        sim.GateOp("X", 0)


def test_little_endian_ordering():
    # flipping qubit 0 of |00> must land on basis index 1, qubit 1 on index 2
    s = sim.apply_gate(sim.init_zero(2), sim.rot_y(0, np.pi))
    assert abs(s.amplitudes[1]) == pytest.approx(1.0)
    s = sim.apply_gate(sim.init_zero(2), sim.rot_y(1, np.pi))
    assert abs(s.amplitudes[2]) == pytest.approx(1.0)
    assert sim.expect_z(s, 1) == pytest.approx(-1.0)
    assert sim.expect_z(s, 0) == pytest.approx(1.0)


def test_hadamard_then_expectation():
    s = sim.apply_gate(sim.init_zero(1), sim.hadamard(0))
    assert sim.expect_z(s, 0) == pytest.approx(0.0, abs=1e-15)


def test_cnot_on_10_gives_11():
    s = sim.apply_gate(sim.init_zero(2), sim.rot_y(0, np.pi))  # |q1 q0> = |01>
    s = sim.apply_gate(s, sim.cnot(0, 1))
    assert abs(s.amplitudes[3]) == pytest.approx(1.0)


def test_apply_gate_is_pure():
    s = sim.init_zero(2)
    before = s.amplitudes.copy()
    sim.apply_gate(s, sim.hadamard(0))
    assert np.array_equal(s.amplitudes, before)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_dense_oracle(n):
    rng = np.random.default_rng(n)
    for gate, U in _all_gates(n, rng):
        for _ in range(10):
            psi = random_state(n, rng)
            got = sim.apply_gate(sim.StateVector(n, psi), gate).amplitudes
            assert np.max(np.abs(got - U @ psi)) < 1e-10


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 5), seed=st.integers(0, 2**31), angle=st.floats(-10, 10))
def test_norm_and_involutions(n, seed, angle):
    rng = np.random.default_rng(seed)
    psi = sim.StateVector(n, random_state(n, rng))
    k = int(rng.integers(n))
    for gate in (sim.hadamard(k), sim.rot_y(k, angle)):
        assert abs(sim.apply_gate(psi, gate).norm() - 1) < 1e-10
    twice = sim.apply_gate(sim.apply_gate(psi, sim.hadamard(k)), sim.hadamard(k))
    assert np.max(np.abs(twice.amplitudes - psi.amplitudes)) < 1e-10
    back = sim.apply_gate(sim.apply_gate(psi, sim.rot_y(k, angle)), sim.rot_y(k, -angle))
    assert np.max(np.abs(back.amplitudes - psi.amplitudes)) < 1e-10
    if n > 1:
        g = sim.cnot(k, (k + 1) % n)
        twice = sim.apply_gate(sim.apply_gate(psi, g), g)
        assert np.max(np.abs(twice.amplitudes - psi.amplitudes)) < 1e-10
    z = sim.expect_z_all(psi)
    assert np.all(np.abs(z) <= 1 + 1e-12)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 5), seed=st.integers(0, 2**31))
def test_locality_on_product_states(n, seed):
    rng = np.random.default_rng(seed)
    s = sim.init_zero(n)
    for k in range(n):
        s = sim.apply_gate(s, sim.rot_y(k, rng.uniform(-np.pi, np.pi)))
    before = sim.expect_z_all(s)
    k = int(rng.integers(n))
    after = sim.expect_z_all(sim.apply_gate(s, sim.rot_y(k, rng.uniform(-np.pi, np.pi))))
    others = [q for q in range(n) if q != k]
    assert np.max(np.abs(after[others] - before[others])) < 1e-10


def test_batched_kernels_match_single_route():
    rng = np.random.default_rng(7)
    n, B = 3, 5
    psi = np.stack([random_state(n, rng).real for _ in range(B)])
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    angles = rng.uniform(-3, 3, size=B)
    out = sim.rot_y_batch(psi.copy(), 1, angles)
    for b in range(B):
        ref = sim.apply_gate(sim.StateVector(n, psi[b]), sim.rot_y(1, angles[b])).amplitudes
        assert np.allclose(out[b], ref.real, atol=1e-14)
    perm = sim.cnot_chain_permutation(n, ((0, 1), (1, 2)))
    ref = sim.StateVector(n, psi[0])
    for c, t in ((0, 1), (1, 2)):
        ref = sim.apply_gate(ref, sim.cnot(c, t))
    assert np.allclose(psi[0][perm], ref.amplitudes.real, atol=1e-15)
