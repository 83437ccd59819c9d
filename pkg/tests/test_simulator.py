import numpy as np
import pytest

from symcheck.circuits import (
    UccsdParameters,
    append_spin_parity_checks,
    append_total_parity_check,
    build_uccsd_h2,
)
from symcheck.noise import NoiseModel
from symcheck.simulator import (
    Circuit,
    Gate,
    StateVector,
    apply_gate,
    cnot,
    cphase,
    cpauli,
    enumerate_branches,
    full_unitary,
    h,
    measure,
    measure_qubit,
    reset,
    reset_qubit,
    run_batch,
    run_noiseless,
    run_trajectory,
    rx,
    rz,
    swap,
    target_matrix,
    x,
)

ALL_GATES = [
    h(0), x(1), Gate("Y", (0,)), Gate("Z", (1,)), rx(0, 0.7), rz(1, -1.3),
    Gate("PHASE", (0,), angle=0.4), cnot(0, 1), cnot(1, 0), cphase(0, 1, 0.9),
    cpauli(1, 0, "Y"), cpauli(0, 1, "X"), cpauli(0, 1, "Z"), swap(0, 1),
]


def test_h_on_zero():
    out = apply_gate(StateVector.from_bits("0"), h(0))
    assert np.allclose(out.amplitudes, [2**-0.5, 2**-0.5])


def test_cnot_flips_target_when_control_set():
    out = apply_gate(StateVector.from_bits("01"), cnot(0, 1))
    assert np.allclose(out.amplitudes, StateVector.from_bits("11").amplitudes)


def test_cnot_idle_when_control_clear():
    out = apply_gate(StateVector.from_bits("10"), cnot(0, 1))
    assert np.allclose(out.amplitudes, StateVector.from_bits("10").amplitudes)


def test_rz_convention():
    plus = apply_gate(StateVector.from_bits("0"), h(0))
    out = apply_gate(plus, rz(0, 0.5))
    assert np.allclose(out.amplitudes, np.array([np.exp(-0.25j), np.exp(0.25j)]) / np.sqrt(2))


@pytest.mark.parametrize("gate", ALL_GATES, ids=lambda g: g.kind)
@pytest.mark.parametrize("eps", [0.99, 1.0, 1.01])
def test_unitarity(gate, eps):
    u = full_unitary(gate, 2, eps)
    assert np.abs(u.conj().T @ u - np.eye(4)).max() < 1e-12


@pytest.mark.parametrize("gate", ALL_GATES, ids=lambda g: g.kind)
def test_kernel_matches_dense_unitary(gate, rng):
    n = 3
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi /= np.linalg.norm(psi)
    out = apply_gate(StateVector(psi, n), gate)
    assert np.allclose(out.amplitudes, full_unitary(gate, n) @ psi, atol=1e-12)


def test_epsilon_only_touches_scalable_gates():
    assert np.allclose(target_matrix(x(0), 0.9), target_matrix(x(0), 1.0))
    assert not np.allclose(target_matrix(h(0), 0.9), target_matrix(h(0), 1.0))
    assert np.allclose(target_matrix(h(0, epsilon_scalable=False), 0.9), target_matrix(h(0)))


def test_distorted_cnot_is_continuous_at_one():
    m = target_matrix(cnot(0, 1), np.array([1.0 - 1e-9]))[0]
    assert np.allclose(m, [[0, 1], [1, 0]], atol=1e-8)


def test_gate_validation():
    with pytest.raises(ValueError):
        cnot(1, 1)
    with pytest.raises(ValueError):
        rx(0, float("nan"))
    with pytest.raises(ValueError):
        Gate("MEASURE", (0,))
    with pytest.raises(ValueError):
        Gate("FOO", (0,))


def test_circuit_validation():
    with pytest.raises(ValueError):
        Circuit(2, (cnot(0, 2),))
    with pytest.raises(ValueError):
        Circuit(2, (measure(0, "a"), measure(1, "a")))
    with pytest.raises(ValueError):
        Circuit(0)


def test_apply_gate_out_of_range():
    with pytest.raises(IndexError):
        apply_gate(StateVector.from_bits("00"), h(3))


def test_measure_and_reset(rng):
    plus = apply_gate(StateVector.from_bits("0"), h(0))
    bit, post = measure_qubit(plus, 0, rng)
    assert post.amplitudes[bit] == pytest.approx(1)
    assert abs(post.norm - 1) < 1e-10
    after = reset_qubit(StateVector.from_bits("1"), 0, rng)
    assert after.amplitudes[0] == pytest.approx(1)


def test_total_parity_on_identity_ansatz_reads_zero(rng):
    c = append_total_parity_check(Circuit(4, (), register=4, initial=0b0101))
    for _ in range(5):
        assert run_trajectory(c, NoiseModel(), rng)["total_parity"] == 0


def test_spin_parity_slots_on_hartree_fock(rng):
    c = append_spin_parity_checks(Circuit(4, (), register=4, initial=0b0101))
    rec = run_trajectory(c, NoiseModel(), rng)
    assert (rec["up_parity"], rec["down_parity"]) == (1, 1)


def test_forced_fault_flips_total_parity():
    # X on the control of the first ansatz CNOT, right after that gate
    base = build_uccsd_h2(UccsdParameters(0.1, 0.2, 0.3))
    c = append_total_parity_check(base)
    first = next(i for i, g in enumerate(c.gates) if g.kind == "CNOT")
    clean = enumerate_branches(c)
    faulty = enumerate_branches(c, inject={first: ("X", "I")})
    assert {b.bits["total_parity"] for b in clean} == {0}
    assert {b.bits["total_parity"] for b in faulty} == {1}


def test_every_slot_filled_once_per_trajectory(rng):
    c = append_spin_parity_checks(build_uccsd_h2(UccsdParameters(0.1, 0.0, 0.2)))
    res = run_batch(c, NoiseModel(p1=0.01, p2=0.1, readout_flip=0.05), rng, 50)
    assert res.bits.shape == (50, 2) and set(np.unique(res.bits)) <= {0, 1}


def test_seed_determinism():
    c = append_total_parity_check(build_uccsd_h2(UccsdParameters(0.1, 0.2, 0.3)))
    noise = NoiseModel(p1=0.01, p2=0.1, delta_max=0.05, correlated=True, readout_flip=0.01)
    a = run_batch(c, noise, np.random.default_rng(7), 200, log_faults=True)
    b = run_batch(c, noise, np.random.default_rng(7), 200, log_faults=True)
    assert np.array_equal(a.bits, b.bits) and a.fault_log == b.fault_log


def test_exempt_gates_never_fault(rng):
    c = Circuit(2, (h(0, noise_exempt=True), cnot(0, 1), h(1, noise_exempt=True), measure(0, "m")))
    res = run_batch(c, NoiseModel(p1=1.0, p2=1.0), rng, 200, log_faults=True)
    faulted = {ev.gate_index for log in res.fault_log for ev in log}
    assert faulted == {1}
    assert all(len(log) == 1 for log in res.fault_log)


def test_identity_pair_never_logged(rng):
    c = Circuit(2, (cnot(0, 1),) * 20)
    res = run_batch(c, NoiseModel(p2=1.0), rng, 100, log_faults=True)
    assert all(ev.paulis != ("I", "I") for log in res.fault_log for ev in log)


def test_batch_matches_branch_probabilities():
    c = Circuit(2, (h(0), cnot(0, 1), rx(1, 0.6), measure(0, "a"), reset(0), measure(1, "b")))
    branches = enumerate_branches(c)
    exact = {}
    for b in branches:
        key = (b.bits["a"], b.bits["b"])
        exact[key] = exact.get(key, 0) + b.probability
    res = run_batch(c, NoiseModel(), np.random.default_rng(3), 40000)
    for key, p in exact.items():
        freq = np.mean((res.column("a") == key[0]) & (res.column("b") == key[1]))
        assert abs(freq - p) < 4 * np.sqrt(p * (1 - p) / 40000) + 1e-12


def test_run_noiseless_rejects_measurement():
    with pytest.raises(ValueError):
        run_noiseless(Circuit(1, (measure(0, "m"),)))


def test_value_and_acceptance_take_numpy_bits():
    c = Circuit(1, (measure(0, "m"),), checks=(), observable=("m",))
    assert c.value({"m": np.uint8(1)}) == -1
    assert c.value({"m": np.uint8(0)}) == 1
