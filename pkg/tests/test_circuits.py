import math

import numpy as np
import pytest
from scipy.linalg import expm

from symcheck.analysis import determinant, superposition
from symcheck.circuits import (
    CheckKind,
    UccsdParameters,
    append_local_spin_parity_checks,
    append_number_check,
    append_number_check_bit,
    append_spin_parity_checks,
    append_total_parity_check,
    build_hadamard_test,
    build_uccsd_h2,
    number_check_bits,
    term_circuit,
)
from symcheck.pauli import PauliString, exact_expectation, jw_ladder
from symcheck.simulator import Circuit, StateVector, enumerate_branches, h, run_noiseless


def generator(pairs):
    """Anti-Hermitian T - T^dagger for a list of (coefficient, creation, annihilation) strings."""
    n = 4
    a = [jw_ladder(p, False, n).matrix() for p in range(n)]
    ad = [jw_ladder(p, True, n).matrix() for p in range(n)]
    t = np.zeros((16, 16), dtype=complex)
    for coef, cre, ann in pairs:
        op = np.eye(16, dtype=complex)
        for p in cre:
            op = op @ ad[p]
        for p in ann:
            op = op @ a[p]
        t += coef * op
    return t - t.conj().T


def test_gate_census():
    assert build_uccsd_h2(UccsdParameters(0.1, 0.2, 0.3)).census() == (92, 56)
    base = build_uccsd_h2(UccsdParameters())
    assert append_local_spin_parity_checks(base).census()[1] - base.census()[1] == 8


def test_ansatz_matches_ladder_exponentials():
    # singles exp(t10(a1+ a0 - h.c.) + t32(...)) after doubles exp(t3120(a3+ a1+ a2 a0 - h.c.))
    t10, t32, t3120 = 0.13, -0.21, 0.37
    psi = run_noiseless(build_uccsd_h2(UccsdParameters(t10, t32, t3120)))
    s = generator([(t10, (1,), (0,)), (t32, (3,), (2,))])
    d = generator([(t3120, (3, 1), (2, 0))])
    ref = expm(s) @ expm(d) @ StateVector.basis(0b0101, 4).amplitudes
    assert abs(abs(np.vdot(ref, psi.amplitudes)) - 1) < 1e-12


def test_zero_parameters_leave_hartree_fock():
    psi = run_noiseless(build_uccsd_h2(UccsdParameters()))
    assert abs(psi.amplitudes[0b0101]) == pytest.approx(1)


@pytest.mark.parametrize("initial", [0b0101, 0b0110, 0b1001, 0b0011, 0b0001, 0b1111])
def test_sector_conservation(initial):
    psi = run_noiseless(build_uccsd_h2(UccsdParameters(0.4, -0.3, 0.7), initial=initial))
    weight = 0.0
    for idx, amp in enumerate(psi.amplitudes):
        if bin(idx & 0b0011).count("1") == bin(initial & 0b0011).count("1") and \
                bin(idx & 0b1100).count("1") == bin(initial & 0b1100).count("1"):
            weight += abs(amp) ** 2
    assert weight == pytest.approx(1, abs=1e-10)


def _register_state(branch, register):
    # ancillas are the high qubits, so each row is one ancilla configuration
    rows = branch.state.amplitudes.reshape(-1, 2**register)
    return rows[np.argmax(np.linalg.norm(rows, axis=1))]


@pytest.mark.parametrize("builder", [
    append_total_parity_check,
    append_spin_parity_checks,
    append_local_spin_parity_checks,
    append_number_check,
])
def test_check_transparency(builder):
    ansatz = build_uccsd_h2(UccsdParameters(0.3, -0.2, 0.5))
    psi = run_noiseless(ansatz)
    c = builder(Circuit(4, (), register=4, initial=0b0101))
    start = psi
    for _ in c.ancillas:
        start = start.tensor_ancilla()
    branches = enumerate_branches(c, initial=start)
    assert sum(b.probability for b in branches if c.accepted(b.bits)) == pytest.approx(1, abs=1e-10)
    for b in branches:
        reg = _register_state(b, 4)
        assert abs(np.vdot(reg, psi.amplitudes)) ** 2 == pytest.approx(1, abs=1e-10)


def test_hadamard_test_mean_equals_expectation():
    ansatz = build_uccsd_h2(UccsdParameters(0.3, -0.2, 0.5))
    psi = run_noiseless(ansatz)
    for label in ("X0 X1 Y2 Y3", "Z0 Z2", "Z1"):
        term = PauliString.parse(label, 4)
        c = build_hadamard_test(ansatz, term, with_parity_check=True)
        branches = enumerate_branches(c)
        mean = sum(b.probability * c.value(b.bits) for b in branches)
        assert mean == pytest.approx(exact_expectation(psi, term), abs=1e-10)
        assert sum(b.probability for b in branches if c.accepted(b.bits)) == pytest.approx(1)


def test_hadamard_test_rejects_odd_term():
    with pytest.raises(ValueError):
        build_hadamard_test(build_uccsd_h2(UccsdParameters()), PauliString.parse("X0 Z1", 4))


@pytest.mark.parametrize("occupied", [(), (0,), (0, 2), (1, 2, 3), (0, 1, 2, 3)])
def test_number_check_completeness(occupied):
    initial = sum(1 << q for q in occupied)
    c = append_number_check(Circuit(4, (), register=4, initial=initial))
    branches = enumerate_branches(c)
    assert len(branches) == 1
    bits = branches[0].bits
    n = sum(bits[f"N_bit_{m}"] << (m - 1) for m in range(1, number_check_bits(4) + 1))
    assert n == len(occupied) and c.accepted(bits)


def test_number_check_detects_wrong_count():
    c = append_number_check(Circuit(4, (), register=4, initial=0b0101))
    start = StateVector.basis(0b0111, 5)
    branches = enumerate_branches(c, initial=start)
    assert sum(b.probability for b in branches if c.accepted(b.bits)) == pytest.approx(0)


def test_number_bit_index_validated():
    with pytest.raises(ValueError):
        append_number_check_bit(Circuit(4, (), register=4), 0)
    with pytest.raises(ValueError):
        append_number_check_bit(Circuit(4, (), register=4), 3, prior_bits=(1,))


def test_local_check_needs_four_qubits():
    with pytest.raises(ValueError):
        append_local_spin_parity_checks(Circuit(6, (), register=6))


def test_term_values():
    hf = Circuit(4, (), register=4, initial=0b0101)
    c = term_circuit(hf, PauliString.parse("Z0 Z1", 4), CheckKind("none"))
    (branch,) = enumerate_branches(c)
    assert c.value(branch.bits) == -1
    ident = term_circuit(hf, PauliString.identity(4), CheckKind("none"))
    assert ident.gates == () and ident.value({}) == 1


def test_x_term_on_plus_state():
    plus = Circuit(1, (), register=1)
    c = term_circuit(plus.extend([h(0)]), PauliString.parse("X0", 1), CheckKind("none"))
    assert {c.value(b.bits) for b in enumerate_branches(c)} == {1}


def test_unfiltered_term_circuit_has_no_check():
    ansatz = build_uccsd_h2(UccsdParameters())
    term = PauliString.parse("Z0", 4)
    for name in ("total-parity", "local-spin-parity", "number"):
        assert term_circuit(ansatz, term, CheckKind(name), filtered=False).qubit_count == 4


def test_unknown_check_rejected():
    with pytest.raises(ValueError):
        CheckKind("magic")


def test_superposition_helper_normalised():
    psi = superposition(["001011", "100101"])
    assert psi.norm == pytest.approx(1) and psi.qubit_count == 6
    assert determinant((0, 2), 4).amplitudes[0b0101] == 1
    assert math.isclose(abs(psi.amplitudes[0b001011]) ** 2, 0.5)
