from fractions import Fraction

import numpy as np
import pytest

from symcheck.analysis import (
    DensityMatrix,
    bitflip_pair_detection_rate,
    check_acceptance,
    depolarizing_detection_bound,
    determinant,
    enumerate_check_internal_faults,
    enumerate_fault_detection,
    evolve_density_exact,
    number_check_outcomes,
    register_expectation,
    sector_of,
    spin_pair_detectable_fraction,
    superposition,
    verify_variational_bound,
)
from symcheck.circuits import (
    CheckKind,
    UccsdParameters,
    append_total_parity_check,
    build_uccsd_h2,
    term_circuit,
)
from symcheck.noise import NoiseModel
from symcheck.pauli import PauliString
from symcheck.simulator import Circuit, StateVector, cnot, h, measure, run_noiseless

HF = determinant((0, 2), 4)
CAVEAT = superposition(["001011", "100101"])


def test_total_parity_always_detects_eight_of_fifteen():
    rep = enumerate_fault_detection(HF, "total-parity")
    per_pair = rep.subset(lambda r: r.qubits == (0, 1))
    assert per_pair.total == 15 and per_pair.fraction == Fraction(8, 15)
    assert rep.fraction == Fraction(8, 15)


def test_spin_parity_depolarising_and_bitflips():
    assert enumerate_fault_detection(HF, "spin-parity").fraction == Fraction(32, 45)
    assert enumerate_fault_detection(HF, "local-spin-parity").fraction == Fraction(32, 45)
    flips = enumerate_fault_detection(HF, "spin-parity", faults="bitflip")
    assert flips.fraction == Fraction(2, 3) == spin_pair_detectable_fraction(4)


def test_number_check_on_same_spin_bitflips():
    # M = 8, N = 4: flips within one spin block change N only if both sites agree
    state = determinant((0, 1, 4, 5), 8)
    rep = enumerate_fault_detection(state, CheckKind("number", bits=4), faults="bitflip", pairs="same-spin")
    assert rep.fraction == bitflip_pair_detection_rate(4, 8) == Fraction(1, 3)


@pytest.mark.parametrize("m", [4, 6, 8])
@pytest.mark.parametrize("n_frac", [0, 0.5, 1])
def test_closed_form_matches_enumeration(m, n_frac):
    n = int(round(m * n_frac / 2)) * 2
    occupied = list(range(n // 2)) + list(range(m // 2, m // 2 + n // 2))
    state = determinant(occupied, m)
    rep = enumerate_fault_detection(state, CheckKind("number", bits=m.bit_length()), faults="bitflip", pairs="same-spin")
    assert rep.fraction == bitflip_pair_detection_rate(n, m)
    spin = enumerate_fault_detection(state, "spin-parity", faults="bitflip")
    assert spin.fraction == spin_pair_detectable_fraction(m)


def test_closed_form_limits():
    assert spin_pair_detectable_fraction(2) == 1
    assert abs(spin_pair_detectable_fraction(2000) - Fraction(1, 2)) < Fraction(1, 1000)
    assert bitflip_pair_detection_rate(2, 4) == 0
    assert bitflip_pair_detection_rate(2, 2000) > Fraction(99, 100)
    assert depolarizing_detection_bound(4, 2) == Fraction(32, 45)
    assert abs(depolarizing_detection_bound(4000, 2) - Fraction(12, 15)) < Fraction(1, 1000)


def test_closed_form_validation():
    with pytest.raises(ValueError):
        bitflip_pair_detection_rate(3, 4)
    with pytest.raises(ValueError):
        spin_pair_detectable_fraction(5)


def test_check_internal_fault_average():
    rep = enumerate_check_internal_faults(HF)
    total = rep.subset(lambda r: r.check == "total-parity")
    spin = rep.subset(lambda r: r.check == "spin-parity")
    assert total.fraction == Fraction(12, 15)
    assert spin.fraction == Fraction(8, 15)
    assert (total.fraction + spin.fraction) / 2 == Fraction(10, 15)


def test_number_check_on_three_electrons():
    assert number_check_outcomes(determinant((0, 1, 3), 6), n_bits=2) == {(1, 1): pytest.approx(1)}


def test_caveat_state_after_double_flip():
    faulty = superposition(["001000", "100110"])
    ref = int("001011", 2)
    assert check_acceptance(faulty, "spin-parity", reference=ref) == pytest.approx(1)
    out = number_check_outcomes(faulty, n_bits=2, reference=ref)
    assert out[(1, 0)] == pytest.approx(0.5) and out[(1, 1)] == pytest.approx(0.5)


def test_caveat_state_unflipped_is_physical():
    assert sector_of(CAVEAT) == (2, 1)
    assert check_acceptance(CAVEAT, "spin-parity") == pytest.approx(1)


def test_sector_of_rejects_mixed():
    with pytest.raises(ValueError):
        sector_of(superposition(["0101", "0111"]))


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(2), 1)
    with pytest.raises(ValueError):
        DensityMatrix(np.array([[0.5, 1], [0, 0.5]]), 1)


def test_partial_trace_of_product_state():
    psi = np.kron([0, 1], [1, 1]) / np.sqrt(2)  # qubit 1 = |1>, qubit 0 = |+>
    rho = DensityMatrix.pure(StateVector(psi, 2))
    assert np.allclose(rho.partial_trace([1]).matrix, [[0, 0], [0, 1]])
    assert np.allclose(rho.partial_trace([0]).matrix, 0.5 * np.ones((2, 2)))


def test_noiseless_density_matches_state_vector():
    ansatz = build_uccsd_h2(UccsdParameters(0.2, -0.1, 0.3))
    psi = run_noiseless(ansatz)
    out = evolve_density_exact(ansatz)
    assert out.density().trace_distance(DensityMatrix.pure(psi)) < 1e-12


def test_density_evolution_stays_physical():
    c = append_total_parity_check(build_uccsd_h2(UccsdParameters(0.2, -0.1, 0.3)))
    out = evolve_density_exact(c, NoiseModel.from_p2(0.1))
    rho = out.density()
    assert rho.eigenvalues().min() > -1e-10
    assert sum(out.record_probabilities().values()) == pytest.approx(1, abs=1e-12)
    assert 0 < out.acceptance(c) < 1


def test_clean_part_weight_is_no_fault_probability():
    c = Circuit(2, (h(0), cnot(0, 1), cnot(0, 1), measure(0, "m")))
    out = evolve_density_exact(c, NoiseModel(p1=0.1, p2=0.2))
    clean = sum(b.clean_probability for b in out.branches.values())
    assert clean == pytest.approx(0.9 * 0.8 * 0.8)


def test_register_expectation_matches_term_circuit():
    ansatz = build_uccsd_h2(UccsdParameters(0.2, -0.1, 0.3))
    term = PauliString.parse("X0 X1 Y2 Y3", 4)
    rho = evolve_density_exact(ansatz).density().matrix
    c = term_circuit(ansatz, term, CheckKind("none"))
    out = evolve_density_exact(c)
    mean = sum(b.probability * c.value(out.bits(k)) for k, b in out.branches.items())
    assert register_expectation(rho, 4, term) == pytest.approx(mean, abs=1e-12)


def test_density_cap():
    with pytest.raises(ValueError):
        evolve_density_exact(Circuit(9))


def test_variational_detector():
    ok = verify_variational_bound([(-1.13, 0.01), (-1.10, 0.02)], -1.137)
    assert ok.holds
    bad = verify_variational_bound([(-1.13, 0.01), (-1.20, 0.01)], -1.137)
    assert bad.violations == (1,)
