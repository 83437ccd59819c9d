"""Circuit builders: the H2 UCCSD ansatz and the symmetry-check gadgets."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .pauli import PauliString
from .simulator import (
    Circuit,
    Gate,
    ParityCheck,
    cnot,
    cpauli,
    cphase,
    h,
    measure,
    phase,
    reset,
    rx,
    rz,
)

HF_STATE = 0b0101
H2_QUBITS = 4

# (basis per qubit 0..3, sign of the term in the generator); "X" -> H, "Y" -> Rx(pi/2)
DOUBLE_BLOCKS = (
    ("XYXX", +1),
    ("XXXY", +1),
    ("XYYY", +1),
    ("YYXY", +1),
    ("YYYX", -1),
    ("YXYY", -1),
    ("XXYX", -1),
    ("YXXX", -1),
)
# (qubit pair, basis per qubit of the pair, sign)
SINGLE_BLOCKS = (
    ((2, 3), "YX", +1, "t32"),
    ((2, 3), "XY", -1, "t32"),
    ((0, 1), "YX", +1, "t10"),
    ((0, 1), "XY", -1, "t10"),
)


@dataclass(frozen=True)
class UccsdParameters:
    t10: float = 0.0
    t32: float = 0.0
    t3120: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.as_tuple()):
            raise ValueError("UCCSD amplitudes must be finite")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.t10, self.t32, self.t3120)


def _basis_in(q: int, axis: str) -> Gate:
    return h(q) if axis == "X" else rx(q, math.pi / 2)


def _basis_out(q: int, axis: str) -> Gate:
    return h(q) if axis == "X" else rx(q, -math.pi / 2)


def pauli_exponential(qubits: tuple[int, ...], axes: str, angle: float) -> list[Gate]:
    """Gates for exp(-i angle/2 P) with P the X/Y string on ``qubits``.

    Basis change, CNOT ladder onto the last qubit, Rz, then the mirror image.
    """
    ladder = [cnot(a, b) for a, b in zip(qubits, qubits[1:])]
    return (
        [_basis_in(q, a) for q, a in zip(qubits, axes)]
        + ladder
        + [rz(qubits[-1], angle)]
        + ladder[::-1]
        + [_basis_out(q, a) for q, a in zip(qubits, axes)]
    )


def uccsd_gates(params: UccsdParameters) -> list[Gate]:
    gates: list[Gate] = []
    for axes, sign in DOUBLE_BLOCKS:
        gates += pauli_exponential((0, 1, 2, 3), axes, -params.t3120 * sign / 4)
    for qubits, axes, sign, name in SINGLE_BLOCKS:
        gates += pauli_exponential(qubits, axes, -getattr(params, name) * sign)
    return gates


def build_uccsd_h2(params: UccsdParameters, initial: int = HF_STATE) -> Circuit:
    """Single Trotter step of the H2 singlet UCCSD operator acting on ``initial``."""
    return Circuit(H2_QUBITS, tuple(uccsd_gates(params)), register=H2_QUBITS, initial=initial)


def _parity_of(circuit: Circuit, qubits) -> int:
    return circuit.occupation(qubits) & 1


def append_total_parity_check(circuit: Circuit) -> Circuit:
    c, a = circuit.add_ancilla()
    gates = [cnot(q, a) for q in range(circuit.register)] + [measure(a, "total_parity")]
    check = ParityCheck("total_parity", ("total_parity",), _parity_of(circuit, range(circuit.register)))
    return c.extend(gates, [check])


def append_spin_parity_checks(circuit: Circuit) -> Circuit:
    c, a = circuit.add_ancilla()
    gates = [cnot(q, a) for q in circuit.spin_up] + [measure(a, "up_parity"), reset(a)]
    gates += [cnot(q, a) for q in circuit.spin_down] + [measure(a, "down_parity")]
    checks = [
        ParityCheck("up_parity", ("up_parity",), _parity_of(circuit, circuit.spin_up)),
        ParityCheck("down_parity", ("down_parity",), _parity_of(circuit, circuit.spin_down)),
    ]
    return c.extend(gates, checks)


def append_local_spin_parity_checks(circuit: Circuit) -> Circuit:
    """Nearest-neighbour spin parities on the line a_top - q0 - q1 - q2 - q3 - a_bot.

    The parity of each spin pair is folded onto its outer qubit, copied to the
    adjacent ancilla, measured, and unfolded again. Eight CNOTs in total.
    """
    if circuit.register != 4:
        raise ValueError("the local spin-parity layout is defined for a 4-qubit register")
    c, top = circuit.add_ancilla()
    c, bot = c.add_ancilla()
    gates = [
        cnot(1, 0), cnot(2, 3),
        cnot(0, top), cnot(3, bot),
        measure(top, "up_parity"), measure(bot, "down_parity"),
        cnot(0, top), cnot(3, bot),
        cnot(1, 0), cnot(2, 3),
    ]
    checks = [
        ParityCheck("up_parity", ("up_parity",), _parity_of(circuit, circuit.spin_up)),
        ParityCheck("down_parity", ("down_parity",), _parity_of(circuit, circuit.spin_down)),
    ]
    return c.extend(gates, checks)


def number_bit(count: int, m: int) -> int:
    """Bit ``m`` (1 = least significant) of ``count``."""
    return (count >> (m - 1)) & 1


def append_number_check_bit(
    circuit: Circuit,
    m: int,
    prior_bits: tuple[int, ...] | None = None,
    ancilla: int | None = None,
) -> Circuit:
    """Read bit ``m`` of the electron number onto an ancilla measured in the X basis.

    ``prior_bits`` are N_1..N_{m-1}; by default the bits of the expected count.
    Passing ``ancilla`` reuses an existing ancilla after resetting it.
    """
    if m < 1:
        raise ValueError("number-check bit index starts at 1")
    expected_n = circuit.electrons
    if prior_bits is None:
        prior_bits = tuple(number_bit(expected_n, k) for k in range(1, m))
    prior_bits = tuple(int(b) for b in prior_bits)
    if len(prior_bits) != m - 1:
        raise ValueError(f"bit {m} needs {m - 1} prior bits, got {len(prior_bits)}")
    if ancilla is None:
        c, a = circuit.add_ancilla()
        gates: list[Gate] = []
    else:
        c, a = circuit, ancilla
        gates = [reset(a)]
    step = math.pi / 2 ** (m - 1)
    gates.append(h(a))
    gates += [cphase(q, a, step) for q in range(circuit.register)]
    prior = sum(b << k for k, b in enumerate(prior_bits))
    if prior:
        gates.append(phase(a, -prior * step))
    slot = f"N_bit_{m}"
    gates += [h(a, noise_exempt=True), measure(a, slot)]
    return c.extend(gates, [ParityCheck(slot, (slot,), number_bit(expected_n, m))])


def number_check_bits(register: int) -> int:
    return register.bit_length()


def append_number_check(circuit: Circuit, n_bits: int | None = None) -> Circuit:
    """All bits of the electron number on one ancilla, reset between bits."""
    n_bits = n_bits or number_check_bits(circuit.register)
    c = append_number_check_bit(circuit, 1)
    a = c.ancillas[-1]
    for m in range(2, n_bits + 1):
        c = append_number_check_bit(c, m, ancilla=a)
    return c


def _require_parity_conserving(term: PauliString) -> None:
    if term.xy_count % 2:
        raise ValueError(f"term {term.label()} does not conserve particle-number parity")


def append_term_basis_rotation(circuit: Circuit, term: PauliString) -> Circuit:
    """Rotate ``term`` onto Z and measure its support into slots ``r<q>``."""
    if len(term.axes) != circuit.register:
        raise ValueError("term length does not match the register")
    gates: list[Gate] = []
    for q in term.support:
        axis = term.axes[q]
        if axis == "X":
            gates.append(h(q, noise_exempt=True))
        elif axis == "Y":
            gates.append(rx(q, math.pi / 2, noise_exempt=True))
    slots = tuple(f"r{q}" for q in term.support)
    gates += [measure(q, s) for q, s in zip(term.support, slots)]
    return circuit.extend(gates, observable=slots)


def build_hadamard_test(ansatz: Circuit, term: PauliString, with_parity_check: bool = False) -> Circuit:
    """Ancilla-controlled ``term``; E[(-1)^htest] estimates its expectation."""
    _require_parity_conserving(term)
    if len(term.axes) != ansatz.register:
        raise ValueError("term length does not match the register")
    c, a = ansatz.add_ancilla()
    gates = [h(a)]
    gates += [cpauli(a, q, term.axes[q]) for q in term.support]
    gates += [h(a, noise_exempt=True), measure(a, "htest")]
    checks = []
    if with_parity_check:
        slots = tuple(f"r{q}" for q in range(ansatz.register))
        gates += [measure(q, s) for q, s in zip(range(ansatz.register), slots)]
        checks.append(ParityCheck("register_parity", slots, _parity_of(ansatz, range(ansatz.register))))
    return c.extend(gates, checks, observable=("htest",))


CHECK_NAMES = ("none", "total-parity", "spin-parity", "local-spin-parity", "number", "hadamard-test")


@dataclass(frozen=True)
class CheckKind:
    """Which symmetry check to attach to the ansatz.

    ``bits`` applies to the number check (default: enough bits for the
    register size). The Hadamard test takes its term from the measured term.
    """

    name: str = "none"
    bits: int | None = None
    parity: bool = True

    def __post_init__(self):
        if self.name not in CHECK_NAMES:
            raise ValueError(f"unknown check {self.name!r}; choose from {', '.join(CHECK_NAMES)}")
        if self.bits is not None and self.bits < 1:
            raise ValueError("number check needs at least one bit")

    @property
    def is_none(self) -> bool:
        return self.name == "none"

    def attach(self, circuit: Circuit) -> Circuit:
        """Append the check gadget (not valid for the Hadamard test)."""
        if self.name == "none":
            return circuit
        if self.name == "total-parity":
            return append_total_parity_check(circuit)
        if self.name == "spin-parity":
            return append_spin_parity_checks(circuit)
        if self.name == "local-spin-parity":
            return append_local_spin_parity_checks(circuit)
        if self.name == "number":
            return append_number_check(circuit, self.bits)
        raise ValueError("the Hadamard test replaces the term measurement; use term_circuit")


def term_circuit(ansatz: Circuit, term: PauliString, check: CheckKind, filtered: bool = True) -> Circuit:
    """Ansatz, optional check, and the measurement of one Hamiltonian term.

    With ``filtered`` false the check gadget is left out entirely.
    """
    if check.name == "hadamard-test":
        return build_hadamard_test(ansatz, term, with_parity_check=filtered and check.parity)
    base = check.attach(ansatz) if filtered else ansatz
    return append_term_basis_rotation(base, term)
