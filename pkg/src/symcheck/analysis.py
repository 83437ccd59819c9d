"""Exact oracles: density-matrix evolution, fault enumeration, closed-form detection rates."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .circuits import CheckKind, append_number_check, append_spin_parity_checks, append_total_parity_check
from .noise import NoiseModel, SINGLE_FAULTS, TWO_QUBIT_FAULTS, NOISELESS
from .pauli import PauliString, spin_counts
from .simulator import (
    Circuit,
    Gate,
    StateVector,
    _GateIndex,
    _apply_unitary,
    _pauli_action,
    acceptance_probability,
    enumerate_branches,
    target_matrix,
)

DENSITY_QUBIT_CAP = 8


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray
    qubit_count: int

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        if rho.shape != (2**self.qubit_count,) * 2:
            raise ValueError("density matrix shape does not match qubit count")
        if abs(np.trace(rho) - 1) > 1e-10:
            raise ValueError(f"density matrix trace {np.trace(rho).real} is not 1")
        if np.abs(rho - rho.conj().T).max() > 1e-10:
            raise ValueError("density matrix is not Hermitian")
        object.__setattr__(self, "matrix", rho)

    @classmethod
    def pure(cls, state: StateVector) -> "DensityMatrix":
        a = state.amplitudes
        return cls(np.outer(a, a.conj()), state.qubit_count)

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityMatrix":
        return cls(np.eye(2**n) / 2**n, n)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def expectation(self, op: np.ndarray) -> float:
        return float(np.trace(op @ self.matrix).real)

    def trace_distance(self, other: "DensityMatrix") -> float:
        return float(0.5 * np.abs(np.linalg.eigvalsh(self.matrix - other.matrix)).sum())

    def partial_trace(self, keep: Sequence[int]) -> "DensityMatrix":
        n = self.qubit_count
        keep = sorted(keep)
        # tensor axes are ordered qubit n-1 ... 0
        t = self.matrix.reshape((2,) * (2 * n))
        drop = [q for q in range(n) if q not in keep]
        for q in sorted(drop, reverse=True):
            m = t.ndim // 2
            ax = m - 1 - q
            t = np.trace(t, axis1=ax, axis2=ax + m)
            # dropping a higher qubit shifts nothing below it; qubits are processed high to low
        k = len(keep)
        return DensityMatrix(t.reshape(2**k, 2**k), k)


# -- exact channel evolution ---------------------------------------------------

def _conjugate(rho: np.ndarray, n: int, gate: Gate, m=None) -> np.ndarray:
    """U rho U^dagger."""
    left = rho.copy()
    _apply_unitary(left, n, gate, m)
    right = left.conj().T.copy()
    _apply_unitary(right, n, gate, m)
    return right.conj().T


def _pauli_conjugate(rho: np.ndarray, action) -> np.ndarray:
    dest, ph = action
    out = np.empty_like(rho)
    out[np.ix_(dest, dest)] = ph[:, None] * rho * ph.conj()[None, :]
    return out


def _depolarize(rho: np.ndarray, n: int, qubits: tuple[int, ...], p: float) -> np.ndarray:
    if p == 0:
        return rho
    faults = [(a,) for a in SINGLE_FAULTS] if len(qubits) == 1 else TWO_QUBIT_FAULTS
    acc = np.zeros_like(rho)
    for paulis in faults:
        acc += _pauli_conjugate(rho, _pauli_action(n, qubits, paulis))
    return (1 - p) * rho + (p / len(faults)) * acc


@dataclass
class DensityBranch:
    """Unnormalised state for one measurement record.

    ``clean`` is the part of ``total`` in which no fault has occurred.
    """

    total: np.ndarray
    clean: np.ndarray

    @property
    def probability(self) -> float:
        return float(np.trace(self.total).real)

    @property
    def clean_probability(self) -> float:
        return float(np.trace(self.clean).real)


@dataclass
class DensityOutcome:
    qubit_count: int
    slots: tuple[str, ...]
    branches: dict[tuple[int, ...], DensityBranch]

    def record_probabilities(self) -> dict[tuple[int, ...], float]:
        return {k: b.probability for k, b in self.branches.items()}

    def density(self) -> DensityMatrix:
        """State averaged over every measurement record."""
        rho = sum(b.total for b in self.branches.values())
        return DensityMatrix(rho, self.qubit_count)

    def bits(self, record: tuple[int, ...]) -> dict[str, int]:
        return dict(zip(self.slots, record))

    def acceptance(self, circuit: Circuit) -> float:
        return sum(b.probability for k, b in self.branches.items() if circuit.accepted(self.bits(k)))


def evolve_density_exact(
    circuit: Circuit,
    noise: NoiseModel = NOISELESS,
    epsilons: tuple[np.ndarray, np.ndarray] | None = None,
    initial: DensityMatrix | StateVector | None = None,
    gates: Sequence[Gate] | None = None,
    start: DensityOutcome | None = None,
) -> DensityOutcome:
    """Evolve through ``circuit`` applying each gate's full depolarising channel.

    Mid-circuit measurements split the state into per-record branches; resets
    merge their two outcomes. ``epsilons`` fixes one draw of the per-qubit
    over/under-rotation factors. Passing ``start`` and ``gates`` continues an
    earlier evolution with extra gates.
    """
    n = circuit.qubit_count
    if n > DENSITY_QUBIT_CAP:
        raise ValueError(f"density-matrix evolution is capped at {DENSITY_QUBIT_CAP} qubits")
    gates = circuit.gates if gates is None else gates
    if start is not None:
        slots = list(start.slots)
        branches = {k: DensityBranch(b.total.copy(), b.clean.copy()) for k, b in start.branches.items()}
    else:
        if initial is None:
            initial = circuit.initial_state()
        rho0 = DensityMatrix.pure(initial).matrix if isinstance(initial, StateVector) else initial.matrix
        slots = []
        branches = {(): DensityBranch(rho0.copy(), rho0.copy())}
    eps1, eps2 = epsilons if epsilons is not None else (None, None)

    for gate in gates:
        if gate.is_unitary:
            m = None
            if eps1 is not None and gate.epsilon_scalable and not gate.noise_exempt:
                m = target_matrix(gate, (eps2 if gate.is_two_qubit else eps1)[gate.target])
            p = 0.0
            if not gate.noise_exempt:
                p = noise.two_rate if gate.is_two_qubit else noise.single_rate
            for b in branches.values():
                b.total = _depolarize(_conjugate(b.total, n, gate, m), n, gate.qubits, p)
                if p:
                    b.clean = (1 - p) * _conjugate(b.clean, n, gate, m)
                else:
                    b.clean = _conjugate(b.clean, n, gate, m)
            continue
        i0, i1 = _GateIndex.pairs(n, gate.target, None)
        new: dict[tuple[int, ...], DensityBranch] = {}
        for key, b in branches.items():
            parts = []
            for outcome, drop in ((0, i1), (1, i0)):
                t, c = b.total.copy(), b.clean.copy()
                for r in (t, c):
                    r[drop, :] = 0
                    r[:, drop] = 0
                parts.append((outcome, t, c))
            if gate.kind == "RESET":
                t1, c1 = parts[1][1], parts[1][2]
                flip = _pauli_action(n, (gate.target,), ("X",))
                t = parts[0][1] + _pauli_conjugate(t1, flip)
                c = parts[0][2] + _pauli_conjugate(c1, flip)
                new[key] = DensityBranch(t, c)
            else:
                for outcome, t, c in parts:
                    if np.trace(t).real > 1e-15:
                        new[key + (outcome,)] = DensityBranch(t, c)
        branches = new
        if gate.kind == "MEASURE":
            slots.append(gate.slot)
    return DensityOutcome(n, tuple(slots), branches)


def register_expectation(rho: np.ndarray, n: int, term: PauliString) -> float:
    """Tr(P rho) for a register Pauli string embedded in an ``n``-qubit state (unnormalised rho)."""
    axes = tuple(term.axes) + ("I",) * (n - len(term.axes))
    qubits = [q for q, a in enumerate(axes) if a != "I"]
    if not qubits:
        return float(np.trace(rho).real)
    dest, ph = _pauli_action(n, qubits, [axes[q] for q in qubits])
    # P|k> = ph[k] |dest[k]>, so Tr(P rho) = sum_k ph[k] rho[k, dest[k]]
    return float(np.sum(ph * rho[np.arange(2**n), dest]).real)


# -- fault enumeration ---------------------------------------------------------

@dataclass(frozen=True)
class FaultClassification:
    fault: str
    qubits: tuple[int, ...]
    check: str
    accept_probability: float

    @property
    def always_detected(self) -> bool:
        return self.accept_probability < 1e-12

    @property
    def possibly_detected(self) -> bool:
        return self.accept_probability < 1 - 1e-12


@dataclass(frozen=True)
class DetectionReport:
    check: str
    rows: tuple[FaultClassification, ...]

    @property
    def total(self) -> int:
        return len(self.rows)

    @property
    def detected(self) -> int:
        return sum(r.always_detected for r in self.rows)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.detected, self.total) if self.total else Fraction(0)

    @property
    def possibly_detected(self) -> int:
        return sum(r.possibly_detected for r in self.rows)

    def subset(self, predicate) -> "DetectionReport":
        return DetectionReport(self.check, tuple(r for r in self.rows if predicate(r)))


def sector_of(state: StateVector, register: int | None = None) -> tuple[int, int]:
    """(N_up, N_down) shared by every basis component of ``state``."""
    register = register or state.qubit_count
    support = np.nonzero(np.abs(state.amplitudes) > 1e-12)[0]
    sectors = {spin_counts(int(k) & ((1 << register) - 1), register) for k in support}
    if len(sectors) != 1:
        raise ValueError("state is not in a single (N_up, N_down) sector")
    return sectors.pop()


def _check_circuit(register: int, reference: int, check: CheckKind | str) -> Circuit:
    check = CheckKind(check) if isinstance(check, str) else check
    if check.name in ("none", "hadamard-test"):
        raise ValueError(f"fault enumeration needs a parity or number check, not {check.name}")
    return check.attach(Circuit(register, (), register=register, initial=reference))


def _physical_reference(state: StateVector) -> int:
    sector_of(state)
    return int(np.argmax(np.abs(state.amplitudes)))


def _apply_fault(state: StateVector, qubits, paulis) -> StateVector:
    s = state.amplitudes.copy()
    dest, ph = _pauli_action(state.qubit_count, qubits, paulis)
    out = np.empty_like(s)
    out[dest] = ph * s
    return StateVector(out, state.qubit_count)


def check_acceptance(state: StateVector, check: CheckKind | str, reference: int | None = None) -> float:
    """Probability that a noiseless check accepts ``state``.

    Expected parities come from the basis state ``reference`` (default: the
    dominant component of ``state``).
    """
    reference = _physical_reference(state) if reference is None else reference
    circ = _check_circuit(state.qubit_count, reference, check)
    init = state.tensor_ancilla(circ.qubit_count - state.qubit_count)
    return acceptance_probability(enumerate_branches(circ, initial=init), circ)


def _pairs(register: int, which: str) -> list[tuple[int, int]]:
    half = register // 2
    spin = lambda q: q >= half  # noqa: E731
    allp = list(combinations(range(register), 2))
    if which == "all":
        return allp
    if which == "same-spin":
        return [p for p in allp if spin(p[0]) == spin(p[1])]
    if which == "cross-spin":
        return [p for p in allp if spin(p[0]) != spin(p[1])]
    raise ValueError(f"unknown pair set {which!r}")


def enumerate_fault_detection(
    state: StateVector,
    check: CheckKind | str,
    faults: str = "depolarizing",
    pairs: str = "all",
) -> DetectionReport:
    """Classify every two-qubit fault on register pairs by the check's response.

    ``faults`` is ``"depolarizing"`` (the 15 non-identity Pauli pairs) or
    ``"bitflip"`` (X on both qubits). ``pairs`` restricts which register
    pairs are hit: ``"all"``, ``"same-spin"`` or ``"cross-spin"``.
    """
    kinds = TWO_QUBIT_FAULTS if faults == "depolarizing" else (("X", "X"),) if faults == "bitflip" else None
    if kinds is None:
        raise ValueError(f"unknown fault set {faults!r}")
    reference = _physical_reference(state)
    name = check if isinstance(check, str) else check.name
    rows = []
    for qs in _pairs(state.qubit_count, pairs):
        for paulis in kinds:
            faulty = _apply_fault(state, qs, paulis)
            p = check_acceptance(faulty, check, reference)
            rows.append(FaultClassification("".join(paulis), qs, name, p))
    return DetectionReport(name, tuple(rows))


def enumerate_check_internal_faults(
    state: StateVector,
    checks: Sequence[str] = ("total-parity", "spin-parity"),
) -> DetectionReport:
    """Faults striking the check's own two-qubit gates, with all checks run in order.

    Each row's ``qubits`` is (register, ancilla) of the CNOT hit; the check
    field names the gadget the faulty gate belongs to.
    """
    reference = _physical_reference(state)
    circ = Circuit(state.qubit_count, (), register=state.qubit_count, initial=reference)
    owner: list[str] = []
    for name in checks:
        before = len(circ.gates)
        circ = CheckKind(name).attach(circ)
        owner += [name] * (len(circ.gates) - before)
    init = state.tensor_ancilla(circ.qubit_count - state.qubit_count)
    rows = []
    for gi, gate in enumerate(circ.gates):
        if not (gate.is_unitary and gate.is_two_qubit):
            continue
        for paulis in TWO_QUBIT_FAULTS:
            br = enumerate_branches(circ, initial=init, inject={gi: paulis})
            rows.append(FaultClassification("".join(paulis), gate.qubits, owner[gi], acceptance_probability(br, circ)))
    return DetectionReport("+".join(checks), tuple(rows))


# -- closed forms ------------------------------------------------------------

def bitflip_pair_detection_rate(n_electrons: int, n_orbitals: int) -> Fraction:
    """Share of same-spin double bit flips that change the electron number."""
    n, m = n_electrons, n_orbitals
    if n % 2 or m % 2:
        raise ValueError("N and M must both be even")
    if m < 4 or not 0 <= n <= m:
        raise ValueError("need M >= 4 and 0 <= N <= M")
    a, b, c = n // 2, (m - n) // 2, m // 2
    return Fraction(a * (a - 1) + b * (b - 1), c * (c - 1))


def spin_pair_detectable_fraction(n_orbitals: int) -> Fraction:
    """Share of double bit flips that straddle the two spin species."""
    m = n_orbitals
    if m % 2 or m < 2:
        raise ValueError("M must be even and at least 2")
    return Fraction(m * m // 4, m * (m - 1) // 2)


def depolarizing_detection_bound(n_orbitals: int, n_electrons: int) -> Fraction:
    """Always-detected share of two-qubit depolarising faults using parity plus number checks.

    The eight parity-violating pairs are always caught; the four double-flip
    types (XX, XY, YX, YY) add the share of pairs that change a conserved count.
    """
    m, n = n_orbitals, n_electrons
    cross = spin_pair_detectable_fraction(m)
    same = 1 - cross
    return Fraction(8, 15) + Fraction(4, 15) * (cross + same * bitflip_pair_detection_rate(n, m))


# -- variational bound ---------------------------------------------------------

@dataclass(frozen=True)
class VariationalReport:
    ground_energy: float
    margins: tuple[float, ...]  # (E - E_g) / sigma
    violations: tuple[int, ...]

    @property
    def holds(self) -> bool:
        return not self.violations


def verify_variational_bound(estimates: Iterable, ground_energy: float, n_sigma: float = 3.0) -> VariationalReport:
    """Flag any estimate lying more than ``n_sigma`` standard errors below the ground energy.

    ``estimates`` holds objects with ``energy``/``std_err`` or (energy, std_err) pairs.
    """
    margins, bad = [], []
    for i, est in enumerate(estimates):
        e, se = (est.energy, est.std_err) if hasattr(est, "energy") else est
        se = max(float(se), 1e-15)
        margin = (e - ground_energy) / se
        margins.append(margin)
        if margin < -n_sigma:
            bad.append(i)
    return VariationalReport(ground_energy, tuple(margins), tuple(bad))


def determinant(occupied: Iterable[int], n_qubits: int) -> StateVector:
    return StateVector.basis(sum(1 << q for q in occupied), n_qubits)


def superposition(labels: Mapping[str, complex] | Sequence[str]) -> StateVector:
    """Normalised sum of ket labels (qubit 0 rightmost)."""
    if not isinstance(labels, Mapping):
        labels = {lab: 1.0 for lab in labels}
    n = len(next(iter(labels)))
    amps = np.zeros(2**n, dtype=complex)
    for lab, c in labels.items():
        amps[int(lab, 2)] += c
    return StateVector(amps / np.linalg.norm(amps), n)


def number_check_outcomes(
    state: StateVector, n_bits: int | None = None, reference: int | None = None
) -> dict[tuple[int, ...], float]:
    """Distribution of the measured number bits on a noiseless run."""
    reference = _physical_reference(state) if reference is None else reference
    circ = append_number_check(Circuit(state.qubit_count, (), register=state.qubit_count, initial=reference), n_bits)
    init = state.tensor_ancilla(circ.qubit_count - state.qubit_count)
    out: dict[tuple[int, ...], float] = {}
    for b in enumerate_branches(circ, initial=init):
        key = tuple(b.bits[s] for s in circ.slots)
        out[key] = out.get(key, 0.0) + b.probability
    return out
