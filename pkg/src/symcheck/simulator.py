"""State-vector engine: gates, circuits, mid-circuit measurement and reset.

Production runs push a whole batch of trajectories through a circuit at once;
the state is stored as a ``(2**n, shots)`` array so that gathering the
amplitude pairs touched by a gate copies contiguous rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .noise import (
    NoiseModel,
    FaultEvent,
    SINGLE_FAULTS,
    TWO_QUBIT_FAULTS,
    branch_index,
    cumulative,
    epsilons_from_uniform,
    single_fault_table,
    two_qubit_fault_table,
)
from .pauli import PAULI_MATRICES

MAX_QUBITS = 24

SINGLE_KINDS = {"H", "X", "Y", "Z", "RX", "RZ", "PHASE"}
CONTROLLED_KINDS = {"CNOT", "CPAULI", "CPHASE"}
UNITARY_KINDS = SINGLE_KINDS | CONTROLLED_KINDS | {"SWAP"}
NONUNITARY_KINDS = {"MEASURE", "RESET"}
# gates given an epsilon-distorted form under correlated over/under rotation
SCALABLE_KINDS = {"H", "RX", "RZ", "PHASE", "CNOT", "CPHASE"}

_SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    control: int | None = None
    angle: float = 0.0
    axis: str | None = None
    slot: str | None = None
    noise_exempt: bool = False
    epsilon_scalable: bool | None = None

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if kind not in UNITARY_KINDS | NONUNITARY_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        expected = 2 if kind == "SWAP" else 1
        if len(self.targets) != expected:
            raise ValueError(f"{kind} takes {expected} target(s), got {self.targets}")
        if (kind in CONTROLLED_KINDS) != (self.control is not None):
            raise ValueError(f"{kind} control qubit mismatch")
        if self.control is not None and self.control in self.targets:
            raise ValueError("control and target must differ")
        if kind == "SWAP" and self.targets[0] == self.targets[1]:
            raise ValueError("SWAP needs two distinct qubits")
        if kind == "MEASURE" and not self.slot:
            raise ValueError("MEASURE needs a record slot")
        if kind == "CPAULI" and self.axis not in ("X", "Y", "Z"):
            raise ValueError("CPAULI needs axis X, Y or Z")
        if not math.isfinite(self.angle):
            raise ValueError("gate angle must be finite")
        if self.epsilon_scalable is None:
            scalable = kind in SCALABLE_KINDS or (kind == "CPAULI" and self.axis == "X")
            object.__setattr__(self, "epsilon_scalable", scalable)

    @property
    def target(self) -> int:
        return self.targets[0]

    @property
    def qubits(self) -> tuple[int, ...]:
        if self.control is not None:
            return (self.control,) + self.targets
        return self.targets

    @property
    def is_unitary(self) -> bool:
        return self.kind in UNITARY_KINDS

    @property
    def is_two_qubit(self) -> bool:
        return len(self.qubits) == 2


# -- gate constructors -------------------------------------------------------

def h(q, **kw): return Gate("H", (q,), **kw)
def x(q, **kw): return Gate("X", (q,), **kw)
def rx(q, theta, **kw): return Gate("RX", (q,), angle=theta, **kw)
def rz(q, theta, **kw): return Gate("RZ", (q,), angle=theta, **kw)
def phase(q, phi, **kw): return Gate("PHASE", (q,), angle=phi, **kw)
def cnot(c, t, **kw): return Gate("CNOT", (t,), control=c, **kw)
def cphase(c, t, phi, **kw): return Gate("CPHASE", (t,), control=c, angle=phi, **kw)
def cpauli(c, t, axis, **kw): return Gate("CPAULI", (t,), control=c, axis=axis, **kw)
def swap(a, b, **kw): return Gate("SWAP", (a, b), **kw)
def measure(q, slot, **kw): return Gate("MEASURE", (q,), slot=slot, **kw)
def reset(q, **kw): return Gate("RESET", (q,), **kw)


def target_matrix(gate: Gate, eps=1.0) -> np.ndarray:
    """2x2 action on the target (conditioned on the control for controlled gates).

    ``eps`` may be an array; the result then has shape ``eps.shape + (2, 2)``.
    Gates that are not epsilon-scalable ignore it.
    """
    kind = gate.kind
    eps = np.asarray(eps, dtype=float) if gate.epsilon_scalable else np.asarray(1.0)
    exact = eps.ndim == 0 and float(eps) == 1.0
    shape = eps.shape + (2, 2)
    out = np.zeros(shape, dtype=complex)
    if kind == "H":
        if exact:
            return np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT_HALF
        c, s = np.cos(eps * np.pi / 4), np.sin(eps * np.pi / 4)
        out[..., 0, 0], out[..., 0, 1], out[..., 1, 0], out[..., 1, 1] = c, s, s, -c
    elif kind in ("X", "Y", "Z"):
        return PAULI_MATRICES[kind].copy()
    elif kind == "CPAULI" and gate.axis != "X":
        return PAULI_MATRICES[gate.axis].copy()
    elif kind in ("CNOT", "CPAULI"):
        if exact:
            return PAULI_MATRICES["X"].copy()
        c, s = np.cos(eps * np.pi / 2), np.sin(eps * np.pi / 2)
        out[..., 0, 0], out[..., 0, 1], out[..., 1, 0], out[..., 1, 1] = 1j * c, s, s, 1j * c
    elif kind == "RX":
        a = eps * gate.angle / 2
        out[..., 0, 0] = out[..., 1, 1] = np.cos(a)
        out[..., 0, 1] = out[..., 1, 0] = -1j * np.sin(a)
    elif kind == "RZ":
        a = eps * gate.angle / 2
        out[..., 0, 0], out[..., 1, 1] = np.exp(-1j * a), np.exp(1j * a)
    elif kind in ("PHASE", "CPHASE"):
        out[..., 0, 0], out[..., 1, 1] = 1.0, np.exp(1j * eps * gate.angle)
    else:
        raise ValueError(f"{kind} has no 2x2 target matrix")
    return out


def full_unitary(gate: Gate, n_qubits: int, eps: float = 1.0) -> np.ndarray:
    """Dense 2**n unitary of a gate; used by tests and the density-matrix oracle."""
    dim = 2**n_qubits
    idx = np.arange(dim)
    if gate.kind == "SWAP":
        a, b = gate.targets
        ba, bb = (idx >> a) & 1, (idx >> b) & 1
        swapped = idx ^ ((ba ^ bb) << a) ^ ((ba ^ bb) << b)
        u = np.zeros((dim, dim), dtype=complex)
        u[swapped, idx] = 1.0
        return u
    m = target_matrix(gate, eps)
    t = gate.target
    u = np.eye(dim, dtype=complex)
    active = np.ones(dim, dtype=bool) if gate.control is None else ((idx >> gate.control) & 1) == 1
    i0 = idx[active & (((idx >> t) & 1) == 0)]
    i1 = i0 | (1 << t)
    u[i0, i0], u[i0, i1], u[i1, i0], u[i1, i1] = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    return u


@dataclass(frozen=True)
class ParityCheck:
    """Shot passes when the XOR of ``slots`` equals ``expected``."""

    name: str
    slots: tuple[str, ...]
    expected: int


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list acting on ``qubit_count`` qubits from a basis state.

    ``register`` counts the system qubits (0..register-1); ancillas follow.
    ``observable`` names the slots whose parity is the measured Pauli value.
    """

    qubit_count: int
    gates: tuple[Gate, ...] = ()
    register: int | None = None
    initial: int = 0
    ancillas: tuple[int, ...] = ()
    checks: tuple[ParityCheck, ...] = ()
    observable: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.register is None:
            object.__setattr__(self, "register", self.qubit_count)
        if not 0 < self.qubit_count <= MAX_QUBITS:
            raise ValueError(f"qubit_count must be in 1..{MAX_QUBITS}")
        seen = set()
        for g in self.gates:
            if max(g.qubits) >= self.qubit_count or min(g.qubits) < 0:
                raise ValueError(f"gate {g} addresses a qubit outside the register")
            if g.slot is not None:
                if g.slot in seen:
                    raise ValueError(f"measurement slot {g.slot!r} used twice")
                seen.add(g.slot)
        for chk in self.checks:
            missing = set(chk.slots) - seen
            if missing:
                raise ValueError(f"check {chk.name} references unknown slots {missing}")

    @property
    def slots(self) -> tuple[str, ...]:
        return tuple(g.slot for g in self.gates if g.kind == "MEASURE")

    @property
    def spin_up(self) -> tuple[int, ...]:
        return tuple(range(self.register // 2))

    @property
    def spin_down(self) -> tuple[int, ...]:
        return tuple(range(self.register // 2, self.register))

    def occupation(self, qubits: Iterable[int]) -> int:
        return sum((self.initial >> q) & 1 for q in qubits)

    @property
    def electrons(self) -> int:
        return self.occupation(range(self.register))

    def extend(self, gates: Iterable[Gate] = (), checks: Iterable[ParityCheck] = (), **changes) -> "Circuit":
        return replace(
            self,
            gates=self.gates + tuple(gates),
            checks=self.checks + tuple(checks),
            **changes,
        )

    def add_ancilla(self) -> tuple["Circuit", int]:
        a = self.qubit_count
        return replace(self, qubit_count=a + 1, ancillas=self.ancillas + (a,)), a

    def census(self) -> tuple[int, int]:
        """(single-qubit, two-qubit) unitary gate counts."""
        single = sum(g.is_unitary and not g.is_two_qubit for g in self.gates)
        two = sum(g.is_unitary and g.is_two_qubit for g in self.gates)
        return single, two

    def accepted(self, bits: Mapping[str, int]) -> bool:
        return all(
            (sum(int(bits[s]) for s in chk.slots) & 1) == chk.expected for chk in self.checks
        )

    def value(self, bits: Mapping[str, int]) -> int:
        if not self.observable:
            return 1
        return 1 - 2 * (sum(int(bits[s]) for s in self.observable) & 1)

    def initial_state(self) -> "StateVector":
        return StateVector.basis(self.initial, self.qubit_count)


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    qubit_count: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.qubit_count,):
            raise ValueError("amplitude vector length must be 2**qubit_count")
        if self.qubit_count > MAX_QUBITS:
            raise ValueError(f"at most {MAX_QUBITS} qubits are supported")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, index: int, n: int) -> "StateVector":
        amps = np.zeros(2**n, dtype=complex)
        amps[index] = 1.0
        return cls(amps, n)

    @classmethod
    def from_bits(cls, bits: str) -> "StateVector":
        """Ket label with qubit 0 rightmost, e.g. ``"0101"``."""
        return cls.basis(int(bits, 2), len(bits))

    @property
    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def tensor_ancilla(self, count: int = 1) -> "StateVector":
        """Append ``count`` ancillas in |0> as the highest-index qubits."""
        amps = np.zeros(2 ** (self.qubit_count + count), dtype=complex)
        amps[: self.amplitudes.size] = self.amplitudes
        return StateVector(amps, self.qubit_count + count)

    def fidelity(self, other: "StateVector") -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)


# -- batched kernels (state layout: (dim, batch)) -----------------------------

class _GateIndex:
    """Amplitude pair indices touched by a gate, cached per qubit count."""

    _cache: dict = {}

    @classmethod
    def pairs(cls, n: int, target: int, control: int | None):
        key = (n, target, control)
        if key not in cls._cache:
            idx = np.arange(2**n)
            mask = ((idx >> target) & 1) == 0
            if control is not None:
                mask &= ((idx >> control) & 1) == 1
            i0 = idx[mask]
            cls._cache[key] = (i0, i0 | (1 << target))
        return cls._cache[key]


def _halves(s: np.ndarray, n: int, target: int, control: int | None = None):
    """Views of the amplitudes with the target bit 0 and 1 (control bit 1 if given)."""
    v = s.view()
    v.shape = (2,) * n + s.shape[1:]  # raises rather than silently copying
    sl0 = [slice(None)] * n
    if control is not None:
        sl0[n - 1 - control] = 1
    sl1 = list(sl0)
    sl0[n - 1 - target] = 0
    sl1[n - 1 - target] = 1
    return v[tuple(sl0)], v[tuple(sl1)]


def _apply_2x2(a0: np.ndarray, a1: np.ndarray, m: np.ndarray) -> None:
    """In place on the two halves; ``m`` is (2, 2) or (batch, 2, 2)."""
    if m.ndim == 2:
        m00, m01, m10, m11 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
        if m01 == 0 and m10 == 0:
            if m00 != 1:
                a0 *= m00
            if m11 != 1:
                a1 *= m11
            return
        if m00 == 0 and m11 == 0 and m01 == 1 and m10 == 1:
            tmp = a0.copy()
            a0[...] = a1
            a1[...] = tmp
            return
    else:
        m00, m01, m10, m11 = m[:, 0, 0], m[:, 0, 1], m[:, 1, 0], m[:, 1, 1]
    tmp = a0.copy()
    a0 *= m00
    a0 += m01 * a1
    a1 *= m11
    a1 += m10 * tmp


def _apply_unitary(s: np.ndarray, n: int, gate: Gate, m=None) -> None:
    if gate.kind == "SWAP":
        a, b = gate.targets
        lo, hi = (a, b) if a < b else (b, a)
        v = s.view()
        v.shape = (2,) * n + s.shape[1:]
        sl = [slice(None)] * n
        sl[n - 1 - hi], sl[n - 1 - lo] = 1, 0
        x = v[tuple(sl)]
        sl[n - 1 - hi], sl[n - 1 - lo] = 0, 1
        y = v[tuple(sl)]
        tmp = x.copy()
        x[...] = y
        y[...] = tmp
        return
    if m is None:
        m = target_matrix(gate)
    a0, a1 = _halves(s, n, gate.target, gate.control)
    _apply_2x2(a0, a1, m)


def _pauli_action(n: int, qubits: Sequence[int], paulis: Sequence[str]):
    """(source index, phase) such that out[k ^ xmask] = phase[k] * in[k]."""
    idx = np.arange(2**n)
    xm = 0
    phase = np.ones(2**n, dtype=complex)
    for q, p in zip(qubits, paulis):
        bit = (idx >> q) & 1
        if p in "XY":
            xm |= 1 << q
        if p == "Y":
            phase = phase * 1j * (1 - 2 * bit)
        elif p == "Z":
            phase = phase * (1 - 2 * bit)
    return idx ^ xm, phase


def _apply_pauli_rows(s: np.ndarray, cols: np.ndarray, action) -> None:
    dest, ph = action
    block = s[:, cols]
    out = np.empty_like(block)
    out[dest] = ph[:, None] * block
    s[:, cols] = out


def _measure_rows(s: np.ndarray, n: int, q: int, u: np.ndarray) -> np.ndarray:
    i0, i1 = _GateIndex.pairs(n, q, None)
    p1 = np.sum(np.abs(s[i1]) ** 2, axis=0)
    p1 = np.clip(p1, 0.0, 1.0)
    bit = u < p1
    keep = np.where(bit, p1, 1.0 - p1)
    if np.any(keep <= 0):
        raise AssertionError("sampled a zero-probability measurement branch")
    s[i0] *= ~bit
    s[i1] *= bit
    s /= np.sqrt(keep)
    return bit.astype(np.uint8)


@dataclass
class BatchResult:
    slots: tuple[str, ...]
    bits: np.ndarray  # (shots, n_slots) uint8, after readout flips
    n_faults: np.ndarray  # (shots,)
    fault_log: list[list[FaultEvent]] | None = None

    def column(self, slot: str) -> np.ndarray:
        return self.bits[:, self.slots.index(slot)]


def random_layout(circuit: Circuit) -> dict[str, int]:
    """Number of uniforms consumed per trajectory, by purpose."""
    n_meas = sum(g.kind == "MEASURE" for g in circuit.gates)
    n_reset = sum(g.kind == "RESET" for g in circuit.gates)
    return {
        "delta": circuit.qubit_count,
        "fault": len(circuit.gates),
        "collapse": n_meas + n_reset,
        "readout": n_meas,
    }


def run_batch(
    circuit: Circuit,
    noise: NoiseModel,
    rng: np.random.Generator,
    shots: int,
    initial: StateVector | None = None,
    log_faults: bool = False,
) -> BatchResult:
    """Run ``shots`` independent noisy trajectories of ``circuit``.

    Every trajectory consumes a fixed block of uniforms (see ``random_layout``)
    so a given generator state always reproduces the same records.
    """
    n = circuit.qubit_count
    dim = 2**n
    layout = random_layout(circuit)
    width = sum(layout.values())
    u = rng.random((shots, width))
    off_delta = 0
    off_fault = off_delta + layout["delta"]
    off_collapse = off_fault + layout["fault"]
    off_readout = off_collapse + layout["collapse"]

    s = np.zeros((dim, shots), dtype=complex)
    if initial is None:
        s[circuit.initial] = 1.0
    else:
        if initial.qubit_count != n:
            raise ValueError("initial state has the wrong qubit count")
        s[:] = initial.amplitudes[:, None]

    eps1 = eps2 = None
    if noise.rotations_on:
        eps1, eps2 = epsilons_from_uniform(u[:, off_delta:off_fault], noise.delta_max)

    tables = {
        1: cumulative(single_fault_table(noise.single_rate)),
        2: cumulative(two_qubit_fault_table(noise.two_rate)),
    }
    outcomes = {1: [(a,) for a in SINGLE_FAULTS], 2: list(TWO_QUBIT_FAULTS)}
    rates = {1: noise.single_rate, 2: noise.two_rate}

    slots = circuit.slots
    bits = np.zeros((shots, len(slots)), dtype=np.uint8)
    n_faults = np.zeros(shots, dtype=np.int64)
    fault_log = [[] for _ in range(shots)] if log_faults else None
    collapse_col = off_collapse
    slot_col = 0

    for gi, gate in enumerate(circuit.gates):
        if gate.kind == "MEASURE":
            b = _measure_rows(s, n, gate.target, u[:, collapse_col])
            collapse_col += 1
            if noise.readout_flip > 0:
                b = b ^ (u[:, off_readout + slot_col] < noise.readout_flip).astype(np.uint8)
            bits[:, slot_col] = b
            slot_col += 1
            continue
        if gate.kind == "RESET":
            b = _measure_rows(s, n, gate.target, u[:, collapse_col]).astype(bool)
            collapse_col += 1
            if np.any(b):
                i0, i1 = _GateIndex.pairs(n, gate.target, None)
                cols = np.nonzero(b)[0]
                sub = s[:, cols]
                sub[i0], sub[i1] = sub[i1], sub[i0].copy()
                s[:, cols] = sub
            continue

        m = None
        if eps1 is not None and gate.epsilon_scalable and not gate.noise_exempt:
            table = eps2 if gate.is_two_qubit else eps1
            m = target_matrix(gate, table[:, gate.target])
        _apply_unitary(s, n, gate, m)

        if gate.noise_exempt:
            continue
        k = 2 if gate.is_two_qubit else 1
        if rates[k] == 0:
            continue
        branch = branch_index(u[:, off_fault + gi], tables[k])
        hit = np.nonzero(branch)[0]
        if hit.size == 0:
            continue
        n_faults[hit] += 1
        for b_idx in np.unique(branch[hit]):
            cols = hit[branch[hit] == b_idx]
            paulis = outcomes[k][b_idx - 1]
            _apply_pauli_rows(s, cols, _pauli_action(n, gate.qubits, paulis))
            if fault_log is not None:
                for c in cols:
                    fault_log[c].append(FaultEvent(gi, gate.qubits, tuple(paulis)))

    return BatchResult(slots, bits, n_faults, fault_log)


@dataclass(frozen=True)
class MeasurementRecord:
    bits: dict[str, int]
    faults: tuple[FaultEvent, ...] = ()

    def __getitem__(self, slot: str) -> int:
        return self.bits[slot]


def run_trajectory(
    circuit: Circuit,
    noise: NoiseModel,
    rng: np.random.Generator,
    initial: StateVector | None = None,
) -> MeasurementRecord:
    res = run_batch(circuit, noise, rng, 1, initial=initial, log_faults=True)
    return MeasurementRecord(
        {slot: int(b) for slot, b in zip(res.slots, res.bits[0])},
        tuple(res.fault_log[0]),
    )


# -- single-state API ----------------------------------------------------------

def apply_gate(state: StateVector, gate: Gate, epsilon: float = 1.0) -> StateVector:
    if not gate.is_unitary:
        raise ValueError(f"{gate.kind} is not unitary; use measure_qubit/reset_qubit")
    if max(gate.qubits) >= state.qubit_count:
        raise IndexError(f"gate {gate} addresses a qubit outside the state")
    s = state.amplitudes.copy()[:, None]
    m = target_matrix(gate, epsilon) if gate.kind != "SWAP" else None
    _apply_unitary(s, state.qubit_count, gate, m)
    return StateVector(s[:, 0], state.qubit_count)


def measure_qubit(state: StateVector, q: int, rng: np.random.Generator) -> tuple[int, StateVector]:
    if not 0 <= q < state.qubit_count:
        raise IndexError(f"qubit {q} out of range")
    s = state.amplitudes.copy()[:, None]
    bit = _measure_rows(s, state.qubit_count, q, np.array([rng.random()]))
    return int(bit[0]), StateVector(s[:, 0], state.qubit_count)


def reset_qubit(state: StateVector, q: int, rng: np.random.Generator) -> StateVector:
    bit, post = measure_qubit(state, q, rng)
    if bit:
        post = apply_gate(post, x(q))
    return post


def run_noiseless(circuit: Circuit, initial: StateVector | None = None) -> StateVector:
    """Apply the unitary gates of a measurement-free circuit."""
    state = initial if initial is not None else circuit.initial_state()
    s = state.amplitudes.copy()[:, None]
    for gate in circuit.gates:
        if not gate.is_unitary:
            raise ValueError("run_noiseless only handles unitary circuits")
        _apply_unitary(s, state.qubit_count, gate)
    return StateVector(s[:, 0], state.qubit_count)


# -- exact branch enumeration --------------------------------------------------

@dataclass(frozen=True)
class Branch:
    probability: float
    bits: dict[str, int]
    state: StateVector


def enumerate_branches(
    circuit: Circuit,
    initial: StateVector | None = None,
    inject: Mapping[int, Sequence[str]] | None = None,
    prune: float = 1e-14,
) -> list[Branch]:
    """Every measurement history of a noiseless run with its exact probability.

    ``inject`` maps a gate index to Paulis applied on that gate's qubits right
    after it (the same insertion point the noisy engine uses).
    """
    n = circuit.qubit_count
    inject = inject or {}
    start = initial if initial is not None else circuit.initial_state()
    branches = [(1.0, {}, start.amplitudes.copy())]
    for gi, gate in enumerate(circuit.gates):
        nxt = []
        for prob, bits, psi in branches:
            if gate.is_unitary:
                s = psi[:, None]
                _apply_unitary(s, n, gate)
                if gi in inject:
                    _apply_pauli_rows(s, np.array([0]), _pauli_action(n, gate.qubits, inject[gi]))
                nxt.append((prob, bits, s[:, 0]))
                continue
            i0, i1 = _GateIndex.pairs(n, gate.target, None)
            for outcome, idx in ((0, i1), (1, i0)):
                post = psi.copy()
                post[idx] = 0.0
                p = float(np.vdot(post, post).real)
                if p <= prune:
                    continue
                post /= math.sqrt(p)
                new_bits = bits
                if gate.kind == "MEASURE":
                    new_bits = {**bits, gate.slot: outcome}
                elif outcome == 1:
                    j0, j1 = i0, i1
                    post[j0], post[j1] = post[j1], post[j0].copy()
                nxt.append((prob * p, new_bits, post))
        branches = nxt
    return [Branch(p, b, StateVector(psi, n)) for p, b, psi in branches]


def acceptance_probability(branches: Sequence[Branch], circuit: Circuit) -> float:
    return float(sum(b.probability for b in branches if circuit.accepted(b.bits)))
