"""Pauli strings, qubit Hamiltonians and the Jordan-Wigner ladder operators.

Qubit 0 is the rightmost label in ket notation, so basis index ``k`` has bit
``q`` equal to the occupation of qubit ``q``. Dense matrices are built as
``kron(P_{n-1}, ..., P_0)``.
"""

from __future__ import annotations

import json
import math
import os
import re
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path

import numpy as np

AXES = ("I", "X", "Y", "Z")

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_TOKEN = re.compile(r"^([IXYZ])(\d+)$")


class HamiltonianFormatError(ValueError):
    """Raised for malformed or symmetry-violating Hamiltonian documents."""


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis; ``axes[q]`` acts on qubit ``q``."""

    axes: tuple[str, ...]

    def __post_init__(self):
        bad = [a for a in self.axes if a not in AXES]
        if bad:
            raise ValueError(f"unknown Pauli axis {bad[0]!r}")

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(("I",) * n)

    @classmethod
    def parse(cls, text: str, n: int) -> "PauliString":
        """Parse ``"X0 Y1 Y2 X3"``; an empty string is the identity."""
        axes = ["I"] * n
        for token in text.split():
            m = _TOKEN.match(token)
            if m is None:
                raise HamiltonianFormatError(f"malformed Pauli token {token!r}")
            axis, q = m.group(1), int(m.group(2))
            if q >= n:
                raise HamiltonianFormatError(
                    f"token {token!r} addresses qubit {q} but register has {n}"
                )
            if axes[q] != "I":
                raise HamiltonianFormatError(f"qubit {q} repeated in {text!r}")
            axes[q] = axis
        return cls(tuple(axes))

    @classmethod
    def from_dict(cls, ops: dict[int, str], n: int) -> "PauliString":
        axes = ["I"] * n
        for q, a in ops.items():
            axes[q] = a
        return cls(tuple(axes))

    @property
    def n_qubits(self) -> int:
        return len(self.axes)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, a in enumerate(self.axes) if a != "I")

    @property
    def is_identity(self) -> bool:
        return not self.support

    @property
    def xy_count(self) -> int:
        return sum(a in "XY" for a in self.axes)

    @property
    def x_mask(self) -> int:
        return sum(1 << q for q, a in enumerate(self.axes) if a in "XY")

    @property
    def z_mask(self) -> int:
        return sum(1 << q for q, a in enumerate(self.axes) if a in "YZ")

    def label(self) -> str:
        return " ".join(f"{a}{q}" for q, a in enumerate(self.axes) if a != "I")

    def __str__(self) -> str:
        return self.label() or "I"

    def matrix(self) -> np.ndarray:
        return reduce(np.kron, [PAULI_MATRICES[a] for a in reversed(self.axes)])

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        """Return ``P|psi>`` for a vector (or the last axis of a batch)."""
        amplitudes = np.asarray(amplitudes)
        dim = amplitudes.shape[-1]
        idx = np.arange(dim)
        xm, zm = self.x_mask, self.z_mask
        n_y = sum(a == "Y" for a in self.axes)
        # P|k> = i^{n_y} (-1)^{popcount(k & zmask)} |k ^ xmask>
        signs = 1 - 2 * (_popcount(idx & zm) & 1)
        phase = (1j) ** n_y
        out = np.empty_like(amplitudes, dtype=complex)
        out[..., idx ^ xm] = phase * signs * amplitudes[..., idx]
        return out


def _popcount(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    count = np.zeros_like(a)
    while np.any(a):
        count += a & 1
        a = a >> 1
    return count


def _as_vector(state) -> np.ndarray:
    return np.asarray(getattr(state, "amplitudes", state), dtype=complex)


def exact_expectation(state, string: PauliString) -> float:
    """<psi|P|psi> for a normalised state vector."""
    psi = _as_vector(state)
    if psi.shape[-1] != 2**string.n_qubits:
        raise ValueError(
            f"Pauli string on {string.n_qubits} qubits does not match a state "
            f"of dimension {psi.shape[-1]}"
        )
    norm = float(np.vdot(psi, psi).real)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"state is not normalised (norm^2 = {norm:.12g})")
    value = np.vdot(psi, string.apply(psi))
    if abs(value.imag) > 1e-10:
        raise ArithmeticError(f"expectation has imaginary part {value.imag:.3g}")
    return float(value.real)


@dataclass(frozen=True)
class HamiltonianTerm:
    coeff: float
    string: PauliString


@dataclass(frozen=True)
class Hamiltonian:
    """``identity + sum_j coeff_j * string_j`` over ``qubit_count`` qubits."""

    qubit_count: int
    terms: tuple[HamiltonianTerm, ...] = ()
    identity: float = 0.0
    bond_length: float | None = None
    label: str = ""

    def __post_init__(self):
        for t in self.terms:
            if t.string.n_qubits != self.qubit_count:
                raise HamiltonianFormatError(
                    f"term {t.string} has {t.string.n_qubits} qubits, "
                    f"expected {self.qubit_count}"
                )
            if not math.isfinite(t.coeff) or t.coeff == 0.0:
                raise HamiltonianFormatError(
                    f"term {t.string} has invalid coefficient {t.coeff!r}"
                )
            if t.string.is_identity:
                raise HamiltonianFormatError(
                    "identity terms belong in the 'identity' field"
                )
            if t.string.xy_count % 2:
                raise HamiltonianFormatError(
                    f"term {t.string} has an odd number of X/Y axes and does not "
                    "conserve particle-number parity"
                )

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([t.coeff for t in self.terms])

    @property
    def strings(self) -> list[PauliString]:
        return [t.string for t in self.terms]

    def scaled(self, factor: float) -> "Hamiltonian":
        return Hamiltonian(
            self.qubit_count,
            tuple(HamiltonianTerm(factor * t.coeff, t.string) for t in self.terms),
            factor * self.identity,
            self.bond_length,
            self.label,
        )

    def matrix(self) -> np.ndarray:
        dim = 2**self.qubit_count
        h = self.identity * np.eye(dim, dtype=complex)
        for t in self.terms:
            h = h + t.coeff * t.string.matrix()
        return h

    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix())

    def ground_state(self, sector: tuple[int, int] | None = None):
        """Lowest eigenpair, optionally restricted to an (N_up, N_down) sector.

        Spin-up orbitals are the lower half of the register.
        """
        h = self.matrix()
        dim = h.shape[0]
        if sector is None:
            basis = np.arange(dim)
        else:
            basis = np.array(
                [k for k in range(dim) if spin_counts(k, self.qubit_count) == sector]
            )
        vals, vecs = np.linalg.eigh(h[np.ix_(basis, basis)])
        psi = np.zeros(dim, dtype=complex)
        psi[basis] = vecs[:, 0]
        return float(vals[0]), psi

    def ground_energy(self, sector: tuple[int, int] | None = None) -> float:
        return self.ground_state(sector)[0]

    def to_dict(self) -> dict:
        doc = {
            "qubits": self.qubit_count,
            "identity": self.identity,
            "terms": [{"coeff": t.coeff, "ops": t.string.label()} for t in self.terms],
        }
        if self.bond_length is not None:
            doc["bond_length_angstrom"] = self.bond_length
        if self.label:
            doc["label"] = self.label
        return doc


def spin_counts(index: int, n_qubits: int) -> tuple[int, int]:
    half = n_qubits // 2
    up = bin(index & ((1 << half) - 1)).count("1")
    down = bin(index >> half).count("1")
    return up, down


def exact_energy(state, h: Hamiltonian) -> float:
    return h.identity + sum(t.coeff * exact_expectation(state, t.string) for t in h.terms)


@dataclass(frozen=True)
class LadderOperatorExpansion:
    terms: tuple[tuple[complex, PauliString], ...]

    def matrix(self) -> np.ndarray:
        return sum(c * s.matrix() for c, s in self.terms)


def jw_ladder(p: int, dagger: bool, n_qubits: int) -> LadderOperatorExpansion:
    """Jordan-Wigner image of a_p (or a_p^dagger): (X_p +/- iY_p)/2 Z_{p-1}...Z_0."""
    if not 0 <= p < n_qubits:
        raise IndexError(f"orbital {p} outside register of {n_qubits} qubits")
    z_string = {q: "Z" for q in range(p)}
    x = PauliString.from_dict({**z_string, p: "X"}, n_qubits)
    y = PauliString.from_dict({**z_string, p: "Y"}, n_qubits)
    sign = -1 if dagger else 1
    return LadderOperatorExpansion(((0.5 + 0j, x), (sign * 0.5j, y)))


def pauli_decompose(matrix: np.ndarray, n_qubits: int, tol: float = 1e-12):
    """Coefficients of a Hermitian matrix on the Pauli basis, ``{PauliString: g}``."""
    from itertools import product

    dim = 2**n_qubits
    out = {}
    for axes in product(AXES, repeat=n_qubits):
        s = PauliString(tuple(axes))
        g = np.trace(s.matrix() @ matrix) / dim
        if abs(g.imag) > 1e-10:
            raise ValueError(f"non-Hermitian component on {s}")
        if abs(g.real) > tol:
            out[s] = float(g.real)
    return out


def _parse_document(doc: dict) -> Hamiltonian:
    try:
        n = int(doc["qubits"])
        identity = float(doc.get("identity", 0.0))
        raw_terms = doc["terms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise HamiltonianFormatError(f"missing or invalid field: {exc}") from exc
    terms = []
    for entry in raw_terms:
        string = PauliString.parse(entry["ops"], n)
        coeff = float(entry["coeff"])
        if string.is_identity:
            identity += coeff
            continue
        if string.xy_count % 2:
            raise HamiltonianFormatError(
                f"term {entry['ops']!r} has an odd number of X/Y axes "
                "(particle-number parity violation)"
            )
        terms.append(HamiltonianTerm(coeff, string))
    bond = doc.get("bond_length_angstrom")
    return Hamiltonian(
        n,
        tuple(terms),
        identity,
        None if bond is None else float(bond),
        str(doc.get("label", "")),
    )


def load_hamiltonian(source) -> Hamiltonian:
    """Load a Hamiltonian from a path, a JSON string, or an already-parsed dict."""
    if isinstance(source, dict):
        return _parse_document(source)
    if isinstance(source, Path) or (
        isinstance(source, str) and not source.lstrip().startswith("{")
    ):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise HamiltonianFormatError(f"not valid JSON: {exc}") from exc
    return _parse_document(doc)


def dump_hamiltonian(h: Hamiltonian) -> str:
    # repr() of a float is the shortest string that round-trips bit-exactly
    return json.dumps(h.to_dict(), indent=2) + "\n"


def data_dir() -> Path:
    env = os.environ.get("SYMCHECK_DATA_DIR")
    if env:
        return Path(env)
    return Path(__file__).resolve().parent / "data"


def bundled_hamiltonians() -> list[Hamiltonian]:
    """All ``h2_*.json`` files in the data directory, sorted by bond length."""
    hs = [load_hamiltonian(p) for p in sorted(data_dir().glob("h2_*.json"))]
    return sorted(hs, key=lambda h: (h.bond_length or 0.0))


EQUILIBRIUM_FILE = "h2_0.7414.json"


def equilibrium_hamiltonian() -> Hamiltonian:
    return load_hamiltonian(data_dir() / EQUILIBRIUM_FILE)
