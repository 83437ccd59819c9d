"""Depolarising faults, temporally correlated over/under rotations, readout flips."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import product

import numpy as np

SINGLE_FAULTS = ("X", "Y", "Z")
TWO_QUBIT_FAULTS = tuple(
    (a, b) for a, b in product("IXYZ", repeat=2) if (a, b) != ("I", "I")
)
# pairs that flip the total parity of the two qubits they act on
PARITY_VIOLATING_PAIRS = frozenset(
    (a, b) for a, b in TWO_QUBIT_FAULTS if ((a in "XY") + (b in "XY")) % 2 == 1
)


@dataclass(frozen=True)
class NoiseModel:
    """Noise configuration shared read-only by every trajectory.

    ``p1``/``p2`` are the single- and two-qubit depolarising probabilities.
    Correlated rotations draw ``delta_q ~ U(-delta_max, delta_max)`` per qubit
    per shot when ``correlated`` is set.
    """

    p1: float = 0.0
    p2: float = 0.0
    delta_max: float = 0.01
    readout_flip: float = 0.0
    depolarizing: bool = True
    correlated: bool = False

    def __post_init__(self):
        for name in ("p1", "p2", "readout_flip"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.delta_max < 0:
            raise ValueError("delta_max must be non-negative")

    @classmethod
    def from_p2(cls, p2: float, ratio: float = 10.0, **kwargs) -> "NoiseModel":
        """Two-qubit rate ``p2`` with single-qubit gates ``ratio`` times less noisy."""
        return cls(p1=p2 / ratio, p2=p2, **kwargs)

    def scaled(self, factor: float, delta_factor: float = 1.0) -> "NoiseModel":
        """Stretch the depolarising rates; rotation strength only if ``delta_factor`` is set."""
        return replace(
            self,
            p1=min(1.0, self.p1 * factor),
            p2=min(1.0, self.p2 * factor),
            delta_max=self.delta_max * delta_factor,
        )

    @property
    def single_rate(self) -> float:
        return self.p1 if self.depolarizing else 0.0

    @property
    def two_rate(self) -> float:
        return self.p2 if self.depolarizing else 0.0

    @property
    def rotations_on(self) -> bool:
        return self.correlated and self.delta_max > 0

    @property
    def is_noiseless(self) -> bool:
        return (
            self.single_rate == 0
            and self.two_rate == 0
            and not self.rotations_on
            and self.readout_flip == 0
        )


NOISELESS = NoiseModel()


@dataclass(frozen=True)
class FaultEvent:
    gate_index: int
    qubits: tuple[int, ...]
    paulis: tuple[str, ...]

    def __post_init__(self):
        if all(p == "I" for p in self.paulis):
            raise ValueError("an all-identity fault is not a fault")


def single_fault_table(p: float) -> list[tuple[str | None, Fraction]]:
    """Branch table of the single-qubit channel; probabilities sum to exactly 1."""
    fp = Fraction(p)
    return [(None, 1 - fp)] + [(a, fp / 3) for a in SINGLE_FAULTS]


def two_qubit_fault_table(p: float) -> list[tuple[tuple[str, str] | None, Fraction]]:
    fp = Fraction(p)
    return [(None, 1 - fp)] + [(pair, fp / 15) for pair in TWO_QUBIT_FAULTS]


def cumulative(table) -> np.ndarray:
    """Upper edges of each branch in [0, 1) for inverse-CDF sampling."""
    acc = Fraction(0)
    edges = []
    for _, prob in table:
        acc += prob
        edges.append(float(acc))
    return np.array(edges)


def branch_index(u, edges: np.ndarray):
    """Map uniforms to branch indices (0 means no fault)."""
    idx = np.searchsorted(edges, u, side="right")
    return np.minimum(idx, len(edges) - 1)


def sample_single_fault(p1: float, rng: np.random.Generator) -> str | None:
    table = single_fault_table(p1)
    return table[int(branch_index(rng.random(), cumulative(table)))][0]


def sample_two_qubit_fault(p2: float, rng: np.random.Generator) -> tuple[str, str] | None:
    table = two_qubit_fault_table(p2)
    return table[int(branch_index(rng.random(), cumulative(table)))][0]


def epsilons_from_uniform(u: np.ndarray, delta_max: float):
    """Per-qubit (single-qubit-gate, two-qubit-target) scale factors."""
    delta = delta_max * (2.0 * np.asarray(u) - 1.0)
    return 1.0 - delta / 10.0, 1.0 - delta


def draw_correlated_epsilons(qubit_count: int, delta_max: float, rng: np.random.Generator):
    """One shot's over/under rotation factors, reused by every gate on a qubit."""
    if delta_max == 0:
        ones = np.ones(qubit_count)
        return ones, ones.copy()
    return epsilons_from_uniform(rng.random(qubit_count), delta_max)


def apply_readout_flip(bit: int, readout_flip: float, rng: np.random.Generator) -> int:
    if readout_flip == 0:
        return bit
    return bit ^ int(rng.random() < readout_flip)
