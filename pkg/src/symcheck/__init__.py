"""Symmetry-check error detection for noisy VQE simulations of H2."""

from .analysis import (
    DensityMatrix,
    DetectionReport,
    bitflip_pair_detection_rate,
    enumerate_fault_detection,
    evolve_density_exact,
    spin_pair_detectable_fraction,
    verify_variational_bound,
)
from .circuits import CheckKind, UccsdParameters, build_uccsd_h2
from .noise import NoiseModel
from .pauli import Hamiltonian, PauliString, exact_energy, exact_expectation, jw_ladder, load_hamiltonian
from .simulator import Circuit, Gate, StateVector, run_trajectory
from .vqe import (
    EnergyEstimate,
    ExtrapolationConfig,
    RunConfig,
    allocate_measurements,
    estimate_energy,
    mitigated_energy,
    optimize_parameters_noiseless,
    richardson_extrapolate,
)

__all__ = [
    "Circuit", "CheckKind", "DensityMatrix", "DetectionReport", "EnergyEstimate",
    "ExtrapolationConfig", "Gate", "Hamiltonian", "NoiseModel", "PauliString", "RunConfig",
    "StateVector", "UccsdParameters", "allocate_measurements", "bitflip_pair_detection_rate",
    "build_uccsd_h2", "enumerate_fault_detection", "estimate_energy", "evolve_density_exact",
    "exact_energy", "exact_expectation", "jw_ladder", "load_hamiltonian", "mitigated_energy",
    "optimize_parameters_noiseless", "richardson_extrapolate", "run_trajectory",
    "spin_pair_detectable_fraction", "verify_variational_bound",
]
