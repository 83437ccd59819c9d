import math
from dataclasses import replace

import numpy as np
import pytest

from symcheck.circuits import CheckKind, UccsdParameters
from symcheck.noise import NoiseModel
from symcheck.vqe import (
    EnergyEstimate,
    ExtrapolationConfig,
    LowAcceptanceError,
    RunConfig,
    allocate_measurements,
    dissociation_scan,
    error_amplification,
    estimate_energy,
    extrapolated_estimate,
    mitigated_energy,
    noiseless_energy,
    optimize_parameters_noiseless,
    richardson_extrapolate,
    trial_parameters_at_energy,
)

from conftest import FCI_ENERGIES

# equal singles tuned so the noiseless energy is -1.1227 Ha at 0.7414 A
FIG4_PARAMS = UccsdParameters(0.0785979307547, 0.0785979307547, 0.113068143991)
OPT_T3120 = 0.11306814399


def test_allocation_formula():
    plan = allocate_measurements([0.5, -0.25, 0.25], 0.1)
    assert plan.shots == (50, 25, 25)
    assert plan.total >= (1.0 / 0.1) ** 2
    assert plan.bound() <= 0.1 + 1e-12


def test_allocation_on_h2(h_eq):
    plan = allocate_measurements(h_eq, 1e-3)
    norm = sum(abs(c) for c in h_eq.coefficients)
    assert norm == pytest.approx(1.8850504928513105, abs=1e-12)
    assert plan.total >= norm**2 / 1e-6
    assert plan.bound() <= 1e-3


def test_allocation_validation(h_eq):
    with pytest.raises(ValueError):
        allocate_measurements(h_eq, 0.0)
    with pytest.raises(ValueError):
        allocate_measurements([], 0.1)


def test_richardson_examples():
    assert richardson_extrapolate(1.0, 1.2, 2.0) == pytest.approx(0.8)
    assert richardson_extrapolate(0.3, 0.3, 1.7) == pytest.approx(0.3)
    with pytest.raises(ValueError):
        richardson_extrapolate(1.0, 1.0, 1.0)


def test_error_amplification_value():
    assert error_amplification(1.5) == pytest.approx(math.sqrt(6.5) / 0.5)
    assert error_amplification(1.5) == pytest.approx(5.10, abs=0.01)


def test_extrapolated_standard_error_matches_formula():
    # half the shots per point doubles each variance
    sigma = 0.01
    low = EnergyEstimate(1.0, sigma * math.sqrt(2), 10, 10)
    high = EnergyEstimate(1.1, sigma * math.sqrt(2), 10, 10)
    out = extrapolated_estimate(low, high, 1.5)
    assert out.std_err / sigma == pytest.approx(error_amplification(1.5))


def test_extrapolation_exact_on_linear_model():
    intercept, slope = np.array([0.3, -0.7]), np.array([2.0, 5.0])
    eps, lam = 0.004, 1.5
    o1, o2 = intercept + slope * eps, intercept + slope * lam * eps
    got = [richardson_extrapolate(a, b, lam) for a, b in zip(o1, o2)]
    assert np.allclose(got, intercept, atol=1e-14)


def test_inverse_rule():
    cfg = ExtrapolationConfig("inverse")
    assert cfg.factor(0.001) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        ExtrapolationConfig("fixed", lam=1.0)


def test_optimiser_reaches_ground_energy(h_eq):
    p = optimize_parameters_noiseless(h_eq, 1e-4)
    assert noiseless_energy(h_eq, p) - FCI_ENERGIES[0.7414] < 1e-4
    assert abs(p.t10) < 1e-3 and abs(p.t32) < 1e-3
    assert p.t3120 == pytest.approx(OPT_T3120, abs=1e-3)


def test_optimiser_loose_tolerance_returns_zero(h_eq):
    assert optimize_parameters_noiseless(h_eq, 0.1) == UccsdParameters()


def test_trial_parameters_hit_target(h_eq):
    p = trial_parameters_at_energy(h_eq, -1.1227)
    assert noiseless_energy(h_eq, p) == pytest.approx(-1.1227, abs=1e-10)
    assert p.t10 == pytest.approx(FIG4_PARAMS.t10, abs=1e-7)
    assert noiseless_energy(h_eq, FIG4_PARAMS) == pytest.approx(-1.1227, abs=1e-9)


def test_config_validation(h_eq):
    with pytest.raises(ValueError):
        RunConfig(h_eq, engine="magic")
    with pytest.raises(ValueError):
        RunConfig(h_eq, alpha_e=-1.0)


def test_noiseless_filtered_acceptance_is_one(h_eq):
    for engine in ("mixture", "trajectory"):
        cfg = RunConfig(h_eq, FIG4_PARAMS, alpha_e=2e-2, engine=engine)
        est = estimate_energy(cfg)
        assert est.shots_accepted == est.shots_used
        assert est.acceptance_fraction == 1.0


def test_noiseless_estimate_near_exact(h_eq):
    cfg = RunConfig(h_eq, FIG4_PARAMS, alpha_e=5e-4, engine="mixture")
    est = estimate_energy(cfg)
    assert abs(est.energy - (-1.1227)) < 3 * 5e-4
    assert est.std_err <= 5e-4


def test_noiseless_strategies_agree(h_eq):
    cfg = RunConfig(h_eq, FIG4_PARAMS, alpha_e=2e-3, seed=3)
    res = mitigated_energy(cfg)
    exact = noiseless_energy(h_eq, FIG4_PARAMS)
    for est in res.values():
        assert abs(est.energy - exact) < 3 * est.std_err


def test_same_seed_is_deterministic(h_eq):
    cfg = RunConfig(h_eq, FIG4_PARAMS, noise=NoiseModel.from_p2(0.01), alpha_e=1e-2, seed=11)
    assert estimate_energy(cfg) == estimate_energy(cfg)
    other = estimate_energy(replace(cfg, seed=12))
    assert other.energy != estimate_energy(cfg).energy


def test_trajectory_and_mixture_engines_agree(h_eq):
    noise = NoiseModel.from_p2(0.05)
    base = RunConfig(h_eq, FIG4_PARAMS, noise=noise, alpha_e=2.5e-2, check=CheckKind("total-parity"),
                     error_model="sample", seed=5)
    traj = estimate_energy(replace(base, engine="trajectory"))
    mix = estimate_energy(replace(base, engine="mixture"))
    exact = estimate_energy(replace(base, engine="exact"))
    for est in (traj, mix):
        assert abs(est.energy - exact.energy) < 4 * est.std_err
        p = exact.acceptance_fraction
        se = math.sqrt(p * (1 - p) / est.shots_used)
        assert abs(est.acceptance_fraction - p) < 4 * se


def test_trajectory_engine_with_rotations_matches_exact(h_eq):
    noise = NoiseModel(delta_max=0.3, correlated=True)
    base = RunConfig(h_eq, FIG4_PARAMS, noise=noise, alpha_e=2.5e-2, check=CheckKind("none"), seed=2)
    traj = estimate_energy(replace(base, engine="trajectory"))
    exact = estimate_energy(replace(base, engine="exact", quadrature_points=4))
    assert abs(traj.energy - exact.energy) < 4 * traj.std_err


def test_acceptance_decreases_with_noise(h_eq):
    fractions = []
    for p2 in (0.0, 0.001, 0.005, 0.01, 0.02):
        cfg = RunConfig(h_eq, FIG4_PARAMS, noise=NoiseModel.from_p2(p2), engine="exact")
        fractions.append(estimate_energy(cfg).acceptance_fraction)
    assert fractions[0] == 1.0
    assert all(a >= b for a, b in zip(fractions, fractions[1:]))


def test_low_acceptance_aborts(h_eq):
    cfg = RunConfig(h_eq, FIG4_PARAMS, noise=NoiseModel.from_p2(0.3), alpha_e=5e-2, min_acceptance=0.9)
    for engine in ("mixture", "exact"):
        with pytest.raises(LowAcceptanceError):
            estimate_energy(replace(cfg, engine=engine))


def test_filtering_reduces_bias(h_eq):
    cfg = RunConfig(h_eq, FIG4_PARAMS, noise=NoiseModel.from_p2(0.01), engine="exact")
    exact = noiseless_energy(h_eq, FIG4_PARAMS)
    raw = estimate_energy(cfg, filtered=False)
    kept = estimate_energy(cfg, filtered=True)
    assert abs(kept.energy - exact) < abs(raw.energy - exact)
    assert kept.energy >= FCI_ENERGIES[0.7414]


def test_sample_error_model_is_tighter(h_eq):
    cfg = RunConfig(h_eq, FIG4_PARAMS, alpha_e=1e-2)
    bound = estimate_energy(replace(cfg, error_model="bound"))
    sample = estimate_energy(replace(cfg, error_model="sample"))
    assert sample.std_err < bound.std_err <= 1e-2 * 1.0001


def test_detection_fraction_bookkeeping(h_eq):
    cfg = RunConfig(h_eq, FIG4_PARAMS, noise=NoiseModel.from_p2(0.01), alpha_e=1e-2)
    est = estimate_energy(cfg)
    assert 0 < est.faulty_rejected <= est.faulty_shots <= est.shots_used
    assert 0 < est.detection_fraction < 1
    assert est.fault_events >= est.faulty_shots * 0.9


def test_dissociation_scan_noiseless(hamiltonians):
    template = RunConfig(hamiltonians[0], alpha_e=2e-3, engine="mixture")
    rows = dissociation_scan(template, hamiltonians[:2], strategies=("unmitigated", "combined"))
    assert {r.strategy for r in rows} == {"noiseless", "unmitigated", "combined"}
    for r in rows:
        if r.strategy == "noiseless":
            assert abs(r.residual_mhartree) < 0.1
        else:
            assert abs(r.estimate.energy - r.reference) < 3 * r.estimate.std_err + 1e-4
