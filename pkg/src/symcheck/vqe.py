"""Sampled energy estimation with post-selection, extrapolation and optimisation.

Three interchangeable back-ends produce the per-term shot statistics:

``trajectory``
    Monte-Carlo pure-state trajectories, one fault sample per gate.
``mixture``
    Exact per-shot outcome distribution from density-matrix evolution
    (Gauss-Legendre quadrature over the rotation offsets), then multinomial
    sampling of the shot counts. Shots are iid, so the counts have the same
    law as the trajectory engine at a tiny fraction of the cost.
``exact``
    The same distribution without sampling: infinite-shot means, zero error.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize

from .analysis import DensityOutcome, evolve_density_exact, register_expectation
from .circuits import CheckKind, UccsdParameters, build_uccsd_h2, term_circuit
from .noise import NoiseModel
from .pauli import Hamiltonian, HamiltonianTerm, exact_energy
from .simulator import Circuit, run_batch, run_noiseless

ENGINES = ("trajectory", "mixture", "exact")
ERROR_MODELS = ("bound", "sample")
STRATEGIES = ("unmitigated", "detection", "extrapolation", "combined")
FIG4_TRUE_ENERGY = -1.1227


class LowAcceptanceError(RuntimeError):
    pass


class OptimizationError(RuntimeError):
    pass


# -- measurement allocation ------------------------------------------------------

@dataclass(frozen=True)
class MeasurementPlan:
    alpha_e: float
    coefficients: tuple[float, ...]
    shots: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.shots)

    def scaled(self, fraction: float) -> "MeasurementPlan":
        return replace(self, shots=tuple(max(1, math.ceil(n * fraction)) for n in self.shots))

    def bound(self) -> float:
        """Upper bound on the energy standard error (every term variance <= 1)."""
        return math.sqrt(sum(g * g / n for g, n in zip(self.coefficients, self.shots)))


def _ceil(x: float) -> int:
    # protect exact integers from float round-up (80.00000000000001 -> 80)
    return math.ceil(x * (1 - 1e-12))


def allocate_measurements(h: Hamiltonian | Sequence[float], alpha_e: float) -> MeasurementPlan:
    """N_i = ceil(|g_i| sum_j |g_j| / alpha_E^2); the identity offset is not sampled."""
    if alpha_e <= 0:
        raise ValueError("alpha_e must be positive")
    g = tuple(float(c) for c in (h.coefficients if isinstance(h, Hamiltonian) else h))
    if not g:
        raise ValueError("nothing to measure: the Hamiltonian has no non-identity terms")
    norm = sum(abs(c) for c in g)
    return MeasurementPlan(alpha_e, g, tuple(max(1, _ceil(abs(c) * norm / alpha_e**2)) for c in g))


# -- configuration ---------------------------------------------------------------

@dataclass(frozen=True)
class ExtrapolationConfig:
    """Stretch factor: ``fixed`` uses ``lam``; ``inverse`` uses 1 + scale/p2.

    ``rotation_stretch`` says how the correlated-rotation bound follows the
    stretch: ``none`` (default), ``linear`` (delta_max * lam) or ``sqrt``
    (delta_max * sqrt(lam), which scales the rotation variance by lam).
    """

    rule: str = "fixed"
    lam: float = 1.5
    scale: float = 0.001
    rotation_stretch: str = "none"

    def __post_init__(self):
        if self.rule not in ("fixed", "inverse"):
            raise ValueError("extrapolation rule must be 'fixed' or 'inverse'")
        if not self.lam > 1:
            raise ValueError("stretch factor must exceed 1")
        if self.scale <= 0:
            raise ValueError("inverse-rule scale must be positive")
        if self.rotation_stretch not in ("none", "linear", "sqrt"):
            raise ValueError("rotation_stretch must be 'none', 'linear' or 'sqrt'")

    def delta_factor(self, lam: float) -> float:
        return {"none": 1.0, "linear": lam, "sqrt": math.sqrt(lam)}[self.rotation_stretch]

    def factor(self, p2: float) -> float:
        if self.rule == "inverse" and p2 > 0:
            return 1.0 + self.scale / p2
        return self.lam


@dataclass(frozen=True)
class RunConfig:
    hamiltonian: Hamiltonian
    params: UccsdParameters = UccsdParameters()
    noise: NoiseModel = NoiseModel()
    check: CheckKind = CheckKind("local-spin-parity")
    alpha_e: float = 1e-3
    extrapolation: ExtrapolationConfig = ExtrapolationConfig()
    seed: int = 0
    filter: bool = True
    extrapolate: bool = False
    engine: str = "mixture"
    error_model: str = "sample"
    quadrature_points: int = 2
    chunk: int = 1 << 14
    threads: int = 1
    min_acceptance: float = 1e-3

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}")
        if self.error_model not in ERROR_MODELS:
            raise ValueError(f"error model must be one of {ERROR_MODELS}")
        if self.alpha_e <= 0:
            raise ValueError("alpha_e must be positive")
        if self.hamiltonian.qubit_count != 4:
            raise ValueError("the UCCSD ansatz acts on the 4-qubit H2 register")
        if self.quadrature_points < 1:
            raise ValueError("need at least one quadrature point per qubit")

    @property
    def lam(self) -> float:
        return self.extrapolation.factor(self.noise.p2)

    def echo(self) -> dict:
        """JSON-ready summary of every setting that affects the numbers."""
        return {
            "hamiltonian": self.hamiltonian.label,
            "bond_length": self.hamiltonian.bond_length,
            "params": asdict(self.params),
            "noise": asdict(self.noise),
            "check": self.check.name,
            "alpha_e": self.alpha_e,
            "extrapolation": asdict(self.extrapolation),
            "lambda": self.lam,
            "seed": self.seed,
            "filter": self.filter,
            "extrapolate": self.extrapolate,
            "engine": self.engine,
            "error_model": self.error_model,
            "quadrature_points": self.quadrature_points,
        }


# -- estimates -------------------------------------------------------------------

@dataclass(frozen=True)
class EnergyEstimate:
    energy: float
    std_err: float
    shots_used: int
    shots_accepted: int
    term_means: tuple[float, ...] = ()
    faulty_shots: int = 0
    faulty_rejected: int = 0
    fault_events: float = 0.0

    @property
    def acceptance_fraction(self) -> float:
        return self.shots_accepted / self.shots_used if self.shots_used else 1.0

    @property
    def detection_fraction(self) -> float:
        """Share of shots containing at least one fault that the check rejected."""
        return self.faulty_rejected / self.faulty_shots if self.faulty_shots else float("nan")

    @property
    def event_detection_fraction(self) -> float:
        """Rejected faulty shots per fault event (several faults in one shot count once)."""
        return self.faulty_rejected / self.fault_events if self.fault_events else float("nan")


# Outcome cells per shot: index = 4*accepted + 2*faulty + (value == -1)
def _cell(accepted, faulty, minus):
    return 4 * accepted + 2 * faulty + minus


@dataclass(frozen=True)
class TermTally:
    used: int
    accepted: int
    plus: int  # accepted shots reading +1
    faulty: int
    faulty_rejected: int
    fault_events: float = 0.0

    @classmethod
    def from_cells(cls, counts: np.ndarray, fault_events: float | None = None, rate: float = 0.0) -> "TermTally":
        """``fault_events`` defaults to its expectation, ``rate`` faults per shot."""
        c = np.asarray(counts, dtype=np.int64)
        acc = c[4:].sum()
        used = int(c.sum())
        return cls(
            used=used,
            accepted=int(acc),
            plus=int(c[_cell(1, 0, 0)] + c[_cell(1, 1, 0)]),
            faulty=int(c[[2, 3, 6, 7]].sum()),
            faulty_rejected=int(c[[2, 3]].sum()),
            fault_events=float(used * rate if fault_events is None else fault_events),
        )

    @property
    def mean(self) -> float:
        return (2 * self.plus - self.accepted) / self.accepted


# -- outcome distributions (mixture / exact engines) ---------------------------------

def expected_faults(circuit: Circuit, noise: NoiseModel) -> float:
    """Mean number of depolarising fault events per shot."""
    return sum(
        (noise.two_rate if g.is_two_qubit else noise.single_rate)
        for g in circuit.gates
        if g.is_unitary and not g.noise_exempt
    )


def _quadrature(noise: NoiseModel, qubits: Sequence[int], n_qubits: int, points: int):
    """Weighted per-qubit epsilon tables averaging over the rotation offsets."""
    if not noise.rotations_on or not qubits:
        return [(1.0, None)]
    x, w = np.polynomial.legendre.leggauss(points)
    nodes = []
    for combo in product(range(points), repeat=len(qubits)):
        delta = np.zeros(n_qubits)
        weight = 1.0
        for q, k in zip(qubits, combo):
            delta[q] = noise.delta_max * x[k]
            weight *= w[k] / 2
        nodes.append((weight, (1.0 - delta / 10.0, 1.0 - delta)))
    return nodes


def _rotated_qubits(circuit: Circuit) -> list[int]:
    return sorted({g.target for g in circuit.gates if g.is_unitary and g.epsilon_scalable and not g.noise_exempt})


def _flip_acceptance(circuit: Circuit, bits: dict, readout: float) -> float:
    """Probability that the check slots of a record pass after readout flips."""
    slots = sorted({s for chk in circuit.checks for s in chk.slots})
    if readout == 0 or not slots:
        return float(circuit.accepted(bits))
    total = 0.0
    for flips in product((0, 1), repeat=len(slots)):
        k = sum(flips)
        w = readout**k * (1 - readout) ** (len(slots) - k)
        flipped = {**bits, **{s: bits[s] ^ f for s, f in zip(slots, flips)}}
        total += w * circuit.accepted(flipped)
    return total


def _accumulate_register_cells(cells, weight, outcome: DensityOutcome, circuit: Circuit, terms, readout):
    """Cells for every term from one prefix evolution; term readout is appended noise-free."""
    n = circuit.qubit_count
    acc_t = {1: 0, 0: 0}
    acc_c = {1: 0, 0: 0}
    for key, b in outcome.branches.items():
        pa = _flip_acceptance(circuit, outcome.bits(key), readout)
        for flag, share in ((1, pa), (0, 1 - pa)):
            if share:
                acc_t[flag] = acc_t[flag] + share * b.total
                acc_c[flag] = acc_c[flag] + share * b.clean
    for i, term in enumerate(terms):
        f = (1 - 2 * readout) ** len(term.string.support)
        for flag in (0, 1):
            if isinstance(acc_t[flag], int):
                continue
            wt, wc = np.trace(acc_t[flag]).real, np.trace(acc_c[flag]).real
            st = f * register_expectation(acc_t[flag], n, term.string)
            sc = f * register_expectation(acc_c[flag], n, term.string)
            for faulty, ww, ss in ((0, wc, sc), (1, wt - wc, st - sc)):
                cells[i, _cell(flag, faulty, 0)] += weight * (ww + ss) / 2
                cells[i, _cell(flag, faulty, 1)] += weight * (ww - ss) / 2


def _accumulate_record_cells(cells_row, weight, outcome: DensityOutcome, circuit: Circuit, readout):
    """Generic path: acceptance and value both read from the measurement record."""
    slots = outcome.slots
    patterns = list(product((0, 1), repeat=len(slots))) if readout else [(0,) * len(slots)]
    for key, b in outcome.branches.items():
        t, c = b.probability, b.clean_probability
        for flips in patterns:
            k = sum(flips)
            w = readout**k * (1 - readout) ** (len(slots) - k)
            bits = dict(zip(slots, (x ^ f for x, f in zip(key, flips))))
            acc, minus = int(circuit.accepted(bits)), int(circuit.value(bits) < 0)
            cells_row[_cell(acc, 0, minus)] += weight * w * c
            cells_row[_cell(acc, 1, minus)] += weight * w * (t - c)


def outcome_distribution(
    h: Hamiltonian,
    params: UccsdParameters,
    check: CheckKind,
    noise: NoiseModel,
    filtered: bool,
    quadrature_points: int = 2,
) -> np.ndarray:
    """Exact per-shot cell probabilities, shape (terms, 8)."""
    return _outcome_distribution_cached(h, params, check, noise, filtered, quadrature_points).copy()


@lru_cache(maxsize=256)
def _outcome_distribution_cached(h, params, check, noise, filtered, points) -> np.ndarray:
    ansatz = build_uccsd_h2(params)
    cells = np.zeros((len(h.terms), 8))
    if check.name == "hadamard-test":
        for i, term in enumerate(h.terms):
            circ = term_circuit(ansatz, term.string, check, filtered)
            for w, eps in _quadrature(noise, _rotated_qubits(circ), circ.qubit_count, points):
                out = evolve_density_exact(circ, noise, eps)
                _accumulate_record_cells(cells[i], w, out, circ, noise.readout_flip)
    else:
        prefix = check.attach(ansatz) if filtered else ansatz
        for w, eps in _quadrature(noise, _rotated_qubits(prefix), prefix.qubit_count, points):
            out = evolve_density_exact(prefix, noise, eps)
            _accumulate_register_cells(cells, w, out, prefix, h.terms, noise.readout_flip)
    cells = np.clip(cells, 0.0, None)
    return cells / cells.sum(axis=1, keepdims=True)


def _sample_cells(probs: np.ndarray, n_accept: int, filtered: bool, rng, min_acceptance: float) -> np.ndarray:
    """Counts of a draw-until-``n_accept``-accepted experiment (or ``n_accept`` shots)."""
    if not filtered:
        return rng.multinomial(n_accept, probs / probs.sum())
    p_acc = probs[4:].sum()
    if p_acc < min_acceptance:
        raise LowAcceptanceError(f"acceptance probability {p_acc:.2e} is below {min_acceptance:g}")
    counts = np.zeros(8, dtype=np.int64)
    counts[4:] = rng.multinomial(n_accept, probs[4:] / p_acc)
    if p_acc < 1:
        rejected = rng.negative_binomial(n_accept, p_acc)
        if rejected:
            counts[:4] = rng.multinomial(rejected, probs[:4] / probs[:4].sum())
    return counts


# -- trajectory engine -----------------------------------------------------------

def _trajectory_cells(circuit: Circuit, noise: NoiseModel, n_accept: int, filtered: bool, seed, stream, chunk: int,
                      min_acceptance: float) -> np.ndarray:
    counts = np.zeros(8, dtype=np.int64)
    events = 0
    accepted = 0
    used = 0
    k = 0
    p_est = 1.0
    obs_cols = None
    while accepted < n_accept:
        need = n_accept - accepted
        size = min(chunk, max(16, math.ceil(need / max(p_est, 0.05) * 1.05)))
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(stream) + (k,)))
        res = run_batch(circuit, noise, rng, size)
        cols = {s: i for i, s in enumerate(res.slots)}
        ok = np.ones(size, dtype=bool)
        if filtered:
            for chk in circuit.checks:
                par = np.bitwise_xor.reduce(res.bits[:, [cols[s] for s in chk.slots]], axis=1)
                ok &= par == chk.expected
        if circuit.observable:
            minus = np.bitwise_xor.reduce(res.bits[:, [cols[s] for s in circuit.observable]], axis=1).astype(bool)
        else:
            minus = np.zeros(size, dtype=bool)
        faulty = res.n_faults > 0
        # keep shots up to and including the n_accept-th acceptance
        cum = np.cumsum(ok)
        if cum[-1] >= need:
            stop = int(np.searchsorted(cum, need)) + 1
            ok, minus, faulty = ok[:stop], minus[:stop], faulty[:stop]
        events += int(res.n_faults[: ok.size].sum())
        idx = 4 * ok + 2 * faulty + minus
        counts += np.bincount(idx, minlength=8)
        accepted += int(ok.sum())
        used += ok.size
        p_est = max(accepted / used, 1e-6)
        k += 1
        if used >= 10 / min_acceptance and accepted / used < min_acceptance:
            raise LowAcceptanceError(f"acceptance fraction {accepted / used:.2e} is below {min_acceptance:g}")
    return counts, events


# -- energy estimation -------------------------------------------------------------

def _combine(h: Hamiltonian, tallies: Sequence[TermTally], error_model: str, exact_means=None) -> EnergyEstimate:
    g = np.array(h.coefficients)
    if exact_means is not None:
        means = np.asarray(exact_means)
        se = 0.0
    else:
        means = np.array([t.mean for t in tallies])
        n = np.array([t.accepted for t in tallies], dtype=float)
        var = np.ones_like(means) if error_model == "bound" else np.clip(1 - means**2, 0, None)
        se = float(np.sqrt(np.sum(g**2 * var / n)))
    return EnergyEstimate(
        energy=float(h.identity + g @ means),
        std_err=se,
        shots_used=sum(t.used for t in tallies),
        shots_accepted=sum(t.accepted for t in tallies),
        term_means=tuple(float(m) for m in means),
        faulty_shots=sum(t.faulty for t in tallies),
        faulty_rejected=sum(t.faulty_rejected for t in tallies),
        fault_events=sum(t.fault_events for t in tallies),
    )


def _term_rates(config: RunConfig, noise: NoiseModel, filtered: bool) -> list[float]:
    ansatz = build_uccsd_h2(config.params)
    return [expected_faults(term_circuit(ansatz, t.string, config.check, filtered), noise)
            for t in config.hamiltonian.terms]


def estimate_energy(
    config: RunConfig,
    p_scale: float = 1.0,
    shot_fraction: float = 1.0,
    stream: tuple[int, ...] = (),
    filtered: bool | None = None,
) -> EnergyEstimate:
    """Sampled energy at depolarising strength ``p_scale`` times the configured rates.

    With filtering, rejected shots are redrawn until every term has its
    planned number of accepted samples. ``stream`` selects an independent
    random substream so several estimates can share one master seed.
    """
    h = config.hamiltonian
    filtered = config.filter if filtered is None else filtered
    filtered = filtered and not config.check.is_none
    delta_factor = config.extrapolation.delta_factor(p_scale) if p_scale != 1.0 else 1.0
    noise = config.noise.scaled(p_scale, delta_factor)
    plan = allocate_measurements(h, config.alpha_e).scaled(shot_fraction)
    key = tuple(stream) + (int(filtered),)

    if config.engine in ("mixture", "exact"):
        probs = outcome_distribution(h, config.params, config.check, noise, filtered, config.quadrature_points)
        rates = _term_rates(config, noise, filtered)
        if config.engine == "exact":
            p_acc = probs[:, 4:].sum(axis=1)
            if filtered and np.any(p_acc < config.min_acceptance):
                raise LowAcceptanceError(f"acceptance probability {p_acc.min():.2e} is below {config.min_acceptance:g}")
            src = probs[:, 4:] if filtered else probs[:, 4:] + probs[:, :4]
            means = (src[:, [0, 2]].sum(axis=1) - src[:, [1, 3]].sum(axis=1)) / src.sum(axis=1)
            acc = float(p_acc.mean()) if filtered else 1.0
            faulty = probs[:, [2, 3, 6, 7]].sum(axis=1).mean()
            rejected = probs[:, [2, 3]].sum(axis=1).mean() if filtered else 0.0
            # report per-million rates so fractions stay derivable
            scale = 10**6
            return EnergyEstimate(
                energy=float(h.identity + np.array(h.coefficients) @ means),
                std_err=0.0,
                shots_used=scale,
                shots_accepted=round(acc * scale),
                term_means=tuple(float(m) for m in means),
                faulty_shots=round(faulty * scale),
                faulty_rejected=round(rejected * scale),
                fault_events=float(np.mean(rates)) * scale,
            )
        tallies = []
        for i, n in enumerate(plan.shots):
            rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=key + (i,)))
            counts = _sample_cells(probs[i], n, filtered, rng, config.min_acceptance)
            tallies.append(TermTally.from_cells(counts, rate=rates[i]))
        return _combine(h, tallies, config.error_model)

    ansatz = build_uccsd_h2(config.params)

    def one(i: int) -> TermTally:
        circ = term_circuit(ansatz, h.terms[i].string, config.check, filtered)
        counts, events = _trajectory_cells(circ, noise, plan.shots[i], filtered, config.seed, key + (i,),
                                           config.chunk, config.min_acceptance)
        return TermTally.from_cells(counts, fault_events=events)

    if config.threads > 1:
        with ThreadPoolExecutor(config.threads) as pool:
            tallies = list(pool.map(one, range(len(h.terms))))
    else:
        tallies = [one(i) for i in range(len(h.terms))]
    return _combine(h, tallies, config.error_model)


def richardson_extrapolate(o_eps: float, o_lambda_eps: float, lam: float) -> float:
    """Linear zero-noise estimate from observations at noise eps and lam*eps."""
    if not lam > 1:
        raise ValueError("stretch factor must exceed 1")
    return (lam * o_eps - o_lambda_eps) / (lam - 1)


def error_amplification(lam: float) -> float:
    """Standard-error inflation of the extrapolated value at equal total shots."""
    return math.sqrt(2 * (lam**2 + 1)) / (lam - 1)


def extrapolated_estimate(low: EnergyEstimate, high: EnergyEstimate, lam: float) -> EnergyEstimate:
    means = tuple(richardson_extrapolate(a, b, lam) for a, b in zip(low.term_means, high.term_means))
    return EnergyEstimate(
        energy=richardson_extrapolate(low.energy, high.energy, lam),
        std_err=math.sqrt(lam**2 * low.std_err**2 + high.std_err**2) / (lam - 1),
        shots_used=low.shots_used + high.shots_used,
        shots_accepted=low.shots_accepted + high.shots_accepted,
        term_means=means,
        faulty_shots=low.faulty_shots,
        faulty_rejected=low.faulty_rejected,
        fault_events=low.fault_events,
    )


def mitigated_energy(config: RunConfig, strategies: Iterable[str] = STRATEGIES, stream: tuple[int, ...] = ()) -> dict[str, EnergyEstimate]:
    """The filter on/off x extrapolate on/off grid at matched shot budgets.

    Extrapolated strategies split the plan equally between the points at
    the configured noise and at lam times it. The extrapolated detection
    fraction is that of the lower-noise point.
    """
    out = {}
    lam = config.lam
    for name in strategies:
        if name not in STRATEGIES:
            raise ValueError(f"unknown strategy {name!r}")
        filtered = name in ("detection", "combined")
        if name in ("unmitigated", "detection"):
            out[name] = estimate_energy(config, 1.0, 1.0, tuple(stream) + (0,), filtered)
        else:
            low = estimate_energy(config, 1.0, 0.5, tuple(stream) + (1,), filtered)
            high = estimate_energy(config, lam, 0.5, tuple(stream) + (2,), filtered)
            out[name] = extrapolated_estimate(low, high, lam)
    return out


# -- noiseless optimisation --------------------------------------------------------

def noiseless_state(params: UccsdParameters):
    return run_noiseless(build_uccsd_h2(params))


def noiseless_energy(h: Hamiltonian, params: UccsdParameters) -> float:
    return exact_energy(noiseless_state(params), h)


def optimize_parameters_noiseless(h: Hamiltonian, tolerance: float = 1e-4, max_iter: int = 4000) -> UccsdParameters:
    """Derivative-free minimisation of the noiseless energy starting from zero amplitudes."""
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    ground = h.ground_energy(sector=(1, 1))
    hm = h.matrix()

    def energy(x):
        psi = noiseless_state(UccsdParameters(*x)).amplitudes
        return float(np.vdot(psi, hm @ psi).real)

    x0 = np.zeros(3)
    if energy(x0) - ground <= tolerance:
        return UccsdParameters()
    simplex = np.vstack([x0, 0.2 * np.eye(3)])
    res = minimize(energy, x0, method="Nelder-Mead",
                   options={"initial_simplex": simplex, "xatol": 1e-9, "fatol": 1e-14, "maxiter": max_iter})
    best = UccsdParameters(*res.x)
    if energy(res.x) - ground > tolerance:
        raise OptimizationError(f"optimiser stopped {energy(res.x) - ground:.2e} Ha above the ground energy")
    return best


def trial_parameters_at_energy(h: Hamiltonian, target: float = FIG4_TRUE_ENERGY) -> UccsdParameters:
    """Optimal doubles amplitude plus equal singles tuned so the noiseless energy equals ``target``.

    The singles populate all four two-electron determinants of the sector.
    """
    opt = optimize_parameters_noiseless(h, 1e-9)
    f = lambda s: noiseless_energy(h, UccsdParameters(s, s, opt.t3120)) - target  # noqa: E731
    if f(0.0) > 0:
        raise ValueError("target energy lies below the ansatz minimum")
    hi = 0.05
    while f(hi) < 0:
        hi *= 2
        if hi > math.pi:
            raise ValueError("target energy is not reachable by the singles amplitude")
    s = brentq(f, 0.0, hi, xtol=1e-14)
    return UccsdParameters(s, s, opt.t3120)


# -- dissociation scan -------------------------------------------------------------

@dataclass(frozen=True)
class ScanRow:
    bond_length: float
    strategy: str
    estimate: EnergyEstimate
    reference: float
    lam: float

    @property
    def residual_mhartree(self) -> float:
        return 1e3 * (self.estimate.energy - self.reference)


def dissociation_scan(
    template: RunConfig,
    hamiltonians: Sequence[Hamiltonian],
    strategies: Sequence[str] = ("unmitigated", "detection", "extrapolation", "combined"),
) -> list[ScanRow]:
    """Per bond length: the noiseless optimum and each noisy strategy, with residuals.

    Parameters are re-optimised noiselessly at every geometry; residuals are
    taken against dense diagonalisation in the two-electron singlet sector.
    """
    rows = []
    for b, h in enumerate(hamiltonians):
        params = optimize_parameters_noiseless(h, 1e-7)
        ground = h.ground_energy(sector=(1, 1))
        cfg = replace(template, hamiltonian=h, params=params)
        e0 = noiseless_energy(h, params)
        rows.append(ScanRow(h.bond_length, "noiseless", EnergyEstimate(e0, 0.0, 0, 0), ground, cfg.lam))
        for name, est in mitigated_energy(cfg, strategies, stream=(b,)).items():
            rows.append(ScanRow(h.bond_length, name, est, ground, cfg.lam))
    return rows
