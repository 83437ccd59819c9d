"""Command-line entry point: ``symcheck <command> [flags]``.

Results go to ``--out`` (or stdout) as CSV or JSON. A CSV written to a file
gets a JSON mirror next to it with the resolved configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, replace
from fractions import Fraction
from pathlib import Path

from .analysis import (
    bitflip_pair_detection_rate,
    depolarizing_detection_bound,
    enumerate_check_internal_faults,
    enumerate_fault_detection,
    spin_pair_detectable_fraction,
)
from .circuits import CHECK_NAMES, HF_STATE, CheckKind, UccsdParameters
from .noise import NoiseModel
from .pauli import (
    EQUILIBRIUM_FILE,
    Hamiltonian,
    HamiltonianFormatError,
    bundled_hamiltonians,
    data_dir,
    load_hamiltonian,
)
from .simulator import StateVector
from .vqe import (
    ENGINES,
    ERROR_MODELS,
    STRATEGIES,
    ExtrapolationConfig,
    LowAcceptanceError,
    OptimizationError,
    RunConfig,
    dissociation_scan,
    mitigated_energy,
    noiseless_energy,
    optimize_parameters_noiseless,
    trial_parameters_at_energy,
    FIG4_TRUE_ENERGY,
)

RESULT_FIELDS = (
    "bond_length", "strategy", "energy_hartree", "std_err_hartree", "shots_used",
    "shots_accepted", "acceptance_fraction", "residual_mhartree",
    "p2", "lambda", "check", "seed", "detection_fraction", "event_detection_fraction",
)
ENUM_FIELDS = ("fault", "qubits", "check", "always_detected", "accept_probability")

PRESETS = {
    "fig4": {
        "p2": [0.001, 0.005, 0.01, 0.02],
        "p1": "auto",
        "check": "local-spin-parity",
        "lambda": "inverse",
        "alpha_e": 2.7e-3,
        "error_model": "bound",
        "engine": "mixture",
        "params": "fig4",
        "delta_max": 0.0,
    },
    "fig5": {
        "p2": [0.001],
        "p1": "auto",
        "check": "local-spin-parity",
        "lambda": 1.5,
        "alpha_e": 2e-5,
        "error_model": "sample",
        "engine": "mixture",
        "params": "optimal",
        "delta_max": 0.01,
    },
}

DEFAULTS = {
    "hamiltonian": None,
    "p2": [0.0],
    "p1": "auto",
    "delta_max": 0.0,
    "readout": 0.0,
    "check": "local-spin-parity",
    "alpha_e": 1e-3,
    "lambda": 1.5,
    "filter": False,
    "extrapolate": False,
    "seed": 0,
    "out": None,
    "format": "csv",
    "threads": 1,
    "engine": "mixture",
    "error_model": "sample",
    "params": "optimal",
    "rotation_stretch": "none",
    "quadrature_points": 2,
    "orbitals": 4,
    "electrons": 2,
    "faults": "depolarizing",
    "pairs": "all",
    "state": None,
    "internal": False,
    "tolerance": 1e-4,
    "strategies": list(STRATEGIES),
}


class CliError(Exception):
    pass


# -- argument handling -------------------------------------------------------------

def _p2_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symcheck", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    add = common.add_argument
    add("--config", type=Path, help="JSON file with any of these settings; flags override it")
    add("--preset", choices=sorted(PRESETS))
    add("--hamiltonian", action="append", help="Hamiltonian JSON file (repeat for scans)")
    add("--p2", type=_p2_list, help="two-qubit depolarising rate(s), comma separated")
    add("--p1", help="single-qubit rate or 'auto' (= p2/10)")
    add("--delta-max", type=float, dest="delta_max", help="correlated rotation bound; 0 disables")
    add("--readout", type=float, help="readout flip probability")
    add("--check", choices=CHECK_NAMES)
    add("--alpha-e", type=float, dest="alpha_e", help="target standard error (Hartree)")
    add("--lambda", dest="lambda", help="stretch factor or 'inverse' (1 + 0.001/p2)")
    add("--filter", action=argparse.BooleanOptionalAction, default=None)
    add("--extrapolate", action=argparse.BooleanOptionalAction, default=None)
    add("--seed", type=int)
    add("--out", type=Path)
    add("--format", choices=("csv", "json"))
    add("--threads", type=int)
    add("--engine", choices=ENGINES)
    add("--error-model", dest="error_model", choices=ERROR_MODELS)
    add("--params", help="'optimal', 'fig4', or t10,t32,t3120")
    add("--rotation-stretch", dest="rotation_stretch", choices=("none", "linear", "sqrt"))
    add("--quadrature-points", dest="quadrature_points", type=int)

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("energy", parents=[common], help="one energy estimate")
    grid = sub.add_parser("grid", parents=[common], help="filter x extrapolate grid per p2")
    grid.add_argument("--strategies", type=lambda s: s.split(","))
    diss = sub.add_parser("dissociation", parents=[common], help="strategies across bond lengths")
    diss.add_argument("--strategies", type=lambda s: s.split(","))
    rates = sub.add_parser("detect-rates", parents=[common], help="closed-form and enumerated detection rates")
    rates.add_argument("--orbitals", type=int)
    rates.add_argument("--electrons", type=int)
    enum = sub.add_parser("enumerate-errors", parents=[common], help="classify every two-qubit fault")
    enum.add_argument("--state", help="ket label, qubit 0 rightmost (default: Hartree-Fock)")
    enum.add_argument("--faults", choices=("depolarizing", "bitflip"))
    enum.add_argument("--pairs", choices=("all", "same-spin", "cross-spin"))
    enum.add_argument("--internal", action=argparse.BooleanOptionalAction, default=None,
                      help="fault the check's own gates (total parity then spin checks)")
    opt = sub.add_parser("optimize", parents=[common], help="noiseless parameter optimisation")
    opt.add_argument("--tolerance", type=float)
    return parser


def resolve(args: argparse.Namespace) -> dict:
    """Defaults, then preset, then config file, then explicit flags."""
    settings = dict(DEFAULTS)
    file_settings = {}
    if args.config is not None:
        try:
            file_settings = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(file_settings, dict):
            raise CliError("config file must hold a JSON object")
        file_settings = {k.replace("-", "_"): v for k, v in file_settings.items()}
    preset = args.preset or file_settings.get("preset")
    if preset:
        if preset not in PRESETS:
            raise CliError(f"unknown preset {preset!r}")
        settings.update(PRESETS[preset])
        if args.command in ("grid", "energy", "dissociation"):
            settings["filter"] = True
            settings["extrapolate"] = True
    for k, v in file_settings.items():
        if k == "preset":
            continue
        if k not in settings:
            raise CliError(f"unknown config key {k!r}")
        settings[k] = v
    for k, v in vars(args).items():
        if k in ("command", "config", "preset") or v is None:
            continue
        settings[k] = v
    settings["preset"] = preset
    settings["command"] = args.command
    if isinstance(settings["p2"], (int, float)):
        settings["p2"] = [settings["p2"]]
    if isinstance(settings["hamiltonian"], str):
        settings["hamiltonian"] = [settings["hamiltonian"]]
    return settings


def _hamiltonians(settings: dict, default_all: bool = False) -> list[Hamiltonian]:
    paths = settings["hamiltonian"]
    try:
        if paths:
            return [load_hamiltonian(Path(p)) for p in paths]
        if default_all:
            return bundled_hamiltonians()
        return [load_hamiltonian(data_dir() / EQUILIBRIUM_FILE)]
    except FileNotFoundError as exc:
        raise CliError(f"Hamiltonian file not found: {exc.filename}") from exc


def _params(settings: dict, h: Hamiltonian) -> UccsdParameters:
    choice = settings["params"]
    if isinstance(choice, (list, tuple)):
        return UccsdParameters(*map(float, choice))
    if choice == "optimal":
        return optimize_parameters_noiseless(h, 1e-8)
    if choice == "fig4":
        return trial_parameters_at_energy(h, FIG4_TRUE_ENERGY)
    try:
        values = [float(x) for x in str(choice).split(",")]
    except ValueError as exc:
        raise CliError(f"cannot parse --params {choice!r}") from exc
    if len(values) != 3:
        raise CliError("--params needs three amplitudes t10,t32,t3120")
    return UccsdParameters(*values)


def _noise(settings: dict, p2: float) -> NoiseModel:
    p1 = settings["p1"]
    p1 = p2 / 10 if p1 in (None, "auto") else float(p1)
    delta = float(settings["delta_max"])
    return NoiseModel(p1=p1, p2=p2, delta_max=delta, readout_flip=float(settings["readout"]), correlated=delta > 0)


def _extrapolation(settings: dict) -> ExtrapolationConfig:
    lam = settings["lambda"]
    stretch = settings["rotation_stretch"]
    if str(lam) == "inverse":
        return ExtrapolationConfig("inverse", rotation_stretch=stretch)
    try:
        return ExtrapolationConfig("fixed", float(lam), rotation_stretch=stretch)
    except (TypeError, ValueError) as exc:
        raise CliError(f"--lambda must be a number above 1 or 'inverse': {exc}") from exc


def _config(settings: dict, h: Hamiltonian, params: UccsdParameters, p2: float) -> RunConfig:
    return RunConfig(
        hamiltonian=h,
        params=params,
        noise=_noise(settings, p2),
        check=CheckKind(settings["check"]),
        alpha_e=float(settings["alpha_e"]),
        extrapolation=_extrapolation(settings),
        seed=int(settings["seed"]),
        filter=bool(settings["filter"]),
        extrapolate=bool(settings["extrapolate"]),
        engine=settings["engine"],
        error_model=settings["error_model"],
        quadrature_points=int(settings["quadrature_points"]),
        threads=int(settings["threads"]),
    )


# -- rows ---------------------------------------------------------------------------

def _fmt(x):
    if isinstance(x, float):
        return "" if math.isnan(x) else repr(x)
    return x


def _result_row(bond, strategy, est, reference, cfg: RunConfig, lam: float) -> dict:
    filtered = strategy in ("detection", "combined") and not cfg.check.is_none
    return {
        "bond_length": bond,
        "strategy": strategy,
        "energy_hartree": est.energy,
        "std_err_hartree": est.std_err,
        "shots_used": est.shots_used,
        "shots_accepted": est.shots_accepted,
        "acceptance_fraction": est.acceptance_fraction,
        "residual_mhartree": 1e3 * (est.energy - reference),
        "p2": cfg.noise.p2,
        "lambda": lam if strategy in ("extrapolation", "combined") else float("nan"),
        "check": cfg.check.name if filtered else "none",
        "seed": cfg.seed,
        "detection_fraction": est.detection_fraction if filtered else float("nan"),
        "event_detection_fraction": est.event_detection_fraction if filtered else float("nan"),
    }


def _single_strategy(settings: dict) -> str:
    f, e = bool(settings["filter"]), bool(settings["extrapolate"])
    return {(False, False): "unmitigated", (True, False): "detection",
            (False, True): "extrapolation", (True, True): "combined"}[(f, e)]


def cmd_energy(settings: dict):
    h = _hamiltonians(settings)[0]
    params = _params(settings, h)
    reference = noiseless_energy(h, params)
    strategy = _single_strategy(settings)
    rows, configs = [], []
    for k, p2 in enumerate(settings["p2"]):
        cfg = _config(settings, h, params, p2)
        est = mitigated_energy(cfg, (strategy,), stream=(k,))[strategy]
        rows.append(_result_row(h.bond_length, strategy, est, reference, cfg, cfg.lam))
        configs.append(cfg.echo())
    return RESULT_FIELDS, rows, configs


def cmd_grid(settings: dict):
    h = _hamiltonians(settings)[0]
    params = _params(settings, h)
    reference = noiseless_energy(h, params)
    rows, configs = [], []
    for k, p2 in enumerate(settings["p2"]):
        cfg = _config(settings, h, params, p2)
        for name, est in mitigated_energy(cfg, settings["strategies"], stream=(k,)).items():
            rows.append(_result_row(h.bond_length, name, est, reference, cfg, cfg.lam))
        configs.append(cfg.echo())
    return RESULT_FIELDS, rows, configs


def cmd_dissociation(settings: dict):
    hs = _hamiltonians(settings, default_all=True)
    template = _config(settings, hs[0], UccsdParameters(), settings["p2"][0])
    rows = []
    for r in dissociation_scan(template, hs, settings["strategies"]):
        rows.append(_result_row(r.bond_length, r.strategy, r.estimate, r.reference, template, r.lam))
    return RESULT_FIELDS, rows, [template.echo()]


def cmd_detect_rates(settings: dict):
    m, n = int(settings["orbitals"]), int(settings["electrons"])
    check = settings["check"]
    fields = ("quantity", "check", "orbitals", "electrons", "value", "exact")
    rows = []

    def row(quantity, chk, value):
        rows.append({"quantity": quantity, "check": chk, "orbitals": m, "electrons": n,
                     "value": float(value), "exact": str(Fraction(value))})

    row("parity_violating_fraction", "total-parity", Fraction(8, 15))
    row("double_bitflip_cross_spin_fraction", "spin-parity", spin_pair_detectable_fraction(m))
    row("double_bitflip_number_change_fraction", "number", bitflip_pair_detection_rate(n, m) if m >= 4 else Fraction(0))
    row("depolarizing_detection_bound", "spin-parity+number", depolarizing_detection_bound(m, n) if m >= 4 else Fraction(8, 15))
    if check == "local-spin-parity" and m != 4:
        check = "spin-parity"  # same symmetry; the local wiring only exists for 4 qubits
    if m <= 8 and check not in ("none", "hadamard-test"):
        occupied = list(range(n // 2)) + [m // 2 + k for k in range(n - n // 2)]
        state = StateVector.basis(sum(1 << q for q in occupied), m)
        rep = enumerate_fault_detection(state, check)
        row("enumerated_depolarizing_always_detected", check, rep.fraction)
        rep = enumerate_fault_detection(state, check, faults="bitflip")
        row("enumerated_double_bitflip_always_detected", check, rep.fraction)
    if m == 4:
        state = StateVector.basis(HF_STATE, 4)
        rep = enumerate_check_internal_faults(state)
        row("check_internal_total_parity_gates", "total-parity+spin-parity",
            rep.subset(lambda r: r.check == "total-parity").fraction)
        row("check_internal_spin_gates", "total-parity+spin-parity",
            rep.subset(lambda r: r.check == "spin-parity").fraction)
        row("check_internal_average", "total-parity+spin-parity", rep.fraction)
    return fields, rows, [{"orbitals": m, "electrons": n, "check": check}]


def cmd_enumerate(settings: dict):
    label = settings["state"]
    state = StateVector.from_bits(label) if label else StateVector.basis(HF_STATE, 4)
    if settings["internal"]:
        rep = enumerate_check_internal_faults(state)
    else:
        rep = enumerate_fault_detection(state, settings["check"], settings["faults"], settings["pairs"])
    rows = [
        {"fault": r.fault, "qubits": "-".join(map(str, r.qubits)), "check": r.check,
         "always_detected": int(r.always_detected), "accept_probability": round(r.accept_probability, 12)}
        for r in rep.rows
    ]
    return ENUM_FIELDS, rows, [{"state": label or "0101", "check": rep.check, "detected": str(rep.fraction)}]


def cmd_optimize(settings: dict):
    fields = ("bond_length", "t10", "t32", "t3120", "energy_hartree", "ground_hartree", "gap_mhartree")
    rows = []
    for h in _hamiltonians(settings):
        p = optimize_parameters_noiseless(h, float(settings["tolerance"]))
        e = noiseless_energy(h, p)
        g = h.ground_energy(sector=(1, 1))
        rows.append({"bond_length": h.bond_length, "t10": float(p.t10), "t32": float(p.t32),
                     "t3120": float(p.t3120), "energy_hartree": e, "ground_hartree": g,
                     "gap_mhartree": 1e3 * (e - g)})
    return fields, rows, [{"tolerance": settings["tolerance"]}]


COMMANDS = {
    "energy": cmd_energy,
    "grid": cmd_grid,
    "dissociation": cmd_dissociation,
    "detect-rates": cmd_detect_rates,
    "enumerate-errors": cmd_enumerate,
    "optimize": cmd_optimize,
}


def render_csv(fields, rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _fmt(v) for k, v in r.items()})
    return buf.getvalue()


def render_json(fields, rows, settings, configs) -> str:
    clean = lambda v: None if isinstance(v, float) and math.isnan(v) else v  # noqa: E731
    echo = {k: (str(v) if isinstance(v, Path) else v) for k, v in settings.items()}
    doc = {
        "command": settings["command"],
        "seed": settings["seed"],
        "settings": echo,
        "runs": configs,
        "fields": list(fields),
        "rows": [{k: clean(v) for k, v in r.items()} for r in rows],
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = resolve(args)
        fields, rows, configs = COMMANDS[args.command](settings)
        csv_text = render_csv(fields, rows)
        json_text = render_json(fields, rows, settings, configs)
        text = csv_text if settings["format"] == "csv" else json_text
        out = settings["out"]
        if out:
            out = Path(out)
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(text, encoding="utf-8")
            if settings["format"] == "csv":
                out.with_suffix(".json").write_text(json_text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    except (CliError, ValueError, HamiltonianFormatError, LowAcceptanceError, OptimizationError, OSError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
