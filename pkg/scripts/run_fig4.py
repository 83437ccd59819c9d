"""Error-mitigation comparison at equilibrium over the fig4 p2 sweep, several seeds.

Writes one CSV (plus JSON mirror) per seed and prints the seed-averaged
absolute error of each strategy and the detection fractions.

    python3 scripts/run_fig4.py --seeds 5 --out results/fig4
"""

import argparse
import csv
from collections import defaultdict
from pathlib import Path

import numpy as np

from symcheck.cli import run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--out", type=Path, default=Path("results/fig4"))
    ap.add_argument("--engine", default="mixture", choices=("mixture", "trajectory", "exact"))
    args = ap.parse_args()

    errors = defaultdict(list)
    detection = defaultdict(list)
    for seed in range(args.seeds):
        path = args.out / f"grid_seed{seed}.csv"
        code = run(["grid", "--preset", "fig4", "--seed", str(seed), "--engine", args.engine, "--out", str(path)])
        if code:
            raise SystemExit(code)
        with path.open() as fh:
            for row in csv.DictReader(fh):
                errors[row["strategy"], row["p2"]].append(abs(float(row["residual_mhartree"])))
                if row["detection_fraction"]:
                    detection[row["strategy"], row["p2"]].append(
                        (float(row["detection_fraction"]), float(row["event_detection_fraction"])))

    print("strategy,p2,mean_abs_error_mhartree,detection_fraction,event_detection_fraction")
    for (name, p2), vals in errors.items():
        det = np.mean(detection.get((name, p2), [(np.nan, np.nan)]), axis=0)
        print(f"{name},{p2},{np.mean(vals):.3f},{det[0]:.4f},{det[1]:.4f}")


if __name__ == "__main__":
    main()
