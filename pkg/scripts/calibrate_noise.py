"""Derive the shipped noise parameters and write src/qantivirus/noise_params.json.

1. p_base: bisection so the unattacked victim reads |11> with probability 0.87.
2. (lambda_cx, gamma): grid search. Keep points whose k=300 CX_DELAY value is
   within SATURATION_TOL of the channel's fixed point (i.e. the curve has
   flattened by k=300), pick the one closest to 0.20, break ties toward the
   smallest lambda_cx (slowest decay that still saturates).
3. lambda_xy = lambda_cx / 4.

Run:  python scripts/calibrate_noise.py [--dry-run]
"""

import argparse
import json
from pathlib import Path

import numpy as np

from qantivirus.crosstalk import (AttackSpec, Family, NoiseModel, calibrate_baseline, plateau,
                                  simulate_victim)

BASELINE_TARGET = 0.87
PLATEAU_TARGET = 0.20
K_END = 300
SATURATION_TOL = 2e-3
LAMBDA_GRID = np.round(np.arange(0.005, 0.1001, 0.001), 6)
GAMMA_GRID = np.round(np.arange(0.0, 0.02001, 0.0002), 6)

OUT = Path(__file__).resolve().parents[1] / "src" / "qantivirus" / "noise_params.json"


def search(p_base):
    best = None
    for lam in LAMBDA_GRID:
        for gam in GAMMA_GRID:
            noise = NoiseModel(p_base, float(lam), float(lam) / 4, float(gam))
            fixed = plateau(noise)
            # cheap pre-filter on the analytic plateau before simulating
            if abs(fixed - PLATEAU_TARGET) > 0.02:
                continue
            p_end = simulate_victim(noise, AttackSpec(Family.CX_DELAY, K_END))
            if abs(p_end - fixed) > SATURATION_TOL:
                continue
            key = (round(abs(p_end - PLATEAU_TARGET), 4), lam)
            if best is None or key < best[0]:
                best = (key, noise, p_end, fixed)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dry-run", action="store_true")
    args = ap.parse_args()

    p_base = calibrate_baseline(BASELINE_TARGET)
    _, noise, p_end, fixed = search(p_base)
    p0 = simulate_victim(noise, AttackSpec(Family.CX_DELAY, 0))
    payload = {
        "noise_model": {
            "p_base": noise.p_base,
            "lambda_cx": noise.lambda_cx,
            "lambda_xy": noise.lambda_xy,
            "gamma": noise.gamma,
        },
        "derived_by": "scripts/calibrate_noise.py",
        "targets": {"baseline": BASELINE_TARGET, "cx_delay_k300": PLATEAU_TARGET},
        "check": {"p_k0": round(p0, 9), "p_cx_k300": round(p_end, 9), "plateau": round(fixed, 9)},
    }
    text = json.dumps(payload, indent=2) + "\n"
    print(text, end="")
    if not args.dry_run:
        OUT.write_text(text)
        print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
