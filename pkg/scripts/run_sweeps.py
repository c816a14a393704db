"""Tabulate P(|11>) against attacker repetitions for every family.

Writes one tab-separated table with a column per family, using the shipped
noise parameters. Handy for plotting the decay curves side by side.

Run:  python scripts/run_sweeps.py [--k-max 300] [--delay 1] [--out sweeps.tsv]
"""

import argparse
import sys

from qantivirus.crosstalk import Family, InvariantMonitor, NoiseModel, sweep_k


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k-max", type=int, default=300)
    ap.add_argument("--delay", type=int, default=1)
    ap.add_argument("--out", help="output file (default: stdout)")
    args = ap.parse_args()

    noise = NoiseModel.shipped()
    monitor = InvariantMonitor()
    ks = range(args.k_max + 1)
    columns = {f: [p for _, p in sweep_k(noise, f, args.delay, ks, monitor=monitor)] for f in Family}

    lines = ["k\t" + "\t".join(f.value for f in Family)]
    for k in ks:
        lines.append(f"{k}\t" + "\t".join(f"{columns[f][k]:.6f}" for f in Family))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"checked {monitor.steps} states; max trace error {monitor.max_trace_error:.2e}, "
          f"min eigenvalue {monitor.min_eigenvalue:.2e}", file=sys.stderr)


if __name__ == "__main__":
    main()
