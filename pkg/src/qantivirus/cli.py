"""Command-line entry point: ``qav scan | sweep | gen | signatures``.

Scan exit codes: 0 clean, 1 suspicious, 2 malicious, 3 input or parse
error, 4 internal error. With several files the highest code wins.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .canonical import CanonicalCircuit, canonicalize
from .circuit import CircuitError, lower, parse_coupling_map
from .crosstalk import Family, InvalidProbability, NoiseModel, format_sweep, sweep_k
from .generate import FAMILIES, attack_qasm
from .qasm import QasmError, parse
from .scanner import BindingExplosion, ScanReport, run_verdict, scan
from .signatures import SignatureError, default_database, emit_database, load_database

SCHEMA_VERSION = 1

EXIT_INPUT = 3
EXIT_INTERNAL = 4


class InputError(Exception):
    """Bad user input: reported with exit code 3."""


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"{path}: cannot read: {e}") from None


def report_to_json(report: ScanReport, path: str) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "file": path,
        "verdict": report.verdict.name,
        "runs": [
            {
                "signature_id": r.signature_id,
                "binding": r.binding_map(),
                "start_instruction_index": r.start_instruction_index,
                "k": r.k,
                "source_locations": [
                    None if loc is None else
                    {"line": loc.line, "column": loc.column, "byte_offset": loc.byte_offset}
                    for loc in r.source_locations
                ],
            }
            for r in report.runs
        ],
        "per_signature_counts": {
            sig_id: {"occurrences": n, "max_k": k}
            for sig_id, (n, k) in report.per_signature_counts.items()
        },
    }


def report_to_text(report: ScanReport, path: str, db) -> str:
    lines = [f"{path}: {report.verdict.name}"]
    for r in report.runs:
        binding = " ".join(f"{v}=q{q}" for v, q in r.binding)
        first = r.source_locations[0] if r.source_locations else None
        where = f"line {first.line}" if first is not None else "?"
        level = run_verdict(r, db[r.signature_id]).name
        lines.append(f"  {r.signature_id:<10} {binding:<10} k={r.k:<5} at {where:<10} [{level}]")
    return "\n".join(lines)


def _scan_one(path: str, args, db, coupling) -> tuple[int, str, str]:
    """Returns (exit code, stdout text, stderr text) for one file."""
    try:
        circuit = lower(parse(_read(path)))
        if args.no_canonicalize:
            report = scan(CanonicalCircuit.identity(circuit), db, coupling, implicit_zero_delay=True)
        else:
            report = scan(canonicalize(circuit), db, coupling)
    except QasmError as e:
        where = f"{path}:{e.location}" if e.location else path
        return EXIT_INPUT, "", f"{where}: {type(e).__name__}: {e.message}"
    except InputError as e:
        return EXIT_INPUT, "", str(e)
    except (CircuitError, BindingExplosion) as e:
        return EXIT_INPUT, "", f"{path}: {e}"
    if args.format == "json":
        out = json.dumps(report_to_json(report, path))
    else:
        out = report_to_text(report, path, db)
    return int(report.verdict), out, ""


def cmd_scan(args) -> int:
    try:
        db = load_database(_read(args.signatures)) if args.signatures else default_database()
        db = db.with_thresholds(args.suspicious_at, args.malicious_at)
        coupling = parse_coupling_map(_read(args.coupling)) if args.coupling else None
    except (InputError, SignatureError, CircuitError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = list(pool.map(lambda p: _scan_one(p, args, db, coupling), args.paths))
    code = 0
    for rc, out, err in results:
        if out:
            print(out)
        if err:
            print(err, file=sys.stderr)
        code = max(code, rc)
    return code


def parse_k_range(text: str) -> list[int]:
    """``0..300``, ``0..300:10`` (inclusive, with step) or ``1,5,10``."""
    try:
        if ".." in text:
            span, _, step = text.partition(":")
            lo, hi = (int(x) for x in span.split(".."))
            step = int(step) if step else 1
            if step < 1 or lo > hi:
                raise ValueError
            values = list(range(lo, hi + 1, step))
        else:
            values = [int(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"bad k range {text!r}; use a..b, a..b:step or a,b,c") from None
    if any(k < 0 for k in values):
        raise InputError("k values must be non-negative")
    return values


def cmd_sweep(args) -> int:
    try:
        shipped = NoiseModel.shipped()
        noise = NoiseModel(
            p_base=shipped.p_base if args.p_base is None else args.p_base,
            lambda_cx=shipped.lambda_cx if args.lambda_cx is None else args.lambda_cx,
            lambda_xy=shipped.lambda_xy if args.lambda_xy is None else args.lambda_xy,
            gamma=shipped.gamma if args.gamma is None else args.gamma,
        )
        if args.delay < 0:
            raise InputError("delay must be non-negative")
        ks = parse_k_range(args.k)
    except (InputError, InvalidProbability) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    text = format_sweep(sweep_k(noise, Family(args.family), args.delay, ks, workers=args.jobs))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_gen(args) -> int:
    try:
        qubits = tuple(int(q) for q in args.qubits.split(","))
        text = attack_qasm(args.family, args.k, args.delay, qubits,
                           qubit_count=args.qubit_count, victim=not args.no_victim)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_signatures(args) -> int:
    if args.action == "show":
        sys.stdout.write(emit_database(default_database()))
        return 0
    try:
        db = load_database(_read(args.file))
    except (InputError, SignatureError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    print(f"{args.file}: ok, version {db.version}, {len(db)} signature(s): {', '.join(db.ids)}")
    return 0


class _ArgumentParser(argparse.ArgumentParser):
    # usage errors must not collide with the MALICIOUS exit code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="qav", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", help="scan .qasm files for crosstalk signatures")
    p.add_argument("paths", nargs="+")
    p.add_argument("--signatures", help="signature database file (default: built-in)")
    p.add_argument("--coupling", help="coupling map file, one 'i j' edge per line")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--suspicious-at", type=int, help="override every signature's suspicious threshold")
    p.add_argument("--malicious-at", type=int, help="override every signature's malicious threshold")
    p.add_argument("--no-canonicalize", action="store_true",
                   help="diagnostic: match the raw program as a timing-naive scanner would")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("sweep", help="victim success probability versus attacker repetitions")
    p.add_argument("--family", choices=[f.value for f in Family], default="cx-delay")
    p.add_argument("--k", default="0..300")
    p.add_argument("--delay", type=int, default=1, help="delay between attacker gates, in dt")
    p.add_argument("--p-base", type=float)
    p.add_argument("--lambda-cx", type=float)
    p.add_argument("--lambda-xy", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gen", help="emit a victim + attacker program")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delay", type=int, default=1)
    p.add_argument("--qubits", default="2,3", help="comma-separated attacker qubits")
    p.add_argument("--qubit-count", type=int, default=5)
    p.add_argument("--no-victim", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("signatures", help="print or validate signature databases")
    p.add_argument("action", choices=["show", "check"])
    p.add_argument("file", nargs="?")
    p.set_defaults(func=cmd_signatures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "signatures" and args.action == "check" and not args.file:
        parser.error("signatures check needs a file")
    try:
        return args.func(args)
    except Exception as e:  # noqa: BLE001
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
