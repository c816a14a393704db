"""Static crosstalk-virus scanner for OpenQASM circuits, plus a small noise model."""

__version__ = "0.1.0"

from .canonical import CanonicalCircuit, canonicalize
from .circuit import Circuit, CouplingMap, Instruction, Kind, lower, parse_coupling_map, timeline
from .qasm import QasmError, emit, parse
from .scanner import MatchRun, ScanReport, Verdict, brute_force_scan, scan
from .signatures import SignatureDatabase, default_database, load_database

__all__ = [
    "CanonicalCircuit",
    "Circuit",
    "CouplingMap",
    "Instruction",
    "Kind",
    "MatchRun",
    "QasmError",
    "ScanReport",
    "SignatureDatabase",
    "Verdict",
    "brute_force_scan",
    "canonicalize",
    "default_database",
    "emit",
    "load_database",
    "lower",
    "parse",
    "parse_coupling_map",
    "scan",
    "scan_source",
    "timeline",
]


def scan_source(text, db=None, coupling=None, canonical=True):
    """parse -> lower -> canonicalize -> scan, with the default database."""
    circuit = lower(parse(text))
    db = default_database() if db is None else db
    if canonical:
        return scan(canonicalize(circuit), db, coupling)
    return scan(CanonicalCircuit.identity(circuit), db, coupling, implicit_zero_delay=True)
