"""Signature matching over canonical circuits.

For a signature and a binding of its qubit variables to concrete qubits, the
bound qubits' timeline (every instruction touching one of them, in order) is
split into maximal runs of back-to-back unit repetitions. Work on other
qubits is invisible, so gates that are far apart in the source can still
form a run. Any instruction on a bound qubit that does not fit the expected
template ends the run.
"""

from __future__ import annotations

import enum
import heapq
import itertools
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from .canonical import CanonicalCircuit
from .circuit import Circuit, CouplingMap, Instruction
from .qasm import SourceLocation
from .signatures import GateTemplate, Signature, SignatureDatabase

DEFAULT_MAX_BINDINGS = 10**6


class Verdict(enum.IntEnum):
    CLEAN = 0
    SUSPICIOUS = 1
    MALICIOUS = 2


class BindingExplosion(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class MatchRun:
    signature_id: str
    binding: tuple[tuple[str, int], ...]
    start_instruction_index: int
    k: int
    source_locations: tuple[SourceLocation | None, ...] = field(compare=False)

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for _, q in self.binding)

    def binding_map(self) -> dict[str, int]:
        return dict(self.binding)


@dataclass(frozen=True)
class ScanReport:
    runs: tuple[MatchRun, ...]
    verdict: Verdict
    per_signature_counts: dict[str, tuple[int, int]]


def run_verdict(run: MatchRun, sig: Signature) -> Verdict:
    if run.k >= sig.malicious_at:
        return Verdict.MALICIOUS
    if run.k >= sig.suspicious_at:
        return Verdict.SUSPICIOUS
    return Verdict.CLEAN


def make_report(runs: Iterable[MatchRun], db: SignatureDatabase) -> ScanReport:
    """Sort runs deterministically and derive counts and the verdict from them."""
    runs = tuple(sorted(runs, key=lambda r: (r.signature_id, r.qubits, r.start_instruction_index)))
    verdict = max((run_verdict(r, db[r.signature_id]) for r in runs), default=Verdict.CLEAN)
    counts = {}
    for sig in db:
        ks = [r.k for r in runs if r.signature_id == sig.id]
        counts[sig.id] = (len(ks), max(ks, default=0))
    return ScanReport(runs, verdict, counts)


def _unwrap(circuit: Circuit | CanonicalCircuit) -> Circuit:
    return circuit.circuit if isinstance(circuit, CanonicalCircuit) else circuit


def _coupling_ok(sig: Signature, binding: dict[str, int], coupling: CouplingMap | None) -> bool:
    if coupling is None:
        return True
    return all(coupling.coupled(*(binding[v] for v in t.qubit_vars)) for t in sig.two_qubit_templates())


def count_bindings(sig: Signature, qubit_count: int, coupling: CouplingMap | None = None,
                   limit: int | None = None) -> int:
    """Number of admissible bindings, counting stops early once above ``limit``."""
    nvars = len(sig.variables)
    if coupling is None:
        return math.perm(qubit_count, nvars)
    variables = sig.variables
    total = 0

    def extend(binding: dict[str, int], depth: int) -> bool:
        nonlocal total
        if depth == nvars:
            if _coupling_ok(sig, binding, coupling):
                total += 1
            return limit is not None and total > limit
        used = set(binding.values())
        for q in range(qubit_count):
            if q in used:
                continue
            binding[variables[depth]] = q
            # prune on any fully bound two-qubit template
            if all(coupling.coupled(binding[t.qubit_vars[0]], binding[t.qubit_vars[1]])
                   for t in sig.two_qubit_templates() if all(v in binding for v in t.qubit_vars)):
                if extend(binding, depth + 1):
                    return True
            del binding[variables[depth]]
        return False

    extend({}, 0)
    return total


# ---------------------------------------------------------------------------
# Fast path


def _seed_template(sig: Signature) -> GateTemplate:
    gates = [t for t in sig.unit if not t.is_delay]
    if gates:
        return max(gates, key=lambda t: len(t.qubit_vars))
    return sig.unit[0]


def _candidate_bindings(sig: Signature, circuit: Circuit,
                        coupling: CouplingMap | None) -> list[tuple[int, ...]]:
    # A run with k >= 1 contains a match of every template, so every binding
    # that can produce a run is reachable from some match of the seed template.
    variables = sig.variables
    seed = _seed_template(sig)
    out: set[tuple[int, ...]] = set()
    for ins in circuit.instructions:
        for partial in seed.seed_bindings(ins):
            rest = [v for v in variables if v not in partial]
            free = [q for q in range(circuit.qubit_count) if q not in partial.values()]
            for combo in itertools.permutations(free, len(rest)):
                binding = {**partial, **dict(zip(rest, combo))}
                if _coupling_ok(sig, binding, coupling):
                    out.add(tuple(binding[v] for v in variables))
    return sorted(out)


def _unit_span(unit: Sequence[GateTemplate], tl: Sequence[Instruction], s: int,
               binding: dict[str, int], lenient: bool) -> int:
    """Instructions consumed by one unit match starting at ``s``; 0 if none."""
    pos = s
    for t in unit:
        if pos < len(tl) and t.matches(tl[pos], binding):
            pos += 1
        elif lenient and t.is_delay and t.duration.accepts(0):
            continue
        else:
            return 0
    return pos - s


def _runs_on_timeline(sig: Signature, binding: dict[str, int], tl_index: Sequence[int],
                      tl: Sequence[Instruction], lenient: bool) -> list[MatchRun]:
    n = len(tl)
    span = [_unit_span(sig.unit, tl, s, binding, lenient) for s in range(n)]
    has_pred = [False] * (n + 1)
    for s, w in enumerate(span):
        if w:
            has_pred[s + w] = True
    ordered = tuple(sorted(binding.items(), key=lambda kv: sig.variables.index(kv[0])))
    runs = []
    for s in range(n):
        if not span[s] or has_pred[s]:
            continue
        starts = []
        pos = s
        while pos < n and span[pos]:
            starts.append(pos)
            pos += span[pos]
        runs.append(MatchRun(sig.id, ordered, tl_index[s], len(starts),
                             tuple(tl[p].location for p in starts)))
    return runs


def scan(circuit: Circuit | CanonicalCircuit, db: SignatureDatabase,
         coupling: CouplingMap | None = None, *, max_bindings: int = DEFAULT_MAX_BINDINGS,
         implicit_zero_delay: bool = False) -> ScanReport:
    """Report every maximal run of every signature under every admissible binding.

    With ``coupling``, two-qubit templates bind only to coupled pairs.
    ``implicit_zero_delay`` lets a delay template that accepts 0 dt be
    satisfied by no instruction at all, i.e. it treats back-to-back gates as
    separated by a zero-length delay. That is how a timing-naive scanner sees
    raw source, and it is only meant for the uncanonicalized diagnostic mode.
    """
    circ = _unwrap(circuit)
    if coupling is not None:
        coupling.check(circ)
    per_qubit = circ.qubit_timelines()
    runs: list[MatchRun] = []
    for sig in db:
        if count_bindings(sig, circ.qubit_count, coupling, max_bindings) > max_bindings:
            raise BindingExplosion(
                f"signature {sig.id!r} admits more than {max_bindings} bindings on "
                f"{circ.qubit_count} qubits; supply a coupling map"
            )
        lenient = implicit_zero_delay and not all(t.is_delay for t in sig.unit)
        for qubits in _candidate_bindings(sig, circ, coupling):
            binding = dict(zip(sig.variables, qubits))
            merged = heapq.merge(*(per_qubit[q] for q in sorted(set(qubits))))
            tl_index = [i for i, _ in itertools.groupby(merged)]
            tl = [circ.instructions[i] for i in tl_index]
            runs.extend(_runs_on_timeline(sig, binding, tl_index, tl, lenient))
    return make_report(runs, db)


# ---------------------------------------------------------------------------
# Oracle


def brute_force_scan(circuit: Circuit | CanonicalCircuit, db: SignatureDatabase,
                     coupling: CouplingMap | None = None) -> ScanReport:
    """Naive reference matcher: every binding, every start index, no shortcuts."""
    circ = _unwrap(circuit)
    runs = []
    for sig in db:
        variables = sig.variables
        L = len(sig.unit)
        for qubits in itertools.permutations(range(circ.qubit_count), len(variables)):
            binding = dict(zip(variables, qubits))
            if coupling is not None and not _coupling_ok(sig, binding, coupling):
                continue
            bound = set(qubits)
            tl = [(i, ins) for i, ins in enumerate(circ.instructions) if bound & set(ins.qubits)]

            def unit_at(s: int) -> bool:
                if s < 0 or s + L > len(tl):
                    return False
                return all(sig.unit[j].matches(tl[s + j][1], binding) for j in range(L))

            for s in range(len(tl)):
                k = 0
                while unit_at(s + k * L):
                    k += 1
                if k == 0 or unit_at(s - L):
                    continue
                runs.append(MatchRun(
                    sig.id,
                    tuple(zip(variables, qubits)),
                    tl[s][0],
                    k,
                    tuple(tl[s + j * L][1].location for j in range(k)),
                ))
    return make_report(runs, db)
