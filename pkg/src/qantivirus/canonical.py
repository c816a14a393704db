"""Model of the two optimizations a transpiler applies before a circuit runs.

1. Runs of identical self-inverse gates that are contiguous on their own
   qubits collapse to ``K mod 2`` copies (``id`` always disappears). Any
   other instruction on those qubits, including ``delay(0)``, a barrier or a
   measurement, interrupts the run.
2. Consecutive delays on one qubit merge; a qubit that only ever idles has
   its (merged) delay moved to the front, where it is inert.

Matching signatures against this form rather than the raw source avoids
flagging CX chains that never execute, while still catching chains kept
alive by interleaved delays.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import SELF_INVERSE, Circuit, Instruction, Kind
from .qasm import SourceLocation


@dataclass(frozen=True)
class CanonicalCircuit:
    circuit: Circuit
    # original instruction index for every surviving instruction
    origin: tuple[int, ...]

    @property
    def provenance(self) -> tuple[SourceLocation | None, ...]:
        return tuple(ins.location for ins in self.circuit.instructions)

    @classmethod
    def identity(cls, circuit: Circuit) -> CanonicalCircuit:
        """Wrap a circuit unchanged (diagnostic raw-matching mode)."""
        return cls(circuit, tuple(range(len(circuit))))


def _gate_key(ins: Instruction) -> tuple:
    if ins.kind is Kind.CZ:
        # CZ is symmetric in its operands
        return (ins.kind, frozenset(ins.qubits))
    return (ins.kind, ins.qubits)


def _cancel_pass(instructions: list[tuple[int, Instruction]]) -> list[tuple[int, Instruction]]:
    # Per-qubit stacks of surviving positions. A gate cancels against the
    # most recent survivor only if that survivor is on top of *every* one of
    # its qubits' stacks, i.e. nothing else touched those qubits in between.
    alive = [True] * len(instructions)
    stacks: dict[int, list[int]] = {}
    for pos, (_, ins) in enumerate(instructions):
        if ins.kind is Kind.ID:
            alive[pos] = False
            continue
        if ins.kind in SELF_INVERSE:
            tops = {stacks[q][-1] if stacks.get(q) else None for q in ins.qubits}
            if len(tops) == 1:
                (top,) = tops
                if top is not None and _gate_key(instructions[top][1]) == _gate_key(ins):
                    alive[top] = alive[pos] = False
                    for q in ins.qubits:
                        stacks[q].pop()
                    continue
        for q in ins.qubits:
            stacks.setdefault(q, []).append(pos)
    return [item for item, keep in zip(instructions, alive) if keep]


def _cancel(items: list[tuple[int, Instruction]]) -> list[tuple[int, Instruction]]:
    # Each productive pass removes at least two instructions, so this terminates
    # within len(items) / 2 iterations.
    while True:
        reduced = _cancel_pass(items)
        if len(reduced) == len(items):
            return reduced
        items = reduced


def _hoist(items: list[tuple[int, Instruction]]) -> list[tuple[int, Instruction]]:
    merged: list[tuple[int, Instruction] | None] = list(items)
    # position of an open delay run per qubit
    open_run: dict[int, int] = {}
    for pos, (origin, ins) in enumerate(items):
        if ins.kind is Kind.DELAY:
            (q,) = ins.qubits
            head = open_run.get(q)
            if head is None:
                open_run[q] = pos
            else:
                horigin, hins = merged[head]
                merged[head] = (
                    horigin,
                    Instruction(Kind.DELAY, hins.qubits, hins.duration_dt + ins.duration_dt,
                                location=hins.location),
                )
                merged[pos] = None
        else:
            for q in ins.qubits:
                open_run.pop(q, None)
    kept = [m for m in merged if m is not None]

    busy = set()
    for _, ins in kept:
        if ins.kind is not Kind.DELAY:
            busy.update(ins.qubits)
    front = [m for m in kept if m[1].kind is Kind.DELAY and m[1].qubits[0] not in busy]
    rest = [m for m in kept if not (m[1].kind is Kind.DELAY and m[1].qubits[0] not in busy)]
    return front + rest


def _wrap(circuit: Circuit) -> list[tuple[int, Instruction]]:
    return list(enumerate(circuit.instructions))


def cancel_self_inverse_runs(circuit: Circuit) -> Circuit:
    return circuit.replace(ins for _, ins in _cancel(_wrap(circuit)))


def hoist_pure_delays(circuit: Circuit) -> Circuit:
    return circuit.replace(ins for _, ins in _hoist(_wrap(circuit)))


def canonicalize(circuit: Circuit) -> CanonicalCircuit:
    items = _wrap(circuit)
    while True:
        nxt = _hoist(_cancel(items))
        if [ins for _, ins in nxt] == [ins for _, ins in items]:
            break
        items = nxt
    return CanonicalCircuit(
        circuit.replace(ins for _, ins in items),
        tuple(origin for origin, _ in items),
    )
