"""Flat-indexed circuit IR shared by the canonicalizer, scanner and simulator.

Qubits are plain ints: registers are flattened in declaration order, so
``qreg a[2]; qreg b[1];`` makes ``b[0]`` qubit 2.
"""

from __future__ import annotations

import enum
from bisect import insort
from collections.abc import Iterable
from dataclasses import dataclass, field

from .qasm import QasmAst, RegisterDecl, SourceLocation, Statement

# Device scheduling unit. Metadata only: durations stay integer dt everywhere.
DT_NS = 2 / 5


class Kind(str, enum.Enum):
    CX = "cx"
    X = "x"
    Y = "y"
    Z = "z"
    ID = "id"
    H = "h"
    CZ = "cz"
    BARRIER = "barrier"
    MEASURE = "measure"
    DELAY = "delay"


SELF_INVERSE = frozenset({Kind.CX, Kind.X, Kind.Y, Kind.Z, Kind.ID, Kind.H, Kind.CZ})
TWO_QUBIT = frozenset({Kind.CX, Kind.CZ})


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Instruction:
    kind: Kind
    qubits: tuple[int, ...]
    duration_dt: int | None = None
    clbits: tuple[int, ...] = ()
    location: SourceLocation | None = field(default=None, compare=False)

    def __post_init__(self):
        n = len(self.qubits)
        if self.kind in TWO_QUBIT:
            if n != 2 or self.qubits[0] == self.qubits[1]:
                raise CircuitError(f"{self.kind.value} needs two distinct qubits, got {self.qubits}")
        elif self.kind is Kind.BARRIER:
            if n < 1 or len(set(self.qubits)) != n:
                raise CircuitError("barrier needs one or more distinct qubits")
        elif n != 1:
            raise CircuitError(f"{self.kind.value} takes one qubit, got {self.qubits}")
        if (self.duration_dt is not None) != (self.kind is Kind.DELAY):
            raise CircuitError("duration_dt is present exactly for delay")
        if self.duration_dt is not None and self.duration_dt < 0:
            raise CircuitError("delay duration must be non-negative")
        if len(self.clbits) != (self.kind is Kind.MEASURE):
            raise CircuitError("measure takes exactly one classical bit; other kinds none")

    def __str__(self) -> str:
        args = ",".join(f"q{q}" for q in self.qubits)
        if self.kind is Kind.DELAY:
            return f"delay({self.duration_dt}) {args}"
        return f"{self.kind.value} {args}"


@dataclass(frozen=True)
class Circuit:
    qubit_count: int
    instructions: tuple[Instruction, ...] = ()
    clbit_count: int = 0

    def __post_init__(self):
        if self.qubit_count < 1:
            raise CircuitError("a circuit needs at least one qubit")
        object.__setattr__(self, "instructions", tuple(self.instructions))
        for ins in self.instructions:
            if max(ins.qubits) >= self.qubit_count or min(ins.qubits) < 0:
                raise CircuitError(f"{ins} references a qubit outside 0..{self.qubit_count - 1}")
            if ins.clbits and not 0 <= ins.clbits[0] < self.clbit_count:
                raise CircuitError(f"{ins} references a classical bit outside the register")

    def __len__(self) -> int:
        return len(self.instructions)

    def replace(self, instructions: Iterable[Instruction]) -> Circuit:
        return Circuit(self.qubit_count, tuple(instructions), self.clbit_count)

    def qubit_timelines(self) -> list[list[int]]:
        """Instruction indices touching each qubit, in global order."""
        lines: list[list[int]] = [[] for _ in range(self.qubit_count)]
        for i, ins in enumerate(self.instructions):
            for q in ins.qubits:
                lines[q].append(i)
        return lines


def lower(ast: QasmAst) -> Circuit:
    """Flatten registers in declaration order and convert statements to instructions."""
    qoffset: dict[str, int] = {}
    coffset: dict[str, int] = {}
    nq = nc = 0
    for reg in ast.registers:
        if reg.kind == "qreg":
            qoffset[reg.name] = nq
            nq += reg.size
        else:
            coffset[reg.name] = nc
            nc += reg.size
    if nq == 0:
        raise CircuitError("program declares no quantum register")
    instructions = [
        Instruction(
            Kind(st.name),
            tuple(qoffset[r] + i for r, i in st.qubits),
            st.duration,
            tuple(coffset[r] + i for r, i in st.clbits),
            st.location,
        )
        for st in ast.statements
    ]
    return Circuit(nq, tuple(instructions), nc)


def to_ast(circuit: Circuit, qreg: str = "q", creg: str = "c") -> QasmAst:
    """Inverse of :func:`lower` for a single-register layout."""
    regs = [RegisterDecl("qreg", qreg, circuit.qubit_count)]
    if circuit.clbit_count:
        regs.append(RegisterDecl("creg", creg, circuit.clbit_count))
    statements = [
        Statement(
            ins.kind.value,
            tuple((qreg, q) for q in ins.qubits),
            ins.duration_dt,
            tuple((creg, c) for c in ins.clbits),
            ins.location,
        )
        for ins in circuit.instructions
    ]
    return QasmAst(tuple(regs), tuple(statements))


def timeline(circuit: Circuit, qubits: Iterable[int]) -> list[tuple[int, Instruction]]:
    """Instructions touching at least one of ``qubits``, with their global indices.

    Instructions on other qubits are invisible, so two gates separated in the
    source by unrelated work still appear next to each other here.
    """
    wanted = set(qubits)
    if not wanted:
        raise ValueError("timeline needs at least one qubit")
    bad = [q for q in wanted if not 0 <= q < circuit.qubit_count]
    if bad:
        raise ValueError(f"qubits {sorted(bad)} not in circuit")
    return [(i, ins) for i, ins in enumerate(circuit.instructions) if wanted.intersection(ins.qubits)]


@dataclass(frozen=True)
class CouplingMap:
    """Undirected device connectivity; ``None`` elsewhere means fully coupled."""

    edges: frozenset[frozenset[int]]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> CouplingMap:
        edges = set()
        for a, b in pairs:
            if a == b:
                raise CircuitError(f"coupling map self-loop on qubit {a}")
            if a < 0 or b < 0:
                raise CircuitError("coupling map indices must be non-negative")
            edges.add(frozenset((a, b)))
        return cls(frozenset(edges))

    def coupled(self, a: int, b: int) -> bool:
        return frozenset((a, b)) in self.edges

    def neighbors(self, q: int) -> list[int]:
        out: list[int] = []
        for e in self.edges:
            if q in e:
                (other,) = e - {q}
                insort(out, other)
        return out

    def max_qubit(self) -> int:
        return max((max(e) for e in self.edges), default=-1)

    def check(self, circuit: Circuit) -> None:
        if self.max_qubit() >= circuit.qubit_count:
            raise CircuitError(
                f"coupling map mentions qubit {self.max_qubit()} but circuit has {circuit.qubit_count}"
            )


def parse_coupling_map(text: str) -> CouplingMap:
    """Read ``i j`` edge lines; ``#`` starts a comment."""
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise CircuitError(f"coupling map line {lineno}: expected two non-negative integers")
        pairs.append((int(parts[0]), int(parts[1])))
    return CouplingMap.from_pairs(pairs)
