"""Build victim + attacker test programs in the layout of the crosstalk experiments.

The victim is the two-qubit Grover circuit on q0, q1 (measured at the end);
the attacker repeats its unit ``k`` times on its own qubits.
"""

from __future__ import annotations

from .circuit import Circuit, Instruction, Kind, to_ast
from .crosstalk import grover2_circuit
from .qasm import emit

FAMILIES = ("cx-delay", "cx-chain", "delay-only", "x-delay", "y-delay", "z-delay", "i-delay")
VICTIM_QUBITS = (0, 1)

_PAULI = {"x-delay": Kind.X, "y-delay": Kind.Y, "z-delay": Kind.Z, "i-delay": Kind.ID}


def attacker_instructions(family: str, k: int, delay_dt: int, qubits: tuple[int, ...]) -> list[Instruction]:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if k < 0 or delay_dt < 0:
        raise ValueError("k and delay must be non-negative")
    if not qubits or len(set(qubits)) != len(qubits):
        raise ValueError("attacker qubits must be distinct and non-empty")
    if family.startswith("cx") and len(qubits) != 2:
        raise ValueError(f"{family} needs exactly two attacker qubits")

    def delay(q):
        return Instruction(Kind.DELAY, (q,), delay_dt)

    out: list[Instruction] = []
    for _ in range(k):
        if family == "cx-delay":
            out += [Instruction(Kind.CX, qubits), delay(qubits[0])]
        elif family == "cx-chain":
            out.append(Instruction(Kind.CX, qubits))
        elif family == "delay-only":
            out += [delay(q) for q in qubits]
        else:
            for q in qubits:
                out += [Instruction(_PAULI[family], (q,)), delay(q)]
    return out


def attack_circuit(family: str, k: int, delay_dt: int = 1, qubits: tuple[int, ...] = (2, 3),
                   qubit_count: int = 5, victim: bool = True) -> Circuit:
    qubits = tuple(qubits)
    if any(q < 0 or q >= qubit_count for q in qubits):
        raise ValueError(f"attacker qubits {qubits} outside 0..{qubit_count - 1}")
    body: list[Instruction] = []
    clbits = 0
    if victim:
        if set(qubits) & set(VICTIM_QUBITS):
            raise ValueError("attacker qubits overlap the victim on q0, q1")
        body += list(grover2_circuit().instructions)
    body += attacker_instructions(family, k, delay_dt, qubits)
    if victim:
        body += [Instruction(Kind.MEASURE, (q,), clbits=(q,)) for q in VICTIM_QUBITS]
        clbits = len(VICTIM_QUBITS)
    return Circuit(qubit_count, tuple(body), clbits)


def attack_qasm(*args, **kwargs) -> str:
    return emit(to_ast(attack_circuit(*args, **kwargs)))
