from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from qantivirus.circuit import Circuit, Instruction, Kind

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS = sorted((FIXTURES / "corpus").glob("*.qasm"))

GATE_KINDS = [Kind.CX, Kind.CZ, Kind.X, Kind.Y, Kind.Z, Kind.H, Kind.ID]
# scanner-oriented mix: lots of CX / X / Y and delays so runs actually form
SCAN_MIX = [Kind.CX, Kind.CX, Kind.DELAY, Kind.DELAY, Kind.DELAY, Kind.X, Kind.Y,
            Kind.Z, Kind.H, Kind.BARRIER, Kind.MEASURE, Kind.ID]


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def make_instruction(kind, qubits, duration=None):
    if kind is Kind.DELAY:
        return Instruction(kind, qubits[:1], duration if duration is not None else 0)
    if kind in (Kind.CX, Kind.CZ):
        return Instruction(kind, qubits[:2])
    if kind is Kind.BARRIER:
        return Instruction(kind, qubits)
    if kind is Kind.MEASURE:
        return Instruction(kind, qubits[:1], clbits=qubits[:1])
    return Instruction(kind, qubits[:1])


def random_circuit(rng: np.random.Generator, n_qubits: int, n_instr: int, kinds=SCAN_MIX,
                   hot_pairs: int = 2) -> Circuit:
    """Random circuit biased toward a few 'hot' qubit pairs so patterns repeat."""
    pairs = [tuple(rng.choice(n_qubits, 2, replace=False)) for _ in range(hot_pairs)] if n_qubits > 1 else []
    out = []
    for _ in range(n_instr):
        kind = kinds[rng.integers(len(kinds))]
        if pairs and rng.random() < 0.7:
            a, b = pairs[rng.integers(len(pairs))]
            if rng.random() < 0.5:
                a, b = b, a
        else:
            a, b = rng.choice(n_qubits, 2, replace=n_qubits < 2)
        if kind in (Kind.CX, Kind.CZ) and (n_qubits < 2 or a == b):
            kind = Kind.X
        if kind is Kind.BARRIER:
            qs = tuple(sorted({int(a), int(b)}))
            out.append(Instruction(kind, qs))
            continue
        dur = int(rng.choice([0, 1, 2, 100])) if kind is Kind.DELAY else None
        out.append(make_instruction(kind, (int(a), int(b)), dur))
    return Circuit(n_qubits, tuple(out), n_qubits)


@st.composite
def circuits(draw, max_qubits=4, max_len=30, kinds=SCAN_MIX):
    n = draw(st.integers(1, max_qubits))
    items = []
    for _ in range(draw(st.integers(0, max_len))):
        kind = draw(st.sampled_from(kinds))
        if kind in (Kind.CX, Kind.CZ):
            if n < 2:
                kind = Kind.X
            else:
                qs = tuple(draw(st.permutations(range(n)))[:2])
                items.append(Instruction(kind, qs))
                continue
        q = draw(st.integers(0, n - 1))
        if kind is Kind.DELAY:
            items.append(Instruction(kind, (q,), draw(st.sampled_from([0, 1, 5]))))
        elif kind is Kind.BARRIER:
            qs = draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=n, unique=True))
            items.append(Instruction(kind, tuple(sorted(qs))))
        elif kind is Kind.MEASURE:
            items.append(Instruction(kind, (q,), clbits=(q,)))
        else:
            items.append(Instruction(kind, (q,)))
    return Circuit(n, tuple(items), n)


# acceptance results, printed once at the end of the session
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
