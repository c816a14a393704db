import pytest
from hypothesis import given, settings

from qantivirus.circuit import (DT_NS, Circuit, CircuitError, CouplingMap, Instruction, Kind, lower,
                                parse_coupling_map, timeline, to_ast)
from qantivirus.generate import attack_circuit
from qantivirus.qasm import emit, parse

from conftest import FIXTURES, circuits


def test_registers_flatten_in_declaration_order():
    c = lower(parse("OPENQASM 2.0; qreg a[2]; qreg b[1]; x b[0];"))
    assert c.qubit_count == 3
    assert c.instructions[0].qubits == (2,)


def test_creg_interleaving_does_not_shift_qubits():
    c = lower(parse("OPENQASM 2.0; qreg a[1]; creg m[2]; qreg b[2]; creg n[1]; measure b[1] -> n[0];"))
    (ins,) = c.instructions
    assert ins.qubits == (2,) and ins.clbits == (2,)
    assert c.clbit_count == 3


def test_attacker_timeline_alternates():
    c = lower(parse(emit(to_ast(attack_circuit("cx-delay", 4, 1)))))
    kinds = [ins.kind for _, ins in timeline(c, {2, 3})]
    assert kinds == [Kind.CX, Kind.DELAY] * 4


def test_empty_statement_list():
    c = lower(parse("OPENQASM 2.0; qreg q[3];"))
    assert c.qubit_count == 3 and c.instructions == ()


_EXAMPLE = Circuit(5, (
    Instruction(Kind.CX, (2, 3)),
    Instruction(Kind.H, (0,)),
    Instruction(Kind.DELAY, (2,), 1),
    Instruction(Kind.CX, (2, 3)),
))


def test_timeline_skips_unrelated_qubits():
    assert [i for i, _ in timeline(_EXAMPLE, {2, 3})] == [0, 2, 3]


def test_timeline_untouched_qubit_is_empty():
    assert timeline(_EXAMPLE, {4}) == []


def test_timeline_union():
    # brute-force filter
    expected = [i for i, ins in enumerate(_EXAMPLE.instructions) if {0, 2} & set(ins.qubits)]
    assert [i for i, _ in timeline(_EXAMPLE, {0, 2})] == expected == [0, 1, 2, 3]


def test_timeline_rejects_bad_input():
    with pytest.raises(ValueError):
        timeline(_EXAMPLE, set())
    with pytest.raises(ValueError):
        timeline(_EXAMPLE, {7})


@settings(max_examples=150, deadline=None)
@given(circuits(max_qubits=5, max_len=25))
def test_timeline_of_all_qubits_is_everything(c):
    got = timeline(c, range(c.qubit_count))
    assert [i for i, _ in got] == list(range(len(c)))
    assert [ins for _, ins in got] == list(c.instructions)


@settings(max_examples=150, deadline=None)
@given(circuits(max_qubits=5, max_len=25))
def test_per_qubit_timelines_preserve_order(c):
    for q, idx in enumerate(c.qubit_timelines()):
        assert idx == sorted(idx)
        assert idx == [i for i, _ in timeline(c, {q})]


@settings(max_examples=150, deadline=None)
@given(circuits(max_qubits=4, max_len=20))
def test_to_ast_lower_round_trip(c):
    assert lower(parse(emit(to_ast(c)))) == c


def test_lower_distinguishes_gate_sequences():
    a = lower(parse("OPENQASM 2.0; qreg q[2]; x q[0]; y q[0];"))
    b = lower(parse("OPENQASM 2.0; qreg q[2]; y q[0]; x q[0];"))
    assert a != b


@pytest.mark.parametrize("kind, qubits, dur", [
    (Kind.CX, (1, 1), None),
    (Kind.CX, (1,), None),
    (Kind.X, (0, 1), None),
    (Kind.DELAY, (0,), None),
    (Kind.X, (0,), 3),
    (Kind.DELAY, (0,), -1),
    (Kind.BARRIER, (), None),
    (Kind.MEASURE, (0,), None),
])
def test_instruction_invariants(kind, qubits, dur):
    with pytest.raises(CircuitError):
        Instruction(kind, qubits, dur)


def test_circuit_rejects_out_of_range_operand():
    with pytest.raises(CircuitError):
        Circuit(2, (Instruction(Kind.X, (2,)),))


def test_zero_delay_is_legal():
    assert Instruction(Kind.DELAY, (0,), 0).duration_dt == 0


def test_dt_constant():
    assert DT_NS == pytest.approx(0.4)


def test_coupling_map_file():
    cm = parse_coupling_map((FIXTURES / "coupling" / "t_shape_5q.txt").read_text())
    assert cm.coupled(0, 1) and cm.coupled(1, 0)
    assert not cm.coupled(0, 2)
    assert cm.neighbors(1) == [0, 2, 3]
    cm.check(Circuit(5))
    with pytest.raises(CircuitError):
        cm.check(Circuit(4))


@pytest.mark.parametrize("text", ["0 0\n", "0\n", "a b\n", "0 1 2\n", "-1 2\n"])
def test_coupling_map_rejects(text):
    with pytest.raises(CircuitError):
        parse_coupling_map(text)
