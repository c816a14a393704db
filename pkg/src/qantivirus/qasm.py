"""OpenQASM 2.0 subset frontend: lexer, parser and canonical emitter.

Accepted statements::

    OPENQASM 2.0;
    include "qelib1.inc";          // skipped
    qreg q[5]; creg c[2];
    cx q[0],q[1]; cz q[0],q[1];
    x q[0]; y q[0]; z q[0]; id q[0]; h q[0];
    delay(4) q[2];                 // extension, integer duration in dt
    barrier q[0],q[1];  barrier q;
    measure q[0] -> c[0];  measure q -> c;

Anything else is rejected. A file is parsed completely or not at all.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

__all__ = [
    "SourceLocation",
    "RegisterDecl",
    "Statement",
    "QasmAst",
    "QasmError",
    "QasmSyntaxError",
    "UnknownGate",
    "QubitOutOfRange",
    "DuplicateRegister",
    "MissingHeader",
    "GATE_ARITY",
    "parse",
    "emit",
]

# name -> number of qubit operands; None means "one or more" (barrier)
GATE_ARITY: dict[str, int | None] = {
    "cx": 2,
    "cz": 2,
    "x": 1,
    "y": 1,
    "z": 1,
    "id": 1,
    "h": 1,
    "delay": 1,
    "measure": 1,
    "barrier": None,
}


@dataclass(frozen=True, order=True)
class SourceLocation:
    line: int
    column: int
    byte_offset: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class QasmError(Exception):
    """Base class for all frontend errors. Carries an optional location."""

    def __init__(self, message: str, location: SourceLocation | None = None):
        self.message = message
        self.location = location
        prefix = f"{location}: " if location is not None else ""
        super().__init__(prefix + message)


class QasmSyntaxError(QasmError):
    pass


class UnknownGate(QasmError):
    pass


class QubitOutOfRange(QasmError):
    pass


class DuplicateRegister(QasmError):
    pass


class MissingHeader(QasmError):
    pass


@dataclass(frozen=True)
class RegisterDecl:
    kind: str  # "qreg" | "creg"
    name: str
    size: int
    location: SourceLocation | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Statement:
    """One gate application. Equality ignores the location."""

    name: str
    qubits: tuple[tuple[str, int], ...]
    duration: int | None = None
    clbits: tuple[tuple[str, int], ...] = ()
    location: SourceLocation | None = field(default=None, compare=False)


@dataclass(frozen=True)
class QasmAst:
    registers: tuple[RegisterDecl, ...]
    statements: tuple[Statement, ...]

    @property
    def register_decls(self) -> list[tuple[str, int]]:
        return [(r.name, r.size) for r in self.registers]

    def qregs(self) -> list[RegisterDecl]:
        return [r for r in self.registers if r.kind == "qreg"]

    def cregs(self) -> list[RegisterDecl]:
        return [r for r in self.registers if r.kind == "creg"]


# ---------------------------------------------------------------------------
# Lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<real>\d+\.\d*)
  | (?P<int>\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<arrow>->)
  | (?P<sym>[;,\[\](){}])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    location: SourceLocation


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col, byte = 1, 1, 0
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise QasmSyntaxError(
                f"unexpected character {source[pos]!r}", SourceLocation(line, col, byte)
            )
        kind = m.lastgroup
        text = m.group()
        if kind not in ("ws", "nl", "comment"):
            if kind in ("sym", "arrow"):
                kind = text
            tokens.append(Token(kind, text, SourceLocation(line, col, byte)))
        byte += len(text.encode("utf-8"))
        if kind == "nl":
            line, col = line + 1, 1
        else:
            col += len(text)
        pos = m.end()
    tokens.append(Token("eof", "", SourceLocation(line, col, byte)))
    return tokens


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0
        self.registers: dict[str, RegisterDecl] = {}
        self.decls: list[RegisterDecl] = []
        self.statements: list[Statement] = []

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str, what: str | None = None) -> Token:
        t = self.tok
        if t.kind != kind:
            found = t.text or "end of file"
            raise QasmSyntaxError(f"expected {what or kind!r}, found {found!r}", t.location)
        return self.advance()

    def parse(self) -> QasmAst:
        self.header()
        while self.tok.kind != "eof":
            self.statement()
        return QasmAst(tuple(self.decls), tuple(self.statements))

    def header(self) -> None:
        t = self.tok
        if t.kind != "id" or t.text != "OPENQASM":
            raise MissingHeader("program must start with 'OPENQASM 2.0;'", t.location)
        self.advance()
        version = self.tok
        if version.kind not in ("real", "int"):
            raise QasmSyntaxError("expected version number after OPENQASM", version.location)
        if float(version.text) != 2.0:
            raise QasmSyntaxError(f"unsupported OpenQASM version {version.text}", version.location)
        self.advance()
        self.expect(";")

    def statement(self) -> None:
        t = self.tok
        if t.kind != "id":
            raise QasmSyntaxError(f"unexpected {t.text!r}", t.location)
        name = t.text
        if name == "include":
            self.advance()
            path = self.expect("string", "include path")
            if path.text != '"qelib1.inc"':
                raise QasmSyntaxError(f"only qelib1.inc may be included, not {path.text}", path.location)
            self.expect(";")
        elif name in ("qreg", "creg"):
            self.declaration()
        elif name.lower() not in GATE_ARITY:
            raise UnknownGate(f"gate {name!r} is not supported", t.location)
        elif name.lower() == "measure":
            self.measure()
        elif name.lower() == "barrier":
            self.barrier()
        else:
            self.gate()

    def declaration(self) -> None:
        kw = self.advance()
        name = self.expect("id", "register name")
        self.expect("[")
        size_tok = self.expect("int", "register size")
        self.expect("]")
        self.expect(";")
        size = int(size_tok.text)
        if size < 1:
            raise QasmSyntaxError("register size must be positive", size_tok.location)
        if name.text in self.registers:
            raise DuplicateRegister(f"register {name.text!r} already declared", name.location)
        decl = RegisterDecl(kw.text, name.text, size, kw.location)
        self.registers[name.text] = decl
        self.decls.append(decl)

    def operand(self, kind: str, allow_whole: bool = False) -> list[tuple[str, int]]:
        name = self.expect("id", "register name")
        decl = self.registers.get(name.text)
        if decl is None:
            raise QasmSyntaxError(f"undeclared register {name.text!r}", name.location)
        if decl.kind != kind:
            raise QasmSyntaxError(f"{name.text!r} is a {decl.kind}, expected a {kind}", name.location)
        if self.tok.kind != "[":
            if not allow_whole:
                raise QasmSyntaxError("expected an indexed operand like q[0]", self.tok.location)
            return [(decl.name, i) for i in range(decl.size)]
        self.advance()
        idx = int(self.expect("int", "index").text)
        self.expect("]")
        if idx >= decl.size:
            raise QubitOutOfRange(
                f"index {idx} out of range for {decl.name}[{decl.size}]", name.location
            )
        return [(decl.name, idx)]

    def gate(self) -> None:
        head = self.advance()
        gname = head.text.lower()
        duration = None
        if gname == "delay":
            self.expect("(")
            d = self.tok
            if d.kind != "int":
                raise QasmSyntaxError("delay duration must be a non-negative integer (dt)", d.location)
            self.advance()
            self.expect(")")
            duration = int(d.text)
        elif self.tok.kind == "(":
            raise QasmSyntaxError(f"gate {head.text!r} takes no parameters", self.tok.location)
        qubits = self.operand("qreg")
        while self.tok.kind == ",":
            self.advance()
            qubits += self.operand("qreg")
        self.expect(";")
        arity = GATE_ARITY[gname]
        if len(qubits) != arity:
            raise QasmSyntaxError(f"{gname} takes {arity} qubit(s), got {len(qubits)}", head.location)
        if len(set(qubits)) != len(qubits):
            raise QasmSyntaxError(f"{gname} operands must be distinct", head.location)
        self.statements.append(Statement(gname, tuple(qubits), duration, (), head.location))

    def barrier(self) -> None:
        head = self.advance()
        qubits = self.operand("qreg", allow_whole=True)
        while self.tok.kind == ",":
            self.advance()
            qubits += self.operand("qreg", allow_whole=True)
        self.expect(";")
        # duplicates in a barrier are harmless; keep first occurrence
        qubits = list(dict.fromkeys(qubits))
        self.statements.append(Statement("barrier", tuple(qubits), None, (), head.location))

    def measure(self) -> None:
        head = self.advance()
        qubits = self.operand("qreg", allow_whole=True)
        self.expect("->")
        clbits = self.operand("creg", allow_whole=True)
        self.expect(";")
        if len(qubits) != len(clbits):
            raise QasmSyntaxError("measure register sizes differ", head.location)
        for q, c in zip(qubits, clbits):
            self.statements.append(Statement("measure", (q,), None, (c,), head.location))


def parse(source_text: str) -> QasmAst:
    """Parse a complete program. Raises a :class:`QasmError` subclass on any defect."""
    return _Parser(source_text).parse()


def _fmt(op: tuple[str, int]) -> str:
    return f"{op[0]}[{op[1]}]"


def emit(ast: QasmAst) -> str:
    """Serialize to canonical text: header, declarations, then one statement per line."""
    lines = ["OPENQASM 2.0;"]
    lines += [f"{r.kind} {r.name}[{r.size}];" for r in ast.registers]
    for st in ast.statements:
        operands = ",".join(_fmt(q) for q in st.qubits)
        if st.name == "measure":
            lines.append(f"measure {operands} -> {_fmt(st.clbits[0])};")
        elif st.name == "delay":
            lines.append(f"delay({st.duration}) {operands};")
        else:
            lines.append(f"{st.name} {operands};")
    return "\n".join(lines) + "\n"
