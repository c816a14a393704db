"""Virus signature database: types, text format, loader and built-in defaults.

File format (``#`` starts a comment)::

    version 1
    signature cx-delay
      unit: CX a b ; DELAY any @ a|b
      suspicious_at: 5
      malicious_at: 10
      note: free text
    end

A unit is a ``;``-separated list of gate templates repeated K times.
Gate classes: ``CX CZ PAULI_X PAULI_Y PAULI_XY PAULI_Z IDENT H`` followed by
qubit variables, or ``DELAY <any|=n|>=n> @ v1|v2|...`` for a delay on any of
the listed variables. Variables only referenced by delays must be declared
with a ``vars:`` line.
"""

from __future__ import annotations

import enum
import re
from collections.abc import Mapping
from dataclasses import dataclass, field, replace

from .circuit import Instruction, Kind

__all__ = [
    "KindClass",
    "DurationConstraint",
    "GateTemplate",
    "Signature",
    "SignatureDatabase",
    "SignatureError",
    "FormatError",
    "DuplicateId",
    "BadThresholds",
    "BadArity",
    "load_database",
    "emit_database",
    "default_database",
    "DEFAULT_DATABASE_TEXT",
]


class KindClass(str, enum.Enum):
    CX = "CX"
    CZ = "CZ"
    PAULI_X = "PAULI_X"
    PAULI_Y = "PAULI_Y"
    PAULI_XY = "PAULI_XY"
    PAULI_Z = "PAULI_Z"
    IDENT = "IDENT"
    H = "H"
    ANY_DELAY = "DELAY"


_CLASS_KINDS: dict[KindClass, frozenset[Kind]] = {
    KindClass.CX: frozenset({Kind.CX}),
    KindClass.CZ: frozenset({Kind.CZ}),
    KindClass.PAULI_X: frozenset({Kind.X}),
    KindClass.PAULI_Y: frozenset({Kind.Y}),
    KindClass.PAULI_XY: frozenset({Kind.X, Kind.Y}),
    KindClass.PAULI_Z: frozenset({Kind.Z}),
    KindClass.IDENT: frozenset({Kind.ID}),
    KindClass.H: frozenset({Kind.H}),
    KindClass.ANY_DELAY: frozenset({Kind.DELAY}),
}

_ALIASES = {"X": KindClass.PAULI_X, "Y": KindClass.PAULI_Y, "Z": KindClass.PAULI_Z,
            "I": KindClass.IDENT, "ID": KindClass.IDENT}


class SignatureError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.message = message
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class FormatError(SignatureError):
    pass


class DuplicateId(SignatureError):
    pass


class BadThresholds(SignatureError):
    pass


class BadArity(SignatureError):
    pass


@dataclass(frozen=True)
class DurationConstraint:
    mode: str = "any"  # "any" | "exact" | "at_least"
    value: int = 0

    def accepts(self, duration: int) -> bool:
        if self.mode == "exact":
            return duration == self.value
        if self.mode == "at_least":
            return duration >= self.value
        return True

    def __str__(self) -> str:
        return {"any": "any", "exact": f"={self.value}", "at_least": f">={self.value}"}[self.mode]


@dataclass(frozen=True)
class GateTemplate:
    """One gate in a repetition unit.

    For gate classes ``qubit_vars`` are the operands in order. For
    ``ANY_DELAY`` they are alternatives: the delay may sit on any of them.
    """

    kind_class: KindClass
    qubit_vars: tuple[str, ...]
    duration: DurationConstraint | None = None

    @property
    def is_delay(self) -> bool:
        return self.kind_class is KindClass.ANY_DELAY

    @property
    def arity(self) -> int:
        return 2 if self.kind_class in (KindClass.CX, KindClass.CZ) else 1

    def matches(self, ins: Instruction, binding: Mapping[str, int]) -> bool:
        if ins.kind not in _CLASS_KINDS[self.kind_class]:
            return False
        if self.is_delay:
            return (ins.qubits[0] in {binding[v] for v in self.qubit_vars}
                    and self.duration.accepts(ins.duration_dt))
        if self.kind_class is KindClass.CZ:
            return frozenset(ins.qubits) == frozenset(binding[v] for v in self.qubit_vars)
        return ins.qubits == tuple(binding[v] for v in self.qubit_vars)

    def seed_bindings(self, ins: Instruction) -> list[dict[str, int]]:
        """Partial bindings under which this template could match ``ins``."""
        if ins.kind not in _CLASS_KINDS[self.kind_class]:
            return []
        if self.is_delay:
            if not self.duration.accepts(ins.duration_dt):
                return []
            return [{v: ins.qubits[0]} for v in self.qubit_vars]
        seeds = [dict(zip(self.qubit_vars, ins.qubits))]
        if self.kind_class is KindClass.CZ:
            seeds.append(dict(zip(self.qubit_vars, reversed(ins.qubits))))
        return seeds

    def __str__(self) -> str:
        if self.is_delay:
            return f"DELAY {self.duration} @ {'|'.join(self.qubit_vars)}"
        return " ".join((self.kind_class.value, *self.qubit_vars))


@dataclass(frozen=True)
class Signature:
    id: str
    unit: tuple[GateTemplate, ...]
    suspicious_at: int
    malicious_at: int
    severity_note: str = ""
    declared_vars: tuple[str, ...] = ()

    def __post_init__(self):
        validate_signature(self)

    @property
    def variables(self) -> tuple[str, ...]:
        """Qubit variables in order of first appearance."""
        seen: dict[str, None] = {}
        for t in self.unit:
            if not t.is_delay:
                seen.update(dict.fromkeys(t.qubit_vars))
        seen.update(dict.fromkeys(self.declared_vars))
        return tuple(seen)

    def two_qubit_templates(self) -> list[GateTemplate]:
        return [t for t in self.unit if not t.is_delay and t.arity == 2]


def validate_signature(sig: Signature, line: int | None = None) -> None:
    if not re.fullmatch(r"[A-Za-z0-9][A-Za-z0-9_.-]*", sig.id):
        raise FormatError(f"bad signature id {sig.id!r}", line)
    if not sig.unit:
        raise FormatError(f"{sig.id}: empty unit", line)
    if sig.suspicious_at < 1 or sig.malicious_at < 1:
        raise BadThresholds(f"{sig.id}: thresholds must be positive", line)
    if sig.suspicious_at > sig.malicious_at:
        raise BadThresholds(
            f"{sig.id}: suspicious_at {sig.suspicious_at} > malicious_at {sig.malicious_at}", line
        )
    bound = set(sig.declared_vars)
    for t in sig.unit:
        if t.is_delay:
            if not t.qubit_vars or len(set(t.qubit_vars)) != len(t.qubit_vars):
                raise BadArity(f"{sig.id}: DELAY needs distinct variables after '@'", line)
            if t.duration is None:
                raise FormatError(f"{sig.id}: DELAY needs a duration constraint", line)
            continue
        if len(t.qubit_vars) != t.arity:
            raise BadArity(
                f"{sig.id}: {t.kind_class.value} takes {t.arity} variable(s), got {len(t.qubit_vars)}",
                line,
            )
        if len(set(t.qubit_vars)) != len(t.qubit_vars):
            raise BadArity(f"{sig.id}: {t.kind_class.value} variables must be distinct", line)
        bound.update(t.qubit_vars)
    for t in sig.unit:
        unbound = set(t.qubit_vars) - bound
        if unbound:
            raise FormatError(f"{sig.id}: unbound variable(s) {sorted(unbound)}", line)


@dataclass(frozen=True)
class SignatureDatabase:
    signatures: tuple[Signature, ...] = ()
    version: str = "1"
    _by_id: dict[str, Signature] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "signatures", tuple(self.signatures))
        by_id: dict[str, Signature] = {}
        for sig in self.signatures:
            if sig.id in by_id:
                raise DuplicateId(f"duplicate signature id {sig.id!r}")
            by_id[sig.id] = sig
        object.__setattr__(self, "_by_id", by_id)

    def __getitem__(self, sig_id: str) -> Signature:
        return self._by_id[sig_id]

    def __iter__(self):
        return iter(self.signatures)

    def __len__(self) -> int:
        return len(self.signatures)

    @property
    def ids(self) -> list[str]:
        return [s.id for s in self.signatures]

    def with_thresholds(self, suspicious_at: int | None = None,
                        malicious_at: int | None = None) -> SignatureDatabase:
        """Copy with global threshold overrides applied to every signature."""
        sigs = []
        for s in self.signatures:
            changes = {}
            if suspicious_at is not None:
                changes["suspicious_at"] = suspicious_at
            if malicious_at is not None:
                changes["malicious_at"] = malicious_at
            sigs.append(replace(s, **changes))
        return SignatureDatabase(tuple(sigs), self.version)


# ---------------------------------------------------------------------------
# Text format

_DELAY_RE = re.compile(r"^DELAY\s+(any|=\d+|>=\d+)\s+@\s+(\S+)$")


def _parse_template(text: str, line: int) -> GateTemplate:
    text = " ".join(text.split())
    if not text:
        raise FormatError("empty template in unit", line)
    if text.upper().startswith("DELAY"):
        m = _DELAY_RE.match(text)
        if m is None:
            raise FormatError(f"bad delay template {text!r}; expected 'DELAY <any|=n|>=n> @ vars'", line)
        bound, vars_ = m.groups()
        if bound == "any":
            dur = DurationConstraint()
        elif bound.startswith(">="):
            dur = DurationConstraint("at_least", int(bound[2:]))
        else:
            dur = DurationConstraint("exact", int(bound[1:]))
        return GateTemplate(KindClass.ANY_DELAY, tuple(vars_.split("|")), dur)
    head, *vars_ = text.split()
    name = head.upper()
    try:
        kind_class = _ALIASES.get(name) or KindClass(name)
    except ValueError:
        raise FormatError(f"unknown gate class {head!r}", line) from None
    if kind_class is KindClass.ANY_DELAY:
        raise FormatError(f"bad delay template {text!r}", line)
    for v in vars_:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v):
            raise FormatError(f"bad variable name {v!r}", line)
    return GateTemplate(kind_class, tuple(vars_))


def _positive_int(value: str, key: str, line: int) -> int:
    if not value.isdigit():
        raise FormatError(f"{key} must be a positive integer, got {value!r}", line)
    return int(value)


def load_database(source_text: str) -> SignatureDatabase:
    """Parse and validate a signature file; any defect rejects the whole file."""
    version = "1"
    sigs: list[Signature] = []
    seen: set[str] = set()
    current: dict | None = None
    for lineno, raw in enumerate(source_text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if current is None:
            word, _, rest = line.partition(" ")
            rest = rest.strip()
            if word == "version" and rest:
                version = rest
            elif word == "signature" and rest and " " not in rest:
                current = {"id": rest, "line": lineno}
            else:
                raise FormatError(f"expected 'signature <id>' or 'version <v>', got {line!r}", lineno)
            continue
        if line == "end":
            sigs.append(_finish(current, lineno, seen))
            current = None
            continue
        key, sep, value = line.partition(":")
        key, value = key.strip(), value.strip()
        if not sep:
            raise FormatError(f"expected 'key: value', got {line!r}", lineno)
        if key in current:
            raise FormatError(f"repeated key {key!r}", lineno)
        if key == "unit":
            current["unit"] = tuple(_parse_template(t, lineno) for t in value.split(";"))
        elif key in ("suspicious_at", "malicious_at"):
            current[key] = _positive_int(value, key, lineno)
        elif key == "note":
            current["note"] = value
        elif key == "vars":
            current["vars"] = tuple(value.split())
        else:
            raise FormatError(f"unknown key {key!r}", lineno)
    if current is not None:
        raise FormatError(f"signature {current['id']!r} is missing 'end'", current["line"])
    return SignatureDatabase(tuple(sigs), version)


def _finish(block: dict, lineno: int, seen: set[str]) -> Signature:
    for key in ("unit", "suspicious_at", "malicious_at"):
        if key not in block:
            raise FormatError(f"signature {block['id']!r} is missing {key!r}", lineno)
    if block["id"] in seen:
        raise DuplicateId(f"duplicate signature id {block['id']!r}", block["line"])
    seen.add(block["id"])
    try:
        return Signature(
            id=block["id"],
            unit=block["unit"],
            suspicious_at=block["suspicious_at"],
            malicious_at=block["malicious_at"],
            severity_note=block.get("note", ""),
            declared_vars=block.get("vars", ()),
        )
    except SignatureError as e:
        raise type(e)(e.message, block["line"]) from None


def emit_database(db: SignatureDatabase) -> str:
    out = [f"version {db.version}"]
    for s in db.signatures:
        out.append(f"signature {s.id}")
        out.append("  unit: " + " ; ".join(str(t) for t in s.unit))
        out.append(f"  suspicious_at: {s.suspicious_at}")
        out.append(f"  malicious_at: {s.malicious_at}")
        if s.severity_note:
            out.append(f"  note: {s.severity_note}")
        if s.declared_vars:
            out.append("  vars: " + " ".join(s.declared_vars))
        out.append("end")
    return "\n".join(out) + "\n"


DEFAULT_DATABASE_TEXT = """\
# Built-in crosstalk signatures.
# Delay-only, identity+delay and Z+delay chains are deliberately absent:
# they do not measurably disturb a neighbouring tenant.
version 1
signature cx-delay
  unit: CX a b ; DELAY any @ a|b
  suspicious_at: 5
  malicious_at: 10
  note: CNOT chain kept alive by interleaved delays (zero-length delays included); strongest crosstalk source
end
signature xy-delay
  unit: PAULI_XY a ; DELAY any @ a
  suspicious_at: 5
  malicious_at: 10
  note: X/Y chain interleaved with delays; weaker than cx-delay
end
"""


def default_database() -> SignatureDatabase:
    return load_database(DEFAULT_DATABASE_TEXT)
