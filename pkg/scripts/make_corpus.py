"""Regenerate tests/fixtures/corpus/: generated attack programs in messy
hand-written style (comments, includes, odd spacing, several registers),
plus a few hand-crafted edge cases.

Run:  python scripts/make_corpus.py
"""

import random
from pathlib import Path

from qantivirus.generate import attack_circuit

OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "corpus"

HANDWRITTEN = {
    "two_registers.qasm": """\
OPENQASM 2.0;
include "qelib1.inc";
// victim and attacker in separate registers
qreg v[2];
qreg att[3];
creg out[2];
h v[0]; h v[1];
cz v[0],v[1];
cx att[0],att[1]; delay(0) att[0];
cx att[0],att[1]; delay(0) att[0];
barrier v;
measure v -> out;
""",
    "empty_body.qasm": "OPENQASM 2.0;\nqreg q[3];\n",
    "uppercase_cx.qasm": "OPENQASM 2.0;\nqreg q[2];\nCX q[0],q[1];\n",
    "unicode_comment.qasm": "OPENQASM 2.0; // ünïcödé comment\nqreg q[2];\nx q[0]; // λ γ\ndelay(7) q[0];\n",
    "barrier_all.qasm": "OPENQASM 2.0;\nqreg q[4];\ncx q[0],q[1];\nbarrier q[0], q[1];\ncx q[0],q[1];\nbarrier q;\n",
}


def messy(text: str, rng: random.Random) -> str:
    out = []
    for line in text.splitlines():
        if line.startswith("OPENQASM"):
            out += [line, 'include "qelib1.inc";']
            continue
        line = line.replace(",", rng.choice([",", ", ", " , "]))
        if rng.random() < 0.2:
            line = "    " + line
        if rng.random() < 0.15:
            line += "   // " + rng.choice(["victim", "attacker", "todo check", "x"])
        out.append(line)
        if rng.random() < 0.05:
            out.append("")
    # occasionally pack two statements on one line
    i = 3
    while i < len(out) - 1:
        if rng.random() < 0.1 and "//" not in out[i] and out[i + 1].strip():
            out[i:i + 2] = [out[i] + " " + out[i + 1].strip()]
        i += 1
    return "\n".join(out) + "\n"


def main():
    rng = random.Random(20221)
    OUT.mkdir(parents=True, exist_ok=True)
    from qantivirus.circuit import to_ast
    from qantivirus.qasm import emit

    n = 0
    for family in ("cx-delay", "cx-chain", "delay-only", "x-delay", "y-delay", "z-delay", "i-delay"):
        for k in (0, 1, 3, 6, 7, 12, 25):
            delay = rng.choice([0, 1, 2, 100])
            qubits = (4,) if family == "delay-only" and rng.random() < 0.5 else (2, 3)
            if family in ("x-delay", "y-delay", "z-delay", "i-delay") and rng.random() < 0.5:
                qubits = (rng.choice([2, 3, 4]),)
            text = emit(to_ast(attack_circuit(family, k, delay, qubits)))
            (OUT / f"{family}_k{k}_d{delay}.qasm").write_text(messy(text, rng), encoding="utf-8")
            n += 1
    for name, text in HANDWRITTEN.items():
        (OUT / name).write_text(text, encoding="utf-8")
        n += 1
    print(f"wrote {n} files to {OUT}")


if __name__ == "__main__":
    main()
