"""Two-qubit density-matrix model of a Grover victim under attacker crosstalk.

Only the victim (q0, q1) is simulated. Attacker activity enters as noise
channels injected on both victim qubits after the victim circuit has run:
every attacker CX injects depolarizing(lambda_cx) followed by amplitude
damping(gamma) on each victim qubit, every attacker X or Y injects
depolarizing(lambda_xy). Delays, Z and I inject nothing. The observable is
the probability of reading the marked state |11>.

Basis order is |q0 q1>, q0 the most significant bit.
"""

from __future__ import annotations

import enum
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from importlib import resources

import numpy as np

from .circuit import Circuit, Instruction, Kind

ATOL = 1e-9

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

_ONE_QUBIT = {Kind.X: PAULI_X, Kind.Y: PAULI_Y, Kind.Z: PAULI_Z, Kind.H: HADAMARD, Kind.ID: I2}


class InvalidProbability(ValueError):
    pass


class Unreachable(ValueError):
    pass


class DensityMatrixError(ArithmeticError):
    pass


class Family(str, enum.Enum):
    CX_DELAY = "cx-delay"
    DELAY_ONLY = "delay-only"
    X_DELAY = "x-delay"
    Y_DELAY = "y-delay"
    Z_DELAY = "z-delay"
    I_DELAY = "i-delay"


@dataclass(frozen=True)
class NoiseModel:
    p_base: float = 0.0
    lambda_cx: float = 0.0
    lambda_xy: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not 0.0 <= value <= 1.0:
                raise InvalidProbability(f"{name}={value} is not a probability")

    @classmethod
    def shipped(cls) -> NoiseModel:
        """Calibrated defaults produced by ``scripts/calibrate_noise.py``."""
        text = resources.files("qantivirus").joinpath("noise_params.json").read_text()
        params = json.loads(text)["noise_model"]
        return cls(**params)


@dataclass(frozen=True)
class AttackSpec:
    family: Family
    k: int = 0
    delay_dt: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.k < 0 or self.delay_dt < 0:
            raise ValueError("k and delay_dt must be non-negative")


# ---------------------------------------------------------------------------
# Channels as Kraus sets on one qubit, lifted to the two-qubit register


def depolarizing_kraus(lam: float) -> list[np.ndarray]:
    # rho -> (1 - lam) rho + lam I/2
    return [np.sqrt(1 - 3 * lam / 4) * I2] + [np.sqrt(lam / 4) * P for P in (PAULI_X, PAULI_Y, PAULI_Z)]


def amplitude_damping_kraus(gamma: float) -> list[np.ndarray]:
    return [
        np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex),
        np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex),
    ]


def _lift(op: np.ndarray, qubit: int) -> np.ndarray:
    return np.kron(op, I2) if qubit == 0 else np.kron(I2, op)


def superoperator(kraus: list[np.ndarray]) -> np.ndarray:
    """Row-major vectorization: vec(K rho K^dag) = (K kron conj(K)) vec(rho)."""
    return sum(np.kron(K, K.conj()) for K in kraus)


def apply_kraus(rho: np.ndarray, kraus: list[np.ndarray]) -> np.ndarray:
    return sum(K @ rho @ K.conj().T for K in kraus)


def check_density_matrix(rho: np.ndarray, atol: float = ATOL) -> tuple[float, float]:
    """Return (trace error, min eigenvalue); raise if either is out of tolerance."""
    if not np.allclose(rho, rho.conj().T, atol=atol, rtol=0):
        raise DensityMatrixError("density matrix is not Hermitian")
    trace_err = abs(np.trace(rho) - 1)
    min_eig = float(np.linalg.eigvalsh(rho).min())
    if trace_err > atol or min_eig < -atol:
        raise DensityMatrixError(f"trace error {trace_err:.3g}, min eigenvalue {min_eig:.3g}")
    return float(trace_err), min_eig


class InvariantMonitor:
    """Checks every intermediate state and keeps the worst values seen."""

    def __init__(self, atol: float = ATOL):
        self.atol = atol
        self.steps = 0
        self.max_trace_error = 0.0
        self.min_eigenvalue = 1.0

    def __call__(self, rho: np.ndarray) -> None:
        err, eig = check_density_matrix(rho, self.atol)
        self.steps += 1
        self.max_trace_error = max(self.max_trace_error, err)
        self.min_eigenvalue = min(self.min_eigenvalue, eig)


# ---------------------------------------------------------------------------
# Victim


def grover2_circuit() -> Circuit:
    """One Grover iteration on two qubits, oracle marking |11>."""
    def g(kind, *qubits):
        return Instruction(kind, qubits)

    return Circuit(2, (
        g(Kind.H, 0), g(Kind.H, 1),
        g(Kind.CZ, 0, 1),
        g(Kind.H, 0), g(Kind.H, 1),
        g(Kind.Z, 0), g(Kind.Z, 1),
        g(Kind.CZ, 0, 1),
        g(Kind.H, 0), g(Kind.H, 1),
    ))


def gate_unitary(ins: Instruction) -> np.ndarray:
    if ins.kind is Kind.CZ:
        return CZ
    if ins.kind is Kind.CX:
        return CX if ins.qubits == (0, 1) else np.kron(HADAMARD, HADAMARD) @ CX @ np.kron(HADAMARD, HADAMARD)
    return _lift(_ONE_QUBIT[ins.kind], ins.qubits[0])


def run_victim(noise: NoiseModel, circuit: Circuit | None = None, monitor=None) -> np.ndarray:
    """Evolve |00><00| through the victim with per-gate depolarizing noise."""
    circuit = circuit or grover2_circuit()
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1.0
    base = {q: [_lift(K, q) for K in depolarizing_kraus(noise.p_base)] for q in (0, 1)}
    for ins in circuit.instructions:
        if ins.kind not in _ONE_QUBIT and ins.kind not in (Kind.CZ, Kind.CX):
            continue
        U = gate_unitary(ins)
        rho = U @ rho @ U.conj().T
        for q in ins.qubits:
            rho = apply_kraus(rho, base[q])
            if monitor is not None:
                monitor(rho)
    return rho


def injection_channel(noise: NoiseModel, family: Family) -> np.ndarray | None:
    """Superoperator for one attacker repetition acting on both victim qubits."""
    if family is Family.CX_DELAY:
        per_qubit = [depolarizing_kraus(noise.lambda_cx), amplitude_damping_kraus(noise.gamma)]
    elif family in (Family.X_DELAY, Family.Y_DELAY):
        per_qubit = [depolarizing_kraus(noise.lambda_xy)]
    else:
        return None
    S = np.eye(16, dtype=complex)
    for q in (0, 1):
        for kraus in per_qubit:
            S = superoperator([_lift(K, q) for K in kraus]) @ S
    return S


def simulate_victim(noise: NoiseModel, attack: AttackSpec, monitor=None) -> float:
    """Probability of reading |11> from the victim with ``attack`` running alongside.

    ``attack.delay_dt`` is accepted but has no effect: crosstalk is tied to
    gate activity, not idling.
    """
    if not isinstance(noise, NoiseModel):
        raise TypeError("noise must be a NoiseModel")
    rho = run_victim(noise, monitor=monitor)
    S = injection_channel(noise, attack.family)
    if S is not None:
        vec = rho.reshape(16)
        for _ in range(attack.k):
            vec = S @ vec
            if monitor is not None:
                monitor(vec.reshape(4, 4))
        rho = vec.reshape(4, 4)
    if monitor is not None:
        monitor(rho)
    return float(np.clip(rho[3, 3].real, 0.0, 1.0))


def outcome_probabilities(rho: np.ndarray) -> dict[str, float]:
    return {f"{i:02b}": float(rho[i, i].real) for i in range(4)}


def calibrate_baseline(target: float, tol: float = 1e-12) -> float:
    """Bisect for the per-gate depolarizing strength giving P(|11>) = target."""
    lo, hi = 0.0, 1.0
    f = lambda p: simulate_victim(NoiseModel(p_base=p), AttackSpec(Family.DELAY_ONLY))
    top, bottom = f(lo), f(hi)
    if not bottom < target <= 1.0 or target > top + ATOL:
        raise Unreachable(f"target {target} outside attainable range ({bottom:.6f}, {top:.6f}]")
    if target >= top:
        return 0.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if f(mid) > target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def plateau(noise: NoiseModel, family: Family = Family.CX_DELAY) -> float:
    """Limit of P(|11>) as k grows: the composed injection's fixed point.

    Each qubit's excited population follows p -> c p + d with
    c = (1-lam)(1-gamma), d = (1-gamma) lam/2, so it converges to d/(1-c)
    independently of the starting state; |11> has that probability squared.
    """
    if family is Family.CX_DELAY:
        lam, gam = noise.lambda_cx, noise.gamma
    elif family in (Family.X_DELAY, Family.Y_DELAY):
        lam, gam = noise.lambda_xy, 0.0
    else:
        raise ValueError(f"{family.value} injects nothing; it has no plateau of its own")
    c = (1 - lam) * (1 - gam)
    d = (1 - gam) * lam / 2
    if c == 1:
        raise ValueError("channel is the identity; no unique fixed point")
    return (d / (1 - c)) ** 2


def sweep_k(noise: NoiseModel, family: Family | str, delay_dt: int, k_values,
            workers: int | None = None, monitor=None) -> list[tuple[int, float]]:
    family = Family(family)
    k_values = list(k_values)
    run = lambda k: simulate_victim(noise, AttackSpec(family, k, delay_dt), monitor=monitor)
    if workers and workers > 1 and monitor is None:
        with ThreadPoolExecutor(workers) as pool:
            probs = list(pool.map(run, k_values))
    else:
        probs = [run(k) for k in k_values]
    return list(zip(k_values, probs))


def format_sweep(rows) -> str:
    return "".join(f"{k}\t{p:.6f}\n" for k, p in rows)
