import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qantivirus.circuit import Kind
from qantivirus.crosstalk import (AttackSpec, Family, InvalidProbability, InvariantMonitor, NoiseModel,
                                  Unreachable, amplitude_damping_kraus, apply_kraus,
                                  calibrate_baseline, check_density_matrix, depolarizing_kraus,
                                  format_sweep, grover2_circuit, outcome_probabilities, plateau,
                                  run_victim, simulate_victim, sweep_k)

from oracles import circuit_unitary

SHIPPED = NoiseModel.shipped()


def test_grover_structure():
    c = grover2_circuit()
    kinds = [i.kind for i in c.instructions]
    assert kinds.count(Kind.CZ) == 2
    assert len(kinds) - kinds.count(Kind.CZ) == 8
    assert all(set(i.qubits) <= {0, 1} for i in c.instructions)


def test_grover_noiseless_hits_marked_state():
    # independent check: plain state vector through the oracle unitary
    psi = circuit_unitary(grover2_circuit())[:, 0]
    assert abs(psi[3]) ** 2 == pytest.approx(1.0, abs=1e-12)
    assert simulate_victim(NoiseModel(), AttackSpec(Family.CX_DELAY, 5)) == pytest.approx(1.0, abs=1e-12)


def test_invalid_probability():
    with pytest.raises(InvalidProbability):
        NoiseModel(p_base=1.5)
    with pytest.raises(InvalidProbability):
        NoiseModel(gamma=-0.1)


def test_attack_without_channel_is_flat():
    noise = NoiseModel(p_base=SHIPPED.p_base)
    vals = {simulate_victim(noise, AttackSpec(Family.CX_DELAY, k)) for k in (0, 1, 50, 300)}
    assert len(vals) == 1


def test_shipped_baseline():
    assert simulate_victim(SHIPPED, AttackSpec(Family.CX_DELAY, 0)) == pytest.approx(0.87, abs=1e-6)


def test_pure_depolarizing_converges_to_uniform():
    noise = NoiseModel(SHIPPED.p_base, lambda_cx=0.05, gamma=0.0)
    assert simulate_victim(noise, AttackSpec(Family.CX_DELAY, 2000)) == pytest.approx(0.25, abs=1e-9)


def test_damping_plateau_below_uniform():
    p_end = simulate_victim(SHIPPED, AttackSpec(Family.CX_DELAY, 3000))
    # fixed point found by direct iteration of the composed channel on a single qubit
    rho = np.eye(2, dtype=complex) / 2
    for _ in range(5000):
        rho = apply_kraus(apply_kraus(rho, depolarizing_kraus(SHIPPED.lambda_cx)),
                          amplitude_damping_kraus(SHIPPED.gamma))
    fixed = rho[1, 1].real ** 2
    assert p_end == pytest.approx(fixed, abs=1e-9)
    assert p_end == pytest.approx(plateau(SHIPPED), abs=1e-9)
    assert 0.15 <= p_end < 0.25


def test_calibrate_bounds():
    assert calibrate_baseline(1.0) == 0.0
    p = calibrate_baseline(0.87)
    assert 0 < p < 1
    assert simulate_victim(NoiseModel(p_base=p), AttackSpec(Family.DELAY_ONLY)) == pytest.approx(0.87, abs=1e-6)
    with pytest.raises(Unreachable):
        calibrate_baseline(0.1)
    with pytest.raises(Unreachable):
        calibrate_baseline(1.2)


def test_baseline_map_monotone():
    grid = np.linspace(0, 1, 41)
    vals = [simulate_victim(NoiseModel(p_base=p), AttackSpec(Family.DELAY_ONLY)) for p in grid]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_shipped_params_file_consistent():
    from importlib import resources
    data = json.loads(resources.files("qantivirus").joinpath("noise_params.json").read_text())
    assert data["noise_model"]["lambda_xy"] == pytest.approx(data["noise_model"]["lambda_cx"] / 4)
    assert SHIPPED.p_base == pytest.approx(calibrate_baseline(0.87), abs=1e-9)


def test_sweep_shapes():
    ks = list(range(0, 301, 10))
    cx = [p for _, p in sweep_k(SHIPPED, Family.CX_DELAY, 1, ks)]
    flat = [p for _, p in sweep_k(SHIPPED, Family.DELAY_ONLY, 1, ks)]
    x = [p for _, p in sweep_k(SHIPPED, Family.X_DELAY, 1, ks)]
    assert all(a >= b for a, b in zip(cx, cx[1:]))
    assert len(set(flat)) == 1
    assert all(c <= xv <= f for c, xv, f in zip(cx, x, flat))
    assert any(c < xv < f for c, xv, f in zip(cx, x, flat))


def test_geometric_convergence():
    fixed = plateau(SHIPPED)
    errs = [simulate_victim(SHIPPED, AttackSpec(Family.CX_DELAY, k)) - fixed for k in (100, 150, 200)]
    assert errs[0] > errs[1] > errs[2] > 0
    # equal k spacing -> equal error ratios, set by the slowest channel mode c**50
    c = (1 - SHIPPED.lambda_cx) * (1 - SHIPPED.gamma)
    assert errs[1] / errs[0] == pytest.approx(errs[2] / errs[1], rel=0.05)
    assert errs[2] / errs[1] == pytest.approx(c ** 50, rel=0.05)


@pytest.mark.parametrize("family", list(Family))
def test_delay_value_has_no_effect(family):
    vals = {simulate_victim(SHIPPED, AttackSpec(family, 60, d)) for d in (0, 1, 2, 100)}
    assert len(vals) == 1


def test_inert_families_match_baseline():
    base = simulate_victim(SHIPPED, AttackSpec(Family.DELAY_ONLY, 0))
    for fam in (Family.DELAY_ONLY, Family.Z_DELAY, Family.I_DELAY):
        assert simulate_victim(SHIPPED, AttackSpec(fam, 250)) == base


def test_x_and_y_identical():
    assert simulate_victim(SHIPPED, AttackSpec(Family.X_DELAY, 77)) == \
        simulate_victim(SHIPPED, AttackSpec(Family.Y_DELAY, 77))


def test_channel_identities():
    mixed = np.eye(2, dtype=complex) / 2
    assert np.allclose(apply_kraus(mixed, depolarizing_kraus(0.37)), mixed)
    for psi in ([1, 0], [0, 1], [1 / np.sqrt(2), 1j / np.sqrt(2)]):
        psi = np.array(psi, dtype=complex)
        out = apply_kraus(np.outer(psi, psi.conj()), amplitude_damping_kraus(1.0))
        assert np.allclose(out, np.diag([1, 0]))
    # full depolarizing sends anything to the maximally mixed state
    assert np.allclose(apply_kraus(np.diag([1, 0]).astype(complex), depolarizing_kraus(1.0)), mixed)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1),
       st.sampled_from(list(Family)), st.integers(0, 40))
def test_density_matrix_invariants_everywhere(pb, lc, lxy, g, fam, k):
    monitor = InvariantMonitor()
    p = simulate_victim(NoiseModel(pb, lc, lxy, g), AttackSpec(fam, k), monitor=monitor)
    assert 0.0 <= p <= 1.0
    assert monitor.max_trace_error < 1e-9 and monitor.min_eigenvalue > -1e-9
    rho = run_victim(NoiseModel(pb, lc, lxy, g))
    assert sum(outcome_probabilities(rho).values()) == pytest.approx(1.0, abs=1e-9)


def test_check_density_matrix_rejects_bad_states():
    from qantivirus.crosstalk import DensityMatrixError
    with pytest.raises(DensityMatrixError):
        check_density_matrix(np.diag([1.2, -0.2, 0, 0]).astype(complex))
    with pytest.raises(DensityMatrixError):
        check_density_matrix(np.diag([0.5, 0.6, 0, 0]).astype(complex))


def test_concurrent_sweep_bit_identical():
    ks = list(range(0, 301, 7))
    seq = sweep_k(SHIPPED, "cx-delay", 1, ks)
    par = sweep_k(SHIPPED, "cx-delay", 1, ks, workers=4)
    assert seq == par


def test_format_sweep():
    assert format_sweep([(0, 0.87), (1, 0.5)]) == "0\t0.870000\n1\t0.500000\n"
