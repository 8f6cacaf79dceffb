import math

import numpy as np
import pytest

from cdanneal import (
    Basis,
    BasisMismatchError,
    PSpinModel,
    ProtocolSpec,
    StateVector,
    build_collective_operators,
    fidelity,
    problem_hamiltonian,
    residual_energy,
    schedules,
    tts,
)
from cdanneal import dynamics, model


def sym_state(amplitudes, n):
    amp = np.asarray(amplitudes, dtype=complex)
    return StateVector(amp / np.linalg.norm(amp), Basis.symmetric(n))


def test_fidelity_basic():
    up = sym_state([1, 0, 0, 0, 0], 4)
    assert fidelity(up, up) == pytest.approx(1.0)
    other = sym_state([0, 1, 0, 0, 0], 4)
    assert fidelity(up, other) == 0.0
    flat = sym_state(np.ones(5), 4)
    assert fidelity(flat, up) == pytest.approx(0.2, rel=1e-12)


def test_fidelity_basis_mismatch():
    a = StateVector(np.array([1.0, 0.0]), Basis.two_level())
    b = sym_state([1, 0, 0], 2)
    with pytest.raises(BasisMismatchError):
        fidelity(a, b)


def test_residual_energy_values():
    n = 2
    ops = build_collective_operators(n)
    hp = problem_hamiltonian(PSpinModel(n), ops)
    ground = sym_state([1, 0, 0], n)
    assert residual_energy(ground, hp, -2.0) == pytest.approx(0.0, abs=1e-14)
    # All-down eigenvalue of the problem term is +N, so the gap is 2N.
    down = sym_state([0, 0, 1], n)
    assert residual_energy(down, hp, -2.0) == pytest.approx(4.0, rel=1e-14)
    lz_hp = -0.1 * model.SIGMA_Z
    excited = StateVector(np.array([0.0, 1.0]), Basis.two_level())
    assert residual_energy(excited, lz_hp, -0.1) == pytest.approx(0.2, rel=1e-14)


def test_residual_energy_phase_and_z_rotation_invariance():
    n = 4
    ops = build_collective_operators(n)
    hp = problem_hamiltonian(PSpinModel(n), ops)
    rng = np.random.default_rng(2)
    amp = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
    psi = sym_state(amp, n)
    base = residual_energy(psi, hp, -4.0)
    rotated = StateVector(np.exp(0.3j) * psi.amplitudes, Basis.symmetric(n))
    assert residual_energy(rotated, hp, -4.0) == pytest.approx(base, rel=1e-12)
    phases = np.exp(1j * 0.7 * np.diag(np.real(ops.mz)))
    zrot = StateVector(phases * psi.amplitudes, Basis.symmetric(n))
    assert residual_energy(zrot, hp, -4.0) == pytest.approx(base, rel=1e-12)


def test_tts_reference_points():
    assert tts(7.0, 1.0) == 7.0
    assert tts(10.0, 0.99, p_r=0.99) == pytest.approx(10.0, rel=1e-12)
    assert tts(1.0, 0.5, p_r=0.99) == pytest.approx(
        math.log(0.01) / math.log(0.5), rel=1e-12
    )
    assert tts(3.0, 0.0) == math.inf
    # 1 - F underflow maps to tau
    assert tts(5.0, 1.0 - 1e-18) == 5.0


def test_tts_monotone_and_scaling():
    fs = np.linspace(0.01, 0.999, 50)
    vals = [tts(1.0, float(f)) for f in fs]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    for c in (0.5, 3.0, 100.0):
        assert tts(c * 2.0, 0.37) == pytest.approx(c * tts(2.0, 0.37), rel=1e-12)


def test_tts_validation():
    with pytest.raises(ValueError):
        tts(1.0, 0.5, p_r=1.0)
    with pytest.raises(ValueError):
        tts(1.0, 1.5)


def test_spectrum_occupations_rows():
    n = 4
    tau = 1.0
    spec = schedules.ScheduleSpec.linked_pspin(tau, 0.1)
    pspec = ProtocolSpec("cd2", PSpinModel(n))
    result = dynamics.run_protocol(spec, pspec, spectrum_samples=5)
    trace = result.occupations
    assert trace.energies.shape == (5, n + 1)
    assert trace.occupations.shape == (5, n + 1)
    # starts in the instantaneous ground state
    assert trace.occupations[0, 0] == pytest.approx(1.0, abs=1e-12)
    sums = trace.occupations.sum(axis=1)
    assert np.all(np.abs(sums - 1.0) < 1e-6)
    # eigenvalues sorted ascending per sample
    assert np.all(np.diff(trace.energies, axis=1) >= -1e-12)
    # final-sample ground-state occupation equals the fidelity (H ends at Hp)
    assert trace.occupations[-1, 0] == pytest.approx(result.fidelity, rel=1e-9)


def test_run_result_bounds():
    spec = schedules.ScheduleSpec.linked_pspin(0.5, 0.1)
    res = dynamics.run_protocol(spec, ProtocolSpec("qa", PSpinModel(4)))
    assert -1e-9 <= res.fidelity <= 1 + 1e-9
    assert res.residual_energy >= -1e-9
    assert res.tts > 0
    assert res.diagnostics.norm_drift < 1e-6
