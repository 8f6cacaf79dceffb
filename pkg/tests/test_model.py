import numpy as np
import pytest

from cdanneal import (
    LandauZenerModel,
    PSpinModel,
    ProtocolSpec,
    SizeLimitError,
    build_collective_operators,
    frame_coefficients,
    h0_pspin,
    h_lab_cd,
    h_lz,
    h_rotated,
    hamiltonian,
    schedules,
)
from cdanneal import gauge, model, oracle


def hermitian_defect(m):
    return float(np.max(np.abs(m - m.conj().T)))


def test_collective_operator_invariants():
    for n in (2, 3, 7):
        ops = build_collective_operators(n)
        assert np.allclose(np.diag(ops.mz), n - 2 * np.arange(n + 1))
        comm = ops.mx @ ops.my - ops.my @ ops.mx
        assert np.max(np.abs(comm - 2j * ops.mz)) < 1e-12
        assert np.max(np.abs(ops.mz3 - np.linalg.matrix_power(ops.mz, 3))) == 0.0
        for m in (ops.mx, ops.my, ops.mz, ops.mz3):
            assert hermitian_defect(m) < 1e-12


def test_collective_operator_size_errors():
    with pytest.raises(SizeLimitError):
        build_collective_operators(1)
    with pytest.raises(SizeLimitError):
        build_collective_operators(10_001)


def test_three_body_identity_against_full_space():
    # (Mz^3 - (3N-2) Mz)/6 must equal the explicit sum over triples,
    # restricted to the maximal-spin sector.
    n = 4
    full = oracle.build_full_operators(n)
    p = oracle.dicke_embedding(n)
    coll = build_collective_operators(n)
    restricted = p.T @ full.zzz @ p
    assert np.max(np.abs(restricted - coll.zzz)) < 1e-12


def test_h0_pspin_limits():
    spec = schedules.ScheduleSpec.linked_pspin(1.0, 0.1)
    ops = build_collective_operators(2)
    w = np.linalg.eigvalsh(h0_pspin(1.0, spec, ops))
    assert w[0] == pytest.approx(-2.0, abs=1e-12)
    ops4 = build_collective_operators(4)
    w = np.linalg.eigvalsh(h0_pspin(0.0, spec, ops4))
    assert w[0] == pytest.approx(-0.4, abs=1e-12)


@pytest.mark.parametrize("n", [3, 5, 6])
def test_h0_pspin_interior_matches_full_space(n):
    # sector eigenvalues are a subset of the full 2^N spectrum
    spec = schedules.ScheduleSpec.linked_pspin(1.0, 0.1)
    # the schedule midpoint has lam = 0.5 and gamma = 0.6 exactly
    t = 0.5
    ops = build_collective_operators(n)
    sub = np.linalg.eigvalsh(h0_pspin(t, spec, ops))
    full = np.linalg.eigvalsh(oracle.full_h0(t, spec, oracle.build_full_operators(n)))
    for w in sub:
        assert np.min(np.abs(full - w)) < 1e-10


def test_h_lab_cd_boundaries_and_single_param_reduction():
    n = 5
    tau = 2.0
    spec = schedules.ScheduleSpec.linked_pspin(tau, 0.1)
    ops = build_collective_operators(n)
    cd2 = ProtocolSpec("cd2", PSpinModel(n))
    assert np.max(np.abs(h_lab_cd(0.0, spec, cd2, ops) - h0_pspin(0.0, spec, ops))) == 0.0
    hp = -ops.mz3 / n**2
    assert np.max(np.abs(h_lab_cd(tau, spec, cd2, ops) - hp)) < 1e-12
    # cd1 equals cd2 evaluated with gamma frozen (same constant schedule).
    const = schedules.ScheduleSpec.constant(tau, 0.1)
    cd1 = ProtocolSpec("cd1", PSpinModel(n))
    t = 0.73 * tau
    got = h_lab_cd(t, const, cd1, ops)
    y = schedules.lam_dot(t, const) * gauge.pspin_coefficients(
        schedules.lam(t, const), 0.1, n
    ).alpha
    expected = h0_pspin(t, const, ops) + y * ops.my
    assert np.max(np.abs(got - expected)) < 1e-14


def test_frame_coefficients_at_boundaries():
    tau = 2.0
    spec = schedules.ScheduleSpec.linked_pspin(tau, 0.1)
    m = PSpinModel(4)
    fc0 = frame_coefficients(0.0, spec, m)
    assert fc0.y == 0.0
    assert fc0.x == pytest.approx(-0.1, rel=1e-12)
    assert fc0.theta == pytest.approx(np.pi)
    assert fc0.theta_dot == 0.0
    assert not fc0.degenerate
    fct = frame_coefficients(tau, spec, m)
    assert fct.degenerate
    assert fct.x == 0.0 and fct.y == 0.0


def test_frame_coefficient_xdot_midpoint():
    # Xdot = lam_dot * (gamma - (1 - lam)) = (pi^2/4tau) * 0.1 at the midpoint.
    tau = 3.0
    spec = schedules.ScheduleSpec.linked_pspin(tau, 0.1)
    fc = frame_coefficients(tau / 2, spec, PSpinModel(4))
    assert fc.x_dot == pytest.approx(np.pi**2 / (40.0 * tau), rel=1e-10)


def test_frame_coefficient_theta_dot_identity():
    spec = schedules.ScheduleSpec.linked_pspin(2.0, 0.1)
    m = PSpinModel(6)
    rng = np.random.default_rng(5)
    for t in rng.uniform(0.05, 1.95, size=25):
        fc = frame_coefficients(float(t), spec, m)
        r2 = fc.x**2 + fc.y**2
        assert fc.theta_dot * r2 == pytest.approx(fc.x * fc.y_dot - fc.y * fc.x_dot, rel=1e-9)


def test_h_rotated_structure():
    n = 4
    tau = 2.0
    spec = schedules.ScheduleSpec.linked_pspin(tau, 0.1)
    ops = build_collective_operators(n)
    h0 = h_rotated(0.0, spec, ops)
    # lam(0)=0 kills the z terms; the transverse coefficient is gamma_init.
    assert np.max(np.abs(h0 - 0.1 * ops.mx)) < 1e-14
    # At tau the rotated Hamiltonian reduces to the problem Hamiltonian.
    htau = h_rotated(tau, spec, ops)
    assert np.max(np.abs(htau - (-ops.mz3 / n**2))) < 1e-12
    # Three-body coefficient is -6 lam / N^2 on the triple sum.
    t = 0.6 * tau
    lam = schedules.lam(t, spec)
    h = h_rotated(t, spec, ops)
    fc = frame_coefficients(t, spec, PSpinModel(n))
    rebuilt = (
        float(np.hypot(fc.x, fc.y)) * ops.mx
        - lam * (6.0 / n**2) * ops.zzz
        - (0.5 * fc.theta_dot + lam * (3 * n - 2) / n**2) * ops.mz
    )
    assert np.max(np.abs(h - rebuilt)) == 0.0


def test_every_builder_returns_hermitian():
    n = 5
    tau = 1.7
    linked = schedules.ScheduleSpec.linked_pspin(tau, 0.1)
    const = schedules.ScheduleSpec.constant(tau, 0.3)
    ops = build_collective_operators(n)
    ts = np.linspace(0.0, tau, 9)
    for t in ts:
        assert hermitian_defect(h0_pspin(t, linked, ops)) < 1e-12
        assert hermitian_defect(h_lab_cd(t, linked, ProtocolSpec("cd2", PSpinModel(n)), ops)) < 1e-12
        assert hermitian_defect(h_rotated(t, linked, ops)) < 1e-12
        assert hermitian_defect(h_lab_cd(t, const, ProtocolSpec("cd1", PSpinModel(n)), ops)) < 1e-12
        for proto, spec in (("qa", linked), ("cd1", const), ("cd2", linked)):
            pspec = ProtocolSpec(proto, PSpinModel(n))
            assert hermitian_defect(hamiltonian(pspec, spec, ops).matrix(t)) < 1e-12


def test_h_lz_protocols():
    tau = 1.0
    lz = LandauZenerModel(0.1)
    linked = schedules.ScheduleSpec.linked_lz(tau)
    w = np.linalg.eigvalsh(h_lz(0.0, linked, ProtocolSpec("qa", lz)))
    assert np.allclose(w, [-1.0, 1.0], atol=1e-12)
    w = np.linalg.eigvalsh(h_lz(tau, linked, ProtocolSpec("qa", lz)))
    assert np.allclose(w, [-0.1, 0.1], atol=1e-12)
    # interior minimum gap of the undriven linked-schedule Hamiltonian
    lams = np.linspace(0.0, 1.0, 2001)
    gaps = 2.0 * np.sqrt((1 - lams) ** 4 + lams**2 * 0.01)
    k = int(np.argmin(gaps))
    assert 0 < k < len(lams) - 1
    # dense-diagonalization cross-check on the same grid
    spec_gaps = []
    for lam in lams[k - 1 : k + 2]:
        h = -((1 - lam) ** 2) * model.SIGMA_X - lam * 0.1 * model.SIGMA_Z
        ev = np.linalg.eigvalsh(h)
        spec_gaps.append(ev[1] - ev[0])
    assert spec_gaps[1] == pytest.approx(gaps[k], rel=1e-12)
    assert spec_gaps[1] <= spec_gaps[0] and spec_gaps[1] <= spec_gaps[2]


def test_protocol_schedule_validation():
    pspin = PSpinModel(4)
    lz = LandauZenerModel(0.1)
    linked = schedules.ScheduleSpec.linked_pspin(1.0, 0.1)
    const = schedules.ScheduleSpec.constant(1.0, 0.1)
    lz_linked = schedules.ScheduleSpec.linked_lz(1.0)
    with pytest.raises(ValueError):
        ProtocolSpec("cd1", pspin).validate_schedule(linked)
    with pytest.raises(ValueError):
        ProtocolSpec("cd2", pspin).validate_schedule(const)
    with pytest.raises(ValueError):
        ProtocolSpec("cd2", lz).validate_schedule(linked)
    with pytest.raises(ValueError):
        ProtocolSpec("qa", pspin).validate_schedule(lz_linked)
    ProtocolSpec("qa", pspin).validate_schedule(linked)
    ProtocolSpec("qa", pspin).validate_schedule(const)
    assert ProtocolSpec("qa", pspin, frame="rotated").effective_frame == "lab"
    with pytest.raises(ValueError):
        ProtocolSpec("bogus", pspin)
    with pytest.raises(ValueError):
        ProtocolSpec("qa", pspin, frame="sideways")


def test_hamiltonian_ops_mismatch():
    spec = schedules.ScheduleSpec.linked_pspin(1.0, 0.1)
    ops = build_collective_operators(5)
    with pytest.raises(ValueError):
        hamiltonian(ProtocolSpec("qa", PSpinModel(4)), spec, ops)
