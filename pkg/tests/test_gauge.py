import numpy as np
import pytest

from cdanneal import DegeneratePointError, LandauZenerModel, PSpinModel, schedules
from cdanneal.gauge import (
    alpha_beta_time_derivatives,
    alpha_beta_time_derivatives_fd,
    cd_y_coefficient,
    lz_coefficients,
    pspin_coefficients,
)


def test_pspin_closed_form_values():
    # Direct substitution: 0.5 * 16 * 10 / (0.01 * 256)
    co = pspin_coefficients(0.0, 0.1, 4)
    assert co.kappa == pytest.approx(31.25, rel=1e-12)
    assert co.alpha == pytest.approx(-3.125, rel=1e-12)
    assert co.beta == 0.0
    # At lam=1 the field term of the denominator vanishes: 8 / 16.
    co = pspin_coefficients(1.0, 0.3, 2)
    assert co.kappa == pytest.approx(0.5, rel=1e-12)
    assert co.beta == 0.0


@pytest.mark.parametrize("n", [2, 5, 17])
@pytest.mark.parametrize("gam", [0.05, 0.6, 2.0])
def test_pspin_beta_zero_at_ramp_ends_and_kappa_positive(n, gam):
    for lam in (0.0, 1.0):
        co = pspin_coefficients(lam, gam, n)
        assert co.beta == 0.0
        assert co.kappa > 0.0
    for lam in np.linspace(0.0, 1.0, 21):
        assert pspin_coefficients(float(lam), gam, n).kappa > 0.0


def test_pspin_validation():
    with pytest.raises(ValueError):
        pspin_coefficients(0.5, 0.6, 1)
    with pytest.raises(ValueError):
        pspin_coefficients(1.2, 0.6, 4)


def test_kappa_large_n_decay():
    # kappa ~ 1/N at large N, so doubling N should roughly halve it.
    k50 = pspin_coefficients(0.5, 0.6, 50).kappa
    k100 = pspin_coefficients(0.5, 0.6, 100).kappa
    assert 0.4 < k100 / k50 < 0.6


def test_lz_closed_form_values():
    co = lz_coefficients(0.0, 1.0, 0.1)
    assert co.alpha == pytest.approx(-0.05, rel=1e-12)
    assert co.beta == 0.0
    # Substitution at the midpoint: -0.025/0.065 and 0.0125/0.065.
    co = lz_coefficients(0.5, 0.5, 0.1)
    assert co.alpha == pytest.approx(-5.0 / 13.0, rel=1e-12)
    assert co.beta == pytest.approx(2.5 / 13.0, rel=1e-12)
    assert lz_coefficients(1.0, 0.7, 0.1).beta == 0.0


def test_lz_degenerate_denominator():
    with pytest.raises(DegeneratePointError):
        lz_coefficients(0.0, 0.0, 0.1)


def test_lz_minimizes_its_action():
    # The closed form should be the stationary point of the explicit
    # two-level trace action.
    from cdanneal import oracle

    rng = np.random.default_rng(3)
    for _ in range(10):
        lam, gam, h = rng.uniform(0.05, 0.95), rng.uniform(0.1, 2.0), rng.uniform(0.05, 0.5)
        co = lz_coefficients(lam, gam, h)
        s0 = oracle.action_trace_lz(lam, gam, co.alpha, co.beta, h)
        eps = 1e-6
        for da, db in ((eps, 0), (-eps, 0), (0, eps), (0, -eps)):
            assert oracle.action_trace_lz(lam, gam, co.alpha + da, co.beta + db, h) >= s0 - 1e-12


def test_cd_y_coefficient_endpoints_and_modes():
    spec = schedules.ScheduleSpec.linked_pspin(3.0, 0.1)
    m = PSpinModel(6)
    assert cd_y_coefficient(0.0, spec, m) == 0.0
    assert cd_y_coefficient(3.0, spec, m) == 0.0
    # Constant gamma: Y reduces to lam_dot * alpha.
    const = schedules.ScheduleSpec.constant(3.0, 0.1)
    t = 1.234
    lam = schedules.lam(t, const)
    co = pspin_coefficients(lam, 0.1, 6)
    assert cd_y_coefficient(t, const, m) == pytest.approx(
        schedules.lam_dot(t, const) * co.alpha, rel=1e-12
    )


@pytest.mark.parametrize(
    "model,mode",
    [
        (PSpinModel(9), "linked_pspin"),
        (PSpinModel(9), "constant"),
        (LandauZenerModel(0.1), "linked_lz"),
        (LandauZenerModel(0.1), "constant"),
    ],
)
def test_alpha_beta_derivatives_fd_cross_check(model, mode):
    tau = 2.5
    if mode == "constant":
        spec = schedules.ScheduleSpec.constant(tau, 0.8)
    elif mode == "linked_pspin":
        spec = schedules.ScheduleSpec.linked_pspin(tau, 0.1)
    else:
        spec = schedules.ScheduleSpec.linked_lz(tau)
    rng = np.random.default_rng(11)
    for t in rng.uniform(0.05 * tau, 0.95 * tau, size=20):
        adot, bdot = alpha_beta_time_derivatives(t, spec, model)
        adot_fd, bdot_fd = alpha_beta_time_derivatives_fd(t, spec, model)
        assert adot == pytest.approx(adot_fd, rel=1e-7, abs=1e-9)
        assert bdot == pytest.approx(bdot_fd, rel=1e-7, abs=1e-9)


def test_model_validation():
    with pytest.raises(ValueError):
        PSpinModel(1)
    with pytest.raises(ValueError):
        LandauZenerModel(0.0)
