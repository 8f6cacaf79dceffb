"""Closed-form variational gauge-potential coefficients.

The counter-diabatic drive adds a uniform single-site sigma^y term whose
strength is Y(t) = lam_dot * alpha + gamma_dot * beta.  The coefficients
(alpha, beta) minimize the trace action of the Hermitian deviation operators
for the single-site sigma^y ansatz; for the collective three-body model the
minimizer is

    alpha = -kappa * gamma,   beta = kappa * (1 - lam) * lam,
    kappa = (1/2) N^2 (3N - 2) / [(1-lam)^2 gamma^2 N^4
                                  + lam^2 (27 N^2 - 66 N + 40)]

and for the two-level avoided-crossing model with longitudinal field h

    alpha = -(1/2) h gamma / D,   beta = (1/2) (1-lam) lam h / D,
    D = lam^2 h^2 + gamma^2 (1-lam)^2.

Derivatives of (alpha, beta) along a schedule are available both as exact
chain-rule expressions and as a Richardson-extrapolated finite-difference
fallback used to cross-check the long analytic forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import schedules
from .errors import DegeneratePointError
from .schedules import ScheduleSpec

_DEGENERATE_FLOOR = 1e-24


@dataclass(frozen=True)
class PSpinModel:
    """Collective three-body model on n spins (symmetric-sector dynamics)."""

    n: int

    def __post_init__(self):
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 2):
            raise ValueError(f"system size must be an integer >= 2, got {self.n}")


@dataclass(frozen=True)
class LandauZenerModel:
    """Two-level avoided-crossing model with longitudinal field h."""

    h: float

    def __post_init__(self):
        if self.h == 0.0:
            raise ValueError("longitudinal field h must be nonzero")


@dataclass(frozen=True)
class GaugeCoefficients:
    """Variational drive coefficients; kappa only applies to the spin model."""

    alpha: float
    beta: float
    kappa: float | None = None


def _pspin_kappa(lam, gam, n):
    c = 27.0 * n**2 - 66.0 * n + 40.0
    denom = (1.0 - lam) ** 2 * gam**2 * n**4 + lam**2 * c
    return 0.5 * n**2 * (3.0 * n - 2.0) / denom


def _pspin_alpha_beta(lam, gam, n):
    kappa = _pspin_kappa(lam, gam, n)
    return -kappa * gam, kappa * (1.0 - lam) * lam


def pspin_coefficients(lam: float, gam: float, n: int) -> GaugeCoefficients:
    """Closed-form coefficients for the collective three-body model.

    The denominator is positive for every 0 <= lam <= 1 and n >= 2 whenever
    gamma is nonzero, so the formula is always defined on the physical range.
    """
    if not (isinstance(n, (int, np.integer)) and n >= 2):
        raise ValueError(f"system size must be an integer >= 2, got {n}")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lam must lie in [0, 1], got {lam}")
    kappa = float(_pspin_kappa(lam, gam, n))
    return GaugeCoefficients(alpha=-kappa * gam, beta=kappa * (1.0 - lam) * lam, kappa=kappa)


def _lz_denominator(lam, gam, h):
    return lam**2 * h**2 + gam**2 * (1.0 - lam) ** 2


def _lz_alpha_beta(lam, gam, h):
    d = _lz_denominator(lam, gam, h)
    return -0.5 * h * gam / d, 0.5 * (1.0 - lam) * lam * h / d


def lz_coefficients(lam: float, gam: float, h: float) -> GaugeCoefficients:
    """Closed-form coefficients for the two-level model.

    With gamma held constant the alpha term alone reproduces the exact
    counter-diabatic drive of the two-level crossing.
    """
    d = float(_lz_denominator(lam, gam, h))
    if not d > _DEGENERATE_FLOOR:
        raise DegeneratePointError(
            f"coefficient denominator vanishes at lam={lam}, gamma={gam}, h={h}"
        )
    alpha, beta = _lz_alpha_beta(lam, gam, h)
    return GaugeCoefficients(alpha=float(alpha), beta=float(beta))


@dataclass(frozen=True)
class GaugePartials:
    """Partial derivatives of (alpha, beta) with respect to (lam, gamma)."""

    alpha_lam: float
    alpha_gam: float
    beta_lam: float
    beta_gam: float


def _pspin_partials(lam, gam, n):
    c = 27.0 * n**2 - 66.0 * n + 40.0
    a_num = 0.5 * n**2 * (3.0 * n - 2.0)
    d = (1.0 - lam) ** 2 * gam**2 * n**4 + lam**2 * c
    d_lam = -2.0 * (1.0 - lam) * gam**2 * n**4 + 2.0 * lam * c
    d_gam = 2.0 * (1.0 - lam) ** 2 * gam * n**4
    kappa = a_num / d
    kappa_lam = -a_num * d_lam / d**2
    kappa_gam = -a_num * d_gam / d**2
    alpha_lam = -kappa_lam * gam
    alpha_gam = -(kappa + kappa_gam * gam)
    beta_lam = kappa_lam * (1.0 - lam) * lam + kappa * (1.0 - 2.0 * lam)
    beta_gam = kappa_gam * (1.0 - lam) * lam
    return alpha_lam, alpha_gam, beta_lam, beta_gam


def _lz_partials(lam, gam, h):
    d = _lz_denominator(lam, gam, h)
    d_lam = 2.0 * lam * h**2 - 2.0 * gam**2 * (1.0 - lam)
    d_gam = 2.0 * gam * (1.0 - lam) ** 2
    alpha_lam = 0.5 * h * gam * d_lam / d**2
    alpha_gam = -0.5 * h * (d - gam * d_gam) / d**2
    beta_lam = 0.5 * h * ((1.0 - 2.0 * lam) * d - (1.0 - lam) * lam * d_lam) / d**2
    beta_gam = -0.5 * h * (1.0 - lam) * lam * d_gam / d**2
    return alpha_lam, alpha_gam, beta_lam, beta_gam


def pspin_coefficient_partials(lam: float, gam: float, n: int) -> GaugePartials:
    return GaugePartials(*(float(p) for p in _pspin_partials(lam, gam, n)))


def lz_coefficient_partials(lam: float, gam: float, h: float) -> GaugePartials:
    return GaugePartials(*(float(p) for p in _lz_partials(lam, gam, h)))


def _alpha_beta(model, lam, gam):
    if isinstance(model, PSpinModel):
        return _pspin_alpha_beta(lam, gam, model.n)
    if isinstance(model, LandauZenerModel):
        return _lz_alpha_beta(lam, gam, model.h)
    raise TypeError(f"unsupported model {model!r}")


def _partials(model, lam, gam):
    if isinstance(model, PSpinModel):
        return _pspin_partials(lam, gam, model.n)
    if isinstance(model, LandauZenerModel):
        return _lz_partials(lam, gam, model.h)
    raise TypeError(f"unsupported model {model!r}")


def cd_y_coefficient(t, spec: ScheduleSpec, model):
    """Strength of the sigma^y drive, Y(t) = lam_dot*alpha + gamma_dot*beta.

    Vanishes exactly at t=0 and t=tau because both schedule derivatives do.
    """
    lv = np.asarray(schedules.lam(t, spec))
    gv = np.asarray(schedules.gamma(t, spec))
    alpha, beta = _alpha_beta(model, lv, gv)
    out = np.asarray(schedules.lam_dot(t, spec)) * alpha + np.asarray(
        schedules.gamma_dot(t, spec)
    ) * beta
    return float(out) if np.ndim(t) == 0 else out


def alpha_beta_time_derivatives(t, spec: ScheduleSpec, model):
    """Chain-rule time derivatives (alpha_dot, beta_dot) along the schedule."""
    lv = np.asarray(schedules.lam(t, spec))
    gv = np.asarray(schedules.gamma(t, spec))
    ld = np.asarray(schedules.lam_dot(t, spec))
    gd = np.asarray(schedules.gamma_dot(t, spec))
    a_l, a_g, b_l, b_g = _partials(model, lv, gv)
    adot = a_l * ld + a_g * gd
    bdot = b_l * ld + b_g * gd
    if np.ndim(t) == 0:
        return float(adot), float(bdot)
    return adot, bdot


def alpha_beta_time_derivatives_fd(t, spec: ScheduleSpec, model, base_step: float | None = None):
    """Richardson-extrapolated finite-difference fallback for the above.

    Uses central differences at steps h and h/2 with h = 1e-5 * tau by
    default; intended for interior times where the stencil stays in domain.
    """
    h = 1e-5 * spec.total_time if base_step is None else base_step

    def value(tt):
        lv = np.asarray(schedules.lam(tt, spec))
        gv = np.asarray(schedules.gamma(tt, spec))
        return _alpha_beta(model, lv, gv)

    def central(step):
        ap, bp = value(t + step)
        am, bm = value(t - step)
        return (ap - am) / (2.0 * step), (bp - bm) / (2.0 * step)

    d1a, d1b = central(h)
    d2a, d2b = central(0.5 * h)
    adot = (4.0 * d2a - d1a) / 3.0
    bdot = (4.0 * d2b - d1b) / 3.0
    if np.ndim(t) == 0:
        return float(adot), float(bdot)
    return adot, bdot
