"""Annealing drive functions and their time derivatives.

The interpolation parameter follows a nested-sine ramp

    lam(t) = sin^2[(pi/2) * sin^2(pi t / (2 tau))]

which rises monotonically from 0 at t=0 to 1 at t=tau and has first and
second derivatives that vanish exactly at both endpoints.  The transverse
field strength gamma(t) is either held constant, linked to the ramp as
``gamma_init + lam(t)`` (collective-spin runs), or linked as ``1 - lam(t)``
(two-level runs).

All evaluators are pure functions of (t, spec), accept scalar or array
times, and return analytic derivatives; finite differences appear only in
the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ScheduleDomainError

GAMMA_CONSTANT = "constant"
GAMMA_LINKED_PSPIN = "linked_pspin"
GAMMA_LINKED_LZ = "linked_lz"

_GAMMA_MODES = (GAMMA_CONSTANT, GAMMA_LINKED_PSPIN, GAMMA_LINKED_LZ)

# Relative slack for integrator round-off beyond [0, tau]; anything past it
# is a hard domain error.
_DOMAIN_SLACK = 1e-12


@dataclass(frozen=True)
class ScheduleSpec:
    """Total anneal time and the transverse-field mode.

    ``gamma_init`` is the field strength at t=0.  It must be nonzero for the
    constant and linked_pspin modes; for linked_lz the field starts at 1 by
    construction and ``gamma_init`` is fixed to that value.
    """

    total_time: float
    gamma_mode: str = GAMMA_CONSTANT
    gamma_init: float = 1.0

    def __post_init__(self):
        if not self.total_time > 0.0:
            raise ValueError(f"total_time must be positive, got {self.total_time}")
        if self.gamma_mode not in _GAMMA_MODES:
            raise ValueError(
                f"gamma_mode must be one of {_GAMMA_MODES}, got {self.gamma_mode!r}"
            )
        if self.gamma_mode in (GAMMA_CONSTANT, GAMMA_LINKED_PSPIN) and self.gamma_init == 0.0:
            raise ValueError("gamma_init must be nonzero for constant and linked_pspin modes")
        if self.gamma_mode == GAMMA_LINKED_LZ and self.gamma_init != 1.0:
            raise ValueError("linked_lz fixes the initial field to 1; use ScheduleSpec.linked_lz")

    @classmethod
    def constant(cls, total_time: float, gamma_init: float) -> "ScheduleSpec":
        return cls(total_time, GAMMA_CONSTANT, gamma_init)

    @classmethod
    def linked_pspin(cls, total_time: float, gamma_init: float) -> "ScheduleSpec":
        return cls(total_time, GAMMA_LINKED_PSPIN, gamma_init)

    @classmethod
    def linked_lz(cls, total_time: float) -> "ScheduleSpec":
        return cls(total_time, GAMMA_LINKED_LZ, 1.0)


def _clamp_time(t, spec: ScheduleSpec):
    """Clip t onto [0, tau], raising beyond the round-off slack.

    Returns (array, was_scalar).
    """
    tau = spec.total_time
    arr = np.asarray(t, dtype=float)
    slack = _DOMAIN_SLACK * tau
    if np.any(arr < -slack) or np.any(arr > tau + slack):
        bad = arr[(arr < -slack) | (arr > tau + slack)]
        raise ScheduleDomainError(
            f"time {bad.flat[0]} outside [0, {tau}] beyond round-off slack"
        )
    return np.clip(arr, 0.0, tau), arr.ndim == 0


def _maybe_scalar(values: np.ndarray, scalar: bool):
    return float(values) if scalar else values


def lam(t, spec: ScheduleSpec):
    """Interpolation parameter in [0, 1]."""
    tt, scalar = _clamp_time(t, spec)
    v = (np.pi / 2.0) * (tt / spec.total_time)
    u = (np.pi / 2.0) * np.sin(v) ** 2
    return _maybe_scalar(np.sin(u) ** 2, scalar)


def lam_dot(t, spec: ScheduleSpec):
    """First time derivative of the interpolation parameter.

    Exactly zero at both endpoints (both sine factors vanish there).
    """
    tau = spec.total_time
    tt, scalar = _clamp_time(t, spec)
    v = (np.pi / 2.0) * (tt / tau)
    u = (np.pi / 2.0) * np.sin(v) ** 2
    out = (np.pi**2 / (4.0 * tau)) * np.sin(2.0 * u) * np.sin(2.0 * v)
    # sin(2v) only underflows to ~1e-16 at t=tau; pin the endpoint zeros.
    out = np.where((tt == 0.0) | (tt == tau), 0.0, out)
    return _maybe_scalar(out, scalar)


def lam_ddot(t, spec: ScheduleSpec):
    """Second time derivative of the interpolation parameter."""
    tau = spec.total_time
    tt, scalar = _clamp_time(t, spec)
    v = (np.pi / 2.0) * (tt / tau)
    u = (np.pi / 2.0) * np.sin(v) ** 2
    s2v = np.sin(2.0 * v)
    out = (np.pi**3 / (4.0 * tau**2)) * (
        (np.pi / 2.0) * np.cos(2.0 * u) * s2v**2 + np.sin(2.0 * u) * np.cos(2.0 * v)
    )
    out = np.where((tt == 0.0) | (tt == tau), 0.0, out)
    return _maybe_scalar(out, scalar)


def gamma(t, spec: ScheduleSpec):
    """Transverse-field strength at time t for the schedule's mode."""
    tt, scalar = _clamp_time(t, spec)
    if spec.gamma_mode == GAMMA_CONSTANT:
        return _maybe_scalar(np.full_like(tt, spec.gamma_init), scalar)
    if spec.gamma_mode == GAMMA_LINKED_PSPIN:
        return _maybe_scalar(spec.gamma_init + np.asarray(lam(tt, spec)), scalar)
    return _maybe_scalar(1.0 - np.asarray(lam(tt, spec)), scalar)


def gamma_dot(t, spec: ScheduleSpec):
    tt, scalar = _clamp_time(t, spec)
    if spec.gamma_mode == GAMMA_CONSTANT:
        return _maybe_scalar(np.zeros_like(tt), scalar)
    sign = 1.0 if spec.gamma_mode == GAMMA_LINKED_PSPIN else -1.0
    return _maybe_scalar(sign * np.asarray(lam_dot(tt, spec)), scalar)


def gamma_ddot(t, spec: ScheduleSpec):
    tt, scalar = _clamp_time(t, spec)
    if spec.gamma_mode == GAMMA_CONSTANT:
        return _maybe_scalar(np.zeros_like(tt), scalar)
    sign = 1.0 if spec.gamma_mode == GAMMA_LINKED_PSPIN else -1.0
    return _maybe_scalar(sign * np.asarray(lam_ddot(tt, spec)), scalar)
