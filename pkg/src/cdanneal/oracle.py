"""Brute-force verification backend on the full 2^N space.

Everything here exists to check the collective-sector implementation against
an independent construction: per-site Pauli operators, the explicit
C(N, 3)-term three-body sum, the Hermitian deviation operators G built both
from their commutator definition and from the expanded operator formulas,
exact trace actions, and full-space dynamics.

Sizes are capped (statics N <= 12, dynamics N <= 10) to keep the dense 2^N
algebra fast.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np
from scipy.optimize import minimize

from . import dynamics, gauge, metrics, model, schedules
from .dynamics import Basis, IntegratorConfig, StateVector
from .errors import SizeLimitError
from .gauge import PSpinModel
from .metrics import RunResult
from .model import SIGMA_X, SIGMA_Y, SIGMA_Z, ProtocolSpec, TermHamiltonian
from .schedules import ScheduleSpec

_MAX_STATIC_N = 12
_MAX_DYNAMIC_N = 10
_MAX_G_N = 8


def _check_size(n: int, limit: int):
    if not (isinstance(n, (int, np.integer)) and 1 <= n <= limit):
        raise SizeLimitError(f"system size must be an integer in [1, {limit}], got {n}")


def pauli_site(op: np.ndarray, site: int, n: int) -> np.ndarray:
    """Single-site operator embedded in the 2^n product space.

    Site 0 is the lowest-order qubit; basis index bits count flipped
    (down) spins, so index 0 is the all-up state.
    """
    left = np.eye(2**site)
    right = np.eye(2 ** (n - site - 1))
    return np.kron(right, np.kron(op, left)).astype(complex)


def _z_diagonals(n: int) -> np.ndarray:
    """z eigenvalues (+-1) per site for each of the 2^n basis states."""
    idx = np.arange(2**n)
    bits = (idx[:, None] >> np.arange(n)[None, :]) & 1
    return 1.0 - 2.0 * bits  # bit set = spin down


@dataclass(frozen=True)
class FullSpaceOperators:
    """Dense total-spin operators on the full 2^n space."""

    n: int
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    zzz: np.ndarray  # explicit sum over the C(n, 3) triples

    @property
    def dim(self) -> int:
        return 2**self.n


def build_full_operators(n: int) -> FullSpaceOperators:
    _check_size(n, _MAX_STATIC_N)
    n = int(n)
    dim = 2**n
    sx = np.zeros((dim, dim), dtype=complex)
    sy = np.zeros((dim, dim), dtype=complex)
    for i in range(n):
        sx += pauli_site(SIGMA_X, i, n)
        sy += pauli_site(SIGMA_Y, i, n)
    z = _z_diagonals(n)
    sz = np.diag(z.sum(axis=1).astype(complex))
    zzz_diag = np.zeros(dim)
    for i, j, k in combinations(range(n), 3):
        zzz_diag += z[:, i] * z[:, j] * z[:, k]
    zzz = np.diag(zzz_diag.astype(complex))
    return FullSpaceOperators(n=n, sx=sx, sy=sy, sz=sz, zzz=zzz)


def casimir(ops: FullSpaceOperators) -> np.ndarray:
    """Total-spin Casimir S^2 (eigenvalue S(S+1) on each spin sector)."""
    return (ops.sx @ ops.sx + ops.sy @ ops.sy + ops.sz @ ops.sz) / 4.0


def dicke_embedding(n: int) -> np.ndarray:
    """Isometry (2^n, n+1) from the maximal-spin sector into the full space.

    Column k is the normalized uniform superposition of all basis states
    with k down spins, matching the collective-basis ordering.
    """
    _check_size(n, _MAX_STATIC_N)
    down_counts = ((np.arange(2**n)[:, None] >> np.arange(n)[None, :]) & 1).sum(axis=1)
    p = np.zeros((2**n, n + 1))
    for k in range(n + 1):
        rows = down_counts == k
        p[rows, k] = 1.0 / np.sqrt(comb(n, k))
    return p


def _full_h0_lg(lam: float, gam: float, ops: FullSpaceOperators) -> np.ndarray:
    """Annealing Hamiltonian at given (lam, gamma) on the full space."""
    n = ops.n
    mz_diag = np.real(np.diag(ops.sz))
    return (-(1.0 - lam) * gam) * ops.sx + np.diag(
        (-lam / float(n) ** 2) * mz_diag**3
    ).astype(complex)


def full_h0(t: float, spec: ScheduleSpec, ops: FullSpaceOperators) -> np.ndarray:
    return _full_h0_lg(schedules.lam(t, spec), schedules.gamma(t, spec), ops)


def full_h_lab_cd(
    t: float, spec: ScheduleSpec, protocol: ProtocolSpec, ops: FullSpaceOperators
) -> np.ndarray:
    if protocol.protocol == model.PROTOCOL_QA:
        raise ValueError("traditional annealing has no drive term; use full_h0")
    protocol.validate_schedule(spec)
    y = gauge.cd_y_coefficient(t, spec, PSpinModel(ops.n))
    return full_h0(t, spec, ops) + y * ops.sy


def full_h_rotated(t: float, spec: ScheduleSpec, ops: FullSpaceOperators) -> np.ndarray:
    n = ops.n
    fc = model.frame_coefficients(t, spec, PSpinModel(n))
    lv = schedules.lam(t, spec)
    cz = -(0.5 * fc.theta_dot + lv * (3.0 * n - 2.0) / float(n) ** 2)
    return float(np.hypot(fc.x, fc.y)) * ops.sx - (6.0 * lv / float(n) ** 2) * ops.zzz + cz * ops.sz


def full_hamiltonian(
    protocol: ProtocolSpec, spec: ScheduleSpec, ops: FullSpaceOperators | None = None
) -> TermHamiltonian:
    """Full-space TermHamiltonian mirroring model.hamiltonian term by term."""
    if not isinstance(protocol.model, PSpinModel):
        raise TypeError("full-space builders cover the spin model only")
    protocol.validate_schedule(spec)
    n = protocol.model.n
    _check_size(n, _MAX_DYNAMIC_N)
    if ops is None:
        ops = build_full_operators(n)
    mz_diag = np.real(np.diag(ops.sz))
    mz3 = np.diag((mz_diag**3).astype(complex))
    pmodel = protocol.model
    if protocol.protocol == model.PROTOCOL_QA:
        return TermHamiltonian(
            ops=np.stack([ops.sx, mz3]),
            coeff_fn=model._pspin_lab_coeffs(spec, pmodel, with_drive=False),
            op_norms=np.array([float(n), float(n) ** 3]),
        )
    if protocol.effective_frame == model.FRAME_LAB:
        return TermHamiltonian(
            ops=np.stack([ops.sx, mz3, ops.sy]),
            coeff_fn=model._pspin_lab_coeffs(spec, pmodel, with_drive=True),
            op_norms=np.array([float(n), float(n) ** 3, float(n)]),
        )
    return TermHamiltonian(
        ops=np.stack([ops.sx, ops.zzz, ops.sz]),
        coeff_fn=model._pspin_rotated_coeffs(spec, pmodel),
        op_norms=np.array([float(n), float(comb(n, 3)), float(n)]),
    )


def _xzz_sum(ops: FullSpaceOperators) -> np.ndarray:
    """sum_{i<j<k} (x z z + z x z + z z x) built from per-site factors."""
    n = ops.n
    z = _z_diagonals(n)
    ztot = z.sum(axis=1)
    pair_sum = 0.5 * (ztot**2 - n)  # sum_{j<k} z_j z_k
    out = np.zeros((2**n, 2**n), dtype=complex)
    for i in range(n):
        # pairs j<k avoiding site i; the z factors commute with sigma^x_i
        weight = pair_sum - z[:, i] * (ztot - z[:, i])
        out += pauli_site(SIGMA_X, i, n) * weight[None, :]
    return out


def hermitian_g(
    lam: float,
    gam: float,
    coeff: float,
    which: str,
    n: int,
    via: str = "definition",
) -> np.ndarray:
    """Deviation operator G for the spin model, by either construction.

    ``via="definition"`` computes dH0/d(param) + i [A, H0] with explicit
    matrices, A = coeff * sum_i sigma_i^y.  ``via="expanded"`` assembles the
    expanded Pauli-sum form; for the gamma branch that form is the
    derivative-consistent one (x and z single-site terms from the
    commutator only, no three-body z contribution).
    """
    _check_size(n, _MAX_G_N)
    if which not in ("lambda", "gamma"):
        raise ValueError(f"which must be 'lambda' or 'gamma', got {which!r}")
    ops = build_full_operators(n)
    if via == "definition":
        h0 = _full_h0_lg(lam, gam, ops)
        if which == "lambda":
            mz_diag = np.real(np.diag(ops.sz))
            dh = gam * ops.sx + np.diag((-1.0 / float(n) ** 2) * mz_diag**3).astype(complex)
        else:
            dh = -(1.0 - lam) * ops.sx
        a = coeff * ops.sy
        return dh + 1j * (a @ h0 - h0 @ a)
    if via != "expanded":
        raise ValueError(f"via must be 'definition' or 'expanded', got {via!r}")
    n2 = float(n) ** 2
    a = 3.0 * n - 2.0
    if which == "lambda":
        cx = gam + 2.0 * coeff * lam * a / n2
        cz = -(a / n2 + 2.0 * coeff * (1.0 - lam) * gam)
        czzz = -6.0 / n2
    else:
        cx = 2.0 * coeff * lam * a / n2 - (1.0 - lam)
        cz = -2.0 * coeff * (1.0 - lam) * gam
        czzz = 0.0
    out = cx * ops.sx + cz * ops.sz + czzz * ops.zzz
    out += (12.0 * lam / n2) * coeff * _xzz_sum(ops)
    return out


def hermitian_g_lz(
    lam: float, gam: float, coeff: float, which: str, h: float, via: str = "definition"
) -> np.ndarray:
    """Two-level deviation operator, by definition or expanded coefficients."""
    if which not in ("lambda", "gamma"):
        raise ValueError(f"which must be 'lambda' or 'gamma', got {which!r}")
    if via == "definition":
        h0 = -(1.0 - lam) * gam * SIGMA_X - lam * h * SIGMA_Z
        dh = gam * SIGMA_X - h * SIGMA_Z if which == "lambda" else -(1.0 - lam) * SIGMA_X
        a = coeff * SIGMA_Y
        return dh + 1j * (a @ h0 - h0 @ a)
    if via != "expanded":
        raise ValueError(f"via must be 'definition' or 'expanded', got {via!r}")
    if which == "lambda":
        return (gam + 2.0 * lam * h * coeff) * SIGMA_X - (
            h + 2.0 * (1.0 - lam) * gam * coeff
        ) * SIGMA_Z
    return (2.0 * lam * h * coeff - (1.0 - lam)) * SIGMA_X - 2.0 * (1.0 - lam) * gam * coeff * SIGMA_Z


def action_trace(
    lam: float, gam: float, alpha: float, beta: float, n: int, via: str = "matrices"
) -> float:
    """Tr[G_lambda^2] + Tr[G_gamma^2] for the spin model.

    ``via="matrices"`` squares the explicit operators; ``via="closed_form"``
    sums squared Pauli-string coefficients (times 2^n), which is exact
    because distinct Pauli strings are trace-orthogonal.
    """
    _check_size(n, _MAX_G_N)
    if via == "matrices":
        gl = hermitian_g(lam, gam, alpha, "lambda", n)
        gg = hermitian_g(lam, gam, beta, "gamma", n)
        return float(np.linalg.norm(gl, "fro") ** 2 + np.linalg.norm(gg, "fro") ** 2)
    if via != "closed_form":
        raise ValueError(f"via must be 'matrices' or 'closed_form', got {via!r}")
    n2 = float(n) ** 2
    a = 3.0 * n - 2.0
    c3 = 72.0 * (n - 1.0) * (n - 2.0) / float(n) ** 4
    per_site = (
        (gam + 2.0 * alpha * lam * a / n2) ** 2
        + (a / n2 + 2.0 * alpha * (1.0 - lam) * gam) ** 2
        + c3 * lam**2 * alpha**2
        + (2.0 * beta * lam * a / n2 - (1.0 - lam)) ** 2
        + (2.0 * beta * (1.0 - lam) * gam) ** 2
        + c3 * lam**2 * beta**2
    )
    constant = (36.0 / float(n) ** 4) * comb(n, 3)  # three-body strings of G_lambda
    return float(2.0**n * (n * per_site + constant))


def action_trace_lz(
    lam: float, gam: float, alpha: float, beta: float, h: float, via: str = "matrices"
) -> float:
    """Two-level trace action, explicit or from squared coefficients."""
    if via == "matrices":
        gl = hermitian_g_lz(lam, gam, alpha, "lambda", h)
        gg = hermitian_g_lz(lam, gam, beta, "gamma", h)
        return float(np.linalg.norm(gl, "fro") ** 2 + np.linalg.norm(gg, "fro") ** 2)
    if via != "closed_form":
        raise ValueError(f"via must be 'matrices' or 'closed_form', got {via!r}")
    return float(
        2.0
        * (
            (gam + 2.0 * lam * h * alpha) ** 2
            + (h + 2.0 * (1.0 - lam) * gam * alpha) ** 2
            + (2.0 * lam * h * beta - (1.0 - lam)) ** 2
            + 4.0 * (1.0 - lam) ** 2 * gam**2 * beta**2
        )
    )


def action_gradient_fd(
    lam: float, gam: float, alpha: float, beta: float, n: int, step: float = 1e-6
) -> tuple[float, float]:
    """Central-difference gradient of the explicit-matrix action."""
    da = (
        action_trace(lam, gam, alpha + step, beta, n)
        - action_trace(lam, gam, alpha - step, beta, n)
    ) / (2.0 * step)
    db = (
        action_trace(lam, gam, alpha, beta + step, n)
        - action_trace(lam, gam, alpha, beta - step, n)
    ) / (2.0 * step)
    return da, db


def minimize_action(
    lam: float, gam: float, n: int, starts: int = 5, seed: int = 0
) -> tuple[float, float]:
    """Derivative-free minimization of the explicit-matrix action.

    Runs Nelder-Mead from ``starts`` seeded random starting points and
    returns the best (alpha, beta) found.
    """
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(starts):
        x0 = rng.uniform(-2.0, 2.0, size=2)
        res = minimize(
            lambda x: action_trace(lam, gam, x[0], x[1], n),
            x0,
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 2000},
        )
        if best is None or res.fun < best.fun:
            best = res
    return float(best.x[0]), float(best.x[1])


def full_problem_reference(n: int):
    """Full-space problem Hamiltonian, ground energy, and ground state."""
    _check_size(n, _MAX_DYNAMIC_N)
    z = _z_diagonals(n).sum(axis=1)
    hp = np.diag((-z**3 / float(n) ** 2).astype(complex))
    amp = np.zeros(2**n, dtype=complex)
    amp[0] = 1.0  # all spins up
    return hp, -float(n), StateVector(amp, Basis.full(n))


def full_space_evolve(
    spec: ScheduleSpec,
    protocol: ProtocolSpec,
    cfg: IntegratorConfig | None = None,
    ops: FullSpaceOperators | None = None,
):
    """Ground-state-prepared evolution on the full 2^N space.

    Same contract as the collective-sector path: returns the final state
    and the integrator diagnostics.
    """
    if not isinstance(protocol.model, PSpinModel):
        raise TypeError("full-space evolution covers the spin model only")
    n = protocol.model.n
    _check_size(n, _MAX_DYNAMIC_N)
    ham = full_hamiltonian(protocol, spec, ops)
    gs0 = dynamics.ground_state(ham.matrix(0.0), Basis.full(n))
    return dynamics.evolve(ham, gs0.state, spec.total_time, cfg)


def full_run_protocol(
    spec: ScheduleSpec,
    protocol: ProtocolSpec,
    cfg: IntegratorConfig | None = None,
    p_r: float = metrics.DEFAULT_SUCCESS_PROBABILITY,
) -> RunResult:
    """Full-space twin of dynamics.run_protocol, for equivalence checks."""
    psi, diag = full_space_evolve(spec, protocol, cfg)
    hp, e0, phi0 = full_problem_reference(protocol.model.n)
    f = metrics.fidelity(psi, phi0)
    return RunResult(
        protocol=protocol,
        schedule=spec,
        fidelity=f,
        residual_energy=metrics.residual_energy(psi, hp, e0),
        tts=metrics.tts(spec.total_time, f, p_r),
        final_state=psi,
        diagnostics=diag,
    )
