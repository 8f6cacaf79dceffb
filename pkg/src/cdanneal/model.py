"""Dense time-dependent Hamiltonians for all protocols and frames.

The collective three-body model lives in the (N+1)-dimensional maximal-spin
sector, spanned by the eigenstates of Mz = sum_i sigma_i^z with eigenvalues
N, N-2, ..., -N (index 0 is the all-up state).  The three-body problem term
is built through the collective identity

    sum_{i<j<k} s_i s_j s_k = (Mz^3 - (3N-2) Mz) / 6

which the test suite checks against the explicit triple sum on the full
2^N space.

Every builder returns a freshly allocated Hermitian matrix; protocols are
described by :class:`ProtocolSpec` and frames by the "lab"/"rotated" tag.
The rotated frame removes the sigma^y drive by a z-axis spin rotation over
theta = atan2(Y, X) with X = -(1-lam) gamma and Y the drive strength; its
z coefficient carries the extra -theta_dot/2 term generated by the frame
change.  At t=tau both X and Y vanish: the transverse coefficient
hypot(X, Y) stays continuous through that point, but theta_dot is 0/0, so
the builders flag the point degenerate and zero only the theta_dot term.
That substitution is a pure z rotation and leaves the measured observables
untouched because they are invariant under rotations about z.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from . import gauge, schedules
from .errors import SizeLimitError
from .gauge import LandauZenerModel, PSpinModel
from .schedules import ScheduleSpec

PROTOCOL_QA = "qa"
PROTOCOL_CD1 = "cd1"
PROTOCOL_CD2 = "cd2"
PROTOCOLS = (PROTOCOL_QA, PROTOCOL_CD1, PROTOCOL_CD2)

FRAME_LAB = "lab"
FRAME_ROTATED = "rotated"
FRAMES = (FRAME_LAB, FRAME_ROTATED)

# Below this value of X^2 + Y^2 the rotation angle is undefined (only the
# t=tau endpoint for the supported schedules).
DEGENERATE_XY_FLOOR = 1e-12

_MAX_COLLECTIVE_N = 10_000

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


@dataclass(frozen=True)
class CollectiveOperators:
    """Collective spin operators restricted to the maximal-spin sector."""

    n: int
    mx: np.ndarray
    my: np.ndarray
    mz: np.ndarray
    mz3: np.ndarray
    zzz: np.ndarray  # sum over ordered triples, (mz^3 - (3n-2) mz)/6

    @property
    def dim(self) -> int:
        return self.n + 1


def build_collective_operators(n: int) -> CollectiveOperators:
    """Matrices of sum_i sigma^{x,y,z} and (sum_i sigma^z)^3 on the sector.

    Basis index k corresponds to the Mz eigenvalue n - 2k.
    """
    if not (isinstance(n, (int, np.integer)) and 2 <= n <= _MAX_COLLECTIVE_N):
        raise SizeLimitError(f"system size must be an integer in [2, {_MAX_COLLECTIVE_N}], got {n}")
    n = int(n)
    s = 0.5 * n
    m = s - np.arange(n + 1)  # spin-z quantum numbers, descending
    # Ladder amplitudes for raising index k -> k-1 (m_k -> m_k + 1).
    c = np.sqrt(s * (s + 1.0) - m[1:] * (m[1:] + 1.0))
    mx = np.zeros((n + 1, n + 1), dtype=complex)
    my = np.zeros((n + 1, n + 1), dtype=complex)
    idx = np.arange(1, n + 1)
    mx[idx - 1, idx] = c
    mx[idx, idx - 1] = c
    my[idx - 1, idx] = -1.0j * c
    my[idx, idx - 1] = 1.0j * c
    mzdiag = 2.0 * m  # Pauli normalization: Mz = 2 Sz
    mz = np.diag(mzdiag.astype(complex))
    mz3 = np.diag((mzdiag**3).astype(complex))
    zzz = (mz3 - (3.0 * n - 2.0) * mz) / 6.0
    return CollectiveOperators(n=n, mx=mx, my=my, mz=mz, mz3=mz3, zzz=zzz)


@dataclass(frozen=True)
class ProtocolSpec:
    """Which Hamiltonian to simulate: protocol x frame x model.

    Traditional annealing ("qa") has no drive term and ignores the frame
    tag; the single-parameter drive ("cd1") requires a constant-gamma
    schedule and the two-parameter drive ("cd2") a linked one.
    """

    protocol: str
    model: Union[PSpinModel, LandauZenerModel]
    frame: str = FRAME_LAB

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"protocol must be one of {PROTOCOLS}, got {self.protocol!r}")
        if self.frame not in FRAMES:
            raise ValueError(f"frame must be one of {FRAMES}, got {self.frame!r}")
        if not isinstance(self.model, (PSpinModel, LandauZenerModel)):
            raise TypeError(f"unsupported model {self.model!r}")

    @property
    def effective_frame(self) -> str:
        return FRAME_LAB if self.protocol == PROTOCOL_QA else self.frame

    def validate_schedule(self, spec: ScheduleSpec) -> None:
        linked = (
            schedules.GAMMA_LINKED_PSPIN
            if isinstance(self.model, PSpinModel)
            else schedules.GAMMA_LINKED_LZ
        )
        if self.protocol == PROTOCOL_CD1 and spec.gamma_mode != schedules.GAMMA_CONSTANT:
            raise ValueError("single-parameter drive requires a constant-gamma schedule")
        if self.protocol == PROTOCOL_CD2 and spec.gamma_mode != linked:
            raise ValueError(
                f"two-parameter drive requires gamma_mode={linked!r}, got {spec.gamma_mode!r}"
            )
        if spec.gamma_mode == schedules.GAMMA_LINKED_PSPIN and not isinstance(self.model, PSpinModel):
            raise ValueError("linked_pspin schedule only applies to the spin model")
        if spec.gamma_mode == schedules.GAMMA_LINKED_LZ and not isinstance(self.model, LandauZenerModel):
            raise ValueError("linked_lz schedule only applies to the two-level model")


@dataclass(frozen=True)
class FrameCoefficients:
    """Transverse/drive components and the rotation angle at one time."""

    x: float
    y: float
    x_dot: float
    y_dot: float
    theta: float
    theta_dot: float
    degenerate: bool


def _xy_arrays(ts: np.ndarray, spec: ScheduleSpec, model):
    """Vectorized (X, Y, Xdot, Ydot) along the schedule."""
    lv = np.asarray(schedules.lam(ts, spec))
    gv = np.asarray(schedules.gamma(ts, spec))
    ld = np.asarray(schedules.lam_dot(ts, spec))
    gd = np.asarray(schedules.gamma_dot(ts, spec))
    ldd = np.asarray(schedules.lam_ddot(ts, spec))
    gdd = np.asarray(schedules.gamma_ddot(ts, spec))
    alpha, beta = gauge._alpha_beta(model, lv, gv)
    a_l, a_g, b_l, b_g = gauge._partials(model, lv, gv)
    adot = a_l * ld + a_g * gd
    bdot = b_l * ld + b_g * gd
    x = -(1.0 - lv) * gv
    y = ld * alpha + gd * beta
    x_dot = ld * gv - (1.0 - lv) * gd
    y_dot = ldd * alpha + ld * adot + gdd * beta + gd * bdot
    return x, y, x_dot, y_dot


def frame_coefficients(t, spec: ScheduleSpec, model) -> FrameCoefficients:
    """Rotation-frame data at one time; flags the X=Y=0 endpoint degenerate."""
    ts = np.asarray(float(t))
    x, y, x_dot, y_dot = _xy_arrays(ts, spec, model)
    x, y, x_dot, y_dot = float(x), float(y), float(x_dot), float(y_dot)
    r2 = x * x + y * y
    degenerate = r2 < DEGENERATE_XY_FLOOR
    theta = float(np.arctan2(y, x))
    theta_dot = 0.0 if degenerate else (x * y_dot - y * x_dot) / r2
    return FrameCoefficients(
        x=x, y=y, x_dot=x_dot, y_dot=y_dot, theta=theta, theta_dot=theta_dot, degenerate=degenerate
    )


@dataclass(frozen=True)
class TermHamiltonian:
    """H(t) = sum_k c_k(t) * ops[k] with vectorized coefficient evaluation.

    ``coeff_fn`` maps an array of m times to an (m, k) array of real
    coefficients; ``op_norms`` are spectral norms (upper bounds are fine)
    used to pick integrator step counts.
    """

    ops: np.ndarray  # (k, d, d) complex
    coeff_fn: Callable[[np.ndarray], np.ndarray]
    op_norms: np.ndarray
    ops_flat: np.ndarray = field(init=False, repr=False)
    tridiagonal_bands: tuple | None = field(init=False, repr=False)

    def __post_init__(self):
        k, d, _ = self.ops.shape
        object.__setattr__(self, "ops_flat", np.ascontiguousarray(self.ops.reshape(k, d * d)))
        object.__setattr__(self, "tridiagonal_bands", self._bands())

    def _bands(self):
        """(diagonals, upper off-diagonals) per term when all are tridiagonal."""
        k, d, _ = self.ops.shape
        band_mask = np.abs(np.arange(d)[:, None] - np.arange(d)[None, :]) <= 1
        if np.any(self.ops[:, ~band_mask] != 0):
            return None
        idx = np.arange(d)
        diags = np.ascontiguousarray(np.real(self.ops[:, idx, idx]))
        offs = np.ascontiguousarray(self.ops[:, idx[:-1], idx[:-1] + 1])
        return diags, offs

    @property
    def dim(self) -> int:
        return self.ops.shape[1]

    def coefficients(self, ts: np.ndarray) -> np.ndarray:
        return np.atleast_2d(self.coeff_fn(np.atleast_1d(np.asarray(ts, dtype=float))))

    def matrix(self, t: float) -> np.ndarray:
        c = self.coefficients(np.asarray([float(t)]))[0]
        d = self.dim
        return (c @ self.ops_flat).reshape(d, d)

    def norm_bound(self, tau: float, samples: int = 513) -> float:
        """max_t sum_k |c_k(t)| * ||op_k||, on a dense time grid."""
        ts = np.linspace(0.0, tau, samples)
        c = self.coefficients(ts)
        return float(np.max(np.abs(c) @ self.op_norms))


def _pspin_lab_coeffs(spec: ScheduleSpec, model: PSpinModel, with_drive: bool):
    n2 = float(model.n) ** 2

    def coeffs(ts: np.ndarray) -> np.ndarray:
        lv = np.asarray(schedules.lam(ts, spec))
        gv = np.asarray(schedules.gamma(ts, spec))
        cols = [-(1.0 - lv) * gv, -lv / n2]
        if with_drive:
            cols.append(np.asarray(gauge.cd_y_coefficient(ts, spec, model)))
        return np.stack(cols, axis=-1)

    return coeffs


def _pspin_rotated_coeffs(spec: ScheduleSpec, model: PSpinModel):
    n = model.n
    n2 = float(n) ** 2

    def coeffs(ts: np.ndarray) -> np.ndarray:
        lv = np.asarray(schedules.lam(ts, spec))
        x, y, x_dot, y_dot = _xy_arrays(ts, spec, model)
        r2 = x * x + y * y
        ok = r2 >= DEGENERATE_XY_FLOOR
        # hypot stays well defined through the endpoint; only theta_dot is 0/0.
        theta_dot = np.where(ok, (x * y_dot - y * x_dot) / np.where(ok, r2, 1.0), 0.0)
        cz = -(0.5 * theta_dot + lv * (3.0 * n - 2.0) / n2)
        return np.stack([np.hypot(x, y), -6.0 * lv / n2, cz], axis=-1)

    return coeffs


def _lz_lab_coeffs(spec: ScheduleSpec, model: LandauZenerModel, with_drive: bool):
    def coeffs(ts: np.ndarray) -> np.ndarray:
        lv = np.asarray(schedules.lam(ts, spec))
        gv = np.asarray(schedules.gamma(ts, spec))
        cols = [-(1.0 - lv) * gv, -lv * model.h]
        if with_drive:
            cols.append(np.asarray(gauge.cd_y_coefficient(ts, spec, model)))
        return np.stack(cols, axis=-1)

    return coeffs


def _lz_rotated_coeffs(spec: ScheduleSpec, model: LandauZenerModel):
    def coeffs(ts: np.ndarray) -> np.ndarray:
        lv = np.asarray(schedules.lam(ts, spec))
        x, y, x_dot, y_dot = _xy_arrays(ts, spec, model)
        r2 = x * x + y * y
        ok = r2 >= DEGENERATE_XY_FLOOR
        theta_dot = np.where(ok, (x * y_dot - y * x_dot) / np.where(ok, r2, 1.0), 0.0)
        cz = -(0.5 * theta_dot + model.h * lv)
        return np.stack([np.hypot(x, y), cz], axis=-1)

    return coeffs


def hamiltonian(
    protocol: ProtocolSpec, spec: ScheduleSpec, ops: CollectiveOperators | None = None
) -> TermHamiltonian:
    """Time-dependent Hamiltonian for the protocol in its effective frame."""
    protocol.validate_schedule(spec)
    model = protocol.model
    if isinstance(model, PSpinModel):
        if ops is None:
            ops = build_collective_operators(model.n)
        elif ops.n != model.n:
            raise ValueError(f"operators built for n={ops.n}, model has n={model.n}")
        n = model.n
        zzz_norm = n * (n - 1) * (n - 2) / 6.0
        if protocol.protocol == PROTOCOL_QA:
            return TermHamiltonian(
                ops=np.stack([ops.mx, ops.mz3]),
                coeff_fn=_pspin_lab_coeffs(spec, model, with_drive=False),
                op_norms=np.array([float(n), float(n) ** 3]),
            )
        if protocol.effective_frame == FRAME_LAB:
            return TermHamiltonian(
                ops=np.stack([ops.mx, ops.mz3, ops.my]),
                coeff_fn=_pspin_lab_coeffs(spec, model, with_drive=True),
                op_norms=np.array([float(n), float(n) ** 3, float(n)]),
            )
        return TermHamiltonian(
            ops=np.stack([ops.mx, ops.zzz, ops.mz]),
            coeff_fn=_pspin_rotated_coeffs(spec, model),
            op_norms=np.array([float(n), zzz_norm, float(n)]),
        )
    if protocol.protocol == PROTOCOL_QA:
        return TermHamiltonian(
            ops=np.stack([SIGMA_X, SIGMA_Z]),
            coeff_fn=_lz_lab_coeffs(spec, model, with_drive=False),
            op_norms=np.array([1.0, 1.0]),
        )
    if protocol.effective_frame == FRAME_LAB:
        return TermHamiltonian(
            ops=np.stack([SIGMA_X, SIGMA_Z, SIGMA_Y]),
            coeff_fn=_lz_lab_coeffs(spec, model, with_drive=True),
            op_norms=np.array([1.0, 1.0, 1.0]),
        )
    return TermHamiltonian(
        ops=np.stack([SIGMA_X, SIGMA_Z]),
        coeff_fn=_lz_rotated_coeffs(spec, model),
        op_norms=np.array([1.0, 1.0]),
    )


def h0_pspin(t: float, spec: ScheduleSpec, ops: CollectiveOperators) -> np.ndarray:
    """Annealing Hamiltonian without drive: -(1-lam) gamma Mx - lam Mz^3/N^2."""
    lv = schedules.lam(t, spec)
    gv = schedules.gamma(t, spec)
    return -(1.0 - lv) * gv * ops.mx - (lv / float(ops.n) ** 2) * ops.mz3


def h_lab_cd(
    t: float, spec: ScheduleSpec, protocol: ProtocolSpec, ops: CollectiveOperators
) -> np.ndarray:
    """Lab-frame driven Hamiltonian: the annealing part plus Y(t) My."""
    if protocol.protocol == PROTOCOL_QA:
        raise ValueError("traditional annealing has no drive term; use h0_pspin")
    protocol.validate_schedule(spec)
    y = gauge.cd_y_coefficient(t, spec, protocol.model)
    return h0_pspin(t, spec, ops) + y * ops.my


def h_rotated(t: float, spec: ScheduleSpec, ops: CollectiveOperators) -> np.ndarray:
    """Rotated-frame Hamiltonian with only transverse and longitudinal terms."""
    model = PSpinModel(ops.n)
    fc = frame_coefficients(t, spec, model)
    n = ops.n
    lv = schedules.lam(t, spec)
    cz = -(0.5 * fc.theta_dot + lv * (3.0 * n - 2.0) / float(n) ** 2)
    return float(np.hypot(fc.x, fc.y)) * ops.mx - (6.0 * lv / float(n) ** 2) * ops.zzz + cz * ops.mz


def h_lz(t: float, spec: ScheduleSpec, protocol: ProtocolSpec) -> np.ndarray:
    """Two-level Hamiltonian for any protocol/frame."""
    if not isinstance(protocol.model, LandauZenerModel):
        raise TypeError("h_lz requires a two-level model")
    protocol.validate_schedule(spec)
    return hamiltonian(protocol, spec).matrix(t)


def problem_hamiltonian(model, ops: CollectiveOperators | None = None) -> np.ndarray:
    """Final (problem) Hamiltonian the anneal should end in."""
    if isinstance(model, PSpinModel):
        if ops is None:
            ops = build_collective_operators(model.n)
        return np.asarray(-ops.mz3 / float(model.n) ** 2)
    return -model.h * SIGMA_Z
