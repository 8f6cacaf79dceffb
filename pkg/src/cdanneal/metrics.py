"""Run observables: fidelity, residual energy, time to solution, occupations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np

from .errors import BasisMismatchError

if TYPE_CHECKING:  # pragma: no cover
    from .dynamics import EvolveDiagnostics, StateVector
    from .model import ProtocolSpec
    from .schedules import ScheduleSpec

DEFAULT_SUCCESS_PROBABILITY = 0.99


def fidelity(psi: "StateVector", phi: "StateVector") -> float:
    """Squared overlap |<psi|phi>|^2 of two states on the same basis."""
    if psi.basis != phi.basis:
        raise BasisMismatchError(f"basis mismatch: {psi.basis} vs {phi.basis}")
    return float(abs(np.vdot(psi.amplitudes, phi.amplitudes)) ** 2)


def residual_energy(psi: "StateVector", hp: np.ndarray, e0: float) -> float:
    """Expected energy above the problem ground state, <psi|Hp|psi> - E0."""
    amp = psi.amplitudes
    return float(np.real(np.vdot(amp, hp @ amp)) - e0)


def tts(tau: float, f: float, p_r: float = DEFAULT_SUCCESS_PROBABILITY) -> float:
    """Effective time to reach the solution with probability p_r.

    tau * ln(1 - p_r) / ln(1 - F); returns tau when F = 1 (or so close that
    1 - F underflows) and +inf when F = 0.
    """
    if not 0.0 < p_r < 1.0:
        raise ValueError(f"p_r must lie in (0, 1), got {p_r}")
    if not -1e-9 <= f <= 1.0 + 1e-9:
        raise ValueError(f"fidelity must lie in [0, 1], got {f}")
    f = min(max(f, 0.0), 1.0)
    if f == 0.0:
        return math.inf
    if f == 1.0:
        return tau
    log_miss = math.log1p(-f)
    if log_miss == 0.0:  # 1 - F underflowed
        return tau
    return tau * math.log1p(-p_r) / log_miss


@dataclass(frozen=True)
class SpectrumTrace:
    """Instantaneous spectrum and eigenstate occupations along a run.

    ``energies[i, j]`` is the j-th lowest eigenvalue of H(times[i]) and
    ``occupations[i, j]`` the probability of the evolving state on that
    eigenstate; each occupation row sums to 1.
    """

    times: np.ndarray
    energies: np.ndarray
    occupations: np.ndarray


def spectrum_occupations(hamiltonian, states, times) -> SpectrumTrace:
    """Diagonalize H at the sample times and project the sampled states.

    ``hamiltonian`` is anything with a ``matrix(t)`` method or a plain
    callable t -> matrix; ``states`` are the evolved states at ``times``.
    """
    times = np.asarray(times, dtype=float)
    if len(states) != times.size:
        raise ValueError(f"{len(states)} states for {times.size} sample times")
    matrix_at = hamiltonian.matrix if hasattr(hamiltonian, "matrix") else hamiltonian
    energies = []
    occupations = []
    for t, state in zip(times, states):
        w, v = np.linalg.eigh(matrix_at(float(t)))
        energies.append(w)
        occupations.append(np.abs(v.conj().T @ state.amplitudes) ** 2)
    return SpectrumTrace(
        times=times, energies=np.asarray(energies), occupations=np.asarray(occupations)
    )


@dataclass(frozen=True)
class RunResult:
    """Final observables and diagnostics of one protocol run."""

    protocol: "ProtocolSpec"
    schedule: "ScheduleSpec"
    fidelity: float
    residual_energy: float
    tts: float
    final_state: "StateVector"
    diagnostics: "EvolveDiagnostics"
    occupations: Optional[SpectrumTrace] = None
    convergence_fidelity_gap: Optional[float] = None
