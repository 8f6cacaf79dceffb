"""Annealing-protocol simulator with variational counter-diabatic driving.

Simulates traditional annealing, single-parameter, and two-parameter
counter-diabatic drives on the collective three-body spin model and the
two-level avoided-crossing model, in the lab frame (with a sigma^y drive)
or the rotated frame (transverse/longitudinal controls only), and scores
runs by ground-state fidelity, residual energy, and time to solution.
"""

from .dynamics import (
    Basis,
    EvolveDiagnostics,
    GroundState,
    IntegratorConfig,
    StateVector,
    evolve,
    ground_state,
    problem_reference,
    run_protocol,
)
from .errors import (
    BasisMismatchError,
    CdAnnealError,
    ConfigError,
    DegeneratePointError,
    IntegrationError,
    ScheduleDomainError,
    SizeLimitError,
)
from .gauge import (
    GaugeCoefficients,
    LandauZenerModel,
    PSpinModel,
    cd_y_coefficient,
    lz_coefficients,
    pspin_coefficients,
)
from .metrics import (
    RunResult,
    SpectrumTrace,
    fidelity,
    residual_energy,
    spectrum_occupations,
    tts,
)
from .model import (
    CollectiveOperators,
    FrameCoefficients,
    ProtocolSpec,
    TermHamiltonian,
    build_collective_operators,
    frame_coefficients,
    h0_pspin,
    h_lab_cd,
    h_lz,
    h_rotated,
    hamiltonian,
    problem_hamiltonian,
)
from .schedules import ScheduleSpec

__all__ = [
    "Basis",
    "BasisMismatchError",
    "CdAnnealError",
    "CollectiveOperators",
    "ConfigError",
    "DegeneratePointError",
    "EvolveDiagnostics",
    "FrameCoefficients",
    "GaugeCoefficients",
    "GroundState",
    "IntegrationError",
    "IntegratorConfig",
    "LandauZenerModel",
    "PSpinModel",
    "ProtocolSpec",
    "RunResult",
    "ScheduleDomainError",
    "ScheduleSpec",
    "SizeLimitError",
    "SpectrumTrace",
    "StateVector",
    "TermHamiltonian",
    "build_collective_operators",
    "cd_y_coefficient",
    "evolve",
    "fidelity",
    "frame_coefficients",
    "ground_state",
    "h0_pspin",
    "h_lab_cd",
    "h_lz",
    "h_rotated",
    "hamiltonian",
    "lz_coefficients",
    "problem_hamiltonian",
    "problem_reference",
    "pspin_coefficients",
    "residual_energy",
    "run_protocol",
    "spectrum_occupations",
    "tts",
]

__version__ = "0.1.0"
