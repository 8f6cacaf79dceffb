"""Two-level avoided crossing: the constant-field drive is exact.

With gamma held constant the variational sigma^y coefficient equals the
exact counter-diabatic term of the two-level crossing, so the final ground
state is reached with unit fidelity at any anneal speed.  With the linked
field gamma = 1 - lam the drive is approximate; the rotated-frame control
fields become strongly non-monotonic at fast anneals.
"""

import numpy as np

from cdanneal import (
    LandauZenerModel,
    ProtocolSpec,
    ScheduleSpec,
    frame_coefficients,
    run_protocol,
)

H_FIELD = 0.1


def main():
    print("# constant-field drive: exact at any speed")
    print(f"{'tau':>8} {'qa_F':>12} {'cd1_F':>16}")
    for tau in (0.1, 1.0, 10.0):
        spec = ScheduleSpec.constant(tau, 1.0)
        lz = LandauZenerModel(H_FIELD)
        qa = run_protocol(spec, ProtocolSpec("qa", lz))
        cd1 = run_protocol(spec, ProtocolSpec("cd1", lz))
        print(f"{tau:8.2f} {qa.fidelity:12.6f} {cd1.fidelity:16.12f}")

    print()
    print("# linked-field drive, tau = 1: rotated-frame control fields")
    tau = 1.0
    spec = ScheduleSpec.linked_lz(tau)
    model = LandauZenerModel(H_FIELD)
    cd2 = run_protocol(spec, ProtocolSpec("cd2", model))
    print(f"final fidelity {cd2.fidelity:.6f}")
    print(f"{'t/tau':>6} {'x_field':>10} {'z_field':>10}")
    for frac in np.linspace(0.0, 1.0, 11):
        fc = frame_coefficients(frac * tau, spec, model)
        from cdanneal import schedules

        lam = schedules.lam(frac * tau, spec)
        x_field = float(np.hypot(fc.x, fc.y))
        z_field = -(0.5 * fc.theta_dot + H_FIELD * lam)
        print(f"{frac:6.2f} {x_field:10.4f} {z_field:10.4f}")


if __name__ == "__main__":
    main()
