"""How the evolving state populates the instantaneous spectrum.

Traditional annealing at N = 30, tau = 300 leaks out of the ground level
through a cascade of avoided crossings past t/tau ~ 0.3 and spreads over
many excited states.  The two-parameter drive reshapes the spectrum (its
transverse field grows with the ramp) and keeps the population low in the
spectrum to the end.
"""

import numpy as np

from cdanneal import PSpinModel, ProtocolSpec, ScheduleSpec, run_protocol

N = 30
TAU = 300.0
GAMMA_INIT = 0.1
SAMPLES = 11


def main():
    for protocol in ("qa", "cd1", "cd2"):
        if protocol in ("qa", "cd1"):
            spec = ScheduleSpec.constant(TAU, GAMMA_INIT)
        else:
            spec = ScheduleSpec.linked_pspin(TAU, GAMMA_INIT)
        res = run_protocol(spec, ProtocolSpec(protocol, PSpinModel(N)), spectrum_samples=SAMPLES)
        trace = res.occupations
        print(f"# {protocol}: final fidelity {res.fidelity:.4f}")
        print(f"{'t/tau':>6} {'ground_occ':>11} {'top_level':>10} {'top_occ':>9} {'levels>1%':>10}")
        for i, t in enumerate(trace.times):
            occ = trace.occupations[i]
            top = int(np.argmax(occ))
            print(
                f"{t / TAU:6.2f} {occ[0]:11.4f} {top:10d} {occ[top]:9.4f} {int(np.sum(occ > 0.01)):10d}"
            )
        print()


if __name__ == "__main__":
    main()
