"""Control-field traces of the two-parameter drive in both frames.

The lab-frame drive is a single sigma^y field of strength
Y = lam_dot * alpha + gamma_dot * beta.  Rotating each spin about z by
theta = atan2(Y, X) with X = -(1 - lam) gamma leaves only transverse and
longitudinal controls: hypot(X, Y) on sum sigma^x, the three-body problem
term scaled by lam, and a z field carrying the frame term theta_dot / 2.
The table prints all of them, plus the drive pieces lam_dot*alpha and
gamma_dot*beta and the raw variational coefficients, over one anneal.
(The three-body column is scaled by N so extensive terms compare fairly.)
"""

import numpy as np

from cdanneal import PSpinModel, ScheduleSpec, frame_coefficients, pspin_coefficients, schedules

N = 30
TAU = 10.0
GAMMA_INIT = 0.1


def main():
    spec = ScheduleSpec.linked_pspin(TAU, GAMMA_INIT)
    m = PSpinModel(N)
    print(f"# N = {N}, tau = {TAU}, gamma(t) = {GAMMA_INIT} + lam(t)")
    print(
        f"{'t/tau':>6} {'x_field':>10} {'z_field':>10} {'zzz*N':>10}"
        f" {'ld*alpha':>10} {'gd*beta':>10} {'alpha':>8} {'beta':>8}"
    )
    for frac in np.linspace(0.0, 1.0, 21):
        t = frac * TAU
        lam = schedules.lam(t, spec)
        gam = schedules.gamma(t, spec)
        fc = frame_coefficients(t, spec, m)
        co = pspin_coefficients(lam, gam, N)
        x_field = float(np.hypot(fc.x, fc.y))
        z_field = -(0.5 * fc.theta_dot + lam * (3 * N - 2) / N**2)
        zzz = -lam * 6.0 / N**2 * N
        ld_alpha = schedules.lam_dot(t, spec) * co.alpha
        gd_beta = schedules.gamma_dot(t, spec) * co.beta
        print(
            f"{frac:6.2f} {x_field:10.5f} {z_field:10.5f} {zzz:10.5f}"
            f" {ld_alpha:10.5f} {gd_beta:10.5f} {co.alpha:8.4f} {co.beta:8.4f}"
        )


if __name__ == "__main__":
    main()
