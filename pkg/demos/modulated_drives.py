"""Drive modulation pushing the suppression floor further down.

Static driving leaves a residual delocalization floor set by near-resonant
resonator rungs.  Two modulation schemes redistribute the exchange weight
over sidebands:

* phase modulation at depth equal to the first zero of J0 nulls the
  carrier sideband entirely (residual floor 2 (g/omega_m)^2),
* detuning modulation phase-modulates each resonator rung with index
  proportional to the rung number, leaving the rung-0 carrier intact.

All quantities here are closed forms (no diagonalization): the script
prints the static, phase-modulated, and detuning-modulated delocalization
across drive powers.

Run: python3 demos/modulated_drives.py
"""

import math

from couplersim import analytics
from couplersim.model import PamParams, SystemParams, displacements_for_alpha0

TWO_PI = 2.0 * math.pi
J0_FIRST_ZERO = 2.404825557695773

params = SystemParams.from_mhz(delta1=7.0, delta2=14.0, k1=-300.0, k2=-300.0,
                               kb=-300.0, kr=0.0, chi=-20.0, delta=-1.0,
                               kappa=0.0, g1=2.0, g2=2.0)

omega0 = TWO_PI * 200.0   # phase-modulation frequency per unit |abar|
omega_ld = TWO_PI * 1000.0  # detuning-modulation frequency

print(f"{'|a0|^2':>7} {'static':>11} {'phase-mod':>11} {'floor':>11} "
      f"{'detuning-mod':>13}")
for a2 in (1.0, 2.0, 4.0, 6.0, 8.0, 10.0):
    disp = displacements_for_alpha0(params, math.sqrt(a2), 3)
    abar = abs(disp.pointer_separation)
    static = 1.0 - analytics.ipr_static(params, disp, "1000")

    pam = PamParams(bessel_arg=J0_FIRST_ZERO, omega_m=omega0 * abar)
    phase_mod = 1.0 - analytics.ipr_pam(params, disp, pam, j=1)
    floor = analytics.pam_floor(params.g1, pam.omega_m)

    det_mod = 1.0 - analytics.ipr_ld(params, disp, z=J0_FIRST_ZERO,
                                     omega_m=omega_ld, j=1)
    print(f"{a2:7.1f} {static:11.3e} {phase_mod:11.3e} {floor:11.3e} "
          f"{det_mod:13.3e}")

print()
print("phase modulation at the J0 zero sits within a factor ~2 of its")
print("analytic floor; detuning modulation helps less because the")
print("dominant rung-0 channel carries no modulation index")
