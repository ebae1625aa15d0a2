"""From circuit energies to the two-photon-stabilized coupler.

A junction-array resonator with a two-loop flux bias reduces, in a doubly
rotating frame, to a Kerr oscillator whose two-photon drive is conditioned
on the bus occupation: the resonator settles into wells 90 degrees apart
for adjacent bus levels.  The well overlap exp(-2 alpha^2) plays the role
of the pointer-state overlap, and the stabilization shift -K_r alpha^4 / 2
is identical for the lowest bus levels, so the scheme adds no bus
frequency pull.

Run: python3 demos/flux_circuit.py
"""

import math

import numpy as np

from couplersim import circuit, spectral
from couplersim.hilbert import ModeLayout, mode_operator

TWO_PI = 2.0 * math.pi
zeta = 5.0 * math.pi / 6.0

params = circuit.CircuitParams.from_ghz(
    n_junctions=3, e_cb=0.2, e_jb=20.0, e_cr=0.2, e_jl=0.16, e_j2=0.16,
    e_jn=20.0, zeta=zeta, phi_l=math.pi - 2.0 * zeta,
    phi_s2=-math.pi - 2.0 * zeta, z_b=0.06, eps0=18.0)

eff = circuit.derive_kerr_cat_params(params, k_b=TWO_PI * -300.0)
print("effective parameters from the circuit reduction:")
print(f"  resonator frequency  {eff.omega_r / (TWO_PI * 1e3):8.4f} GHz")
print(f"  resonator Kerr       {eff.k_r / TWO_PI:8.2f} MHz")
print(f"  cross-Kerr           {eff.chi / TWO_PI:8.2f} MHz")
print(f"  two-photon drives    {eff.lambda_l / TWO_PI:.3f} / "
      f"{eff.lambda_r / TWO_PI:.3f} MHz (locked 1:-2 by the flux bias)")
print(f"  well amplitude       alpha^2 = {eff.alpha_sq:.3f}")

print()
print("diagonal well shifts (vanishing bus frequency pull):")
for n in (0, 1):
    shift = circuit.kerr_cat_diagonal_shift(eff, delta=TWO_PI * 1e-3,
                                            bus_level=n)
    print(f"  bus level {n}: {shift / TWO_PI:+.6f} MHz")
print(f"  closed form -K_r alpha^4 / 2 = "
      f"{-0.5 * eff.k_r * eff.alpha_sq ** 2 / TWO_PI:+.6f} MHz")

print()
print("well positions from the classical metapotential (bus level 1):")
delta_res = -eff.chi * 1.5  # cancel the residual linear detuning
grid = circuit.metapotential("kerr_cat", 1, (-3, 3), (-3, 3), resolution=241,
                             delta=delta_res, chi=eff.chi, effective=eff)
e = grid.energy
qi, ij = np.unravel_index(int(np.argmax(e)), e.shape)
print(f"  extremum at (I, Q) = ({grid.i_values[ij]:+.3f}, "
      f"{grid.q_values[qi]:+.3f}); expected (0, +-{math.sqrt(eff.alpha_sq):.3f})")
print(f"  pointer overlap exp(-2 alpha^2) = {math.exp(-2 * eff.alpha_sq):.2e}")
