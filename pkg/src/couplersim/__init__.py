"""Simulation toolkit for a driven-resonator tunable coupler.

A bus mode mediating two-qubit interactions is dressed by a damped,
nonlinear readout-style resonator whose coherent displacement is
conditioned on the bus photon number.  Driving the resonator separates the
bus-conditioned pointer states, which suppresses every bus-mediated rate
(exchange, ZZ, Rabi drive) by the pointer-state overlap e^{-|abar|^2/2} —
an exponential on/off knob controlled by the drive power.

Subpackages
-----------
``hilbert``    sparse operator algebra on truncated Fock products
``model``      system parameters, drive envelopes, lab/polaron Hamiltonians
``dynamics``   Lindblad integration, canned experiments, curve fits
``spectral``   exact diagonalization, state matching, IPR/ZZ observables
``analytics``  closed-form suppression/leakage formulas and special functions
``circuit``    flux-circuit reductions, metapotentials, drive synthesis
``pipelines``  config-driven sweeps emitting deterministic CSV/JSON bundles
``cli``        command-line entry point (run / list / verify)

Unit convention: all public constructors accept laboratory frequencies in
MHz (the value of f = omega / 2 pi); internally everything is angular
(rad/us).  Dephasing-rate estimates are returned in 1/s.
"""

from .hilbert import ModeLayout, Operator
from .model import SystemParams, DisplacementSet, PolaronModel

__version__ = "0.1.0"

__all__ = [
    "ModeLayout",
    "Operator",
    "SystemParams",
    "DisplacementSet",
    "PolaronModel",
    "__version__",
]
