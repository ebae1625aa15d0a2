"""Superconducting-circuit reductions to effective coupler parameters.

Two weakly-nonlinear reductions of the same circuit (two transmons, a
transmon-like bus, and a junction-array resonator with flux-threaded loops):

* the cat-style design, where flux biases keep a two-photon drive and a
  resonator self-Kerr, giving bus-number-conditioned double wells in a
  doubly rotating frame; and
* the harmonic design, where a different flux configuration cancels the
  two-photon terms and the conditional displacement is produced by a
  two-tone linear drive instead.

Energies enter in plain frequency units (GHz) and are converted to angular
rad/us once at the boundary.  The full cosine potentials are never
diagonalized here; these are the closed-form reductions only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .hilbert import ModeLayout, Operator, basis_state, embed_matrix, mode_operator, displacement_operator

TWO_PI = 2.0 * math.pi

__all__ = [
    "CircuitParams",
    "EffectiveParams",
    "HarmonicParams",
    "MetapotentialGrid",
    "derive_kerr_cat_params",
    "kerr_cat_hamiltonian",
    "kerr_cat_diagonal_shift",
    "derive_harmonic_params",
    "two_tone_drive",
    "harmonic_displacement",
    "metapotential",
    "stray_coupling_floor",
]


@dataclass(frozen=True)
class CircuitParams:
    """Circuit energies (rad/us), junction count, flux phases and impedances.

    ``e_jl`` is the Josephson energy of the resonator's symmetric junction
    pair, ``e_j2`` of its two small junctions, ``e_jn`` of each junction in
    the N-array.  ``phi_s2``/``phi_sn``/``phi_l`` are flux phases (radians),
    ``zeta`` the loop mixing angle, ``z_b``/``z_r`` the reduced mode
    impedances (dimensionless; formulas use pi*z).  ``eps0`` is the charge
    drive amplitude.
    """

    e_cb: float
    e_jb: float
    e_cr: float
    e_jl: float
    e_j2: float
    e_jn: float
    n_junctions: int
    phi_s2: float = 0.0
    phi_sn: float = 0.0
    phi_l: float = 0.0
    zeta: float = 0.0
    z_b: float = 0.0
    z_r: float = 0.0
    eps0: float = 0.0

    @classmethod
    def from_ghz(cls, *, n_junctions: int, phi_s2: float = 0.0, phi_sn: float = 0.0,
                 phi_l: float = 0.0, zeta: float = 0.0, z_b: float = 0.0,
                 z_r: float = 0.0, **energies_ghz) -> "CircuitParams":
        converted = {k: TWO_PI * 1e3 * v for k, v in energies_ghz.items()}
        return cls(n_junctions=n_junctions, phi_s2=phi_s2, phi_sn=phi_sn,
                   phi_l=phi_l, zeta=zeta, z_b=z_b, z_r=z_r, **converted)

    @property
    def omega_r(self) -> float:
        """Undriven resonator frequency sqrt(8 E_Cr E_JN / N) - E_Cr."""
        return math.sqrt(8.0 * self.e_cr * self.e_jn / self.n_junctions) - self.e_cr

    @property
    def omega_disp(self) -> float:
        """Displacement amplitude 2 eps0 / 3 omega_r of the charge drive."""
        return 2.0 * self.eps0 / (3.0 * self.omega_r)

    @property
    def pi_z_r_predicted(self) -> float:
        return math.sqrt(2.0 * self.n_junctions * self.e_cr / self.e_jn)

    def check_impedance(self, tol: float = 0.05):
        """pi z_r must agree with sqrt(2 N E_Cr / E_JN) when both are given."""
        if self.z_r <= 0:
            return
        predicted = self.pi_z_r_predicted
        if abs(math.pi * self.z_r - predicted) > tol * predicted:
            raise ValueError("resonator impedance inconsistent with E_Cr, E_JN, N")

    def check_cat_configuration(self, tol: float = 1e-9):
        """Flux configuration of the cat-style design."""
        if abs(self.e_j2 - self.e_jl) > tol * max(abs(self.e_jl), 1.0):
            raise ValueError("cat configuration requires matched small-junction energies")
        if abs(self.phi_l - (math.pi - 2.0 * self.zeta)) > tol:
            raise ValueError("cat configuration requires phi_l = pi - 2 zeta")
        if abs(self.phi_s2 - (-math.pi - 2.0 * self.zeta)) > tol:
            raise ValueError("cat configuration requires phi_s2 = -pi - 2 zeta")

    def check_harmonic_configuration(self, tol: float = 1e-9):
        """Flux configuration of the harmonic design."""
        if abs(self.phi_l) > tol:
            raise ValueError("harmonic configuration requires phi_l = 0")
        if abs(self.phi_s2 - TWO_PI) > tol:
            raise ValueError("harmonic configuration requires phi_s2 = 2 pi")
        lam = 1.0 - (1.5 ** 2) * math.pi * self.z_b / 2.0
        if abs(self.e_j2 - lam * self.e_jl) > tol * max(abs(self.e_jl), 1.0):
            raise ValueError("harmonic configuration requires E_J2 = lambda E_Jl")


@dataclass(frozen=True)
class EffectiveParams:
    """Cat-style effective parameters (rad/us)."""

    omega_r: float
    k_r: float
    lambda_r: float
    lambda_l: float
    chi: float
    alpha_sq: float
    k_b: float = 0.0


def derive_kerr_cat_params(circuit: CircuitParams, k_b: float = 0.0) -> EffectiveParams:
    """Reduce the cat-style flux configuration to effective parameters.

    omega_r = sqrt(8 E_Cr E_JN / N) - E_Cr, K_r = -E_Cr/N^2, cross-Kerr
    chi = -(9/8) pi z_b pi z_r E_Jl sin(zeta), loop two-photon amplitude
    lambda_l = (9/64) pi z_b (pi z_r)^{3/2} Omega E_Jl cos(zeta).  The array
    two-photon amplitude lambda_r = -(pi z_r)^{3/2} Omega E_JN phi_sN / 2N^3
    is pinned to -2 lambda_l by the flux bias, so the returned value is
    exactly -2 lambda_l and phi_sN is treated as the dependent quantity.
    """
    circuit.check_cat_configuration()
    circuit.check_impedance()
    pzb = math.pi * circuit.z_b
    pzr = math.pi * circuit.z_r if circuit.z_r > 0 else circuit.pi_z_r_predicted
    omega_r = circuit.omega_r
    k_r = -circuit.e_cr / circuit.n_junctions ** 2
    chi = -(9.0 / 8.0) * pzb * pzr * circuit.e_jl * math.sin(circuit.zeta)
    lambda_l = (9.0 / 64.0) * pzb * pzr ** 1.5 * circuit.omega_disp \
        * circuit.e_jl * math.cos(circuit.zeta)
    lambda_r = -2.0 * lambda_l
    alpha_sq = lambda_l / k_r if k_r != 0.0 else math.inf
    return EffectiveParams(omega_r=omega_r, k_r=k_r, lambda_r=lambda_r,
                           lambda_l=lambda_l, chi=chi, alpha_sq=alpha_sq, k_b=k_b)


def kerr_cat_hamiltonian(effective: EffectiveParams, delta: float,
                         layout: ModeLayout) -> Operator:
    """Doubly-rotating-frame bus-resonator Hamiltonian of the cat-style design.

    (Kb/2) b^dag^2 b^2 - (Kr a^4/2)(2 b^dag b - 1)^2
    + (delta + chi/2 + chi b^dag b) r^dag r
    + (Kr/2) [r^dag^2 + a^2 (2 b^dag b - 1)][r^2 + a^2 (2 b^dag b - 1)],
    with a^2 the well amplitude.  Qubit terms and exchange couplings are the
    caller's business (module ``model`` composes them on the same layout).
    """
    a_sq = effective.alpha_sq
    if not math.isfinite(a_sq):
        raise ValueError("well amplitude undefined (zero resonator Kerr)")
    if layout.dim_of("r") < 4 * abs(a_sq) + 10:
        raise ValueError("resonator truncation insufficient for the well amplitude")
    b = mode_operator(layout, "b", "destroy")
    bd = b.dag()
    nb = mode_operator(layout, "b", "number")
    r = mode_operator(layout, "r", "destroy")
    rd = r.dag()
    nr = mode_operator(layout, "r", "number")
    ident = mode_operator(layout, "b", "identity")

    two_nb = 2.0 * nb - ident
    h = 0.5 * effective.k_b * (bd @ bd @ b @ b)
    h = h + (-0.5 * effective.k_r * a_sq ** 2) * (two_nb @ two_nb)
    h = h + (delta + 0.5 * effective.chi) * nr + effective.chi * (nb @ nr)
    stab = rd @ rd + a_sq * two_nb
    h = h + 0.5 * effective.k_r * (stab @ stab.dag())
    return h


def kerr_cat_diagonal_shift(effective: EffectiveParams, delta: float,
                            bus_level: int, r_dim: int | None = None) -> float:
    """Diagonal energy shift of a bus level at the bottom of its well.

    Evaluates the Hamiltonian on |n>_b (x) D(beta_n)|0>_r with the well
    position beta_n^2 = -a^2 (2n - 1), then removes the detuning and bus
    self-Kerr contributions.  What remains is the two-photon-stabilization
    shift, identical (-Kr a^4/2) for the lowest two bus levels: the bus
    frequency pull vanishes in this design.
    """
    a_sq = effective.alpha_sq
    beta = complex(np.sqrt(complex(-a_sq * (2 * bus_level - 1))))
    if r_dim is None:
        r_dim = int(abs(beta) ** 2 + 8.0 * abs(beta) + 20)
    layout = ModeLayout(("b", "r"), (bus_level + 2, r_dim))
    h = kerr_cat_hamiltonian(effective, delta, layout)
    disp = displacement_operator(r_dim, beta)
    state = embed_matrix(layout, "r", disp.data).data @ basis_state(layout, (bus_level, 0))
    energy = float(np.real(np.vdot(state, h.data @ state)))
    nr = mode_operator(layout, "r", "number")
    n_r = float(np.real(np.vdot(state, nr.data @ state)))
    energy -= (delta + 0.5 * effective.chi + effective.chi * bus_level) * n_r
    energy -= 0.5 * effective.k_b * bus_level * (bus_level - 1)
    return energy


@dataclass(frozen=True)
class HarmonicParams:
    """Harmonic-design effective parameters (rad/us)."""

    omega_b: float
    omega_r: float
    k_b: float
    k_r: float
    chi: float


def derive_harmonic_params(circuit: CircuitParams) -> HarmonicParams:
    """Reduce the harmonic flux configuration to effective parameters.

    Mode frequencies follow omega = sqrt(8 E_C E_L) - E_C with inductive
    energies E_Lb = E_Jb + 2 (3/2)^2 E_Jl and E_Lr = E_JN/N.  The bus keeps
    K_b = -[E_Jb + 2 (3/2)^4 E_Jl] E_Cb / E_Lb; the resonator Kerr in this
    reduction is +E_Cr/N^2 (note the sign differs from the cat-style
    branch; both are implemented as stated for their configurations).  The
    cross-Kerr takes its maximal value -(9/8) pi z_b pi z_r E_Jl at this
    flux point.
    """
    circuit.check_harmonic_configuration()
    circuit.check_impedance()
    e_lb = circuit.e_jb + 2.0 * (1.5 ** 2) * circuit.e_jl
    e_lr = circuit.e_jn / circuit.n_junctions
    omega_b = math.sqrt(8.0 * circuit.e_cb * e_lb) - circuit.e_cb
    omega_r = math.sqrt(8.0 * circuit.e_cr * e_lr) - circuit.e_cr
    k_b = -(circuit.e_jb + 2.0 * (1.5 ** 4) * circuit.e_jl) * circuit.e_cb / e_lb
    k_r = circuit.e_cr / circuit.n_junctions ** 2
    pzb = math.pi * circuit.z_b if circuit.z_b > 0 else math.sqrt(2.0 * circuit.e_cb / e_lb)
    pzr = math.pi * circuit.z_r if circuit.z_r > 0 else math.sqrt(2.0 * circuit.e_cr / e_lr)
    chi = -(9.0 / 8.0) * pzb * pzr * circuit.e_jl
    return HarmonicParams(omega_b=omega_b, omega_r=omega_r, k_b=k_b, k_r=k_r, chi=chi)


def two_tone_drive(delta: float, alpha0_bar: complex, lam: float,
                   omega_m: float, omega_r: float,
                   abar: complex) -> Callable[[float], float]:
    """Linear drive implementing displacement plus phase modulation.

    Omega(t) = 2 delta alpha0 cos[(omega_r - delta) t]
             + (omega_m lam / abar) sum_{s=+-} s sin[(omega_m + s omega_r) t].
    With lam = 0 this is the single displacement tone at omega_r - delta.
    """
    def drive(t: float) -> float:
        main = 2.0 * delta * np.real(alpha0_bar) * math.cos((omega_r - delta) * t)
        side = (omega_m * lam / np.real(abar)) * (
            math.sin((omega_m + omega_r) * t) - math.sin((omega_m - omega_r) * t))
        return main + side

    return drive


def harmonic_displacement(delta: float, chi: float, alpha0_bar: complex,
                          lam: float, abar: complex, omega_m: float,
                          n: int, t: float) -> complex:
    """Slow-modulation limit of the bus-conditioned displacement.

    alpha_n(t) ~ delta alpha0 / (delta + n chi) - i (lam/abar) cos(omega_m t),
    valid for |delta/chi| << 1 and |chi/omega_m| << 1.
    """
    return delta * alpha0_bar / (delta + n * chi) \
        - 1j * (lam / abar) * math.cos(omega_m * t)


# ---------------------------------------------------------------------------
# metapotentials


@dataclass
class MetapotentialGrid:
    """Classical energy landscape of the resonator at fixed bus level."""

    i_values: np.ndarray
    q_values: np.ndarray
    energy: np.ndarray  # shape (len(q_values), len(i_values))
    minimum: tuple[float, float]
    bus_level: int
    model: str
    normalized: bool


def metapotential(model: str, bus_level: int,
                  i_range: tuple[float, float], q_range: tuple[float, float],
                  resolution: int = 201, *,
                  delta: float, chi: float, eps: complex = 0.0,
                  effective: EffectiveParams | None = None,
                  normalize: bool = False) -> MetapotentialGrid:
    """Classical energy of the resonator field (r -> I + iQ) at one bus level.

    ``model="simple"``: E = (delta + n chi)|r|^2 - 2 Re(eps r*); single well
    at the conditioned displacement eps/(delta + n chi).  ``model="kerr_cat"``
    uses the doubly-rotating-frame quartic (two symmetric wells at
    r^2 = -a^2 (2n - 1)).  ``normalize`` divides by (delta + n chi)|eps/
    (delta + n chi)/4|^2 for display (simple model only).
    """
    i_vals = np.linspace(i_range[0], i_range[1], resolution)
    q_vals = np.linspace(q_range[0], q_range[1], resolution)
    ii, qq = np.meshgrid(i_vals, q_vals)
    r = ii + 1j * qq
    n = bus_level
    if model == "simple":
        energy = (delta + n * chi) * np.abs(r) ** 2 - 2.0 * np.real(eps * np.conj(r))
    elif model == "kerr_cat":
        if effective is None:
            raise ValueError("kerr_cat metapotential needs effective parameters")
        a_sq = effective.alpha_sq
        cond = a_sq * (2 * n - 1)
        energy = ((delta + 0.5 * effective.chi + effective.chi * n) * np.abs(r) ** 2
                  + 0.5 * effective.k_r * np.abs(r ** 2 + cond) ** 2
                  - 0.5 * effective.k_r * a_sq ** 2 * (2 * n - 1) ** 2)
    else:
        raise ValueError("model must be 'simple' or 'kerr_cat'")
    if normalize:
        alpha0 = eps / (delta + n * chi) if model == "simple" else math.sqrt(abs(a_sq))
        scale = (delta + n * chi) * abs(alpha0 / 4.0) ** 2
        energy = energy / scale
    k = int(np.argmin(energy))
    qi, ij = np.unravel_index(k, energy.shape)
    return MetapotentialGrid(i_values=i_vals, q_values=q_vals, energy=energy,
                             minimum=(float(i_vals[ij]), float(q_vals[qi])),
                             bus_level=n, model=model, normalized=normalize)


def stray_coupling_floor(g12: float, omega1: float, omega2: float) -> float:
    """Unsuppressible residual 1-IPR from direct qubit-qubit coupling.

    2 g12^2 / (omega1 - omega2)^2: independent of the coupler drive, lowered
    only by detuning the qubits or shrinking g12.
    """
    return 2.0 * g12 ** 2 / (omega1 - omega2) ** 2
