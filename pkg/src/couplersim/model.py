"""System parameters and Hamiltonian builders.

Physical setting: two anharmonic qubit modes (labels "q1", "q2") exchange
photons with a bus mode ("b") that is cross-Kerr coupled to a driven,
possibly Kerr-nonlinear resonator ("r").  Driving the resonator displaces it
conditionally on the bus photon number; the resulting state-dependent
displacement suppresses every bus-mediated coupling by the overlap of the
pointer states.

Internally all frequencies are angular (rad/us) and times are in us.  The
``from_mhz`` constructors take ordinary frequencies in MHz (value / 2pi) and
convert once, at the boundary.

Two frames are produced here:

* the drive-rotating frame (resonator co-rotating with its drive, bus and
  qubits co-rotating at the bare bus frequency), used for time-domain
  integration, and
* the polaron frame, where the conditional displacement has been absorbed
  into the operators and the residual qubit-bus coupling carries displaced
  matrix elements; used for spectral analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .hilbert import (
    ModeLayout,
    Operator,
    compose,
    embed_matrix,
    fock_projector,
    level_transition,
    mode_displacement,
    mode_operator,
)

TWO_PI = 2.0 * math.pi

__all__ = [
    "SystemParams",
    "DriveEnvelope",
    "DisplacementSet",
    "HamiltonianTerm",
    "PamParams",
    "PolaronModel",
    "default_layout",
    "resonator_dim_for",
    "tqd_envelope",
    "tqd_error_estimate",
    "classical_displacements",
    "steady_displacements",
    "displacements_for_alpha0",
    "ac_stark_shift",
    "dressed_bus_shift",
    "qubit_detuning_dressed",
    "bus_kerr_dressed",
    "build_lab_hamiltonian",
    "build_polaron_model",
    "pam_steady_modulation",
]


@dataclass(frozen=True)
class SystemParams:
    """Static system parameters, angular units (rad/us).

    ``delta1``/``delta2`` are qubit detunings from the bus; ``delta`` is the
    resonator detuning from its drive; ``chi`` the bus-resonator cross-Kerr;
    ``k*`` self-Kerr (anharmonicity) coefficients; ``kappa`` the resonator
    decay rate; ``g1``/``g2`` the qubit-bus exchange couplings.  ``omega_b``
    and ``omega_r`` are absolute frequencies, only needed for the
    non-rotating (lab) frame builder and reported dressed frequencies.
    """

    delta1: float
    delta2: float
    k1: float
    k2: float
    kb: float
    kr: float
    chi: float
    delta: float
    kappa: float = 0.0
    g1: float = 0.0
    g2: float = 0.0
    omega_b: float = 0.0
    omega_r: float = 0.0

    @classmethod
    def from_mhz(cls, **kwargs) -> "SystemParams":
        """Build from plain-frequency values in MHz (each value is f = omega/2pi)."""
        return cls(**{k: TWO_PI * v for k, v in kwargs.items()})

    def qubit_detuning(self, j: int) -> float:
        if j == 1:
            return self.delta1
        if j == 2:
            return self.delta2
        raise ValueError("qubit index must be 1 or 2")

    def qubit_coupling(self, j: int) -> float:
        if j == 1:
            return self.g1
        if j == 2:
            return self.g2
        raise ValueError("qubit index must be 1 or 2")

    def pole(self, n: int) -> complex:
        """Complex displacement pole delta + n*chi - i*kappa/2 of bus level n."""
        return self.delta + n * self.chi - 0.5j * self.kappa


def default_layout(params: SystemParams | None = None,
                   alpha_max_sq: float = 0.0,
                   qubit_dim: int = 3,
                   bus_dim: int = 4,
                   resonator_dim: int | None = None) -> ModeLayout:
    """Standard four-mode layout (q1, q2, b, r), resonator index fastest."""
    if resonator_dim is None:
        resonator_dim = resonator_dim_for(alpha_max_sq)
    return ModeLayout(("q1", "q2", "b", "r"), (qubit_dim, qubit_dim, bus_dim, resonator_dim))


def resonator_dim_for(alpha_max_sq: float) -> int:
    """Truncation heuristic |a|^2 + 6|a| + 10 for a mode holding displacement a."""
    a = math.sqrt(max(alpha_max_sq, 0.0))
    return int(math.ceil(alpha_max_sq + 6.0 * a + 10.0))


# ---------------------------------------------------------------------------
# drive envelopes


@dataclass(frozen=True)
class DriveEnvelope:
    """Complex resonator drive amplitude eps(t) with its ramp bookkeeping.

    ``base`` is the uncorrected target envelope eps0(t) and ``base_dot`` its
    time derivative.  ``correction`` multiplies the derivative term that
    cancels ramp-induced transients: eps(t) = eps0(t) + correction * eps0'(t).
    """

    base: Callable[[float], complex]
    base_dot: Callable[[float], complex]
    correction: complex
    tau: float
    eps_final: complex

    def value(self, t: float) -> complex:
        return self.base(t) + self.correction * self.base_dot(t)

    def values(self, t: np.ndarray) -> np.ndarray:
        return np.array([self.value(float(x)) for x in np.atleast_1d(t)])


def tqd_envelope(params: SystemParams, eps_final: complex, tau: float,
                 hold: float | None = None) -> DriveEnvelope:
    """Transient-free ramp of the resonator drive.

    The bare envelope is a raised-cosine turn-on, eps0(t) = eps_final *
    sin^2(pi t / 2 tau) for 0 <= t <= tau, constant afterwards.  The
    counterdiabatic correction -i eps0'(t)/(delta - i kappa/2) keeps the
    bus-vacuum displacement exactly on its instantaneous steady value
    throughout the ramp.  If ``hold`` is given, a mirrored ramp-down starts
    at t = tau + hold (off-on-off pulse).
    """
    if tau <= 0:
        raise ValueError("ramp time must be positive")
    lam = params.delta - 0.5j * params.kappa
    if lam == 0:
        raise ValueError("drive exactly on resonance with undamped resonator")

    def base(t: float) -> complex:
        if t <= 0.0:
            return 0.0
        if t < tau:
            s = math.sin(0.5 * math.pi * t / tau)
            return eps_final * s * s
        if hold is None or t <= tau + hold:
            return eps_final
        td = t - tau - hold
        if td >= tau:
            return 0.0
        s = math.cos(0.5 * math.pi * td / tau)
        return eps_final * s * s

    def base_dot(t: float) -> complex:
        if t <= 0.0 or (hold is None and t >= tau):
            return 0.0
        if t < tau:
            return eps_final * (0.5 * math.pi / tau) * math.sin(math.pi * t / tau)
        if hold is not None and tau + hold < t < 2 * tau + hold:
            td = t - tau - hold
            return -eps_final * (0.5 * math.pi / tau) * math.sin(math.pi * td / tau)
        return 0.0

    return DriveEnvelope(base=base, base_dot=base_dot, correction=-1j / lam,
                         tau=tau, eps_final=complex(eps_final))


def tqd_error_estimate(params: SystemParams, eps_err: Callable[[float], complex],
                       n: int, t: float, order: int = 2,
                       fd_step: float = 1e-4) -> complex:
    """Displacement deviation caused by an envelope error, by repeated parts.

    For a residual drive term eps_err(t) on bus level ``n`` the induced
    displacement deviation is i * integral eps_err(z) e^{i L (z-t)} dz with
    L = delta + n chi - i kappa/2.  Integrating by parts ``order``+1 times
    gives the boundary series

        sum_k (-1)^k [ eps_err^{(k)}(z) e^{i L (z-t)} ] / (iL)^{k+1},
        evaluated between z=0 and z=t,

    whose leading term is bounded by |eps_err|/|L|.  Derivatives are taken
    by central finite differences of width ``fd_step``.
    """
    lam = params.pole(n)

    def deriv(f, k):
        if k == 0:
            return f
        g = deriv(f, k - 1)
        return lambda z: (g(z + fd_step) - g(z - fd_step)) / (2.0 * fd_step)

    total = 0.0 + 0.0j
    for k in range(order + 1):
        fk = deriv(eps_err, k)
        boundary = (fk(t) - fk(0.0) * np.exp(-1j * lam * t))
        total += (-1.0) ** k * boundary / (1j * lam) ** (k + 1)
    return complex(total)


# ---------------------------------------------------------------------------
# classical displacements


@dataclass(frozen=True)
class DisplacementSet:
    """Bus-level-conditioned resonator displacements alpha_n.

    ``steady`` always holds the asymptotic values eps/(delta + n chi -
    i kappa/2); when the set was produced by time integration, ``t`` and
    ``trajectory`` (shape (levels, len(t))) hold the transient too.
    """

    steady: np.ndarray
    t: np.ndarray | None = None
    trajectory: np.ndarray | None = None

    @property
    def levels(self) -> int:
        return len(self.steady)

    @property
    def pointer_separation(self) -> complex:
        """abar = alpha_1 - alpha_0, the conditional pointer-state separation."""
        return complex(self.steady[1] - self.steady[0])

    def alpha(self, n: int, t: float | None = None) -> complex:
        if t is None or self.t is None:
            return complex(self.steady[n])
        return complex(np.interp(t, self.t, self.trajectory[n].real)
                       + 1j * np.interp(t, self.t, self.trajectory[n].imag))

    def max_abs(self) -> float:
        m = float(np.max(np.abs(self.steady)))
        if self.trajectory is not None:
            m = max(m, float(np.max(np.abs(self.trajectory))))
        return m


def steady_displacements(params: SystemParams, eps: complex, levels: int) -> DisplacementSet:
    """Asymptotic displacements alpha_n = eps/(delta + n chi - i kappa/2)."""
    poles = np.array([params.pole(n) for n in range(levels)])
    return DisplacementSet(steady=eps / poles)


def displacements_for_alpha0(params: SystemParams, alpha0: complex, levels: int) -> DisplacementSet:
    """Steady set with the bus-vacuum displacement pinned to ``alpha0``."""
    return steady_displacements(params, alpha0 * params.pole(0), levels)


def classical_displacements(params: SystemParams, envelope: DriveEnvelope,
                            levels: int, t_grid: np.ndarray,
                            rtol: float = 1e-10, atol: float = 1e-12) -> DisplacementSet:
    """Integrate the classical displacement equations over ``t_grid``.

    d alpha_n/dt = -i (delta + n chi - i kappa/2) alpha_n + i eps(t),
    starting from vacuum (alpha_n = 0) at t_grid[0].
    """
    poles = np.array([params.pole(n) for n in range(levels)])

    def rhs(t, y):
        return -1j * poles * y + 1j * envelope.value(t)

    sol = solve_ivp(rhs, (t_grid[0], t_grid[-1]), np.zeros(levels, dtype=complex),
                    t_eval=t_grid, method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"displacement integration failed: {sol.message}")
    steady = envelope.eps_final / poles
    return DisplacementSet(steady=steady, t=t_grid, trajectory=sol.y)


# ---------------------------------------------------------------------------
# derived frame quantities


def ac_stark_shift(params: SystemParams, disp: DisplacementSet) -> float:
    """Bus frequency pull Delta_ac = delta|a0|^2 - (delta+chi)|a1|^2."""
    a0, a1 = disp.steady[0], disp.steady[1]
    return params.delta * abs(a0) ** 2 - (params.delta + params.chi) * abs(a1) ** 2


def ac_stark_shift_level(params: SystemParams, disp: DisplacementSet, n: int) -> float:
    """Residual diagonal shift of bus level n beyond the linear-in-n pull."""
    d_ac = ac_stark_shift(params, disp)
    a0, an = disp.steady[0], disp.steady[n]
    return (params.delta * abs(a0) ** 2
            - (params.delta + n * params.chi) * abs(an) ** 2
            - n * d_ac)


def dressed_bus_shift(params: SystemParams, disp: DisplacementSet) -> float:
    """Driven bus frequency shift [delta(delta+chi) - (kappa/2)^2]|abar|^2/chi."""
    abar_sq = abs(disp.pointer_separation) ** 2
    return ((params.delta * (params.delta + params.chi) - (0.5 * params.kappa) ** 2)
            * abar_sq / params.chi)


def qubit_detuning_dressed(params: SystemParams, disp: DisplacementSet, j: int) -> float:
    """Delta_tilde_j: qubit-bus detuning including the drive-induced pull."""
    return params.qubit_detuning(j) - ac_stark_shift(params, disp)


def bus_kerr_dressed(params: SystemParams, disp: DisplacementSet) -> float:
    """Kb_tilde = Kb - delta|a0|^2 + 2(delta+chi)|a1|^2 - (delta+2chi)|a2|^2."""
    if disp.levels < 3:
        raise ValueError("need at least three bus levels for the dressed Kerr")
    a = disp.steady
    return (params.kb - params.delta * abs(a[0]) ** 2
            + 2.0 * (params.delta + params.chi) * abs(a[1]) ** 2
            - (params.delta + 2.0 * params.chi) * abs(a[2]) ** 2)


# ---------------------------------------------------------------------------
# Hamiltonian terms


@dataclass
class HamiltonianTerm:
    """One additive Hamiltonian contribution.

    ``coeff`` is None for static terms (coefficient 1); otherwise a callable
    of time.  With ``add_dagger`` the contribution is coeff*op + h.c.
    """

    op: Operator
    coeff: Callable[[float], complex] | None = None
    add_dagger: bool = False

    @property
    def static(self) -> bool:
        return self.coeff is None


def _static(op: Operator) -> HamiltonianTerm:
    return HamiltonianTerm(op=op)


def assemble_static(terms: Sequence[HamiltonianTerm]) -> Operator:
    """Sum of the static terms (daggered partners included)."""
    parts = []
    for term in terms:
        if not term.static:
            continue
        parts.append(term.op)
        if term.add_dagger:
            parts.append(term.op.dag())
    if not parts:
        raise ValueError("no static terms")
    return compose(parts)


def evaluate_terms(terms: Sequence[HamiltonianTerm], t: float) -> Operator:
    """Full Hamiltonian matrix at time t."""
    out = None
    for term in terms:
        c = 1.0 if term.static else term.coeff(t)
        piece = term.op * c
        if term.add_dagger:
            piece = piece + piece.dag()
        out = piece if out is None else out + piece
    return out


def _qubit_static(params: SystemParams, layout: ModeLayout, j: int,
                  detuning: float) -> Operator:
    label = f"q{j}"
    q = mode_operator(layout, label, "destroy")
    qd = q.dag()
    n = mode_operator(layout, label, "number")
    kerr = 0.5 * params.__dict__[f"k{j}"] * (qd @ qd @ q @ q)
    return detuning * n + kerr


def build_lab_hamiltonian(params: SystemParams, layout: ModeLayout,
                          envelope: DriveEnvelope | None = None,
                          displacements: DisplacementSet | None = None,
                          frame: str = "drive_rotating") -> list[HamiltonianTerm]:
    """Hamiltonian terms of the full (untransformed) model.

    ``frame="drive_rotating"``: resonator co-rotates with its drive, bus and
    qubits co-rotate at the bare bus frequency.  Each mode's frequency term
    then shows up as its detuning.  ``frame="lab"`` keeps explicit
    exp(+-i omega_d t) factors on the drive and absolute mode frequencies
    (requires ``omega_b``/``omega_r`` to be set).

    When the resonator self-Kerr is nonzero its quartic term is referenced to
    the bus-conditioned classical displacements (supply ``displacements``);
    with a transient trajectory attached the coefficients become
    time-dependent.
    """
    if frame not in ("lab", "drive_rotating"):
        raise ValueError("frame must be 'lab' or 'drive_rotating'")
    rotating = frame == "drive_rotating"
    if not rotating and (params.omega_r == 0.0 and params.omega_b == 0.0):
        raise ValueError("lab frame needs absolute mode frequencies")

    b = mode_operator(layout, "b", "destroy")
    bd = b.dag()
    nb = mode_operator(layout, "b", "number")
    r = mode_operator(layout, "r", "destroy")
    rd = r.dag()
    nr = mode_operator(layout, "r", "number")

    omega_d = params.omega_r - params.delta

    terms: list[HamiltonianTerm] = []
    for j in (1, 2):
        det = params.qubit_detuning(j) if rotating else params.omega_b + params.qubit_detuning(j)
        terms.append(_static(_qubit_static(params, layout, j, det)))
    bus_freq = 0.0 if rotating else params.omega_b
    terms.append(_static(bus_freq * nb + 0.5 * params.kb * (bd @ bd @ b @ b)))
    res_freq = params.delta if rotating else params.omega_r
    terms.append(_static(res_freq * nr + params.chi * (nb @ nr)))

    for j in (1, 2):
        g = params.qubit_coupling(j)
        if g != 0.0:
            qd = mode_operator(layout, f"q{j}", "create")
            terms.append(HamiltonianTerm(op=g * (qd @ b), coeff=None, add_dagger=True))

    if envelope is not None:
        if rotating:
            terms.append(HamiltonianTerm(op=-1.0 * rd,
                                         coeff=lambda t: envelope.value(t),
                                         add_dagger=True))
        else:
            terms.append(HamiltonianTerm(
                op=-1.0 * rd,
                coeff=lambda t: envelope.value(t) * np.exp(-1j * omega_d * t),
                add_dagger=True))

    if params.kr != 0.0:
        if displacements is None:
            displacements = DisplacementSet(steady=np.zeros(layout.dim_of("b"), dtype=complex))
        terms.extend(_resonator_kerr_terms(params, layout, displacements, rotating, omega_d))
    return terms


def _resonator_kerr_terms(params: SystemParams, layout: ModeLayout,
                          disp: DisplacementSet, rotating: bool,
                          omega_d: float) -> list[HamiltonianTerm]:
    """(Kr/2) sum_n |n><n|_b (r - a_n)^dag^2 (r - a_n)^2, expanded in r."""
    half_kr = 0.5 * params.kr
    r = mode_operator(layout, "r", "destroy")
    rd = r.dag()
    nr = mode_operator(layout, "r", "number")
    ident = mode_operator(layout, "r", "identity")
    time_dep = disp.trajectory is not None
    terms: list[HamiltonianTerm] = []
    for n in range(layout.dim_of("b")):
        pn = fock_projector(layout, "b", n)
        a_of_t = (lambda n=n: (lambda t: disp.alpha(n, t)))() if time_dep else None

        def rot(k, n=n):
            # displacement phase factor for a term carrying net k resonator quanta
            if rotating:
                return lambda t: 1.0 + 0.0j
            return lambda t: np.exp(1j * k * omega_d * t)

        terms.append(_static(half_kr * (rd @ rd @ r @ r @ pn)))
        a_bar = disp.alpha(n)
        if time_dep:
            terms.append(HamiltonianTerm(
                op=-params.kr * (rd @ rd @ r @ pn),
                coeff=lambda t, n=n, f=rot(1): disp.alpha(n, t) * f(t),
                add_dagger=True))
            terms.append(HamiltonianTerm(
                op=half_kr * (rd @ rd @ pn),
                coeff=lambda t, n=n, f=rot(2): disp.alpha(n, t) ** 2 * f(t),
                add_dagger=True))
            terms.append(HamiltonianTerm(
                op=2.0 * params.kr * (nr @ pn),
                coeff=lambda t, n=n: abs(disp.alpha(n, t)) ** 2))
            terms.append(HamiltonianTerm(
                op=-params.kr * (rd @ pn),
                coeff=lambda t, n=n, f=rot(1): np.conj(disp.alpha(n, t)) * disp.alpha(n, t) ** 2 * f(t),
                add_dagger=True))
            terms.append(HamiltonianTerm(
                op=half_kr * (ident @ pn),
                coeff=lambda t, n=n: abs(disp.alpha(n, t)) ** 4))
        elif a_bar != 0.0:
            if rotating:
                terms.append(_static(-params.kr * a_bar * (rd @ rd @ r @ pn)
                                     - params.kr * np.conj(a_bar) * (rd @ r @ r @ pn)
                                     + half_kr * a_bar ** 2 * (rd @ rd @ pn)
                                     + half_kr * np.conj(a_bar) ** 2 * (r @ r @ pn)
                                     + 2.0 * params.kr * abs(a_bar) ** 2 * (nr @ pn)
                                     - params.kr * np.conj(a_bar) * a_bar ** 2 * (rd @ pn)
                                     - params.kr * a_bar * np.conj(a_bar) ** 2 * (r @ pn)
                                     + half_kr * abs(a_bar) ** 4 * (ident @ pn)))
            else:
                terms.append(_static(2.0 * params.kr * abs(a_bar) ** 2 * (nr @ pn)
                                     + half_kr * abs(a_bar) ** 4 * (ident @ pn)))
                terms.append(HamiltonianTerm(
                    op=-params.kr * a_bar * (rd @ rd @ r @ pn),
                    coeff=rot(1), add_dagger=True))
                terms.append(HamiltonianTerm(
                    op=half_kr * a_bar ** 2 * (rd @ rd @ pn),
                    coeff=rot(2), add_dagger=True))
                terms.append(HamiltonianTerm(
                    op=-params.kr * np.conj(a_bar) * a_bar ** 2 * (rd @ pn),
                    coeff=rot(1), add_dagger=True))
    return terms


# ---------------------------------------------------------------------------
# polaron frame


@dataclass(frozen=True)
class PamParams:
    """Two-tone phase-modulation parameters.

    ``bessel_arg`` is the modulation index (the Bessel-function argument) and
    ``omega_m`` the modulation frequency (rad/us).
    """

    bessel_arg: float
    omega_m: float

    @classmethod
    def from_mhz(cls, bessel_arg: float, omega_m: float) -> "PamParams":
        return cls(bessel_arg=bessel_arg, omega_m=TWO_PI * omega_m)


@dataclass
class PolaronModel:
    """Displacement-transformed model, ready for spectra or dynamics.

    ``terms`` holds H minus the drive-residual part; ``kappa_term`` is the
    anti-Hermitian-free residual i kappa/2 sum_n (a_n r^dag - a_n^* r)|n><n|
    that the steady displacements leave behind and that the RWA collapse set
    cancels.  All dressed quantities are angular (rad/us).
    """

    params: SystemParams
    layout: ModeLayout
    displacements: DisplacementSet
    terms: list[HamiltonianTerm]
    kappa_term: Operator
    delta_tilde: tuple[float, float]
    kb_tilde: float
    delta_ac: float
    delta_ac_levels: np.ndarray
    phases: np.ndarray

    def hamiltonian(self, t: float = 0.0, include_kappa_term: bool = False) -> Operator:
        h = evaluate_terms(self.terms, t)
        if include_kappa_term:
            h = h + self.kappa_term
        return h

    def bare_hamiltonian(self) -> Operator:
        """Same model with the qubit-bus exchange switched off."""
        bare = [term for term in self.terms if not getattr(term, "_is_exchange", False)]
        return evaluate_terms(bare, 0.0)

    def collapse_operators(self, form: str = "full") -> list[Operator]:
        """Polaron-frame resonator loss.

        ``full``: single operator sqrt(kappa)(r + sum_n a_n |n><n|_b).
        ``rwa``: split pair {sqrt(kappa) r, sqrt(kappa) sum_n a_n |n><n|_b};
        with this pair the ``kappa_term`` must be dropped from the
        Hamiltonian (they generate it).
        ``two_level``: bus-only dephasing sqrt(kappa|abar|^2/4)(P1 - P0).
        """
        kap = self.params.kappa
        r = mode_operator(self.layout, "r", "destroy")
        pointer = compose([fock_projector(self.layout, "b", n) for n in range(self.layout.dim_of("b"))],
                          list(self.displacements.steady[: self.layout.dim_of("b")]))
        if form == "full":
            return [math.sqrt(kap) * (r + pointer)]
        if form == "rwa":
            return [math.sqrt(kap) * r, math.sqrt(kap) * pointer]
        if form == "two_level":
            abar_sq = abs(self.displacements.pointer_separation) ** 2
            p0 = fock_projector(self.layout, "b", 0)
            p1 = fock_projector(self.layout, "b", 1)
            return [math.sqrt(kap * abar_sq / 4.0) * (p1 - p0)]
        raise ValueError("form must be 'full', 'rwa' or 'two_level'")


def build_polaron_model(params: SystemParams, layout: ModeLayout,
                        displacements: DisplacementSet,
                        pam: PamParams | None = None) -> PolaronModel:
    """Construct the displacement-transformed Hamiltonian.

    Qubits keep their anharmonicity with dressed detunings Delta_tilde_j;
    the bus acquires exact per-level diagonal shifts (whose quadratic part
    is the dressed Kerr) on top of its bare Kerr; the resonator sees the
    bus-conditioned detuning (delta + chi b^dag b) plus its own Kerr; and the
    qubit-bus exchange picks up displaced matrix elements
    g_j sqrt(n+1) e^{-i phi_n} D(a_{n+1}-a_n) |n><n+1|_b + h.c., with
    phi_n = Im(a*_{n+1} a_n).

    With ``pam`` the exchange coefficients become periodic in time: a common
    small displacement modulation leaves the displacement operators unchanged
    and moves entirely into the phases phi_n(t) and the dressed-detuning
    integral.
    """
    nb_dim = layout.dim_of("b")
    if displacements.levels < nb_dim + 1:
        raise ValueError("need displacements for every retained bus level plus one")
    alphas = displacements.steady

    nb = mode_operator(layout, "b", "number")
    b = mode_operator(layout, "b", "destroy")
    bd = b.dag()
    r = mode_operator(layout, "r", "destroy")
    rd = r.dag()
    nr = mode_operator(layout, "r", "number")

    d_ac = ac_stark_shift(params, displacements)
    d_tilde = (params.delta1 - d_ac, params.delta2 - d_ac)
    d_ac_levels = np.array([ac_stark_shift_level(params, displacements, n)
                            for n in range(nb_dim)])
    phases = np.array([float(np.imag(np.conj(alphas[n + 1]) * alphas[n]))
                       for n in range(nb_dim - 1)])

    terms: list[HamiltonianTerm] = []
    for j in (1, 2):
        terms.append(_static(_qubit_static(params, layout, j, d_tilde[j - 1])))
    bus_diag = 0.5 * params.kb * (bd @ bd @ b @ b)
    bus_diag = bus_diag + compose([fock_projector(layout, "b", n) for n in range(nb_dim)],
                                  list(d_ac_levels))
    terms.append(_static(bus_diag))
    terms.append(_static(params.delta * nr + params.chi * (nb @ nr)
                         + 0.5 * params.kr * (rd @ rd @ r @ r)))

    mod = _pam_phase_factory(params, displacements, pam) if pam is not None else None
    for j in (1, 2):
        g = params.qubit_coupling(j)
        if g == 0.0:
            continue
        qd = mode_operator(layout, f"q{j}", "create")
        for n in range(nb_dim - 1):
            disp_op = mode_displacement(layout, "r", complex(alphas[n + 1] - alphas[n]))
            hop = level_transition(layout, "b", n + 1, n)  # |n><n+1| on the bus
            amp = g * math.sqrt(n + 1) * np.exp(-1j * phases[n])
            op = (qd @ disp_op @ hop) * amp
            if mod is None:
                term = HamiltonianTerm(op=op, coeff=None, add_dagger=True)
            else:
                term = HamiltonianTerm(op=op, coeff=mod(j, n), add_dagger=True)
            term._is_exchange = True
            terms.append(term)

    kappa_term = compose(
        [(0.5j * params.kappa) * ((alphas[n] * rd - np.conj(alphas[n]) * r)
                                  @ fock_projector(layout, "b", n))
         for n in range(nb_dim)])

    return PolaronModel(params=params, layout=layout, displacements=displacements,
                        terms=terms, kappa_term=kappa_term,
                        delta_tilde=d_tilde, kb_tilde=bus_kerr_dressed(params, displacements)
                        if displacements.levels >= 3 else float("nan"),
                        delta_ac=d_ac, delta_ac_levels=d_ac_levels, phases=phases)


def pam_steady_modulation(params: SystemParams, displacements: DisplacementSet,
                          pam: PamParams, t: float) -> np.ndarray:
    """Modulated displacements a_n(t) = a_n - i lambda cos(omega_m t)/abar^*.

    The added piece is level-independent, so pointer separations (and hence
    the displaced exchange matrix elements) are unchanged; only the polaron
    phases and the dressed detunings oscillate.
    """
    abar = displacements.pointer_separation
    if abar == 0:
        raise ValueError("modulation undefined for zero pointer separation")
    shift = -1j * pam.bessel_arg * math.cos(pam.omega_m * t) / np.conj(abar)
    return displacements.steady + shift


def _pam_phase_factory(params: SystemParams, displacements: DisplacementSet,
                       pam: PamParams):
    """Per-(qubit, bus-level) periodic coefficient for the exchange terms.

    The instantaneous polaron phase follows the modulated displacements,
    and the oscillating part of the dressed detuning is absorbed as the
    closed-form integral of Delta_ac(t) about its time average.
    """
    abar = displacements.pointer_separation
    mu = -1j * pam.bessel_arg / np.conj(abar)
    alphas = displacements.steady
    om = pam.omega_m

    # |a_n(t)|^2 = |a_n|^2 + 2 Re(a_n^* mu) cos + |mu|^2 cos^2; integrate the
    # oscillating parts: cos -> sin/om, cos^2 -> 1/2 + cos(2 om t) term.
    def level_weight(n):
        lin = 2.0 * float(np.real(np.conj(alphas[n]) * mu))
        quad = abs(mu) ** 2
        return lin, quad

    l0, q0 = level_weight(0)
    l1, q1 = level_weight(1)
    dd = params.delta
    dc = params.delta + params.chi

    def stark_integral(t):
        # integral of (Delta_ac(t') - mean) dt'
        lin = (dd * l0 - dc * l1) * math.sin(om * t) / om
        quad = (dd * q0 - dc * q1) * math.sin(2.0 * om * t) / (4.0 * om)
        return lin + quad

    def factory(j, n):
        base_phase = float(np.imag(np.conj(alphas[n + 1]) * alphas[n]))

        def coeff(t):
            a = alphas + mu * math.cos(om * t)
            phi = float(np.imag(np.conj(a[n + 1]) * a[n]))
            # the static builder already applied exp(-i base_phase)
            return np.exp(-1j * (phi - base_phase)) * np.exp(1j * stark_integral(t))

        return coeff

    return factory
