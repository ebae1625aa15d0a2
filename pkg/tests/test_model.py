"""System parameters, displacements, envelopes, and the polaron builder."""

import math

import numpy as np
import pytest

from couplersim.hilbert import (
    ModeLayout,
    basis_state,
    embed_matrix,
    mode_displacement,
    mode_operator,
)
from couplersim.model import (
    DisplacementSet,
    DriveEnvelope,
    SystemParams,
    ac_stark_shift,
    build_lab_hamiltonian,
    build_polaron_model,
    bus_kerr_dressed,
    classical_displacements,
    displacements_for_alpha0,
    evaluate_terms,
    qubit_detuning_dressed,
    steady_displacements,
    tqd_envelope,
)

TWO_PI = 2.0 * math.pi

FIG3 = dict(delta1=7, delta2=14, k1=-300, k2=-300, kb=-300, kr=0,
            chi=-20, delta=-5, kappa=0.1, g1=0, g2=0)


def make_params(**overrides):
    kw = dict(FIG3)
    kw.update(overrides)
    return SystemParams.from_mhz(**kw)


class TestSteadyDisplacements:
    def test_worked_example(self):
        # constant eps/2pi=-15 MHz, delta/2pi=-5, chi/2pi=-20, kappa=0
        p = make_params(kappa=0)
        disp = steady_displacements(p, TWO_PI * -15.0, levels=3)
        assert disp.alpha(0) == pytest.approx(3.0, abs=1e-12)
        assert disp.alpha(1) == pytest.approx(0.6, abs=1e-12)
        abar = disp.alpha(1) - disp.alpha(0)
        assert abar == pytest.approx(-2.4, abs=1e-12)

    def test_closed_form_all_levels(self):
        p = make_params(kappa=0.37, chi=-13.0, delta=-2.2)
        eps = TWO_PI * (-4.0 + 1.5j)
        disp = steady_displacements(p, eps, levels=4)
        for n in range(4):
            expected = eps / (p.delta + n * p.chi - 1j * p.kappa / 2)
            assert disp.alpha(n) == pytest.approx(expected, rel=1e-12)

    def test_abar_identity(self):
        # abar = -chi*abar0/(delta+chi-i kappa/2)
        p = make_params(kappa=0.2)
        disp = steady_displacements(p, TWO_PI * 3.0, levels=2)
        a0 = disp.alpha(0)
        abar = disp.alpha(1) - disp.alpha(0)
        expected = -p.chi * a0 / (p.delta + p.chi - 1j * p.kappa / 2)
        assert abar == pytest.approx(expected, rel=1e-10)

    def test_displacements_for_alpha0_round_trip(self):
        p = make_params()
        disp = displacements_for_alpha0(p, 2.0, levels=3)
        assert abs(disp.alpha(0)) == pytest.approx(2.0, rel=1e-12)


class TestClassicalDisplacements:
    def test_zero_drive_stays_zero(self):
        p = make_params()
        env = DriveEnvelope(base=lambda t: 0.0, base_dot=lambda t: 0.0,
                            correction=0.0, tau=0.0, eps_final=0.0)
        t = np.linspace(0, 1.0, 50)
        disp = classical_displacements(p, env, 2, t)
        assert np.max(np.abs(disp.trajectory)) < 1e-14

    def test_undriven_decay(self):
        # alpha0(0)=1, eps=0, delta=0 -> |alpha(t)| = e^{-kappa t/2}
        p = make_params(delta=0, chi=0, kappa=0.5)
        env = DriveEnvelope(base=lambda t: 0.0, base_dot=lambda t: 0.0,
                            correction=0.0, tau=0.0, eps_final=0.0)
        t = np.linspace(0, 4.0, 80)
        # integrate the same ODE from alpha(0)=1 by superposition: the
        # homogeneous solution of i a' = (delta - i kappa/2) a
        expected = np.exp(-p.kappa * t / 2)
        from scipy.integrate import solve_ivp
        sol = solve_ivp(lambda tt, y: [-1j * (p.delta - 1j * p.kappa / 2) * y[0]],
                        (0, 4.0), [1.0 + 0j], t_eval=t, rtol=1e-10, atol=1e-12)
        assert np.max(np.abs(np.abs(sol.y[0]) - expected)) < 1e-8

    def test_tqd_reaches_steady_value_after_ramp(self):
        # the transitionless envelope parks alpha0 at eps0(tau)/(delta-ik/2)
        p = make_params()
        tau = 0.005  # 5 ns in us
        eps_final = TWO_PI * -15.0
        env = tqd_envelope(p, eps_final, tau)
        t = np.linspace(0, tau, 400)
        disp = classical_displacements(p, env, 1, t)
        target = eps_final / (p.delta - 1j * p.kappa / 2)
        final = disp.trajectory[0, -1]
        assert abs(final - target) / abs(target) < 1e-6


class TestTqdEnvelope:
    def test_plateau_exact(self):
        p = make_params()
        env = tqd_envelope(p, TWO_PI * -15.0, 0.005)
        for t in (0.005, 0.007, 0.1):
            assert env.value(t) == pytest.approx(TWO_PI * -15.0, rel=1e-12)

    def test_starts_at_zero(self):
        p = make_params()
        env = tqd_envelope(p, TWO_PI * -15.0, 0.005)
        assert abs(env.value(0.0)) < 1e-10


class TestDressedQuantities:
    def test_dressed_detuning_worked_example(self):
        # Delta1/2pi = 7 - (-5*9) + (-25*0.36) = 43 MHz
        p = make_params(kappa=0)
        disp = DisplacementSet(steady=np.array([3.0 + 0j, 0.6 + 0j]))
        d1 = qubit_detuning_dressed(p, disp, 1)
        assert d1 / TWO_PI == pytest.approx(43.0, rel=1e-10)

    def test_ac_stark_closed_form(self):
        # Delta_ac = delta*|a0|^2*chi/(delta+chi) for steady displacements
        p = make_params(kappa=0, delta=-1.5)
        disp = displacements_for_alpha0(p, math.sqrt(5.0), levels=3)
        expected = (p.delta * abs(disp.alpha(0)) ** 2 * p.chi
                    / (p.delta + p.chi))
        assert ac_stark_shift(p, disp) == pytest.approx(expected, rel=1e-10)

    def test_dressed_quantities_match_definitions_random(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            delta = float(rng.uniform(-8, -0.5))
            chi = float(rng.uniform(-30, -5))
            kappa = float(rng.uniform(0, 0.3))
            p = make_params(delta=delta, chi=chi, kappa=kappa)
            disp = steady_displacements(p, TWO_PI * rng.uniform(0.5, 10.0), 3)
            a0, a1 = disp.alpha(0), disp.alpha(1)
            d_ac = (p.delta * abs(a0) ** 2
                    - (p.delta + p.chi) * abs(a1) ** 2)
            d1 = qubit_detuning_dressed(p, disp, 1)
            assert d1 == pytest.approx(p.delta1 - d_ac, rel=1e-12)


class TestLabHamiltonian:
    def test_free_limit_is_diagonal(self):
        p = make_params(chi=0, kappa=0, k1=0, k2=0, kb=0)
        layout = ModeLayout(("q1", "q2", "b", "r"), (2, 2, 2, 3))
        terms = build_lab_hamiltonian(p, layout, frame="drive_rotating")
        h = evaluate_terms(terms, 0.0).to_dense()
        off = h - np.diag(np.diag(h))
        assert np.max(np.abs(off)) < 1e-12

    def test_cross_kerr_shift(self):
        # |0,0,1,1> eigenvalue moves by chi when chi switches on
        layout = ModeLayout(("q1", "q2", "b", "r"), (2, 2, 2, 3))
        v = basis_state(layout, (0, 0, 1, 1))
        energies = {}
        for chi in (0.0, -20.0):
            p = make_params(chi=chi, kappa=0)
            terms = build_lab_hamiltonian(p, layout, frame="drive_rotating")
            h = evaluate_terms(terms, 0.0).to_dense()
            energies[chi] = float(np.real(np.vdot(v, h @ v)))
        assert (energies[-20.0] - energies[0.0]) == pytest.approx(
            TWO_PI * -20.0, rel=1e-10)

    def test_hermitian_at_random_times(self):
        p = make_params(g1=2, g2=2, kr=-30)
        layout = ModeLayout(("q1", "q2", "b", "r"), (2, 2, 2, 6))
        disp = displacements_for_alpha0(p, 1.0, levels=3)
        env = tqd_envelope(p, TWO_PI * -15.0, 0.005)
        terms = build_lab_hamiltonian(p, layout, envelope=env,
                                      displacements=disp,
                                      frame="drive_rotating")
        rng = np.random.default_rng(3)
        for t in rng.uniform(0, 0.02, 50):
            h = evaluate_terms(terms, float(t)).to_dense()
            assert np.max(np.abs(h - h.conj().T)) < 1e-10


class TestPolaronModel:
    def test_zero_displacement_reduces_to_exchange(self):
        p = make_params(g1=2, g2=2, kappa=0)
        layout = ModeLayout(("q1", "q2", "b", "r"), (2, 2, 3, 4))
        disp = DisplacementSet(steady=np.zeros(4, dtype=complex))
        pol = build_polaron_model(p, layout, disp)
        assert pol.delta_tilde[0] == pytest.approx(p.delta1, rel=1e-12)
        h = pol.hamiltonian().to_dense()
        # exchange block: <1,0,0,0|H|0,0,1,0> = g1
        v1 = basis_state(layout, (1, 0, 0, 0))
        v2 = basis_state(layout, (0, 0, 1, 0))
        assert abs(np.vdot(v1, h @ v2)) == pytest.approx(p.g1, rel=1e-10)

    def test_exchange_vacuum_element_is_suppressed(self):
        # <0b 0r|Hg|1b 0r> has magnitude g * exp(-|abar|^2/2)
        p = make_params(g1=2, g2=0, kappa=0)
        layout = ModeLayout(("q1", "q2", "b", "r"), (2, 1, 2, 20))
        disp = displacements_for_alpha0(p, 1.5, levels=3)
        abar = disp.alpha(1) - disp.alpha(0)
        pol = build_polaron_model(p, layout, disp)
        h = pol.hamiltonian().to_dense()
        v1 = basis_state(layout, (1, 0, 0, 0))
        v2 = basis_state(layout, (0, 0, 1, 0))
        assert abs(np.vdot(v1, h @ v2)) == pytest.approx(
            p.g1 * math.exp(-abs(abar) ** 2 / 2), rel=1e-10)

    def test_polaron_equivalence_to_lab_frame(self):
        # conjugating the drive-rotating Hamiltonian with the conditional
        # displacement recovers the polaron Hamiltonian up to the uniform
        # ac-Stark bookkeeping, away from the resonator truncation edge
        p = SystemParams.from_mhz(delta1=7, delta2=14, k1=-300, k2=-300,
                                  kb=-300, kr=-30, chi=-20, delta=-1.5,
                                  kappa=0.1, g1=2, g2=2)
        dims = (2, 2, 3, 10)
        layout = ModeLayout(("q1", "q2", "b", "r"), dims)
        disp = displacements_for_alpha0(p, 0.1, levels=dims[2] + 1)
        pol = build_polaron_model(p, layout, disp)
        hp = pol.hamiltonian(include_kappa_term=True).to_dense()

        eps = disp.alpha(0) * p.pole(0)
        env = DriveEnvelope(base=lambda t: eps, base_dot=lambda t: 0.0,
                            correction=0.0, tau=0.0, eps_final=eps)
        terms = build_lab_hamiltonian(p, layout, envelope=env,
                                      displacements=disp,
                                      frame="drive_rotating")
        hrot = evaluate_terms(terms, 0.0).to_dense()

        u = np.zeros_like(hrot)
        for n in range(dims[2]):
            proj = np.zeros((dims[2], dims[2]))
            proj[n, n] = 1.0
            pn = embed_matrix(layout, "b", proj).to_dense()
            dn = mode_displacement(layout, "r", disp.alpha(n)).to_dense()
            u = u + dn @ pn
        lhs = u.conj().T @ hrot @ u

        dac = ac_stark_shift(p, disp)
        n_ops = sum(mode_operator(layout, m, "number").to_dense()
                    for m in ("q1", "q2", "b"))
        rhs = (hp + dac * n_ops
               - (p.delta * abs(disp.alpha(0)) ** 2) * np.eye(hrot.shape[0]))

        keep = np.ones(dims, dtype=bool)
        keep[..., dims[3] - 5:] = False
        k = keep.ravel()
        err = np.max(np.abs((lhs - rhs)[np.ix_(k, k)]))
        assert err < 1e-8

    def test_dressed_bus_kerr_definition(self):
        p = make_params(kappa=0)
        disp = displacements_for_alpha0(p, 2.0, levels=3)
        kb_t = bus_kerr_dressed(p, disp)
        assert math.isfinite(kb_t)
        # undisplaced limit recovers the bare bus Kerr
        disp0 = DisplacementSet(steady=np.zeros(3, dtype=complex))
        assert bus_kerr_dressed(p, disp0) == pytest.approx(p.kb, rel=1e-12)
