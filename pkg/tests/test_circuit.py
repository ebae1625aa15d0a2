"""Circuit-reduction formulas, cat-style Hamiltonian, and metapotentials."""

import math

import numpy as np
import pytest

from couplersim import circuit
from couplersim.hilbert import ModeLayout, mode_operator

TWO_PI = 2.0 * math.pi
GHZ = TWO_PI * 1e3  # rad/us per GHz


def cat_circuit(zeta: float = 5.0 * math.pi / 6.0, e_jl: float = 0.16,
                z_b: float = 0.06, eps0_ghz: float = 0.1) -> circuit.CircuitParams:
    c = circuit.CircuitParams.from_ghz(
        n_junctions=3, e_cb=0.2, e_jb=20.0, e_cr=0.2, e_jl=e_jl, e_j2=e_jl,
        e_jn=20.0, zeta=zeta, phi_l=math.pi - 2.0 * zeta,
        phi_s2=-math.pi - 2.0 * zeta, z_b=z_b, eps0=eps0_ghz)
    return c


class TestCircuitReduction:
    def test_resonator_frequency_and_kerr(self):
        c = cat_circuit()
        # sqrt(8 * 0.2 * 20 / 3) - 0.2 GHz and -E_Cr / N^2
        assert c.omega_r / GHZ == pytest.approx(3.0660, abs=5e-4)
        eff = circuit.derive_kerr_cat_params(c)
        assert eff.k_r / TWO_PI == pytest.approx(-0.2e3 / 9.0, rel=1e-12)

    def test_cross_kerr_closed_form(self):
        c = cat_circuit()
        eff = circuit.derive_kerr_cat_params(c)
        pzr = math.sqrt(2.0 * 3 * 0.2 / 20.0)
        expected = -(9.0 / 8.0) * (math.pi * 0.06) * pzr * (0.16 * GHZ) \
            * math.sin(5.0 * math.pi / 6.0)
        assert eff.chi == pytest.approx(expected, rel=1e-12)

    def test_cross_kerr_vanishes_at_zero_mixing_angle(self):
        eff = circuit.derive_kerr_cat_params(cat_circuit(zeta=0.0))
        assert eff.chi == 0.0

    def test_two_photon_amplitudes_locked(self):
        eff = circuit.derive_kerr_cat_params(cat_circuit())
        assert eff.lambda_r == pytest.approx(-2.0 * eff.lambda_l, rel=1e-12)

    def test_flux_configuration_enforced(self):
        c = cat_circuit()
        bad = circuit.CircuitParams(**{**c.__dict__, "phi_l": 0.3})
        with pytest.raises(ValueError):
            circuit.derive_kerr_cat_params(bad)

    def test_impedance_consistency_enforced(self):
        c = cat_circuit()
        bad = circuit.CircuitParams(**{**c.__dict__, "z_r": 1.0})
        with pytest.raises(ValueError):
            circuit.derive_kerr_cat_params(bad)


class TestHarmonicReduction:
    def harmonic(self, e_jl: float = 0.16) -> circuit.CircuitParams:
        lam = 1.0 - (1.5 ** 2) * math.pi * 0.06 / 2.0
        return circuit.CircuitParams.from_ghz(
            n_junctions=3, e_cb=0.2, e_jb=20.0, e_cr=0.2, e_jl=e_jl,
            e_j2=lam * e_jl, e_jn=20.0, phi_l=0.0, phi_s2=TWO_PI, z_b=0.06)

    def test_inductively_shunted_frequencies(self):
        h = circuit.derive_harmonic_params(self.harmonic())
        e_lb = (20.0 + 2.0 * 2.25 * 0.16) * GHZ
        assert h.omega_b == pytest.approx(
            math.sqrt(8.0 * 0.2 * GHZ * e_lb) - 0.2 * GHZ, rel=1e-12)
        assert h.omega_r == pytest.approx(
            math.sqrt(8.0 * 0.2 * 20.0 / 3.0) * GHZ - 0.2 * GHZ, rel=1e-12)

    def test_zero_loop_junction_decouples(self):
        lam = 1.0 - (1.5 ** 2) * math.pi * 0.06 / 2.0
        h = circuit.derive_harmonic_params(self.harmonic(e_jl=0.0))
        assert h.chi == 0.0
        # K_b reduces to the bare transmon value -E_Cb
        assert h.k_b == pytest.approx(-0.2 * GHZ, rel=1e-12)


class TestKerrCatHamiltonian:
    def effective(self, alpha_sq: float = 2.0) -> circuit.EffectiveParams:
        k_r = -0.1
        return circuit.EffectiveParams(
            omega_r=100.0, k_r=k_r, lambda_l=k_r * alpha_sq,
            lambda_r=-2.0 * k_r * alpha_sq, chi=-0.5, alpha_sq=alpha_sq,
            k_b=-1.0)

    def test_hermitian_and_bus_diagonal(self):
        layout = ModeLayout(("b", "r"), (3, 20))
        h = circuit.kerr_cat_hamiltonian(self.effective(), delta=0.01, layout=layout)
        assert h.is_hermitian()
        nb = mode_operator(layout, "b", "number")
        comm = h @ nb - nb @ h
        assert abs(comm.data).max() < 1e-12

    def test_zero_amplitude_reduces_to_kerr_oscillator(self):
        eff = self.effective(alpha_sq=0.0)
        layout = ModeLayout(("b", "r"), (2, 12))
        h = circuit.kerr_cat_hamiltonian(eff, delta=0.0, layout=layout)
        nr = mode_operator(layout, "r", "number")
        r = mode_operator(layout, "r", "destroy")
        rd = r.dag()
        expected = (0.5 * eff.chi) * nr \
            + eff.chi * (mode_operator(layout, "b", "number") @ nr) \
            + 0.5 * eff.k_r * (rd @ rd @ r @ r) \
            + 0.5 * eff.k_b * (mode_operator(layout, "b", "create")
                               @ mode_operator(layout, "b", "create")
                               @ mode_operator(layout, "b", "destroy")
                               @ mode_operator(layout, "b", "destroy"))
        assert abs((h - expected).data).max() < 1e-12

    def test_truncation_guard(self):
        layout = ModeLayout(("b", "r"), (3, 6))
        with pytest.raises(ValueError):
            circuit.kerr_cat_hamiltonian(self.effective(), delta=0.0, layout=layout)

    def test_diagonal_shift_equal_for_lowest_levels(self):
        eff = self.effective(alpha_sq=2.0)
        s0 = circuit.kerr_cat_diagonal_shift(eff, delta=0.01, bus_level=0)
        s1 = circuit.kerr_cat_diagonal_shift(eff, delta=0.01, bus_level=1)
        expected = -0.5 * eff.k_r * eff.alpha_sq ** 2
        assert s0 == pytest.approx(expected, abs=1e-8)
        assert s1 == pytest.approx(expected, abs=1e-8)
        assert s0 == pytest.approx(s1, abs=1e-8)


class TestMetapotential:
    def test_simple_well_sits_at_conditioned_displacement(self):
        # negative detuning inverts the paraboloid; normalization flips
        # the sign so the conditioned displacement shows up as the minimum
        delta, chi, eps = -1.5, -20.0, 3.0
        grid = circuit.metapotential("simple", 0, (-4, 0), (-2, 2),
                                     resolution=401, delta=delta, chi=chi,
                                     eps=eps, normalize=True)
        target = eps / delta
        assert grid.minimum[0] == pytest.approx(target, abs=0.02)
        assert grid.minimum[1] == pytest.approx(0.0, abs=0.02)

    def test_simple_well_confining_detuning(self):
        # positive detuning: a genuine minimum, no normalization needed
        grid = circuit.metapotential("simple", 0, (-1, 3), (-2, 2),
                                     resolution=401, delta=1.5, chi=-20.0,
                                     eps=3.0)
        assert grid.minimum[0] == pytest.approx(2.0, abs=0.02)
        assert grid.minimum[1] == pytest.approx(0.0, abs=0.02)

    def test_kerr_cat_double_well(self):
        eff = circuit.EffectiveParams(omega_r=100.0, k_r=-0.1, lambda_l=-0.2,
                                      lambda_r=0.4, chi=-0.5, alpha_sq=2.0)
        # bus level 1: wells at r^2 = -a^2 (2n-1) = -2, i.e. r = +- i sqrt(2).
        # Pick delta so the residual detuning delta + chi/2 + chi vanishes;
        # with negative Kerr the wells are then the exact grid maxima.
        delta = -1.5 * eff.chi
        grid = circuit.metapotential("kerr_cat", 1, (-3, 3), (-3, 3),
                                     resolution=301, delta=delta, chi=eff.chi,
                                     effective=eff)
        e = grid.energy
        assert np.allclose(e, e[::-1, ::-1], atol=1e-9)  # inversion symmetry
        qi, ij = np.unravel_index(int(np.argmax(e)), e.shape)
        i_top = float(grid.i_values[ij])
        q_top = float(grid.q_values[qi])
        assert abs(i_top) < 0.05
        assert abs(q_top) == pytest.approx(math.sqrt(2.0), abs=0.05)

    def test_unknown_model_rejected(self):
        with pytest.raises(ValueError):
            circuit.metapotential("quartic", 0, (-1, 1), (-1, 1),
                                  delta=0.0, chi=0.0)


class TestStrayCouplingFloor:
    def test_closed_form(self):
        assert circuit.stray_coupling_floor(0.1, 5.0, 4.0) == pytest.approx(0.02)
