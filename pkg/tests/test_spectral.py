"""Eigen-matching, participation-ratio, and ZZ-shift oracles."""

import math

import numpy as np
import pytest

from couplersim import spectral
from couplersim.hilbert import ModeLayout, Operator, mode_operator
from couplersim.model import (
    SystemParams,
    build_polaron_model,
    displacements_for_alpha0,
)

TWO_PI = 2.0 * math.pi

CANONICAL = dict(delta1=7, delta2=14, k1=-300, k2=-300, kb=-300, kr=-300,
                 chi=-20, delta=-1.5, kappa=0.0, g1=2, g2=2)


def polaron_solution(alpha0_sq: float, qubit_dim: int = 3, bus_dim: int = 3,
                     r_dim: int = 12, **overrides):
    params = SystemParams.from_mhz(**{**CANONICAL, **overrides})
    disp = displacements_for_alpha0(params, math.sqrt(alpha0_sq), bus_dim + 1)
    layout = ModeLayout(("q1", "q2", "b", "r"),
                        (qubit_dim, qubit_dim, bus_dim, r_dim))
    model = build_polaron_model(params, layout, disp)
    sol = spectral.eigensystem(model.hamiltonian(), model.bare_hamiltonian())
    return params, disp, sol, spectral.match_states(sol)


class TestEigensystem:
    def test_rejects_non_hermitian(self):
        layout = ModeLayout(("r",), (3,))
        op = mode_operator(layout, "r", "destroy")
        with pytest.raises(ValueError):
            spectral.eigensystem(op)

    def test_diagonal_bare_case_uses_fock_basis(self):
        layout = ModeLayout(("r",), (4,))
        n = mode_operator(layout, "r", "number")
        sol = spectral.eigensystem(2.0 * n)
        assert sol.bare_is_fock
        assert np.allclose(sol.energies, [0.0, 2.0, 4.0, 6.0])


class TestIprNumeric:
    def test_uncoupled_state_is_pure(self):
        _, _, sol, match = polaron_solution(1.0, g1=0.0, g2=0.0)
        assert spectral.ipr_numeric(sol, match, (1, 0, 0, 0)) == pytest.approx(1.0, abs=1e-12)

    def test_equal_mixing_gives_one_half(self):
        # two degenerate levels coupled: eigenstates are 50/50 mixtures
        layout = ModeLayout(("q1", "q2", "b", "r"), (2, 1, 2, 1))
        m = np.zeros((4, 4), dtype=complex)
        # couple (1,0,0,0) <-> (0,0,1,0): indices 2 and 1 in row-major order
        m[2, 1] = m[1, 2] = 0.7
        h = Operator(layout, m)
        sol = spectral.eigensystem(h)
        match = spectral.match_states(sol)
        ipr = spectral.ipr_numeric(sol, match, (1, 0, 0, 0))
        assert ipr == pytest.approx(0.5, abs=1e-12)
        # degenerate overlaps collide in the greedy pass
        assert match.collisions_resolved

    def test_bounded_between_inverse_dim_and_one(self):
        _, _, sol, match = polaron_solution(2.0)
        d = sol.layout.total_dim
        for occ in [(0, 0, 0, 0), (1, 0, 0, 0), (0, 1, 0, 0), (1, 1, 0, 0)]:
            ipr = spectral.ipr_numeric(sol, match, occ)
            assert 1.0 / d <= ipr <= 1.0 + 1e-12

    def test_two_excitation_delocalization_is_additive(self):
        # 1 - IPR(1100) ~ [1 - IPR(1000)] + [1 - IPR(0100)] at leading
        # order in the mixing; the defect is higher order, so it shrinks
        # faster than the delocalization itself as the coupling weakens.
        def defect(g):
            _, _, sol, match = polaron_solution(2.0, g1=g, g2=g)
            s11 = 1.0 - spectral.ipr_numeric(sol, match, (1, 1, 0, 0))
            s10 = 1.0 - spectral.ipr_numeric(sol, match, (1, 0, 0, 0))
            s01 = 1.0 - spectral.ipr_numeric(sol, match, (0, 1, 0, 0))
            return abs(s11 - (s10 + s01)) / s11

        d1, d05 = defect(1.0), defect(0.5)
        assert d05 < 0.05
        assert d05 < d1


class TestZzShift:
    def test_vanishes_without_coupling(self):
        _, _, sol, match = polaron_solution(1.0, g1=0.0, g2=0.0)
        assert abs(spectral.zz_shift(sol, match)) < 1e-12

    def test_sign_and_scale_against_fourth_order_estimate(self):
        from couplersim.analytics import chi12_ac_from
        params, disp, sol, match = polaron_solution(4.0, r_dim=16)
        numeric = spectral.zz_shift(sol, match) / TWO_PI
        estimate = chi12_ac_from(params, disp) / TWO_PI
        assert numeric * estimate > 0
        assert abs(numeric - estimate) / abs(estimate) < 0.5


class TestQubitDephasingRate:
    def test_zero_without_bus_hybridization(self):
        params, disp, sol, match = polaron_solution(1.0, g1=0.0, g2=0.0, kappa=0.1)
        assert spectral.qubit_dephasing_rate(params, disp, sol, match) == 0.0

    def test_scales_linearly_with_kappa(self):
        params, disp, sol, match = polaron_solution(1.0, kappa=0.1)
        r1 = spectral.qubit_dephasing_rate(params, disp, sol, match)
        r2 = spectral.qubit_dephasing_rate(
            SystemParams.from_mhz(**{**CANONICAL, "kappa": 0.2}), disp, sol, match)
        assert r2 == pytest.approx(2.0 * r1, rel=1e-12)
        assert r1 > 0


class TestSwParams:
    def test_perturbative_at_canonical_point(self):
        params, disp, _, _ = polaron_solution(1.0)
        sw = spectral.sw_params(params, disp)
        assert sw.valid
        assert sw.max_coupling_ratio < 0.25
        assert sw.q.shape[0] == 2

    def test_flags_resonant_rung(self):
        # delta + chi == Delta_tilde makes the k=1 rung resonant (q=1)
        params, disp, _, _ = polaron_solution(1.0, delta1=-21.5, chi=-20,
                                              delta=-1.5, g1=2, g2=0)
        sw = spectral.sw_params(params, disp)
        assert not sw.valid


class TestRelativeChange:
    def test_symmetric_and_zero_safe(self):
        assert spectral.relative_change(2.0, 1.0) == pytest.approx(0.5)
        assert spectral.relative_change(1.0, 2.0) == pytest.approx(0.5)
        assert spectral.relative_change(0.0, 0.0) == 0.0
