"""End-to-end acceptance checks, one test per headline capability.

These run the shipped pipeline configurations at their documented operating
points and tolerances.  They are intentionally slow: together they exercise
the full simulation stack (master-equation fits, exact diagonalization,
closed-form estimates, and the circuit reduction) against its oracles.
"""

import math
import os
import time

import numpy as np
import pytest
from scipy.special import eval_genlaguerre

from couplersim import analytics, dynamics, spectral
from couplersim.hilbert import (
    ModeLayout,
    basis_state,
    displacement_operator,
    level_transition,
    mode_displacement,
    mode_operator,
)
from couplersim.model import (
    HamiltonianTerm,
    SystemParams,
    build_polaron_model,
    displacements_for_alpha0,
)
from couplersim.pipelines import run_config

TWO_PI = 2.0 * math.pi
WORKERS = max(1, os.cpu_count() or 1)


def check_map(bundle) -> dict:
    return {c["name"]: c for c in bundle.checks}


# ---------------------------------------------------------------------------
# driven-bus Rabi suppression and dephasing (shared slow sweep)


@pytest.fixture(scope="module")
def rabi_dephasing_bundle():
    start = time.monotonic()
    bundle = run_config({"pipeline": "fig3_rabi"}, workers=WORKERS)
    bundle.runtime_s = time.monotonic() - start
    return bundle


class TestRabiSuppression:
    def test_fitted_rate_matches_pointer_overlap_within_10pct(
            self, rabi_dephasing_bundle):
        c = check_map(rabi_dephasing_bundle)["rabi_rate_matches_pointer_overlap"]
        assert c["measured"] <= 0.10
        assert c["passed"]

    def test_runtime_under_twenty_minutes(self, rabi_dephasing_bundle):
        assert rabi_dephasing_bundle.runtime_s < 1200.0

    def test_fitted_dephasing_time_within_15pct(self, rabi_dephasing_bundle):
        c = check_map(rabi_dephasing_bundle)[
            "dephasing_time_matches_separation_rate"]
        assert c["measured"] <= 0.15
        assert c["passed"]


# ---------------------------------------------------------------------------
# participation-ratio band and the near-resonant peak


@pytest.fixture(scope="module")
def ipr_band_bundle():
    start = time.monotonic()
    bundle = run_config({"pipeline": "fig4_ipr"}, workers=WORKERS)
    bundle.runtime_s = time.monotonic() - start
    return bundle


class TestIprBand:
    def test_runtime_under_ten_minutes(self, ipr_band_bundle):
        assert ipr_band_bundle.runtime_s < 600.0

    def test_diagonalized_ipr_within_widened_band(self, ipr_band_bundle):
        c = check_map(ipr_band_bundle)["diagonalized_ipr_within_widened_band"]
        assert c["passed"], (
            "band containment fraction "
            f"{ipr_band_bundle.values['band_containment_fraction']:.3f} < 1; "
            "second-order hybridization channels outside the two-state "
            "reduction push points past the widened band")

    def test_large_kerr_log_slope_is_minus_one(self, ipr_band_bundle):
        c = check_map(ipr_band_bundle)["large_kerr_log_slope"]
        assert c["passed"], (
            f"diagonalized slope {c['measured']:.3f} vs -1 (10% tolerance); "
            "the same residual channels steepen the numerical curve")

    def test_analytic_band_log_slope_is_minus_one(self, ipr_band_bundle):
        c = check_map(ipr_band_bundle)["analytic_band_log_slope"]
        assert c["measured"] == pytest.approx(-1.0, rel=0.10)
        assert c["passed"]

    def test_resonant_regime_peak_at_detuning_zero_crossing(self):
        bundle = run_config({"pipeline": "fig4_ipr",
                             "params": {"delta": 1.0},
                             "sweep": {"kr_mhz": [-300.0]}},
                            workers=WORKERS)
        c = check_map(bundle)["leakage_peak_at_detuning_zero_crossing"]
        assert c["passed"]
        assert bundle.values["regime"] == "nonmonotonic"


# ---------------------------------------------------------------------------
# two-qubit ZZ suppression


class TestZzSuppression:
    def test_undriven_rate_and_suppression_depth(self):
        bundle = run_config({"pipeline": "fig5_zz"}, workers=WORKERS)
        checks = check_map(bundle)
        assert checks["undriven_zz_matches_perturbative_formula"]["measured"] <= 0.05
        assert checks["undriven_zz_matches_perturbative_formula"]["passed"]
        assert checks["zz_suppression_decades"]["measured"] >= 3.0
        assert checks["zz_suppression_decades"]["passed"]

    def test_tuned_baseline_follows_perturbative_formula(self):
        bundle = run_config({"pipeline": "fig5_zz",
                             "sweep": {"alpha0_sq": [0.0, 2.0, 5.0, 8.0]}},
                            workers=WORKERS)
        cols, rows = bundle.tables["zz"]
        i_num = cols.index("chi12_numeric_mhz")
        i_base = cols.index("chi12_acstark_mhz")
        # the undriven-but-detuning-tuned baseline stays within a factor ~2
        # of the numerical rate it models near zero drive, and stays finite
        # and smooth along the sweep
        for row in rows:
            assert math.isfinite(row[i_base])
            assert row[i_base] != 0.0
        assert abs(rows[0][i_num] / rows[0][i_base]) == pytest.approx(1.0, abs=0.05)


# ---------------------------------------------------------------------------
# dephasing-estimate consistency


class TestDephasingEstimateConsistency:
    def test_overlap_and_ipr_forms_agree_within_20pct(self):
        bundle = run_config({"pipeline": "app_dephasing"}, workers=WORKERS)
        c = check_map(bundle)["overlap_and_ipr_dephasing_forms_agree"]
        assert c["measured"] <= 0.20, (
            f"max relative difference {c['measured']:.3f}: the "
            "participation-ratio form counts hybridization channels that "
            "carry no bus-state information, exceeding the overlap form")
        assert c["passed"]


# ---------------------------------------------------------------------------
# phase-modulated suppression


class TestPhaseModulation:
    def test_nulled_sideband_suppression(self):
        bundle = run_config({"pipeline": "fig6_pam"}, workers=WORKERS)
        checks = check_map(bundle)
        assert checks["modulation_suppression_factor"]["measured"] >= 10.0
        assert checks["suppression_insensitive_to_depth_perturbation"]["passed"]
        assert checks["analytic_floor_respected_within_factor_two"]["passed"]


# ---------------------------------------------------------------------------
# flux-circuit realization


class TestCircuitRealization:
    def test_leakage_monotone_and_shared_diagonal_shift(self):
        bundle = run_config({"pipeline": "fig7_circuit"}, workers=WORKERS)
        checks = check_map(bundle)
        assert checks["leakage_monotone_decreasing_in_well_separation"]["passed"]
        assert checks["bus_levels_share_diagonal_shift"]["measured"] <= 1e-9
        assert checks["bus_levels_share_diagonal_shift"]["passed"]
        assert checks["diagonal_shift_matches_closed_form"]["passed"]


# ---------------------------------------------------------------------------
# oracle suite


def displacement_element_oracle(m: int, n: int, alpha: complex) -> complex:
    a2 = abs(alpha) ** 2
    if m >= n:
        pref = math.sqrt(math.factorial(n) / math.factorial(m))
        return pref * math.exp(-a2 / 2) * alpha ** (m - n) * eval_genlaguerre(
            n, m - n, a2)
    pref = math.sqrt(math.factorial(m) / math.factorial(n))
    return pref * math.exp(-a2 / 2) * (-np.conj(alpha)) ** (n - m) * \
        eval_genlaguerre(m, n - m, a2)


@pytest.fixture(scope="class", autouse=True)
def class_clock(request):
    if request.cls is not None:
        request.cls.started = time.monotonic()
    yield


class TestOracleSuite:
    def test_displacement_matrix_elements(self):
        # the closed form describes the untruncated operator, so the
        # operator is built with headroom and its dim-40 block compared
        work, block = 80, 40
        for alpha in (0.5, -1.7, 1.5 + 1.0j, 2.1 - 2.1j, 3.0, 3.0j):
            d = displacement_operator(work, alpha).data.toarray()[:block, :block]
            ref = np.array([[displacement_element_oracle(m, n, alpha)
                             for n in range(block)] for m in range(block)])
            assert np.max(np.abs(d - ref)) <= 1e-8

    def test_lindblad_amplitude_vs_classical_ode(self):
        delta, eps, kappa = 1.3, 0.25, 0.4
        layout = ModeLayout(("r",), (12,))
        r = mode_operator(layout, "r", "destroy")
        h = delta * (r.dag() @ r) + eps * (r + r.dag())
        t = np.linspace(0.0, 8.0, 41)
        traj = dynamics.evolve(h, [math.sqrt(kappa) * r],
                               basis_state(layout, (0,)), t,
                               e_ops={"a": r}, rtol=1e-10, atol=1e-12)
        pole = delta - 1j * kappa / 2.0
        expected = (eps / pole) * (np.exp(-(1j * delta + kappa / 2.0) * t) - 1.0)
        assert np.max(np.abs(traj.expectations["a"] - expected)) <= 1e-6

    def test_series_vs_partial_sum(self):
        poles = np.array([1.8 - 0.2j, 1.8 - 0.2j, -5.5 + 0.9j, -5.5 + 0.9j])
        x = 2.3
        direct = sum(x ** n / math.factorial(n) / np.prod(1.0 + n / poles)
                     for n in range(120))
        val = analytics.hyp_pfq_squaredpoles(poles, x)
        assert abs(val - direct) <= 1e-10 * abs(direct)

    def test_metapotential_minima_at_conditioned_displacements(self):
        bundle = run_config({"pipeline": "metapotential"}, workers=1)
        for c in bundle.checks:
            assert c["passed"], c

    def test_polaron_and_lab_frame_populations_agree(self):
        # zero resonator self-Kerr: the closed-form bus frequency pull used
        # by the time-domain frame is then exact, so any disagreement is a
        # genuine transform or ramp error rather than a frame offset
        params = SystemParams.from_mhz(delta1=7, delta2=14, k1=-300, k2=-300,
                                       kb=-300, kr=0.0, chi=-20, delta=-1.5,
                                       kappa=0.0, g1=0.0, g2=0.0)
        a2, omega, t_max = 1.0, TWO_PI * 1.0, 1.8
        lab = dynamics.rabi_experiment(params, a2, omega, t_max=t_max,
                                       n_samples=120)
        t = lab.trajectory.t
        nb_lab = np.real(lab.trajectory.expectations["nb"])

        # displaced-frame model with the bus drive transformed alongside:
        # (omega/2) b + h.c. picks up the inter-level displacement operators
        bus_dim = lab.meta["dims"][2]
        r_dim = lab.meta["dims"][3]
        layout = ModeLayout(("q1", "q2", "b", "r"), (1, 1, bus_dim, r_dim))
        disp = displacements_for_alpha0(params, math.sqrt(a2), bus_dim + 2)
        # the displaced frame already absorbs the bus frequency pull, so the
        # resonant drive needs no extra frame shift; <n_b> is invariant
        # under bus-diagonal frame rotations, so the traces are comparable
        model = build_polaron_model(params, layout, disp)
        terms = list(model.terms)
        nb_op = mode_operator(layout, "b", "number")
        alphas = disp.steady
        for n in range(bus_dim - 1):
            d_op = mode_displacement(layout, "r",
                                     complex(alphas[n + 1] - alphas[n]))
            hop = level_transition(layout, "b", n + 1, n)
            phase = float(np.imag(np.conj(alphas[n + 1]) * alphas[n]))
            amp = 0.5 * omega * math.sqrt(n + 1) * np.exp(-1j * phase)
            terms.append(HamiltonianTerm(op=(d_op @ hop) * amp,
                                         add_dagger=True))
        rho0 = basis_state(layout, (0, 0, 0, 0))
        tau = lab.meta["tau_ramp"]
        traj = dynamics.evolve(terms, [], rho0, t - t[0],
                               e_ops={"nb": nb_op})
        nb_pol = np.real(traj.expectations["nb"])
        # allow the ramp interval itself (first sample) the same tolerance
        assert np.max(np.abs(nb_lab - nb_pol)) <= 2e-2

    def test_oracle_suite_under_five_minutes(self):
        # runs last within the class (pytest keeps definition order)
        assert time.monotonic() - self.started < 300.0
