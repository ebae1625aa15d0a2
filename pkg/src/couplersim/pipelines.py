"""Config-driven experiment pipelines with deterministic CSV/JSON bundles.

Each pipeline takes a declarative JSON config (strict schema, frequencies in
MHz at the boundary), runs a parameter sweep, and emits:

* one or more CSV tables (comma separated, header row, UTF-8, LF endings,
  floats printed with 17 significant digits so identical configs produce
  byte-identical files),
* ``summary.json`` holding fitted values, their analytic oracles, the
  pass/fail state of every inline check, and a SHA-256 digest per table,
* a copy of the resolved config and a short text log.

Bundles land in ``<output>/<pipeline>/<config-hash>/``.  ``verify_bundle``
re-checks the digests and re-evaluates every recorded check, so a bundle is
self-auditing after the fact.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields as dc_fields, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import analytics, circuit, dynamics, spectral
from .hilbert import ModeLayout
from .model import (
    PamParams,
    SystemParams,
    build_polaron_model,
    displacements_for_alpha0,
    qubit_detuning_dressed,
)

TWO_PI = 2.0 * math.pi

__all__ = [
    "ConfigError",
    "NumericalError",
    "Bundle",
    "PIPELINES",
    "load_config",
    "config_hash",
    "run_config",
    "write_bundle",
    "verify_bundle",
    "pipeline_listing",
]


class ConfigError(ValueError):
    """Invalid or unknown configuration content (CLI exit code 2)."""


class NumericalError(RuntimeError):
    """A pipeline produced non-finite or unfittable results (exit code 3)."""


# ---------------------------------------------------------------------------
# config handling


_SYSTEM_KEYS = {f.name for f in dc_fields(SystemParams)}
_TOP_KEYS = {"pipeline", "params", "sweep", "truncations", "tolerances",
             "seed", "output", "options"}
_TRUNC_KEYS = {"bus_dim", "resonator_dim", "qubit_dim"}
_TOL_KEYS = {"rtol", "atol"}

_CANONICAL_MHZ = {
    "delta1": 7.0, "delta2": 14.0,
    "k1": -300.0, "k2": -300.0, "kb": -300.0, "kr": -300.0,
    "chi": -20.0, "delta": -1.5, "kappa": 0.0,
    "g1": 2.0, "g2": 2.0,
}

#: first zero of the zeroth Bessel function: modulation depth that nulls the
#: dominant exchange sideband
BESSEL_J0_ZERO = 2.404825557695773


def _reject_unknown(mapping: dict, allowed: set, where: str):
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")


def _sweep_values(spec) -> list:
    if isinstance(spec, list):
        if not spec:
            raise ConfigError("empty sweep value list")
        return [float(v) for v in spec]
    if isinstance(spec, dict):
        _reject_unknown(spec, {"start", "stop", "num"}, "sweep grid")
        try:
            return [float(v) for v in
                    np.linspace(float(spec["start"]), float(spec["stop"]),
                                int(spec["num"]))]
        except KeyError as exc:
            raise ConfigError(f"sweep grid missing {exc}") from exc
    raise ConfigError("sweep values must be a list or a start/stop/num grid")


def _sweep_points(sweep_cfg: dict) -> list[dict]:
    """Cartesian product of the sweep axes, first axis varying slowest."""
    if not sweep_cfg:
        return [{}]
    names = list(sweep_cfg)
    grids = [sweep_cfg[name] for name in names]
    return [dict(zip(names, combo)) for combo in itertools.product(*grids)]


def load_config(path: str | Path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    return raw


def resolve_config(raw: dict) -> dict:
    """Validate a raw config against its pipeline schema and fill defaults."""
    _reject_unknown(raw, _TOP_KEYS, "config")
    name = raw.get("pipeline")
    if name not in PIPELINES:
        raise ConfigError(f"unknown pipeline: {name!r}; choose from "
                          f"{sorted(PIPELINES)}")
    spec = PIPELINES[name]

    params = dict(spec.default_params)
    user_params = raw.get("params", {})
    if not isinstance(user_params, dict):
        raise ConfigError("'params' must be an object")
    _reject_unknown(user_params, set(spec.default_params), f"params ({name})")
    params.update(user_params)

    options = dict(spec.default_options)
    user_options = raw.get("options", {})
    if not isinstance(user_options, dict):
        raise ConfigError("'options' must be an object")
    _reject_unknown(user_options, set(spec.default_options), f"options ({name})")
    options.update(user_options)

    sweep_raw = raw.get("sweep", {})
    if not isinstance(sweep_raw, dict):
        raise ConfigError("'sweep' must be an object of axis -> values")
    _reject_unknown(sweep_raw, set(spec.default_sweep), f"sweep ({name})")
    sweep = {k: _sweep_values(v) for k, v in
             {**spec.default_sweep, **sweep_raw}.items()}

    trunc = dict(spec.default_truncations)
    user_trunc = raw.get("truncations", {})
    _reject_unknown(user_trunc, _TRUNC_KEYS, "truncations")
    trunc.update(user_trunc)

    tol = {"rtol": dynamics.DEFAULT_RTOL, "atol": dynamics.DEFAULT_ATOL}
    user_tol = raw.get("tolerances", {})
    _reject_unknown(user_tol, _TOL_KEYS, "tolerances")
    tol.update(user_tol)

    return {
        "pipeline": name,
        "params": params,
        "sweep": sweep,
        "truncations": trunc,
        "tolerances": tol,
        "seed": int(raw.get("seed", 0)),
        "output": raw.get("output", "runs"),
        "options": options,
    }


def config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


# ---------------------------------------------------------------------------
# result container and serialization


@dataclass
class Bundle:
    """In-memory pipeline result, ready to be written to disk."""

    pipeline: str
    config: dict
    tables: dict[str, tuple[list[str], list[tuple]]]
    values: dict
    checks: list[dict]
    log: list[str] = field(default_factory=list)
    runtime_s: float = 0.0

    @property
    def hash(self) -> str:
        return config_hash(self.config)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _csv_bytes(columns: Sequence[str], rows: Sequence[tuple]) -> bytes:
    lines = [",".join(columns)]
    for row in rows:
        if len(row) != len(columns):
            raise ValueError("row width does not match header")
        lines.append(",".join(_fmt(v) for v in row))
    return ("\n".join(lines) + "\n").encode("utf-8")


def _check(name: str, measured, oracle, tolerance, kind: str) -> dict:
    # Coerce to plain Python scalars so bundle JSON serialization never
    # trips over numpy types.
    def scalar(v):
        if isinstance(v, (bool, np.bool_)):
            return bool(v)
        return float(v) if v is not None else None

    entry = {"name": name, "measured": scalar(measured),
             "oracle": scalar(oracle), "tolerance": scalar(tolerance),
             "kind": kind}
    entry["passed"] = bool(_check_passes(entry))
    return entry


def _check_passes(entry: dict) -> bool:
    m, o, tol, kind = (entry["measured"], entry["oracle"],
                       entry["tolerance"], entry["kind"])
    if m is None or (isinstance(m, float) and not math.isfinite(m)):
        return False
    if kind == "rel":
        scale = max(abs(o), 1e-300)
        return abs(m - o) <= tol * scale
    if kind == "abs":
        return abs(m - o) <= tol
    if kind == "le":
        slack = (1.0 + (tol or 0.0)) if o >= 0 else (1.0 - (tol or 0.0))
        return m <= o * slack
    if kind == "ge":
        slack = (1.0 - (tol or 0.0)) if o >= 0 else (1.0 + (tol or 0.0))
        return m >= o * slack
    if kind == "bool":
        return bool(m) == bool(o)
    raise ValueError(f"unknown check kind {kind!r}")


def _json_scalar(obj):
    """Fallback serializer: reduce numpy scalars to plain Python ones."""
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_bundle(bundle: Bundle, out_root: str | Path | None = None) -> Path:
    root = Path(out_root) if out_root is not None else Path(bundle.config["output"])
    bundle_dir = root / bundle.pipeline / bundle.hash
    bundle_dir.mkdir(parents=True, exist_ok=True)

    table_meta = {}
    for name, (columns, rows) in bundle.tables.items():
        payload = _csv_bytes(columns, rows)
        fname = f"{name}.csv"
        (bundle_dir / fname).write_bytes(payload)
        table_meta[name] = {
            "file": fname,
            "sha256": hashlib.sha256(payload).hexdigest(),
            "rows": len(rows),
        }

    summary = {
        "schema": "couplersim-bundle-v1",
        "pipeline": bundle.pipeline,
        "config_hash": bundle.hash,
        "status": "ok" if bundle.passed else "partial",
        "values": bundle.values,
        "checks": bundle.checks,
        "tables": table_meta,
        "runtime_s": bundle.runtime_s,
    }
    (bundle_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True, default=_json_scalar)
        + "\n", encoding="utf-8")
    (bundle_dir / "config.json").write_text(
        json.dumps(bundle.config, indent=2, sort_keys=True) + "\n",
        encoding="utf-8")
    (bundle_dir / "log.txt").write_text("\n".join(bundle.log) + "\n",
                                        encoding="utf-8")
    return bundle_dir


def verify_bundle(bundle_dir: str | Path) -> tuple[bool, list[str]]:
    """Re-audit a written bundle: table digests and every recorded check.

    Returns ``(ok, report_lines)``.  Raises ``ConfigError`` for a missing or
    corrupt bundle (no summary, unreadable JSON, missing tables).
    """
    bundle_dir = Path(bundle_dir)
    summary_path = bundle_dir / "summary.json"
    if not summary_path.is_file():
        raise ConfigError(f"not a result bundle (no summary.json): {bundle_dir}")
    try:
        summary = json.loads(summary_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"corrupt summary.json: {exc}") from exc

    ok = True
    report = [f"bundle {bundle_dir} (pipeline {summary.get('pipeline')}, "
              f"config {summary.get('config_hash')})"]
    for name, meta in summary.get("tables", {}).items():
        path = bundle_dir / meta["file"]
        if not path.is_file():
            raise ConfigError(f"missing table file: {path}")
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        good = digest == meta["sha256"]
        ok &= good
        report.append(f"  table {name}: {'ok' if good else 'DIGEST MISMATCH'}")
    for entry in summary.get("checks", []):
        try:
            recomputed = _check_passes(entry)
        except (KeyError, ValueError):
            recomputed = False
        good = recomputed and bool(entry.get("passed"))
        ok &= good
        report.append(f"  check {entry.get('name')}: "
                      f"{'pass' if good else 'FAIL'} "
                      f"(measured={entry.get('measured')}, "
                      f"oracle={entry.get('oracle')}, "
                      f"tol={entry.get('tolerance')}, kind={entry.get('kind')})")
    report.append("PASS" if ok else "FAIL")
    return ok, report


# ---------------------------------------------------------------------------
# sweep execution helpers


def _run_points(func: Callable, args_list: list, workers: int) -> list:
    if workers <= 1 or len(args_list) <= 1:
        return [func(a) for a in args_list]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, args_list))


def _params_from_mhz(params_mhz: dict, **overrides) -> SystemParams:
    merged = {**params_mhz, **overrides}
    return SystemParams.from_mhz(**{k: v for k, v in merged.items()
                                    if k in _SYSTEM_KEYS})


def _log_slope(x: np.ndarray, y: np.ndarray) -> float:
    """Least-squares slope of ln(y) against x."""
    return float(np.polyfit(x, np.log(y), 1)[0])


def _require_finite(values, where: str):
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NumericalError(f"non-finite result in {where}")


# ---------------------------------------------------------------------------
# pipeline: driven-bus Rabi suppression and induced dephasing (fig3_rabi)


def _fig3_point(args: tuple) -> dict:
    params_mhz, point, trunc, tol, opt = args
    params = _params_from_mhz(params_mhz, chi=point["chi_mhz"])
    a2 = float(point["alpha0_sq"])
    omega = TWO_PI * opt["omega_mhz"]
    tau = opt["tau_ramp_ns"] * 1e-3
    kwargs = dict(tau_ramp=tau, bus_dim=trunc["bus_dim"],
                  r_dim=trunc["resonator_dim"], rtol=tol["rtol"],
                  atol=tol["atol"])

    deph = dynamics.dephasing_experiment(params, a2, **kwargs)
    td = deph.trajectory.t
    coh = np.abs(deph.trajectory.expectations["coherence"])
    keep = td >= tau
    _, tphi_fit = dynamics.fit_exponential_decay(td[keep] - tau, coh[keep])

    rabi = dynamics.rabi_experiment(params, a2, omega, **kwargs)
    t = rabi.trajectory.t
    p1 = np.real(rabi.trajectory.expectations["p1"])
    # Overdamped traces only constrain omega^2 * T2; pin T2 to the
    # independently measured dephasing time so omega stays identifiable.
    overdamped = rabi.meta["omega_expected"] * tphi_fit < 2.0
    fit = dynamics.fit_two_level(t - t[0], p1,
                                 omega_guess=rabi.meta["omega_expected"],
                                 t2_fixed=tphi_fit if overdamped else None)

    return {
        "alpha0_sq": a2,
        "chi_mhz": float(point["chi_mhz"]),
        "abar_sq": rabi.meta["abar_sq"],
        "omega_tilde_fit_mhz": fit.omega / TWO_PI,
        "omega_tilde_formula_mhz": rabi.meta["omega_expected"] / TWO_PI,
        "tphi_fit_us": tphi_fit,
        "tphi_formula_us": deph.meta["tphi_expected"],
        "fit_ok": fit.success,
    }


def run_fig3_rabi(cfg: dict, workers: int) -> Bundle:
    points = _sweep_points(cfg["sweep"])
    args = [(cfg["params"], pt, cfg["truncations"], cfg["tolerances"],
             cfg["options"]) for pt in points]
    results = _run_points(_fig3_point, args, workers)

    columns = ["alpha0_sq", "chi_mhz", "abar_sq", "omega_tilde_fit_mhz",
               "omega_tilde_formula_mhz", "tphi_fit_us", "tphi_formula_us",
               "fit_ok"]
    rows = [tuple(r[c] for c in columns) for r in results]
    _require_finite([r["omega_tilde_fit_mhz"] for r in results], "fig3 rate fit")

    omega_err = max(abs(r["omega_tilde_fit_mhz"] - r["omega_tilde_formula_mhz"])
                    / r["omega_tilde_formula_mhz"] for r in results)
    tphi_err = max(abs(r["tphi_fit_us"] - r["tphi_formula_us"])
                   / r["tphi_formula_us"] for r in results)
    checks = [
        _check("rabi_rate_matches_pointer_overlap", omega_err, 0.0, 0.10, "abs"),
        _check("dephasing_time_matches_separation_rate", tphi_err, 0.0, 0.15, "abs"),
    ]
    values = {
        "max_rel_err_omega": omega_err,
        "max_rel_err_tphi": tphi_err,
        "points": len(results),
    }
    log = [f"alpha0_sq={r['alpha0_sq']:g} chi={r['chi_mhz']:g} MHz: "
           f"Omega fit {r['omega_tilde_fit_mhz']:.5g} vs "
           f"{r['omega_tilde_formula_mhz']:.5g} MHz, "
           f"Tphi fit {r['tphi_fit_us']:.5g} vs {r['tphi_formula_us']:.5g} us"
           for r in results]
    return Bundle(pipeline="fig3_rabi", config=cfg,
                  tables={"rabi_dephasing": (columns, rows)},
                  values=values, checks=checks, log=log)


# ---------------------------------------------------------------------------
# pipeline: participation-ratio band (fig4_ipr) and shared diagonalization


def _polaron_solution(params: SystemParams, alpha0_sq: float,
                      qubit_dim: int, bus_dim: int):
    alpha0 = math.sqrt(max(alpha0_sq, 0.0))
    disp = displacements_for_alpha0(params, alpha0, bus_dim + 1)
    x = abs(disp.pointer_separation) ** 2
    r_dim = max(8, int(math.ceil(x + 4.0 * math.sqrt(x) + 6.0)))
    layout = ModeLayout(("q1", "q2", "b", "r"),
                        (qubit_dim, qubit_dim, bus_dim, r_dim))
    model = build_polaron_model(params, layout, disp)
    sol = spectral.eigensystem(model.hamiltonian(), model.bare_hamiltonian())
    match = spectral.match_states(sol)
    return disp, model, sol, match


def _fig4_point(args: tuple) -> list[dict]:
    params_mhz, point, trunc, _tol, _opt = args
    params = _params_from_mhz(params_mhz)
    if "kr_mhz" in point:
        params = replace(params, kr=TWO_PI * float(point["kr_mhz"]))
    a2 = float(point["alpha0_sq"])
    disp, _model, sol, match = _polaron_solution(
        params, a2, trunc["qubit_dim"], trunc["bus_dim"])
    no_kerr = replace(params, kr=0.0)
    rows = []
    for j, occ, label in ((1, (1, 0, 0, 0), "1000"), (2, (0, 1, 0, 0), "0100")):
        numeric = 1.0 - spectral.ipr_numeric(sol, match, occ)
        zero_kerr = 1.0 - analytics.ipr_static(no_kerr, disp, label)
        large_kerr = 1.0 - analytics.ipr_large_kerr(no_kerr, disp, j)
        d_tilde = qubit_detuning_dressed(params, disp, j)
        g = params.qubit_coupling(j)
        rows.append({
            "alpha0_sq": a2,
            "qubit": j,
            "abar_sq": abs(disp.pointer_separation) ** 2,
            "k_r_mhz": params.kr / TWO_PI,
            "one_minus_ipr_diag": numeric,
            "band_lo": min(zero_kerr, large_kerr),
            "band_hi": max(zero_kerr, large_kerr),
            "dashed_acstark": 2.0 * (g / d_tilde) ** 2,
            "d_tilde_mhz": d_tilde / TWO_PI,
        })
    return rows


def run_fig4_ipr(cfg: dict, workers: int) -> Bundle:
    points = _sweep_points(cfg["sweep"])
    args = [(cfg["params"], pt, cfg["truncations"], cfg["tolerances"],
             cfg["options"]) for pt in points]
    results = [row for rows in _run_points(_fig4_point, args, workers)
               for row in rows]

    columns = ["alpha0_sq", "qubit", "abar_sq", "k_r_mhz",
               "one_minus_ipr_diag", "band_lo", "band_hi", "dashed_acstark",
               "d_tilde_mhz"]
    rows = [tuple(r[c] for c in columns) for r in results]
    _require_finite([r["one_minus_ipr_diag"] for r in results], "fig4 IPR")

    params = _params_from_mhz(cfg["params"])
    regime = analytics.classify_regime(params)
    widen = cfg["options"]["band_widening"]
    checks = []
    values = {"regime": regime.regime, "points": len(results)}

    if regime.regime == "monotonic":
        inside = [r["band_lo"] * (1.0 - widen) <= r["one_minus_ipr_diag"]
                  <= r["band_hi"] * (1.0 + widen) for r in results]
        frac = sum(inside) / len(inside)
        checks.append(_check("diagonalized_ipr_within_widened_band",
                             frac, 1.0, 0.0, "ge"))
        lo, hi = cfg["options"]["slope_window"]
        kr_big = min(r["k_r_mhz"] for r in results)
        win = [r for r in results if r["qubit"] == 1
               and r["k_r_mhz"] == kr_big and lo <= r["abar_sq"] <= hi]
        if len(win) >= 3:
            x = np.array([r["abar_sq"] for r in win])
            y = np.array([r["one_minus_ipr_diag"] for r in win])
            slope = _log_slope(x, y)
            checks.append(_check("large_kerr_log_slope", slope, -1.0, 0.10, "rel"))
            values["large_kerr_log_slope"] = slope
            no_kerr = replace(params, kr=0.0)
            y_formula = 1.0 - np.array([analytics.ipr_large_kerr(
                no_kerr, displacements_for_alpha0(
                    no_kerr, math.sqrt(r["alpha0_sq"]),
                    cfg["truncations"]["bus_dim"] + 1), 1) for r in win])
            slope_formula = _log_slope(x, y_formula)
            checks.append(_check("analytic_band_log_slope", slope_formula,
                                 -1.0, 0.10, "rel"))
            values["analytic_band_log_slope"] = slope_formula
        values["band_containment_fraction"] = frac
    else:
        # near-resonant regime: the leakage peaks where the dressed qubit
        # detuning changes sign
        kr_big = min(r["k_r_mhz"] for r in results)
        q1 = sorted((r for r in results
                     if r["qubit"] == 1 and r["k_r_mhz"] == kr_big),
                    key=lambda r: r["alpha0_sq"])
        xs = np.array([r["alpha0_sq"] for r in q1])
        ys = np.array([r["one_minus_ipr_diag"] for r in q1])
        # Interior local maxima of the leakage curve; the resonance bump is
        # the one sitting at the detuning sign change.  A global argmax
        # would instead pick up any unrelated small-displacement bump.
        peaks = [float(xs[i]) for i in range(1, len(xs) - 1)
                 if ys[i] > ys[i - 1] and ys[i] > ys[i + 1]]
        cross = params.delta1 * (params.delta + params.chi) / (
            params.delta * params.chi)
        peak_x = min(peaks, key=lambda p: abs(p - cross)) if peaks \
            else float(xs[int(np.argmax(ys))])
        step = float(np.max(np.diff(xs))) if len(xs) > 1 else 0.0
        checks.append(_check("leakage_peak_at_detuning_zero_crossing",
                             peak_x, cross, step, "abs"))
        values.update({"peak_alpha0_sq": peak_x,
                       "local_maxima_alpha0_sq": peaks,
                       "detuning_zero_crossing": cross,
                       "grid_step": step})

    log = [f"alpha0_sq={r['alpha0_sq']:g} q{r['qubit']}: "
           f"1-IPR {r['one_minus_ipr_diag']:.4e} in "
           f"[{r['band_lo']:.4e}, {r['band_hi']:.4e}]" for r in results]
    return Bundle(pipeline="fig4_ipr", config=cfg,
                  tables={"ipr_band": (columns, rows)},
                  values=values, checks=checks, log=log)


# ---------------------------------------------------------------------------
# pipeline: two-qubit ZZ suppression (fig5_zz)


def _fig5_point(args: tuple) -> dict:
    params_mhz, point, trunc, _tol, _opt = args
    params = _params_from_mhz(params_mhz)
    a2 = float(point["alpha0_sq"])
    disp, _model, sol, match = _polaron_solution(
        params, a2, trunc["qubit_dim"], trunc["bus_dim"])
    chi12 = spectral.zz_shift(sol, match)
    baseline = analytics.chi12_ac_from(params, disp)
    return {
        "alpha0_sq": a2,
        "abar_sq": abs(disp.pointer_separation) ** 2,
        "chi12_numeric_mhz": chi12 / TWO_PI,
        "chi12_acstark_mhz": baseline / TWO_PI,
    }


def run_fig5_zz(cfg: dict, workers: int) -> Bundle:
    points = _sweep_points(cfg["sweep"])
    args = [(cfg["params"], pt, cfg["truncations"], cfg["tolerances"],
             cfg["options"]) for pt in points]
    results = _run_points(_fig5_point, args, workers)

    columns = ["alpha0_sq", "abar_sq", "chi12_numeric_mhz", "chi12_acstark_mhz"]
    rows = [tuple(r[c] for c in columns) for r in results]
    _require_finite([r["chi12_numeric_mhz"] for r in results], "fig5 ZZ")

    by_a2 = {r["alpha0_sq"]: r for r in results}
    a2_min = min(by_a2)
    a2_max = max(by_a2)
    undriven = by_a2[a2_min]
    rel0 = abs(undriven["chi12_numeric_mhz"] - undriven["chi12_acstark_mhz"]) \
        / abs(undriven["chi12_acstark_mhz"])
    decades = math.log10(abs(undriven["chi12_numeric_mhz"])
                         / abs(by_a2[a2_max]["chi12_numeric_mhz"]))
    checks = [
        _check("undriven_zz_matches_perturbative_formula", rel0, 0.0, 0.05, "abs"),
        _check("zz_suppression_decades", decades, 3.0, 0.0, "ge"),
    ]
    values = {
        "chi12_khz_undriven": undriven["chi12_numeric_mhz"] * 1e3,
        "chi12_khz_formula": undriven["chi12_acstark_mhz"] * 1e3,
        "suppression_decades": decades,
        "points": len(results),
    }
    log = [f"alpha0_sq={r['alpha0_sq']:g}: chi12 {r['chi12_numeric_mhz']:.4e} "
           f"MHz (tuned baseline {r['chi12_acstark_mhz']:.4e})" for r in results]
    return Bundle(pipeline="fig5_zz", config=cfg,
                  tables={"zz": (columns, rows)},
                  values=values, checks=checks, log=log)


# ---------------------------------------------------------------------------
# pipeline: phase-modulated exchange suppression, closed forms (fig6_pam)


def run_fig6_pam(cfg: dict, workers: int) -> Bundle:
    params = _params_from_mhz(cfg["params"])
    opt = cfg["options"]
    lam = opt["bessel_arg"]
    omega0 = TWO_PI * opt["omega0_mhz"]
    perturb = opt["perturbation"]
    bus_levels = cfg["truncations"]["bus_dim"] + 1

    columns = ["alpha0_sq", "abar_sq", "omega_m_mhz", "one_minus_ipr_static",
               "one_minus_ipr_pam", "one_minus_ipr_pam_lo",
               "one_minus_ipr_pam_hi", "floor"]
    rows = []
    results = []
    for a2 in cfg["sweep"]["alpha0_sq"]:
        disp = displacements_for_alpha0(params, math.sqrt(a2), bus_levels)
        abar = abs(disp.pointer_separation)
        omega_m = omega0 * abar
        static = 1.0 - analytics.ipr_static(params, disp, "1000")

        def pam_at(arg):
            pam = PamParams(bessel_arg=arg, omega_m=omega_m)
            return 1.0 - analytics.ipr_pam(params, disp, pam, j=1)

        entry = {
            "alpha0_sq": a2,
            "abar_sq": abar ** 2,
            "omega_m_mhz": omega_m / TWO_PI,
            "one_minus_ipr_static": static,
            "one_minus_ipr_pam": pam_at(lam),
            "one_minus_ipr_pam_lo": pam_at(lam * (1.0 - perturb)),
            "one_minus_ipr_pam_hi": pam_at(lam * (1.0 + perturb)),
            "floor": analytics.pam_floor(params.g1, omega_m),
        }
        rows.append(tuple(entry[c] for c in columns))
        results.append(entry)
    _require_finite([r["one_minus_ipr_pam"] for r in results], "fig6 PAM")

    big = [r for r in results if r["alpha0_sq"] >= 4.0]
    min_gain = min(r["one_minus_ipr_static"] / r["one_minus_ipr_pam"]
                   for r in big)
    stable = all(
        abs(r[key] - r["one_minus_ipr_pam"])
        < (r["one_minus_ipr_static"] - r["one_minus_ipr_pam"])
        for r in big for key in ("one_minus_ipr_pam_lo", "one_minus_ipr_pam_hi"))
    floor_ratio = min(r["one_minus_ipr_pam"] / r["floor"] for r in results)
    checks = [
        _check("modulation_suppression_factor", min_gain, 10.0, 0.0, "ge"),
        _check("suppression_insensitive_to_depth_perturbation",
               stable, True, None, "bool"),
        _check("analytic_floor_respected_within_factor_two",
               floor_ratio, 0.5, 0.0, "ge"),
    ]
    values = {"min_suppression_gain": min_gain,
              "min_floor_ratio": floor_ratio,
              "points": len(results)}
    log = [f"alpha0_sq={r['alpha0_sq']:g}: static {r['one_minus_ipr_static']:.4e}"
           f" -> modulated {r['one_minus_ipr_pam']:.4e}"
           f" (floor {r['floor']:.4e})" for r in results]
    return Bundle(pipeline="fig6_pam", config=cfg,
                  tables={"pam": (columns, rows)},
                  values=values, checks=checks, log=log)


# ---------------------------------------------------------------------------
# pipeline: flux-circuit realization (fig7_circuit)


def circuit_preset(name: str) -> dict:
    """Named circuit configurations for the two documented operating points.

    Both solve the junction energies so the cat-style reduction hits the
    quoted effective parameters (resonator Kerr -22.2 MHz from E_Cr = 0.2
    GHz and N = 3; target cross-Kerr by choosing the loop junction energy;
    drive amplitude chosen for a well amplitude alpha^2 = 2 at unit drive
    scale).  Frequencies in GHz.
    """
    presets = {
        # resolved operating point quoted with the circuit reduction
        "main": {"delta_mhz": 1e-3, "chi_mhz": -5.0},
        # near-resonant variant quoted alongside the appendix figure
        "appendix": {"delta_mhz": 19.9, "chi_mhz": -20.0},
    }
    if name not in presets:
        raise ConfigError(f"unknown circuit preset {name!r}")
    target = presets[name]
    n = 3
    e_cr = 0.2
    e_jn = 20.0
    zeta = 5.0 * math.pi / 6.0
    pi_zb = 0.2
    pi_zr = math.sqrt(2.0 * n * e_cr / e_jn)
    chi_ghz = target["chi_mhz"] * 1e-3
    e_jl = -chi_ghz / ((9.0 / 8.0) * pi_zb * pi_zr * math.sin(zeta))
    k_r = -e_cr / n ** 2
    # lambda_l = (9/64) pi_zb pi_zr^{3/2} Omega E_Jl cos(zeta);
    # alpha^2 = lambda_l / K_r = 2 fixes Omega, hence eps0 = 3 Omega omega_r/2
    omega_r = math.sqrt(8.0 * e_cr * e_jn / n) - e_cr
    coef = (9.0 / 64.0) * pi_zb * pi_zr ** 1.5 * e_jl * math.cos(zeta)
    omega_disp = 2.0 * k_r / coef
    eps0 = 1.5 * omega_disp * omega_r
    return {
        "e_cb": 0.2, "e_jb": 15.0, "e_cr": e_cr, "e_jl": e_jl,
        "e_j2": e_jl, "e_jn": e_jn, "n_junctions": n,
        "phi_s2": -math.pi - 2.0 * zeta, "phi_sn": 0.0,
        "phi_l": math.pi - 2.0 * zeta, "zeta": zeta,
        "z_b": pi_zb / math.pi, "z_r": pi_zr / math.pi,
        "eps0": eps0,
        "delta_mhz": target["delta_mhz"],
        "k_b_mhz": -300.0,
        "delta1_mhz": 7.0, "delta2_mhz": 14.0, "g_mhz": 2.0,
    }


def _fig7_point(args: tuple) -> dict:
    preset, point, trunc = args
    scale = float(point["drive_scale"])
    circ = circuit.CircuitParams.from_ghz(
        n_junctions=preset["n_junctions"],
        phi_s2=preset["phi_s2"], phi_sn=preset["phi_sn"],
        phi_l=preset["phi_l"], zeta=preset["zeta"],
        z_b=preset["z_b"], z_r=preset["z_r"],
        e_cb=preset["e_cb"], e_jb=preset["e_jb"], e_cr=preset["e_cr"],
        e_jl=preset["e_jl"], e_j2=preset["e_j2"], e_jn=preset["e_jn"],
        eps0=preset["eps0"] * scale)
    eff = circuit.derive_kerr_cat_params(circ, k_b=TWO_PI * preset["k_b_mhz"])
    delta = TWO_PI * preset["delta_mhz"]

    r_dim = int(4.0 * abs(eff.alpha_sq) + 14)
    layout = ModeLayout(("q1", "q2", "b", "r"),
                        (trunc["qubit_dim"], trunc["qubit_dim"],
                         trunc["bus_dim"], r_dim))
    h = circuit.kerr_cat_hamiltonian(eff, delta, layout)
    from .hilbert import mode_operator
    g = TWO_PI * preset["g_mhz"]
    exchange = None
    for j, det in ((1, preset["delta1_mhz"]), (2, preset["delta2_mhz"])):
        nq = mode_operator(layout, f"q{j}", "number")
        h = h + (TWO_PI * det) * nq
        qd = mode_operator(layout, f"q{j}", "create")
        b = mode_operator(layout, "b", "destroy")
        hop = g * (qd @ b)
        hop = hop + hop.dag()
        exchange = hop if exchange is None else exchange + hop
    h_full = h + exchange
    sol = spectral.eigensystem(h_full, h)
    match = spectral.match_states(sol)
    one_minus_ipr = 1.0 - spectral.ipr_numeric(sol, match, (1, 0, 0, 0))

    shift0 = circuit.kerr_cat_diagonal_shift(eff, delta, 0)
    shift1 = circuit.kerr_cat_diagonal_shift(eff, delta, 1)
    return {
        "drive_scale": scale,
        "alpha_sq": eff.alpha_sq,
        "k_r_mhz": eff.k_r / TWO_PI,
        "chi_mhz": eff.chi / TWO_PI,
        "one_minus_ipr": one_minus_ipr,
        "diag_shift_n0_mhz": shift0 / TWO_PI,
        "diag_shift_n1_mhz": shift1 / TWO_PI,
    }


def run_fig7_circuit(cfg: dict, workers: int) -> Bundle:
    preset = circuit_preset(cfg["options"]["preset"])
    points = _sweep_points(cfg["sweep"])
    args = [(preset, pt, cfg["truncations"]) for pt in points]
    results = _run_points(_fig7_point, args, workers)

    columns = ["drive_scale", "alpha_sq", "k_r_mhz", "chi_mhz",
               "one_minus_ipr", "diag_shift_n0_mhz", "diag_shift_n1_mhz"]
    rows = [tuple(r[c] for c in columns) for r in results]
    _require_finite([r["one_minus_ipr"] for r in results], "fig7 IPR")

    ordered = sorted(results, key=lambda r: r["alpha_sq"])
    monotone = all(a["one_minus_ipr"] > b["one_minus_ipr"]
                   for a, b in zip(ordered, ordered[1:]))
    shift_rel = max(abs(r["diag_shift_n0_mhz"] - r["diag_shift_n1_mhz"])
                    / max(abs(r["diag_shift_n0_mhz"]), 1e-300) for r in results)
    # analytic value of the common well shift: -K_r alpha^4 / 2
    ref = results[len(results) // 2]
    expected = -0.5 * (TWO_PI * ref["k_r_mhz"]) * ref["alpha_sq"] ** 2 / TWO_PI
    checks = [
        _check("leakage_monotone_decreasing_in_well_separation",
               monotone, True, None, "bool"),
        _check("bus_levels_share_diagonal_shift", shift_rel, 0.0, 1e-9, "abs"),
        _check("diagonal_shift_matches_closed_form",
               ref["diag_shift_n0_mhz"], expected, 1e-9, "rel"),
    ]
    values = {"max_shift_rel_difference": shift_rel,
              "alpha_sq_range": [ordered[0]["alpha_sq"],
                                 ordered[-1]["alpha_sq"]],
              "points": len(results)}
    log = [f"alpha_sq={r['alpha_sq']:.4g}: 1-IPR {r['one_minus_ipr']:.4e}, "
           f"shifts {r['diag_shift_n0_mhz']:.6g}/{r['diag_shift_n1_mhz']:.6g} MHz"
           for r in results]
    return Bundle(pipeline="fig7_circuit", config=cfg,
                  tables={"circuit_ipr": (columns, rows)},
                  values=values, checks=checks, log=log)


# ---------------------------------------------------------------------------
# pipeline: qubit dephasing estimates, overlap form vs IPR form


def _app_dephasing_point(args: tuple) -> dict:
    params_mhz, point, trunc, _tol, _opt = args
    params = _params_from_mhz(params_mhz)
    a2 = float(point["alpha0_sq"])
    disp, _model, sol, match = _polaron_solution(
        params, a2, trunc["qubit_dim"], trunc["bus_dim"])
    gamma_overlap = spectral.qubit_dephasing_rate(params, disp, sol, match, j=1)
    one_minus_ipr = 1.0 - spectral.ipr_numeric(sol, match, (1, 0, 0, 0))
    gamma_ipr = analytics.dephasing_estimate(params, disp, one_minus_ipr)
    return {
        "alpha0_sq": a2,
        "abar_sq": abs(disp.pointer_separation) ** 2,
        "one_minus_ipr": one_minus_ipr,
        "gamma_overlap_per_s": gamma_overlap,
        "gamma_ipr_per_s": gamma_ipr,
    }


def run_app_dephasing(cfg: dict, workers: int) -> Bundle:
    points = _sweep_points(cfg["sweep"])
    args = [(cfg["params"], pt, cfg["truncations"], cfg["tolerances"],
             cfg["options"]) for pt in points]
    results = _run_points(_app_dephasing_point, args, workers)

    columns = ["alpha0_sq", "abar_sq", "one_minus_ipr",
               "gamma_overlap_per_s", "gamma_ipr_per_s"]
    rows = [tuple(r[c] for c in columns) for r in results]
    _require_finite([r["gamma_overlap_per_s"] for r in results],
                    "dephasing rates")

    rel = max(abs(r["gamma_overlap_per_s"] - r["gamma_ipr_per_s"])
              / max(r["gamma_overlap_per_s"], r["gamma_ipr_per_s"])
              for r in results)
    checks = [_check("overlap_and_ipr_dephasing_forms_agree",
                     rel, 0.0, 0.20, "abs")]
    values = {"max_rel_difference": rel, "points": len(results)}
    log = [f"alpha0_sq={r['alpha0_sq']:g}: "
           f"gamma {r['gamma_overlap_per_s']:.4g} vs {r['gamma_ipr_per_s']:.4g} 1/s"
           for r in results]
    return Bundle(pipeline="app_dephasing", config=cfg,
                  tables={"dephasing": (columns, rows)},
                  values=values, checks=checks, log=log)


# ---------------------------------------------------------------------------
# pipelines: detuning modulation (app_ld) and combined modulation (app_pam_ld)


def run_app_ld(cfg: dict, workers: int) -> Bundle:
    params = _params_from_mhz(cfg["params"])
    opt = cfg["options"]
    z = opt["modulation_index"]
    omega_m = TWO_PI * opt["omega_m_mhz"]
    bus_levels = cfg["truncations"]["bus_dim"] + 1

    columns = ["alpha0_sq", "abar_sq", "one_minus_ipr_static",
               "one_minus_ipr_ld"]
    rows, results = [], []
    for a2 in cfg["sweep"]["alpha0_sq"]:
        disp = displacements_for_alpha0(params, math.sqrt(a2), bus_levels)
        entry = {
            "alpha0_sq": a2,
            "abar_sq": abs(disp.pointer_separation) ** 2,
            "one_minus_ipr_static": 1.0 - analytics.ipr_static(params, disp, "1000"),
            "one_minus_ipr_ld": 1.0 - analytics.ipr_ld(params, disp, z, omega_m),
        }
        rows.append(tuple(entry[c] for c in columns))
        results.append(entry)
    _require_finite([r["one_minus_ipr_ld"] for r in results], "LD IPR")

    big = [r for r in results if r["alpha0_sq"] >= 4.0]
    min_gain = min(r["one_minus_ipr_static"] / r["one_minus_ipr_ld"]
                   for r in big)
    checks = [_check("detuning_modulation_suppresses_leakage",
                     min_gain, 1.0, 0.0, "ge")]
    values = {"min_suppression_gain": min_gain, "points": len(results)}
    log = [f"alpha0_sq={r['alpha0_sq']:g}: static {r['one_minus_ipr_static']:.4e}"
           f" -> modulated {r['one_minus_ipr_ld']:.4e}" for r in results]
    return Bundle(pipeline="app_ld", config=cfg,
                  tables={"ld": (columns, rows)},
                  values=values, checks=checks, log=log)


def run_app_pam_ld(cfg: dict, workers: int) -> Bundle:
    params = _params_from_mhz(cfg["params"])
    opt = cfg["options"]
    bus_levels = cfg["truncations"]["bus_dim"] + 1
    omega0 = TWO_PI * opt["omega0_mhz"]
    z = opt["modulation_index"]
    omega_m_ld = TWO_PI * opt["omega_m_ld_mhz"]

    columns = ["alpha0_sq", "abar_sq", "one_minus_ipr_static",
               "one_minus_ipr_pam", "one_minus_ipr_combined"]
    rows, results = [], []
    for a2 in cfg["sweep"]["alpha0_sq"]:
        disp = displacements_for_alpha0(params, math.sqrt(a2), bus_levels)
        abar = abs(disp.pointer_separation)
        pam = PamParams(bessel_arg=opt["bessel_arg"], omega_m=omega0 * abar)
        entry = {
            "alpha0_sq": a2,
            "abar_sq": abar ** 2,
            "one_minus_ipr_static": 1.0 - analytics.ipr_static(params, disp, "1000"),
            "one_minus_ipr_pam": 1.0 - analytics.ipr_pam(params, disp, pam),
            "one_minus_ipr_combined":
                1.0 - analytics.ipr_pam_ld(params, disp, pam, z, omega_m_ld),
        }
        rows.append(tuple(entry[c] for c in columns))
        results.append(entry)
    _require_finite([r["one_minus_ipr_combined"] for r in results],
                    "combined modulation IPR")

    big = [r for r in results if r["alpha0_sq"] >= 4.0]
    min_gain = min(r["one_minus_ipr_static"] / r["one_minus_ipr_combined"]
                   for r in big)
    # the detuning sidebands redistribute weight over rung denominators, so
    # they can only add leakage on time average; the phase modulation still
    # dominates at a collision-free operating point
    max_excess = max(r["one_minus_ipr_combined"] / r["one_minus_ipr_pam"]
                     for r in results)
    checks = [
        _check("combined_modulation_suppresses_leakage", min_gain, 1.0, 0.0, "ge"),
        _check("detuning_sidebands_add_bounded_leakage",
               max_excess, 1.0, 0.5, "le"),
    ]
    values = {"min_suppression_gain": min_gain,
              "max_combined_over_pam": max_excess,
              "points": len(results)}
    log = [f"alpha0_sq={r['alpha0_sq']:g}: static {r['one_minus_ipr_static']:.4e}"
           f" -> combined {r['one_minus_ipr_combined']:.4e}" for r in results]
    return Bundle(pipeline="app_pam_ld", config=cfg,
                  tables={"pam_ld": (columns, rows)},
                  values=values, checks=checks, log=log)


# ---------------------------------------------------------------------------
# pipeline: metapotential grids


def run_metapotential(cfg: dict, workers: int) -> Bundle:
    opt = cfg["options"]
    delta = TWO_PI * cfg["params"]["delta"]
    chi = TWO_PI * cfg["params"]["chi"]
    eps = TWO_PI * opt["eps_mhz"]
    res = int(opt["resolution"])
    levels = [int(n) for n in opt["bus_levels"]]

    alphas = {n: eps / (delta + n * chi) for n in levels}
    reach = max(abs(a) for a in alphas.values())
    extent = opt["extent"] if opt["extent"] > 0 else 1.5 * reach + 1.0

    tables, checks, log = {}, [], []
    values = {"minima": {}}
    for n in levels:
        grid = circuit.metapotential(
            opt["model"], n, (-extent, extent), (-extent, extent),
            resolution=res, delta=delta, chi=chi, eps=eps,
            normalize=bool(opt["normalize"]))
        columns = ["i", "q", "value"]
        rows = [(float(i), float(q), float(grid.energy[qi, ij]))
                for qi, q in enumerate(grid.q_values)
                for ij, i in enumerate(grid.i_values)]
        tables[f"grid_n{n}"] = (columns, rows)
        step = float(grid.i_values[1] - grid.i_values[0])
        target = alphas[n]
        dist = math.hypot(grid.minimum[0] - target.real,
                          grid.minimum[1] - target.imag)
        checks.append(_check(f"minimum_at_conditioned_displacement_n{n}",
                             dist, 0.0, step, "abs"))
        values["minima"][str(n)] = {"i": grid.minimum[0], "q": grid.minimum[1],
                                    "expected_i": target.real,
                                    "expected_q": target.imag}
        log.append(f"level {n}: minimum at {grid.minimum}, conditioned "
                   f"displacement {target:.4g}")
    return Bundle(pipeline="metapotential", config=cfg, tables=tables,
                  values=values, checks=checks, log=log)


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class PipelineSpec:
    runner: Callable[[dict, int], Bundle]
    description: str
    runtime_estimate: str
    default_params: dict
    default_sweep: dict
    default_options: dict
    default_truncations: dict


PIPELINES: dict[str, PipelineSpec] = {
    "fig3_rabi": PipelineSpec(
        runner=run_fig3_rabi,
        description="Driven-bus Rabi rate and dephasing vs drive photon number",
        runtime_estimate="~15 min (serial), scales with --workers",
        default_params={**_CANONICAL_MHZ, "delta": -5.0, "kappa": 0.1,
                        "kr": 0.0, "g1": 0.0, "g2": 0.0},
        default_sweep={"alpha0_sq": [1.0, 2.0, 4.0, 6.0, 8.0],
                       "chi_mhz": [-5.0, -10.0, -20.0]},
        default_options={"omega_mhz": 1.0, "tau_ramp_ns": 5.0},
        default_truncations={"bus_dim": 3, "resonator_dim": None,
                             "qubit_dim": 1},
    ),
    "fig4_ipr": PipelineSpec(
        runner=run_fig4_ipr,
        description="Qubit participation ratio vs analytic suppression band",
        runtime_estimate="~2 min",
        default_params={**_CANONICAL_MHZ, "delta": -1.5},
        default_sweep={"alpha0_sq": {"start": 0.0, "stop": 10.0, "num": 21},
                       "kr_mhz": [0.0, -300.0, -1.0e5]},
        default_options={"band_widening": 0.2, "slope_window": [2.0, 8.0]},
        default_truncations={"bus_dim": 3, "resonator_dim": None,
                             "qubit_dim": 3},
    ),
    "fig5_zz": PipelineSpec(
        runner=run_fig5_zz,
        description="Two-qubit ZZ rate vs drive photon number",
        runtime_estimate="~5 min",
        default_params={**_CANONICAL_MHZ, "delta": -1.5},
        default_sweep={"alpha0_sq": {"start": 0.0, "stop": 10.0, "num": 21}},
        default_options={},
        default_truncations={"bus_dim": 3, "resonator_dim": None,
                             "qubit_dim": 3},
    ),
    "fig6_pam": PipelineSpec(
        runner=run_fig6_pam,
        description="Phase-modulated drive: closed-form leakage suppression",
        runtime_estimate="~10 s",
        default_params={**_CANONICAL_MHZ, "delta": -1.0, "kr": 0.0},
        default_sweep={"alpha0_sq": {"start": 1.0, "stop": 10.0, "num": 19}},
        default_options={"bessel_arg": BESSEL_J0_ZERO, "omega0_mhz": 200.0,
                         "perturbation": 0.1},
        default_truncations={"bus_dim": 2, "resonator_dim": None,
                             "qubit_dim": 2},
    ),
    "fig7_circuit": PipelineSpec(
        runner=run_fig7_circuit,
        description="Flux-circuit realization: leakage vs well amplitude",
        runtime_estimate="~1 min",
        default_params={},
        default_sweep={"drive_scale": [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.75]},
        default_options={"preset": "main"},
        default_truncations={"bus_dim": 2, "resonator_dim": None,
                             "qubit_dim": 2},
    ),
    "app_dephasing": PipelineSpec(
        runner=run_app_dephasing,
        description="Back-action dephasing: eigenstate overlap vs IPR estimate",
        runtime_estimate="~2 min",
        default_params={**_CANONICAL_MHZ, "delta": -1.5, "kappa": 0.1},
        default_sweep={"alpha0_sq": {"start": 0.5, "stop": 10.0, "num": 20}},
        default_options={},
        default_truncations={"bus_dim": 2, "resonator_dim": None,
                             "qubit_dim": 2},
    ),
    "app_ld": PipelineSpec(
        runner=run_app_ld,
        description="Detuning-modulated drive: closed-form leakage suppression",
        runtime_estimate="~10 s",
        default_params={**_CANONICAL_MHZ, "delta": -1.0, "kr": 0.0},
        default_sweep={"alpha0_sq": {"start": 1.0, "stop": 10.0, "num": 19}},
        default_options={"modulation_index": BESSEL_J0_ZERO,
                         "omega_m_mhz": 1000.0},
        default_truncations={"bus_dim": 2, "resonator_dim": None,
                             "qubit_dim": 2},
    ),
    "app_pam_ld": PipelineSpec(
        runner=run_app_pam_ld,
        description="Combined phase and detuning modulation, closed forms",
        runtime_estimate="~30 s",
        default_params={**_CANONICAL_MHZ, "delta": -1.0, "kr": 0.0},
        default_sweep={"alpha0_sq": {"start": 1.0, "stop": 10.0, "num": 10}},
        default_options={"bessel_arg": BESSEL_J0_ZERO, "omega0_mhz": 500.0,
                         "modulation_index": 0.5,
                         "omega_m_ld_mhz": 10.0},
        default_truncations={"bus_dim": 2, "resonator_dim": None,
                             "qubit_dim": 2},
    ),
    "metapotential": PipelineSpec(
        runner=run_metapotential,
        description="Classical resonator energy landscape per bus level",
        runtime_estimate="~5 s",
        default_params={"delta": -5.0, "chi": -20.0},
        default_sweep={},
        default_options={"model": "simple", "eps_mhz": -15.0,
                         "bus_levels": [0, 1], "resolution": 201,
                         "extent": 0.0, "normalize": True},
        default_truncations={"bus_dim": 2, "resonator_dim": None,
                             "qubit_dim": 1},
    ),
}


def pipeline_listing() -> str:
    """Plain-text table of pipelines, key knobs, and runtime estimates."""
    header = f"{'pipeline':<15} {'runtime':<40} description"
    lines = [header, "-" * len(header)]
    for name, spec in PIPELINES.items():
        lines.append(f"{name:<15} {spec.runtime_estimate:<40} "
                     f"{spec.description}")
        knobs = ", ".join(sorted(spec.default_sweep)) or "(none)"
        lines.append(f"{'':<15} sweep axes: {knobs}")
    return "\n".join(lines)


def run_config(raw_config: dict, workers: int = 1) -> Bundle:
    """Resolve, execute, and time a pipeline config."""
    cfg = resolve_config(raw_config)
    spec = PIPELINES[cfg["pipeline"]]
    start = time.monotonic()
    bundle = spec.runner(cfg, workers)
    bundle.runtime_s = time.monotonic() - start
    return bundle
