"""Assemble the threshold, squeezing and efficiency tables and plot series
that the CLI prints and serializes."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .detection import chain_efficiency, linear_to_db, loss_budget
from .experiment import MODES, ExperimentConfig, GainCurve, fit_result_dict, fit_threshold, load_gain_csv
from .basis import BeamGeometry
from .errors import DataError
from .opa import classical_gain, gain_vs_temperature, phase_scan, relative_threshold
from .overlap import OverlapTable, PumpProfile

PROVENANCE = {
    "overlap": "Gamma_ni = int u_n^2/alpha_n * v_2i dx, alpha_n^2 = int u_n^4 dx; pump waist = signal waist / sqrt(2); "
               "128-node Gauss-Hermite quadrature",
    "threshold_theory": "P_thr(n)/P_thr(0) = (alpha_0/alpha_n)^2 / kappa_n^2, kappa_n = sum_j c_j <u_n^2/alpha_n, v_j> "
                        "for the pump coefficients c_j (TEM00 pump: kappa_n = Gamma_n0)",
    "threshold_fit": "slope-ratio: linear fit of 1 - G^-1/2 against sqrt(P) on the lowest k points, "
                     "P_thr = (s_ref/s)^2 P_thr,ref; model-fit: least squares of G = 1/(1 - sqrt(P/P_thr))^2",
    "gain": "G = 1/(1 -+ sqrt(s(T) P/P_thr))^2 with s(T) = sinc^2(b (T - T_opt)), b set by the FWHM of |G - 1|",
    "squeezing": "V+- = 1 +- eta_esc 4 sqrt(P/P_thr) / (1 -+ sqrt(P/P_thr))^2 at zero frequency",
    "inferred": "V_source = 1 + (V - 1)/eta, eta = eta_prop eta_det eta_hd",
    "efficiency": "eta = (Vs + Va - 1 - Vs Va)/(Vs + Va - 2); eta_total = eta_cav eta_prop eta_det eta_hd",
    "cavity_backout": "eta_cav = eta / (eta_prop eta_det eta_hd)",
    "phase_scan": "V(theta) = V- cos^2 theta + V+ sin^2 theta",
}


def threshold_table(cfg: ExperimentConfig, overlap: OverlapTable, curves: dict[int, GainCurve] | None = None,
                    method: str = "slope-ratio", points: int | None = None) -> dict:
    """Relative thresholds: theory always, fitted values when gain curves are given."""
    points = cfg.fit_points if points is None else points
    tem00 = PumpProfile.tem(0)
    theory = []
    for n in MODES:
        g0 = float(overlap.gamma[n, 0])
        theory.append({
            "order": n,
            "relative_threshold": relative_threshold(n, tem00, overlap),
            "overlap_factor": 1.0 / g0**2,
            "local_intensity_factor": overlap.local_intensity_factor(n),
        })
    out = {"theoretical": theory, "experimental": None, "method": method, "fit_points": points}
    if not curves:
        return out
    if method == "slope-ratio" and 0 not in curves:
        raise DataError("slope-ratio needs the TEM00 reference gain curve")
    ref_thr = cfg.threshold_mw_00
    exp = []
    for n in sorted(curves):
        if n == 0 and method == "slope-ratio":
            exp.append({"order": 0, "relative_threshold": 1.0, "uncertainty": 0.0, "fit": None})
            continue
        r = fit_threshold(curves[n], method, curves.get(0), ref_thr, points)
        exp.append({
            "order": n,
            "relative_threshold": r.threshold_mw / ref_thr,
            "uncertainty": r.uncertainty_mw / ref_thr,
            "fit": fit_result_dict(r),
        })
    out["experimental"] = exp
    return out


def squeezing_tables(cfg: ExperimentConfig) -> dict:
    """Loss budgets per mode plus the corrected/inferred/calculated rows and efficiency comparison."""
    budgets = [loss_budget(cfg.measurement(n), cfg.chain(n), cfg.eta_cav, cfg.p_ratio(n)) for n in MODES]

    def row(key):
        return [{
            "order": b["order"],
            "squeezing_db": b[f"{key}_db"]["squeezing"],
            "anti_squeezing_db": b[f"{key}_db"]["anti_squeezing"],
            "squeezing_linear": b[f"{key}_linear"]["squeezing"],
            "anti_squeezing_linear": b[f"{key}_linear"]["anti_squeezing"],
        } for b in budgets]

    return {
        "loss_budget": budgets,
        "table2": {"corrected": row("corrected"), "inferred": row("inferred"), "calculated": row("calculated")},
        "table3": {
            "estimated": [{"order": b["order"], "value": b["eta_estimated"], "err": b["eta_estimated_err"]} for b in budgets],
            "calculated": [{"order": b["order"], "value": b["eta_calculated"]} for b in budgets],
        },
        "eta_cav_backout": [{"order": b["order"], "value": b["eta_cav_backout"], "err": b["eta_cav_backout_err"]}
                            for b in budgets],
    }


def phase_scan_series(cfg: ExperimentConfig, step_deg: float = 2.0) -> dict:
    """LO phase scan (i), QNL (ii) and locked squeezed level (iii) per mode, from the corrected variances."""
    theta = np.arange(0.0, 360.0 + step_deg / 2, step_deg)
    out = {}
    for n in MODES:
        m = cfg.measurement(n)
        v = phase_scan(np.deg2rad(theta), m.v_sq, m.v_asq)
        # cos/sin are exact only at multiples of 90 deg up to rounding; pin the quadrature endpoints
        v[np.isclose(theta % 180.0, 0.0)] = m.v_sq
        v[np.isclose(theta % 180.0, 90.0)] = m.v_asq
        out[f"{n}0"] = {
            "theta_deg": theta.tolist(),
            "variance_linear": v.tolist(),
            "variance_db": linear_to_db(v).tolist(),
            "qnl_db": 0.0,
            "locked_db": m.squeezing_db,
        }
    return out


def gain_series(cfg: ExperimentConfig, span_c: float = 3.0, step_c: float = 0.02, pump_points: int = 51) -> dict:
    """Gain against crystal temperature at the configured pump, and against pump power at optimum temperature."""
    offsets = np.arange(-round(span_c / step_c), round(span_c / step_c) + 1) * step_c
    out = {}
    for n in MODES:
        spec = cfg.phase_match(n)
        p = cfg.p_ratio(n)
        temps = spec.t_opt + offsets
        amp = gain_vs_temperature(temps, spec, p, "amplify")
        de = gain_vs_temperature(temps, spec, p, "deamplify")
        thr = cfg.threshold_mw(n)
        pmax = min(cfg.pump_cap_mw, thr)
        pumps = np.linspace(0.0, pmax, pump_points)
        ratios = pumps / thr
        below = ratios < 1.0
        out[f"{n}0"] = {
            "temperature_c": temps.tolist(),
            "gain_amplify_vs_temperature": np.atleast_1d(amp).tolist(),
            "gain_deamplify_vs_temperature": np.atleast_1d(de).tolist(),
            "pump_mw": pumps.tolist(),
            "gain_deamplify_vs_pump": np.atleast_1d(classical_gain(ratios, "deamplify")).tolist(),
            "pump_mw_amplify": pumps[below].tolist(),
            "gain_amplify_vs_pump": np.atleast_1d(classical_gain(ratios[below], "amplify")).tolist(),
            "t_opt_c": spec.t_opt,
            "fwhm_c": spec.fwhm,
            "p_ratio": p,
        }
    return out


def load_curves(data_dir) -> dict[int, GainCurve]:
    """Gain curves named ``gain_tem00.csv``, ``gain_tem10.csv``, ``gain_tem20.csv`` found in ``data_dir``."""
    curves = {}
    d = Path(data_dir)
    for n in MODES:
        f = d / f"gain_tem{n}0.csv"
        if f.exists():
            curves[n] = load_gain_csv(f, n)
    return curves


def report_bundle(cfg: ExperimentConfig, data_dir=None, max_order: int = 2, method: str = "slope-ratio",
                  points: int | None = None) -> dict:
    overlap = OverlapTable.compute(max(max_order, max(MODES)), BeamGeometry(cfg.signal_waist_um))
    curves = load_curves(data_dir) if data_dir is not None and Path(data_dir).is_dir() else {}
    sq = squeezing_tables(cfg)
    return {
        "schema_version": 1,
        "config": cfg.as_dict(),
        "overlap": overlap.to_dict(),
        "table1": threshold_table(cfg, overlap, curves or None, method, points),
        "table2": sq["table2"],
        "table3": sq["table3"],
        "eta_cav_backout": sq["eta_cav_backout"],
        "loss_budget": sq["loss_budget"],
        "series": {"gain": gain_series(cfg), "phase_scan": phase_scan_series(cfg)},
        "provenance": {"equations": PROVENANCE, "data_dir_used": bool(curves),
                       "curves": sorted(f"{n}0" for n in curves)},
    }


def format_overlap(table: OverlapTable, waist=None) -> str:
    lines = [] if waist is None else [f"signal waist {waist:g}, pump waist {waist / math.sqrt(2):g}"]
    lines.append("n   alpha_n    Gamma_n0..Gamma_n(2n)")
    for n in range(table.max_order + 1):
        gs = "  ".join(f"{g:6.4f}" for g in table.gamma[n, : n + 1])
        lines.append(f"{n:<3d} {table.alpha[n]:8.6f}   {gs}")
    return "\n".join(lines) + "\n"


def format_threshold(t1: dict) -> str:
    head = f"{'':14s}" + "".join(f"{'TEM' + str(r['order']) + '0':>14s}" for r in t1["theoretical"])
    lines = [head]
    if t1["experimental"]:
        cells = {r["order"]: f"{r['relative_threshold']:.2f} +- {r['uncertainty']:.2f}" for r in t1["experimental"]}
        lines.append(f"{'Experimental':14s}" + "".join(f"{cells.get(r['order'], '-'):>14s}" for r in t1["theoretical"]))
    lines.append(f"{'Theoretical':14s}" + "".join(f"{r['relative_threshold']:14.3f}" for r in t1["theoretical"]))
    lines.append(f"{'1/Gamma_n0^2':14s}" + "".join(f"{r['overlap_factor']:14.3f}" for r in t1["theoretical"]))
    lines.append(f"{'(a0/an)^2':14s}" + "".join(f"{r['local_intensity_factor']:14.3f}" for r in t1["theoretical"]))
    return "\n".join(lines) + "\n"


def format_squeezing(sq: dict) -> str:
    t2 = sq["table2"]
    lines = [f"{'':14s}" + "".join(f"{'TEM' + str(r['order']) + '0':>16s}" for r in t2["corrected"])]
    for label, key in (("a) Corrected", "corrected"), ("b) Inferred", "inferred"), ("c) Calculated", "calculated")):
        lines.append(f"{label:14s}" + "".join(
            f"{r['squeezing_db']:+8.2f}{r['anti_squeezing_db']:+8.2f}" for r in t2[key]))
    lines.append("")
    t3 = sq["table3"]
    lines.append(f"{'Est. eff.':14s}" + "".join(f"{r['value']:10.3f} +- {r['err']:.2f}" for r in t3["estimated"]))
    lines.append(f"{'Cal. eff.':14s}" + "".join(f"{r['value']:18.3f}" for r in t3["calculated"]))
    lines.append(f"{'eta_cav':14s}" + "".join(f"{r['value']:10.3f} +- {r['err']:.2f}" for r in sq["eta_cav_backout"]))
    return "\n".join(lines) + "\n"


def is_finite_tree(obj) -> bool:
    if isinstance(obj, float):
        return math.isfinite(obj)
    if isinstance(obj, dict):
        return all(is_finite_tree(v) for v in obj.values())
    if isinstance(obj, (list, tuple)):
        return all(is_finite_tree(v) for v in obj)
    return True
