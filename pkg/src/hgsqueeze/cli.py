"""``hgsqueeze`` command line.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .basis import BeamGeometry
from .errors import DataError, NumericError
from .experiment import (MODES, ExperimentConfig, fit_result_dict, fit_threshold, load_config, load_gain_csv)
from .overlap import OverlapTable
from .tables import (format_overlap, format_squeezing, format_threshold, gain_series, load_curves,
                     phase_scan_series, report_bundle, squeezing_tables, threshold_table)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

log = logging.getLogger("hgsqueeze")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _write(path, text):
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def _emit_json(args, payload):
    if args.json:
        _write(args.json, dumps(payload))


def _config(args) -> ExperimentConfig:
    return load_config(args.config) if args.config else ExperimentConfig()


def _out_dir(args):
    if not args.out_dir:
        return None
    d = Path(args.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d


def cmd_overlap(args, out):
    cfg = _config(args)
    table = OverlapTable.compute(args.max_order, BeamGeometry(cfg.signal_waist_um))
    out.write(format_overlap(table, cfg.signal_waist_um))
    _emit_json(args, table.to_dict())
    return table


def _parse_gain_specs(specs):
    curves = {}
    for spec in specs or []:
        mode, sep, path = spec.partition("=")
        if not sep or mode not in {f"{n}0" for n in MODES}:
            raise DataError(f"--gain-csv expects MODE=PATH with MODE in 00, 10, 20; got {spec!r}")
        n = int(mode[0])
        curves[n] = load_gain_csv(path, n)
    return curves


def cmd_threshold(args, out):
    cfg = _config(args)
    curves = load_curves(args.data_dir) if args.data_dir else {}
    curves.update(_parse_gain_specs(args.gain_csv))
    points = args.fit_points if args.fit_points is not None else cfg.fit_points
    t1 = threshold_table(cfg, OverlapTable.compute(max(MODES), BeamGeometry(cfg.signal_waist_um)), curves or None,
                         args.method, points)
    out.write(format_threshold(t1))
    _emit_json(args, t1)
    return t1


def cmd_squeeze(args, out):
    cfg = _config(args)
    sq = squeezing_tables(cfg)
    sq["phase_scan"] = phase_scan_series(cfg)
    out.write(format_squeezing(sq))
    _emit_json(args, sq)
    d = _out_dir(args)
    if d is not None:
        for mode, s in sq["phase_scan"].items():
            lines = ["sample,variance_db,trace_id"]
            lines += [f"{t!r},{v!r},i" for t, v in zip(s["theta_deg"], s["variance_db"])]
            lines += [f"{t!r},{0.0!r},ii" for t in s["theta_deg"]]
            lines += [f"{t!r},{s['locked_db']!r},iii" for t in s["theta_deg"]]
            _write(d / f"phase_scan_tem{mode}.csv", "\n".join(lines) + "\n")
    return sq


def cmd_gain(args, out):
    cfg = _config(args)
    series = gain_series(cfg)
    for mode, s in series.items():
        peak = s["temperature_c"][max(range(len(s["temperature_c"])), key=s["gain_amplify_vs_temperature"].__getitem__)]
        out.write(f"TEM{mode}: peak gain {max(s['gain_amplify_vs_temperature']):.3f} at {peak:.2f} C, "
                  f"P/P_thr = {s['p_ratio']:.4f}\n")
    _emit_json(args, series)
    d = _out_dir(args)
    if d is not None:
        for mode, s in series.items():
            rows = zip(s["temperature_c"], s["gain_amplify_vs_temperature"], s["gain_deamplify_vs_temperature"])
            _write(d / f"gain_vs_temperature_tem{mode}.csv",
                   "temperature_c,gain_amplify,gain_deamplify\n" + "".join(f"{t!r},{a!r},{b!r}\n" for t, a, b in rows))
            lines = ["pump_mw,gain,phase"]
            lines += [f"{p!r},{g!r},amplify" for p, g in zip(s["pump_mw_amplify"], s["gain_amplify_vs_pump"])]
            lines += [f"{p!r},{g!r},deamplify" for p, g in zip(s["pump_mw"], s["gain_deamplify_vs_pump"])]
            _write(d / f"gain_vs_pump_tem{mode}.csv", "\n".join(lines) + "\n")
    return series


def cmd_fit(args, out):
    cfg = _config(args)
    curve = load_gain_csv(args.csv)
    ref = load_gain_csv(args.reference) if args.reference else None
    ref_thr = args.reference_threshold_mw if args.reference_threshold_mw is not None else cfg.threshold_mw_00
    points = args.fit_points if args.fit_points is not None else cfg.fit_points
    r = fit_threshold(curve, args.method, ref, ref_thr, points)
    out.write(f"threshold = {r.threshold_mw:.2f} +- {r.uncertainty_mw:.2f} mW ({r.method}, {r.points} points, "
              f"residual norm {r.residual_norm:.3g})\n")
    _emit_json(args, fit_result_dict(r))
    return r


def cmd_report(args, out):
    cfg = _config(args)
    bundle = report_bundle(cfg, args.data_dir, args.max_order, args.method,
                           args.fit_points if args.fit_points is not None else None)
    text = dumps(bundle)
    if args.json:
        _write(args.json, text)
        meta = {"generated_at": _dt.datetime.now(_dt.timezone.utc).isoformat(), "version": __version__}
        _write(str(args.json) + ".meta.json", dumps(meta))
    else:
        out.write(text)
    return bundle


def _global_options(p: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--config", metavar="PATH", default=d(None), help="key = value experiment config")
    p.add_argument("--json", metavar="PATH", default=d(None), help="also write machine-readable JSON here")
    p.add_argument("--out-dir", metavar="PATH", default=d(None), help="directory for plot-ready CSV series")
    p.add_argument("--max-order", metavar="N", type=int, default=d(2), help="highest signal mode order (default 2)")
    p.add_argument("--fit-points", metavar="K", type=int, default=d(None),
                   help="points used by the slope-ratio fit (default: config fit_points)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hgsqueeze", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("overlap", parents=[common], help="alpha_n and Gamma_ni table")
    p = sub.add_parser("threshold", parents=[common], help="relative thresholds, theory and fitted")
    p.add_argument("--gain-csv", action="append", metavar="MODE=PATH", help="gain curve for mode 00, 10 or 20")
    p.add_argument("--data-dir", metavar="DIR", help="directory holding gain_tem00.csv, gain_tem10.csv, gain_tem20.csv")
    p.add_argument("--method", choices=["slope-ratio", "model-fit"], default="slope-ratio")
    sub.add_parser("squeeze", parents=[common], help="squeezing, inferred and calculated variances; efficiencies")
    sub.add_parser("gain", parents=[common], help="gain against temperature and pump power")
    p = sub.add_parser("fit", parents=[common], help="fit the threshold of one gain curve")
    p.add_argument("csv", help="gain curve CSV (pump_mw,gain)")
    p.add_argument("--method", choices=["model-fit", "slope-ratio"], default="model-fit")
    p.add_argument("--reference", metavar="CSV", help="reference (TEM00) curve for slope-ratio")
    p.add_argument("--reference-threshold-mw", type=float, help="threshold of the reference curve")
    p = sub.add_parser("report", parents=[common], help="all tables and series as one JSON bundle")
    p.add_argument("--data-dir", metavar="DIR", help="directory with gain curves (omit for theory only)")
    p.add_argument("--method", choices=["slope-ratio", "model-fit"], default="slope-ratio")
    return parser


COMMANDS = {
    "overlap": cmd_overlap,
    "threshold": cmd_threshold,
    "squeeze": cmd_squeeze,
    "gain": cmd_gain,
    "fit": cmd_fit,
    "report": cmd_report,
}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    if args.max_order < 0:
        print("error: --max-order must be non-negative", file=sys.stderr)
        return EXIT_USAGE
    try:
        COMMANDS[args.command](args, out)
    except (DataError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
