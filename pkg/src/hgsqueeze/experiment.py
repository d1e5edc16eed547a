"""Experiment configuration, CSV data files and threshold estimation."""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.stats import linregress

from .detection import DetectionChain, SqueezingMeasurement, correct_electronic_noise, db_to_linear, linear_to_db
from .errors import ConfigError, CsvFormatError, DataError, FitError
from .opa import OpaParams, PhaseMatchSpec

log = logging.getLogger(__name__)

MODES = (0, 1, 2)


def _sfx(n: int) -> str:
    return f"{n}0"


@dataclass(frozen=True)
class ExperimentConfig:
    """Experimental constants; defaults are the values of the reference OPA experiment.

    Keys ending in ``_00/_10/_20`` are per TEM_n0 mode.  ``sqz_db_*`` and
    ``asqz_db_*`` are the measured variances after electronic-noise
    correction.  ``threshold_mw_10/20`` are estimated thresholds used by the
    squeezing model.
    """

    signal_waist_um: float = 24.0
    output_coupler_t: float = 0.04
    intra_cavity_loss: float = 0.0043
    eta_cav: float = 0.89
    threshold_mw_00: float = 260.0
    threshold_mw_10: float = 1000.0
    threshold_mw_20: float = 1600.0
    pump_mw_00: float = 100.0
    pump_mw_10: float = 300.0
    pump_mw_20: float = 300.0
    t_opt_00: float = 62.1
    t_opt_10: float = 61.6
    t_opt_20: float = 60.6
    fwhm_c: float = 1.0
    eta_prop: float = 0.97
    eta_prop_err: float = 0.02
    eta_det: float = 0.93
    eta_det_err: float = 0.05
    eta_hd_00: float = 0.98
    eta_hd_10: float = 0.95
    eta_hd_20: float = 0.91
    eta_hd_err: float = 0.02
    electronic_floor_db: float = -9.1
    pump_cap_mw: float = 350.0
    sqz_db_00: float = -4.0
    asqz_db_00: float = 8.5
    sqz_db_10: float = -2.6
    asqz_db_10: float = 5.4
    sqz_db_20: float = -1.5
    asqz_db_20: float = 2.7
    fit_points: int = 3

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise ConfigError(f"{f.name} must be finite", key=f.name)
        fractions = ["output_coupler_t", "eta_cav", "eta_prop", "eta_det", "eta_hd_00", "eta_hd_10", "eta_hd_20"]
        for k in fractions:
            if not 0.0 < getattr(self, k) <= 1.0:
                raise ConfigError(f"{k} = {getattr(self, k)} out of range (0, 1]", key=k)
        if not 0.0 <= self.intra_cavity_loss < 1.0:
            raise ConfigError(f"intra_cavity_loss = {self.intra_cavity_loss} out of range [0, 1)", key="intra_cavity_loss")
        positive = ["signal_waist_um", "threshold_mw_00", "threshold_mw_10", "threshold_mw_20", "fwhm_c", "pump_cap_mw",
                    "t_opt_00", "t_opt_10", "t_opt_20"]
        for k in positive:
            if not getattr(self, k) > 0:
                raise ConfigError(f"{k} = {getattr(self, k)} must be positive", key=k)
        for k in ["pump_mw_00", "pump_mw_10", "pump_mw_20", "eta_prop_err", "eta_det_err", "eta_hd_err"]:
            if getattr(self, k) < 0:
                raise ConfigError(f"{k} = {getattr(self, k)} must be non-negative", key=k)
        for n in MODES:
            s, a = self.sqz_db(n), self.asqz_db(n)
            if not s < 0 < a:
                raise ConfigError(f"sqz_db_{_sfx(n)} must be < 0 and asqz_db_{_sfx(n)} > 0", key=f"sqz_db_{_sfx(n)}")
        if not self.electronic_floor_db < min(self.sqz_db(n) for n in MODES):
            raise ConfigError("electronic_floor_db must lie below every squeezing level", key="electronic_floor_db")
        if self.fit_points < 2:
            raise ConfigError("fit_points must be at least 2", key="fit_points")

    def _mode(self, prefix, n):
        if n not in MODES:
            raise KeyError(f"mode order {n} not configured")
        return getattr(self, f"{prefix}_{_sfx(n)}")

    def threshold_mw(self, n): return self._mode("threshold_mw", n)
    def pump_mw(self, n): return self._mode("pump_mw", n)
    def t_opt(self, n): return self._mode("t_opt", n)
    def eta_hd(self, n): return self._mode("eta_hd", n)
    def sqz_db(self, n): return self._mode("sqz_db", n)
    def asqz_db(self, n): return self._mode("asqz_db", n)

    def p_ratio(self, n: int) -> float:
        return self.pump_mw(n) / self.threshold_mw(n)

    def chain(self, n: int) -> DetectionChain:
        return DetectionChain(self.eta_prop, self.eta_det, self.eta_hd(n),
                              self.eta_prop_err, self.eta_det_err, self.eta_hd_err)

    def measurement(self, n: int) -> SqueezingMeasurement:
        return SqueezingMeasurement(n, self.sqz_db(n), self.asqz_db(n), self.electronic_floor_db)

    def phase_match(self, n: int) -> PhaseMatchSpec:
        return PhaseMatchSpec(self.t_opt(n), self.fwhm_c)

    def opa_params(self, n: int = 0) -> OpaParams:
        return OpaParams(self.output_coupler_t, self.intra_cavity_loss, self.threshold_mw_00, self.pump_mw(n))

    @property
    def electronic_floor(self) -> float:
        return db_to_linear(self.electronic_floor_db)

    def as_dict(self) -> dict:
        return asdict(self)


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def parse_config(text: str) -> ExperimentConfig:
    """Parse flat ``key = value`` text; ``#`` starts a comment."""
    values: dict = {}
    lines: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, _, val = (p.strip() for p in line.partition("="))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown key {key!r}", key=key, line=lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", key=key, line=lineno)
        try:
            values[key] = int(val) if _FIELD_TYPES[key] in (int, "int") else float(val)
        except ValueError:
            raise ConfigError(f"cannot parse value {val!r} for {key!r}", key=key, line=lineno) from None
        lines[key] = lineno
    try:
        return ExperimentConfig(**values)
    except ConfigError as exc:
        if exc.key in lines:
            raise ConfigError(str(exc), key=exc.key, line=lines[exc.key]) from None
        raise


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def dump_config(cfg: ExperimentConfig) -> str:
    # repr() round-trips floats exactly
    return "".join(f"{k} = {v!r}\n" for k, v in cfg.as_dict().items())


@dataclass(frozen=True)
class GainCurve:
    pump_mw: np.ndarray
    gain: np.ndarray
    order: int | None = None
    resorted: bool = False

    def __post_init__(self):
        p = np.asarray(self.pump_mw, dtype=float)
        g = np.asarray(self.gain, dtype=float)
        if p.shape != g.shape or p.ndim != 1 or p.size == 0:
            raise CsvFormatError("gain curve needs equal-length, non-empty power and gain columns")
        if np.any(np.diff(p) <= 0):
            raise CsvFormatError("pump powers must be strictly increasing")
        if np.any(g <= 0) or np.any(p < 0):
            raise CsvFormatError("gains must be positive and powers non-negative")
        object.__setattr__(self, "pump_mw", p)
        object.__setattr__(self, "gain", g)


@dataclass(frozen=True)
class Trace:
    """Noise trace(s) in dB relative to the QNL, grouped by ``trace_id``."""

    sample: np.ndarray
    variance_db: np.ndarray
    trace_id: tuple = field(default=())
    resorted: bool = False

    def ids(self):
        return sorted(set(self.trace_id)) if self.trace_id else [""]

    def select(self, trace_id: str):
        if not self.trace_id:
            return self.sample, self.variance_db
        mask = np.array([t == trace_id for t in self.trace_id])
        return self.sample[mask], self.variance_db[mask]


def _read_rows(path, expected_headers):
    text = Path(path).read_text(encoding="utf-8")
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise CsvFormatError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if header not in expected_headers:
        want = " or ".join(",".join(h) for h in expected_headers)
        raise CsvFormatError(f"{path}: header must be {want}, got {','.join(header)}")
    body = rows[1:]
    if not body:
        raise CsvFormatError(f"{path}: no data rows")
    for i, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise CsvFormatError(f"{path}: line {i} has {len(r)} cells, expected {len(header)}")
    return header, body


def _num(path, lineno, cell):
    try:
        v = float(cell)
    except ValueError:
        raise CsvFormatError(f"{path}: line {lineno}: non-numeric cell {cell!r}") from None
    if not math.isfinite(v):
        raise CsvFormatError(f"{path}: line {lineno}: non-finite cell {cell!r}")
    return v


def load_gain_csv(path, order: int | None = None) -> GainCurve:
    """Read ``pump_mw,gain``.  Unsorted rows are sorted and flagged with ``resorted``."""
    _, body = _read_rows(path, [["pump_mw", "gain"]])
    data = np.array([[_num(path, i, c) for c in r] for i, r in enumerate(body, start=2)])
    order_idx = np.argsort(data[:, 0], kind="stable")
    resorted = bool(np.any(order_idx != np.arange(len(order_idx))))
    if resorted:
        log.warning("%s: rows were not sorted by pump power; sorted on load", path)
    data = data[order_idx]
    if np.any(np.diff(data[:, 0]) <= 0):
        raise CsvFormatError(f"{path}: repeated pump power; powers must be strictly increasing")
    return GainCurve(data[:, 0], data[:, 1], order, resorted)


def load_trace_csv(path) -> Trace:
    """Read ``sample,variance_db[,trace_id]``, sorted by (trace_id, sample)."""
    header, body = _read_rows(path, [["sample", "variance_db"], ["sample", "variance_db", "trace_id"]])
    with_id = len(header) == 3
    recs = []
    for i, r in enumerate(body, start=2):
        tid = r[2].strip() if with_id else ""
        recs.append((tid, _num(path, i, r[0]), _num(path, i, r[1])))
    ordered = sorted(recs, key=lambda t: (t[0], t[1]))
    resorted = ordered != recs
    if resorted:
        log.warning("%s: rows were not sorted; sorted on load", path)
    for a, b in zip(ordered, ordered[1:]):
        if a[0] == b[0] and a[1] == b[1]:
            raise CsvFormatError(f"{path}: duplicate sample {a[1]!r} in trace {a[0]!r}")
    return Trace(
        np.array([r[1] for r in ordered]),
        np.array([r[2] for r in ordered]),
        tuple(r[0] for r in ordered) if with_id else (),
        resorted,
    )


def write_gain_csv(curve: GainCurve) -> str:
    return "pump_mw,gain\n" + "".join(f"{p!r},{g!r}\n" for p, g in zip(curve.pump_mw.tolist(), curve.gain.tolist()))


def write_trace_csv(trace: Trace) -> str:
    if trace.trace_id:
        rows = zip(trace.sample.tolist(), trace.variance_db.tolist(), trace.trace_id)
        return "sample,variance_db,trace_id\n" + "".join(f"{s!r},{v!r},{t}\n" for s, v, t in rows)
    return "sample,variance_db\n" + "".join(f"{s!r},{v!r}\n" for s, v in zip(trace.sample.tolist(), trace.variance_db.tolist()))


@dataclass(frozen=True)
class FitResult:
    threshold_mw: float
    uncertainty_mw: float
    residual_norm: float
    method: str
    points: int


def _model_gain(p, p_thr):
    return 1.0 / (1.0 - np.sqrt(p / p_thr)) ** 2


def _check_curve(curve: GainCurve):
    if curve.pump_mw.size < 3:
        raise FitError("need at least 3 samples to fit a threshold")
    if np.ptp(curve.gain) < 1e-9:
        raise FitError("gain curve is flat; no threshold information")


def fit_threshold(curve: GainCurve, method: str = "model-fit", reference: GainCurve | None = None,
                  reference_threshold_mw: float | None = None, points: int = 3) -> FitResult:
    """Estimate the oscillation threshold from a below-threshold gain curve.

    ``model-fit`` minimizes the squared gain residuals of
    ``G = 1/(1 - sqrt(P/P_thr))**2`` over ``log P_thr`` (bounded below by the
    largest sampled power).  ``slope-ratio`` fits ``1 - 1/sqrt(G)`` against
    ``sqrt(P)`` on the lowest ``points`` samples of this curve and of a
    reference curve with known threshold; thresholds scale as the inverse
    squared slope.
    """
    _check_curve(curve)
    if method == "model-fit":
        return _model_fit(curve)
    if method == "slope-ratio":
        if reference is None or reference_threshold_mw is None:
            raise DataError("slope-ratio needs a reference curve and its threshold")
        _check_curve(reference)
        return _slope_ratio(curve, reference, reference_threshold_mw, points)
    raise ValueError(f"unknown fit method {method!r}")


def _model_fit(curve: GainCurve) -> FitResult:
    p, g = curve.pump_mw, curve.gain
    pmax = float(p.max())
    if pmax <= 0:
        raise FitError("no positive pump powers in curve")
    lo = math.log(pmax) + 1e-9
    hi = math.log(pmax) + math.log(1e4)

    def sse(logt):
        return float(np.sum((_model_gain(p, math.exp(logt)) - g) ** 2))

    res = minimize_scalar(sse, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12, "maxiter": 2000})
    if not res.success:
        raise FitError(f"threshold minimization failed: {res.message}")
    logt = float(res.x)
    if logt - lo < 1e-6 or hi - logt < 1e-6:
        raise FitError("best-fit threshold sits on a search bound; data do not constrain it")
    p_thr = math.exp(logt)
    resid = _model_gain(p, p_thr) - g
    # dG/dP_thr by central difference; covariance from the Gauss-Newton normal equation
    h = p_thr * 1e-6
    jac = (_model_gain(p, p_thr + h) - _model_gain(p, p_thr - h)) / (2 * h)
    dof = max(p.size - 1, 1)
    s2 = float(resid @ resid) / dof
    jtj = float(jac @ jac)
    unc = math.sqrt(s2 / jtj) if jtj > 0 else math.inf
    return FitResult(p_thr, unc, float(np.linalg.norm(resid)), "model-fit", int(p.size))


def _slope(curve: GainCurve, points: int):
    k = min(points, curve.pump_mw.size)
    x = np.sqrt(curve.pump_mw[:k])
    y = 1.0 - 1.0 / np.sqrt(curve.gain[:k])
    if k < 2 or np.ptp(x) == 0:
        raise FitError("need at least two distinct pump powers for the slope fit")
    fit = linregress(x, y)
    if not fit.slope > 0:
        raise FitError("gain does not rise with pump power; slope fit is degenerate")
    err = fit.stderr if k > 2 and math.isfinite(fit.stderr) else 0.0
    resid = y - (fit.intercept + fit.slope * x)
    return fit.slope, err, float(np.linalg.norm(resid))


def _slope_ratio(curve, reference, reference_threshold_mw, points) -> FitResult:
    s, ds, resid = _slope(curve, points)
    s_ref, ds_ref, _ = _slope(reference, points)
    p_thr = (s_ref / s) ** 2 * reference_threshold_mw
    unc = p_thr * 2.0 * math.hypot(ds / s, ds_ref / s_ref)
    return FitResult(p_thr, unc, resid, "slope-ratio", int(min(points, curve.pump_mw.size)))


def fit_result_dict(r: FitResult) -> dict:
    return {
        "threshold_mw": r.threshold_mw,
        "uncertainty_mw": r.uncertainty_mw,
        "residual_norm": r.residual_norm,
        "method": r.method,
        "points": r.points,
    }


def summarize_trace(trace: Trace, floor_db: float | None = None) -> dict:
    """Minimum and maximum of each trace in dB, optionally after removing an electronic floor."""
    out = {}
    for tid in trace.ids():
        _, v = trace.select(tid)
        if floor_db is not None:
            v = linear_to_db(correct_electronic_noise(db_to_linear(v), db_to_linear(floor_db)))
        out[tid] = {"min_db": float(np.min(v)), "max_db": float(np.max(v))}
    return out
