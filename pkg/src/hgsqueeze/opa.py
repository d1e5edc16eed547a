"""Below-threshold OPA: classical seed gain, threshold scaling with mode
order, the phase-matching temperature envelope and zero-frequency quadrature
variances."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import brentq

from .errors import DivergenceError
from .overlap import OverlapTable, PumpProfile, pump_coupling


@dataclass(frozen=True)
class OpaParams:
    transmittance: float = 0.04
    loss: float = 0.0043
    threshold_power_00: float = 260.0
    pump_power: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.transmittance <= 1.0:
            raise ValueError(f"output coupler transmittance must be in (0, 1], got {self.transmittance}")
        if not 0.0 <= self.loss < 1.0:
            raise ValueError(f"intra-cavity loss must be in [0, 1), got {self.loss}")
        if self.threshold_power_00 < 0 or self.pump_power < 0:
            raise ValueError("powers must be non-negative")

    @property
    def p_ratio(self) -> float:
        return self.pump_power / self.threshold_power_00


@dataclass(frozen=True)
class PhaseMatchSpec:
    t_opt: float
    fwhm: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.t_opt) and self.fwhm > 0):
            raise ValueError("need a finite optimum temperature and a positive FWHM")


def escape_efficiency(params: OpaParams) -> float:
    """``T / (T + L)``."""
    t, l = params.transmittance, params.loss
    if t + l <= 0:
        raise ValueError("T + L must be positive")
    return t / (t + l)


def relative_threshold(n: int, pump: PumpProfile, table: OverlapTable) -> float:
    """Threshold for signal order ``n`` with ``pump``, relative to TEM00 signal + TEM00 pump.

    The squared effective nonlinear coupling ``alpha_n * kappa_n`` sets the
    threshold, giving ``(alpha_0/alpha_n)**2 / kappa_n**2``.  Zero coupling
    returns ``math.inf``.
    """
    if not 0 <= n <= table.max_order:
        raise ValueError(f"order {n} outside overlap table (max {table.max_order})")
    kappa = pump_coupling(pump, n)
    if abs(kappa) < 1e-12:
        return math.inf
    return table.local_intensity_factor(n) / kappa**2


def _check_ratio(p_ratio):
    p = np.asarray(p_ratio, dtype=float)
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ValueError("pump ratio must be finite and non-negative")
    return p


def _scalar(v):
    return float(v) if np.ndim(v) == 0 else v


def classical_gain(p_ratio, phase: Literal["amplify", "deamplify"] = "amplify"):
    """Seed power gain ``1/(1 -+ sqrt(P/P_thr))**2``."""
    p = _check_ratio(p_ratio)
    s = np.sqrt(p)
    if phase == "amplify":
        if np.any(p >= 1.0):
            raise DivergenceError("amplification diverges at or above threshold")
        return _scalar(1.0 / (1.0 - s) ** 2)
    if phase == "deamplify":
        if np.any(p > 1.0):
            raise DivergenceError("below-threshold gain model is invalid above threshold")
        return _scalar(1.0 / (1.0 + s) ** 2)
    raise ValueError(f"phase must be 'amplify' or 'deamplify', got {phase!r}")


def _sinc2(x):
    return np.sinc(np.asarray(x) / np.pi) ** 2


def _half_width_argument(p_ratio, phase):
    """Detuning argument ``x`` where the gain excess has dropped to half its peak."""
    if p_ratio is None or p_ratio == 0.0:
        # small-gain limit: G - 1 ~ 2 sqrt(s p), half when s = 1/4
        target = 0.25
    else:
        peak = classical_gain(p_ratio, phase) - 1.0
        target = brentq(lambda s: (classical_gain(s * p_ratio, phase) - 1.0) - 0.5 * peak, 0.0, 1.0, xtol=1e-15)
    return brentq(lambda x: _sinc2(x) - target, 1e-9, math.pi, xtol=1e-15)


def phase_match_envelope(t, spec: PhaseMatchSpec, p_ratio: float | None = None,
                         phase: Literal["amplify", "deamplify"] = "amplify"):
    """Phase-matching factor ``sinc^2(b (t - t_opt))`` that scales the pump ratio.

    ``b`` is chosen so the gain excess ``|G - 1|`` has the FWHM in ``spec`` at
    the given ``p_ratio``; without one, the small-gain limit is used.
    """
    b = _half_width_argument(p_ratio, phase) / (0.5 * spec.fwhm)
    return _scalar(_sinc2(b * (np.asarray(t, dtype=float) - spec.t_opt)))


def gain_vs_temperature(t, spec: PhaseMatchSpec, p_ratio: float, phase="amplify"):
    s = phase_match_envelope(t, spec, p_ratio, phase)
    return classical_gain(np.asarray(s) * p_ratio, phase)


def squeezing_variance(p_ratio, eta_esc: float, quadrature: Literal["plus", "minus"]):
    """Zero-frequency quadrature variance relative to the QNL.

    ``V+ = 1 + eta 4 sqrt(p)/(1 - sqrt(p))**2`` (anti-squeezed),
    ``V- = 1 - eta 4 sqrt(p)/(1 + sqrt(p))**2`` (squeezed), ``p = P/P_thr``.
    """
    if not 0.0 <= eta_esc <= 1.0:
        raise ValueError("escape efficiency must lie in [0, 1]")
    p = _check_ratio(p_ratio)
    s = np.sqrt(p)
    if quadrature == "plus":
        if np.any(p >= 1.0):
            raise DivergenceError("anti-squeezed variance diverges at threshold")
        return _scalar(((1.0 - s) ** 2 + 4.0 * eta_esc * s) / (1.0 - s) ** 2)
    if quadrature == "minus":
        if np.any(p > 1.0):
            raise DivergenceError("below-threshold variance model is invalid above threshold")
        # 1 - 4 eta s/(1+s)^2 rearranged into non-negative terms: no cancellation near threshold
        return _scalar(((1.0 - s) ** 2 + 4.0 * s * (1.0 - eta_esc)) / (1.0 + s) ** 2)
    raise ValueError(f"quadrature must be 'plus' or 'minus', got {quadrature!r}")


def phase_scan(theta, v_minus: float, v_plus: float):
    """Variance seen as the LO phase sweeps: ``V- cos^2 theta + V+ sin^2 theta`` (radians)."""
    th = np.asarray(theta, dtype=float)
    return _scalar(v_minus * np.cos(th) ** 2 + v_plus * np.sin(th) ** 2)
