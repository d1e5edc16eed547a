"""Loss-budget algebra for homodyne-detected squeezing.

Variances are relative to the quantum noise limit (QNL = 1).  All arithmetic
happens in linear units; decibels are converted at the edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InconsistentMeasurementError, NumericError
from .opa import squeezing_variance


class Estimate(NamedTuple):
    value: float
    err: float = 0.0


def db_to_linear(db):
    v = np.power(10.0, np.asarray(db, dtype=float) / 10.0)
    return float(v) if v.ndim == 0 else v


def linear_to_db(v):
    a = np.asarray(v, dtype=float)
    if np.any(a <= 0) or np.any(np.isnan(a)):
        raise InconsistentMeasurementError(f"variance must be positive to express in dB, got {v!r}")
    out = 10.0 * np.log10(a)
    return float(out) if out.ndim == 0 else out


def _fraction(name, x):
    if not (0.0 < x <= 1.0):
        raise ValueError(f"{name} must be in (0, 1], got {x!r}")


@dataclass(frozen=True)
class DetectionChain:
    """Efficiencies between the OPA output coupler and the detector, each with a symmetric error."""

    eta_prop: float
    eta_det: float
    eta_hd: float
    eta_prop_err: float = 0.0
    eta_det_err: float = 0.0
    eta_hd_err: float = 0.0

    def __post_init__(self):
        _fraction("eta_prop", self.eta_prop)
        _fraction("eta_det", self.eta_det)
        _fraction("eta_hd", self.eta_hd)
        if min(self.eta_prop_err, self.eta_det_err, self.eta_hd_err) < 0:
            raise ValueError("uncertainties must be non-negative")

    def terms(self):
        return [(self.eta_prop, self.eta_prop_err), (self.eta_det, self.eta_det_err), (self.eta_hd, self.eta_hd_err)]


@dataclass(frozen=True)
class SqueezingMeasurement:
    order: int
    squeezing_db: float
    anti_squeezing_db: float
    electronic_floor_db: float = -math.inf

    def __post_init__(self):
        if not self.squeezing_db < 0 < self.anti_squeezing_db:
            raise InconsistentMeasurementError(
                f"need squeezing below and anti-squeezing above the QNL, got {self.squeezing_db} / {self.anti_squeezing_db} dB")
        if not self.electronic_floor_db < self.squeezing_db:
            raise InconsistentMeasurementError("electronic noise floor must lie below the squeezed level")

    @property
    def v_sq(self) -> float:
        return db_to_linear(self.squeezing_db)

    @property
    def v_asq(self) -> float:
        return db_to_linear(self.anti_squeezing_db)


def correct_electronic_noise(raw, floor):
    """Remove an electronic noise floor: ``(raw - floor) / (1 - floor)``.

    ``raw`` and ``floor`` are linear and normalized to the measured QNL trace,
    which itself contains the floor.
    """
    r = np.asarray(raw, dtype=float)
    if not 0.0 <= floor < 1.0:
        raise InconsistentMeasurementError(f"electronic floor must be in [0, 1) of the QNL, got {floor!r}")
    if np.any(r <= floor):
        raise InconsistentMeasurementError("measured variance at or below the electronic noise floor")
    out = (r - floor) / (1.0 - floor)
    return float(out) if out.ndim == 0 else out


def chain_efficiency(chain: DetectionChain, eta_cav: float | Estimate | None = None) -> Estimate:
    """Product of the chain efficiencies (times ``eta_cav`` if given).

    The error is first-order: relative errors added in quadrature.
    """
    terms = chain.terms()
    if eta_cav is not None:
        cav = eta_cav if isinstance(eta_cav, Estimate) else Estimate(float(eta_cav))
        _fraction("eta_cav", cav.value)
        terms.append(tuple(cav))
    value = math.prod(v for v, _ in terms)
    rel = math.sqrt(sum((e / v) ** 2 for v, e in terms))
    return Estimate(value, value * rel)


def apply_loss(v, eta: float):
    """Variance after a beam splitter of transmission ``eta``: ``eta v + 1 - eta``."""
    _fraction("eta", eta)
    out = eta * np.asarray(v, dtype=float) + (1.0 - eta)
    return float(out) if out.ndim == 0 else out


def infer_source(v, eta: float):
    """Undo :func:`apply_loss`: ``1 + (v - 1)/eta``."""
    if eta == 0:
        raise ValueError("cannot undo a loss with zero transmission")
    _fraction("eta", eta)
    out = 1.0 + (np.asarray(v, dtype=float) - 1.0) / eta
    if np.any(out <= 0):
        raise InconsistentMeasurementError("inferred source variance is non-positive; efficiency too low for this measurement")
    return float(out) if out.ndim == 0 else out


def efficiency_from_variances(v_sq: float, v_asq: float) -> float:
    """Total efficiency that turns a pure squeezed state into the measured pair.

    Solves ``V = eta V0 + 1 - eta`` for both quadratures with ``V0+ V0- = 1``:
    ``eta = (Vs + Va - 1 - Vs Va) / (Vs + Va - 2)``.
    """
    den = v_sq + v_asq - 2.0
    if abs(den) < 1e-12:
        raise NumericError("efficiency is indeterminate when the variances sum to 2 (state at the QNL)")
    eta = (v_sq + v_asq - 1.0 - v_sq * v_asq) / den
    if not 0.0 <= eta <= 1.0 + 1e-12:
        raise InconsistentMeasurementError(f"variance pair ({v_sq}, {v_asq}) is not reachable from a pure state; eta = {eta}")
    return min(eta, 1.0)


def efficiency_from_spectrum(m: SqueezingMeasurement) -> float:
    return efficiency_from_variances(m.v_sq, m.v_asq)


def back_out_cavity_escape(eta_total: float | Estimate, chain: DetectionChain) -> Estimate:
    """Cavity escape efficiency implied by a total efficiency and the known chain."""
    tot = eta_total if isinstance(eta_total, Estimate) else Estimate(float(eta_total))
    ch = chain_efficiency(chain)
    if ch.value <= 0:
        raise ValueError("chain efficiency must be positive")
    value = tot.value / ch.value
    if value > 1.0 + 1e-12:
        raise InconsistentMeasurementError(f"total efficiency {tot.value} exceeds the detection chain {ch.value}")
    rel = math.hypot(tot.err / tot.value if tot.value else 0.0, ch.err / ch.value)
    return Estimate(min(value, 1.0), min(value, 1.0) * rel)


def loss_budget(m: SqueezingMeasurement, chain: DetectionChain, eta_cav: float, p_ratio: float) -> dict:
    """Per-mode loss budget in the JSON layout used by the CLI.

    ``m`` holds electronic-noise-corrected values.  ``inferred`` removes
    propagation and detection loss; ``calculated`` is the OPA model at
    ``p_ratio`` with escape efficiency ``eta_cav``.
    """
    det = chain_efficiency(chain)
    inferred = (infer_source(m.v_sq, det.value), infer_source(m.v_asq, det.value))
    calculated = (squeezing_variance(p_ratio, eta_cav, "minus"), squeezing_variance(p_ratio, eta_cav, "plus"))
    corrected = (m.v_sq, m.v_asq)
    eta_calc = efficiency_from_spectrum(m)
    estimated = chain_efficiency(chain, eta_cav)
    backout = back_out_cavity_escape(eta_calc, chain)

    def pair(lin):
        return {
            "squeezing": linear_to_db(lin[0]),
            "anti_squeezing": linear_to_db(lin[1]),
        }

    def lin_pair(lin):
        return {"squeezing": float(lin[0]), "anti_squeezing": float(lin[1])}

    return {
        "order": int(m.order),
        "corrected_db": pair(corrected),
        "corrected_linear": lin_pair(corrected),
        "inferred_db": pair(inferred),
        "inferred_linear": lin_pair(inferred),
        "calculated_db": pair(calculated),
        "calculated_linear": lin_pair(calculated),
        "eta_detection": det.value,
        "eta_estimated": estimated.value,
        "eta_estimated_err": estimated.err,
        "eta_calculated": eta_calc,
        "eta_cav_backout": backout.value,
        "eta_cav_backout_err": backout.err,
    }
