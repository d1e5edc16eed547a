"""Hermite-Gauss mode functions and the quadrature used to integrate them.

Conventions
-----------
Hermite polynomials are the physicists' ones, ``H_1(x) = 2x``, so every
polynomial has a positive leading coefficient.  A mode of order ``n`` on a
waist ``w`` is

    u_n(x) = N_n H_n(sqrt(2) x / w) exp(-x**2 / w**2)

with ``N_n`` fixing the L2 norm to one.  Everything is one-dimensional: the
y factor of a TEM_n0 beam is a fundamental Gaussian and integrates out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Literal

import numpy as np
from scipy.special import roots_hermite

from . import _kernels
from .errors import QuadratureError

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class BeamGeometry:
    waist: float
    label: Literal["signal", "pump"] = "signal"

    def __post_init__(self):
        if not (math.isfinite(self.waist) and self.waist > 0):
            raise ValueError(f"waist must be positive and finite, got {self.waist!r}")
        if self.label not in ("signal", "pump"):
            raise ValueError(f"label must be 'signal' or 'pump', got {self.label!r}")

    def pump(self) -> "BeamGeometry":
        """Second-harmonic basis matched to this signal basis (waist / sqrt 2)."""
        if self.label != "signal":
            raise ValueError("pump basis is derived from a signal basis")
        return BeamGeometry(self.waist / SQRT2, "pump")


@dataclass(frozen=True)
class HGMode:
    order: int
    geometry: BeamGeometry

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 0:
            raise ValueError(f"mode order must be a non-negative integer, got {self.order!r}")

    def __call__(self, x):
        return mode_amplitude(self, x)


@dataclass(frozen=True)
class QuadratureSpec:
    """How to integrate over the real line.

    ``gauss-hermite`` uses a fixed rule of ``nodes`` points; ``adaptive-simpson``
    refines panels on ``[center - span*scale, center + span*scale]`` until the
    absolute error estimate is below ``tol``.
    """

    method: Literal["gauss-hermite", "adaptive-simpson"] = "gauss-hermite"
    nodes: int = 128
    tol: float = 1e-13
    max_depth: int = 48
    span: float = 20.0

    def __post_init__(self):
        if self.method not in ("gauss-hermite", "adaptive-simpson"):
            raise ValueError(f"unknown quadrature method {self.method!r}")
        if self.nodes < 1:
            raise ValueError("nodes must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


GAUSS_HERMITE = QuadratureSpec()
ADAPTIVE_SIMPSON = QuadratureSpec(method="adaptive-simpson")


def hermite_poly(n: int, x):
    """Physicists' Hermite polynomial ``H_n(x)`` by the three-term recurrence."""
    if n < 0:
        raise ValueError("n must be non-negative")
    xa = np.asarray(x, dtype=float)
    h = _kernels.hermite_table(n, xa.ravel())[n].reshape(xa.shape)
    return float(h) if h.ndim == 0 else h


def log_norm(n: int, waist: float) -> float:
    """log of N_n = (2/pi)^(1/4) / sqrt(w 2^n n!), via lgamma so large n never overflows."""
    return 0.25 * math.log(2.0 / math.pi) - 0.5 * (math.log(waist) + n * math.log(2.0) + math.lgamma(n + 1))


def mode_amplitude(mode: HGMode, x):
    """Normalized amplitude ``u_n(x)``; accepts scalars or arrays."""
    w = mode.geometry.waist
    n = mode.order
    xa = np.asarray(x, dtype=float)
    flat = xa.ravel()
    h = _kernels.hermite_table(n, SQRT2 * flat / w)[n]
    with np.errstate(divide="ignore"):
        # log-space product keeps H_n * exp(-x^2/w^2) finite far out in the tails
        mag = np.exp(np.log(np.abs(h)) + log_norm(n, w) - (flat / w) ** 2)
    out = (np.sign(h) * mag).reshape(xa.shape)
    return float(out) if out.ndim == 0 else out


def mode_table(nmax: int, geometry: BeamGeometry, x) -> np.ndarray:
    """All modes ``u_0 .. u_nmax`` sampled at ``x`` (rows = order)."""
    w = geometry.waist
    xi = SQRT2 * np.asarray(x, dtype=float).ravel() / w
    # u_n(x) = psi_n(xi) * sqrt(sqrt(2)/w) with psi_n the orthonormal Hermite function
    return _kernels.hg_table(nmax, xi) * math.sqrt(SQRT2 / w)


@lru_cache(maxsize=16)
def gauss_hermite_rule(nodes: int):
    """Nodes and weights for integrating unweighted ``f`` (the ``exp(x^2)`` factor is folded in)."""
    xi, wt = roots_hermite(nodes)
    # fold exp(+xi^2) into the weights so plain integrands can be summed
    return xi, wt * np.exp(xi * xi)


def integrate(f: Callable, spec: QuadratureSpec = GAUSS_HERMITE, *, scale: float = 1.0, center: float = 0.0):
    """Integrate ``f`` over the whole real line.

    ``f`` must be vectorized and decay like a Gaussian; ``scale`` is that
    Gaussian's width (``f ~ exp(-(x-center)**2/scale**2)``).  Matching it
    makes the fixed rule exact for polynomial-times-Gaussian integrands.
    Complex-valued ``f`` is supported.
    """
    if not scale > 0:
        raise ValueError("scale must be positive")
    if spec.method == "gauss-hermite":
        xi, wt = gauss_hermite_rule(spec.nodes)
        val = scale * np.sum(wt * f(center + scale * xi))
    else:
        half = spec.span * scale
        val = _adaptive_simpson(f, center - half, center + half, spec.tol, spec.max_depth)
    if not np.all(np.isfinite(val)):
        raise QuadratureError("integrand produced a non-finite value")
    return complex(val) if np.iscomplexobj(val) else float(val)


def _adaptive_simpson(f, a, b, tol, max_depth, panels=64):
    """Breadth-first adaptive Simpson; every refinement level is one vectorized call of ``f``."""
    edges = np.linspace(a, b, panels + 1)
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    y = f(np.concatenate([lo, mid, hi]))
    flo, fmid, fhi = y[:panels], y[panels:2 * panels], y[2 * panels:]
    whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)
    ptol = np.full(panels, tol / panels)
    total = 0.0
    for _ in range(max_depth):
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        k = lo.size
        y = f(np.concatenate([lm, rm]))
        flm, frm = y[:k], y[k:]
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - whole
        done = np.abs(delta) <= 15.0 * ptol
        total = total + np.sum((left + right + delta / 15.0)[done])
        keep = ~done
        if not keep.any():
            return total
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        flo, fmid, fhi = flo[keep], fmid[keep], fhi[keep]
        lm, rm, flm, frm = lm[keep], rm[keep], flm[keep], frm[keep]
        left, right, ptol = left[keep], right[keep], ptol[keep] / 2.0
        # children: [lo, mid] with midpoint lm, [mid, hi] with midpoint rm
        lo, mid, hi = np.concatenate([lo, mid]), np.concatenate([lm, rm]), np.concatenate([mid, hi])
        flo, fmid, fhi = np.concatenate([flo, fmid]), np.concatenate([flm, frm]), np.concatenate([fmid, fhi])
        whole = np.concatenate([left, right])
        ptol = np.concatenate([ptol, ptol])
    raise QuadratureError(f"adaptive Simpson did not converge within {max_depth} refinement levels")
