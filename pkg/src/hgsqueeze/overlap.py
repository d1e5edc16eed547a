"""Pump/signal mode overlap for a TEM_n0 parametric interaction.

A signal mode ``u_n`` couples to the pump through its square.  Normalizing
``u_n**2`` by ``alpha_n = sqrt(int u_n**4)`` and projecting onto the pump
basis ``v_j`` (waist ``w0/sqrt 2``) gives the coefficients ``Gamma``; the
projection onto ``v_2i`` is ``gamma(n, i)``.  Only even pump orders up to
``2n`` are reached, so the optimal pump is a finite mixture.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .basis import GAUSS_HERMITE, BeamGeometry, QuadratureSpec, gauss_hermite_rule, integrate, mode_table
from .errors import QuadratureError

UNIT = BeamGeometry(1.0)


def alpha(n: int, geometry: BeamGeometry = UNIT, spec: QuadratureSpec = GAUSS_HERMITE) -> float:
    """Norm of the squared signal mode, ``sqrt(int u_n^4 dx)``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    w = geometry.waist
    u4 = lambda x: mode_table(n, geometry, x)[n] ** 4
    return math.sqrt(integrate(u4, spec, scale=w / 2.0))


def projection(n: int, j: int, signal: BeamGeometry = UNIT, spec: QuadratureSpec = GAUSS_HERMITE) -> float:
    """Overlap of the normalized squared signal ``u_n^2/alpha_n`` with pump mode ``v_j`` (any ``j``)."""
    if n < 0 or j < 0:
        raise ValueError("orders must be non-negative")
    pump = signal.pump()
    w = signal.waist
    a = alpha(n, signal, spec)

    def integrand(x):
        return mode_table(n, signal, x)[n] ** 2 * mode_table(j, pump, x)[j]

    # u_n^2 v_j ~ exp(-4 x^2 / w^2)
    return integrate(integrand, spec, scale=w / 2.0) / a


def gamma(n: int, i: int, signal: BeamGeometry = UNIT, spec: QuadratureSpec = GAUSS_HERMITE) -> float:
    """``Gamma_ni``: projection of ``u_n^2/alpha_n`` onto the pump mode of order ``2i``."""
    return projection(n, 2 * i, signal, spec)


@lru_cache(maxsize=None)
def _unit_projection(n: int, j: int) -> float:
    return projection(n, j)


@dataclass(frozen=True)
class OverlapTable:
    """``alpha[n]`` and ``gamma[n, i]`` for signal orders ``0..max_order``."""

    max_order: int
    alpha: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        self.alpha.setflags(write=False)
        self.gamma.setflags(write=False)

    @classmethod
    def compute(cls, max_order: int, geometry: BeamGeometry = UNIT, spec: QuadratureSpec = GAUSS_HERMITE):
        if max_order < 0:
            raise ValueError("max_order must be non-negative")
        alphas = np.array([alpha(n, geometry, spec) for n in range(max_order + 1)])
        g = np.zeros((max_order + 1, max_order + 1))
        for n in range(max_order + 1):
            for i in range(n + 1):
                g[n, i] = gamma(n, i, geometry, spec)
        return cls(max_order, alphas, g)

    def local_intensity_factor(self, n: int) -> float:
        """``(alpha_0/alpha_n)**2``: threshold penalty from a more spread-out signal."""
        return float((self.alpha[0] / self.alpha[n]) ** 2)

    def to_dict(self) -> dict:
        return {
            "max_order": int(self.max_order),
            "alpha": [float(a) for a in self.alpha],
            "gamma": [[float(v) for v in row] for row in self.gamma],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "OverlapTable":
        return cls(int(data["max_order"]), np.array(data["alpha"], dtype=float), np.array(data["gamma"], dtype=float))


@dataclass(frozen=True)
class PumpProfile:
    """Real pump amplitude as coefficients over pump modes ``v_0, v_1, ...``."""

    coefficients: np.ndarray = field(repr=True)

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float).ravel().copy()
        if c.size == 0 or not np.all(np.isfinite(c)):
            raise ValueError("pump coefficients must be a non-empty finite vector")
        norm = float(np.sum(c * c))
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"pump profile must be unit-norm, sum of squares is {norm!r}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def tem(cls, order: int) -> "PumpProfile":
        c = np.zeros(order + 1)
        c[order] = 1.0
        return cls(c)


def optimal_pump(n: int, geometry: BeamGeometry = UNIT) -> PumpProfile:
    """Pump that maximizes coupling to ``u_n``: ``c_2i = Gamma_ni``, zero elsewhere."""
    if n < 0:
        raise ValueError("n must be non-negative")
    c = np.zeros(2 * n + 1)
    for i in range(n + 1):
        c[2 * i] = gamma(n, i, geometry)
    # quadrature leaves ~1e-15 of norm error; remove it so the profile validates
    return PumpProfile(c / math.sqrt(np.sum(c * c)))


def pump_coupling(pump: PumpProfile, n: int) -> float:
    """Effective coupling ``kappa_n = sum_j c_j <u_n^2/alpha_n, v_j>``; at most 1, equal to 1 for the optimal pump."""
    if not isinstance(pump, PumpProfile):
        pump = PumpProfile(pump)
    c = pump.coefficients
    # projections vanish beyond order 2n, so longer pumps only lose norm
    kappa = sum(c[j] * _unit_projection(n, j) for j in range(min(c.size, 2 * n + 1)) if c[j] != 0.0)
    return float(kappa)


@dataclass(frozen=True)
class SeedMisalignment:
    """Lateral offset of a TEM00 seed (units of ``w0``) and tilt (far-field offset in units of the divergence angle)."""

    displacement: float = 0.0
    tilt: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.displacement) and math.isfinite(self.tilt)):
            raise ValueError("misalignment must be finite")


def misaligned_seed_decomposition(m: SeedMisalignment, max_order: int, spec: QuadratureSpec = GAUSS_HERMITE) -> np.ndarray:
    """Complex amplitudes of a shifted, tilted TEM00 beam on ``u_0 .. u_max_order``.

    The seed field is ``u_0(x - d w0) * exp(2i t x / w0)``: a tilt of one
    divergence angle ``lambda/(pi w0)`` is the linear phase ``2 x / w0``.
    """
    if max_order < 0:
        raise ValueError("max_order must be non-negative")
    geo = UNIT
    d, t = m.displacement, m.tilt
    if d == 0.0 and t == 0.0:
        coeffs = np.zeros(max_order + 1, dtype=complex)
        coeffs[0] = 1.0
        return coeffs

    def integrand(x):
        seed = mode_table(0, geo, x - d)[0] * np.exp(2j * t * x)
        return mode_table(max_order, geo, x) * seed

    # the product of two unit Gaussians centred at 0 and d has width w0/sqrt 2
    center = d / 2.0
    scale = 1.0 / math.sqrt(2.0)
    if spec.method == "gauss-hermite":
        xi, wt = gauss_hermite_rule(spec.nodes)
        vals = integrand(center + scale * xi)
        coeffs = scale * vals @ wt
    else:
        coeffs = np.array([
            integrate(lambda x, k=k: integrand(x)[k], spec, scale=scale, center=center)
            for k in range(max_order + 1)
        ], dtype=complex)
    if not np.all(np.isfinite(coeffs)):
        raise QuadratureError("seed projection produced a non-finite coefficient")
    return coeffs
