import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from hgsqueeze.basis import (ADAPTIVE_SIMPSON, GAUSS_HERMITE, BeamGeometry, HGMode, QuadratureSpec, hermite_poly,
                             integrate, mode_amplitude, mode_table)
from hgsqueeze.errors import QuadratureError

PEAK0 = (2.0 / math.pi) ** 0.25


def test_hermite_low_orders():
    assert hermite_poly(0, 1.7) == 1.0
    assert hermite_poly(1, 2.0) == 4.0


def test_hermite_5_matches_expansion():
    x = 0.5
    assert hermite_poly(5, x) == pytest.approx(32 * x**5 - 160 * x**3 + 120 * x, abs=1e-12)


def test_hermite_array_matches_numpy_polynomial():
    x = np.linspace(-3, 3, 41)
    for n in range(12):
        coef = np.zeros(n + 1)
        coef[n] = 1
        ref = np.polynomial.hermite.hermval(x, coef)
        np.testing.assert_allclose(hermite_poly(n, x), ref, rtol=1e-12, atol=1e-9)


def test_hermite_rejects_negative_order():
    with pytest.raises(ValueError):
        hermite_poly(-1, 0.0)


def test_geometry_validation_and_pump_waist():
    g = BeamGeometry(24.0)
    assert g.pump().waist == pytest.approx(24.0 / math.sqrt(2))
    assert g.pump().label == "pump"
    with pytest.raises(ValueError):
        BeamGeometry(0.0)
    with pytest.raises(ValueError):
        BeamGeometry(-1.0)
    with pytest.raises(ValueError):
        g.pump().pump()
    with pytest.raises(ValueError):
        HGMode(-1, g)


def test_mode_amplitude_at_origin(unit):
    assert mode_amplitude(HGMode(0, unit), 0.0) == pytest.approx(PEAK0, abs=1e-14)
    assert mode_amplitude(HGMode(1, unit), 0.0) == 0.0
    # H_2(0) = -2 and N_2 = PEAK0 / sqrt(8)
    assert mode_amplitude(HGMode(2, unit), 0.0) == pytest.approx(-PEAK0 / math.sqrt(2), abs=1e-14)


def test_mode_amplitude_large_order_stays_finite(unit):
    x = np.linspace(-12, 12, 401)
    v = mode_amplitude(HGMode(80, unit), x)
    assert np.all(np.isfinite(v))
    assert integrate(lambda x: mode_amplitude(HGMode(80, unit), x) ** 2, scale=2**-0.5) == pytest.approx(1.0, abs=1e-8)


def test_log_space_amplitude_matches_recurrence_table(unit):
    x = np.linspace(-6, 6, 97)
    tab = mode_table(40, unit, x)
    for n in (0, 3, 17, 40):
        np.testing.assert_allclose(mode_amplitude(HGMode(n, unit), x), tab[n], rtol=1e-10, atol=1e-13)


@pytest.mark.parametrize("spec", [GAUSS_HERMITE, ADAPTIVE_SIMPSON], ids=["gh", "simpson"])
def test_integrate_examples(spec, unit):
    u = lambda n: HGMode(n, unit)
    assert integrate(lambda x: u(0)(x) ** 2, spec, scale=2**-0.5) == pytest.approx(1.0, abs=1e-10)
    assert abs(integrate(lambda x: u(1)(x) * u(2)(x), spec, scale=2**-0.5)) < 1e-10
    # closed form: int u_0^4 = 1/(w sqrt(pi))
    assert integrate(lambda x: u(0)(x) ** 4, spec, scale=0.5) == pytest.approx(1 / math.sqrt(math.pi), abs=1e-12)


def test_u0_fourth_power_against_scipy_quad():
    w = 1.7
    g = BeamGeometry(w)
    ref, _ = quad(lambda x: mode_amplitude(HGMode(0, g), x) ** 4, -np.inf, np.inf, epsabs=1e-14)
    assert ref == pytest.approx(1 / (w * math.sqrt(math.pi)), rel=1e-10)


@pytest.mark.parametrize("spec", [GAUSS_HERMITE, ADAPTIVE_SIMPSON], ids=["gh", "simpson"])
def test_orthonormality_up_to_10(spec, unit):
    x_scale = 2**-0.5
    for n in range(11):
        for m in range(n, 11):
            val = integrate(lambda x: mode_table(10, unit, x)[n] * mode_table(10, unit, x)[m], spec, scale=x_scale)
            assert abs(val - (n == m)) < 1e-8, (n, m, val)


@pytest.mark.parametrize("n", range(7))
def test_geometry_scaling(n):
    s = 2.0
    x = np.linspace(-4, 4, 33)
    big = mode_amplitude(HGMode(n, BeamGeometry(3.0)), x)
    small = mode_amplitude(HGMode(n, BeamGeometry(3.0 / s)), x / s)
    np.testing.assert_allclose(big, small / math.sqrt(s), rtol=1e-12, atol=1e-15)


def test_methods_agree_on_overlap_integrands(unit):
    pump = unit.pump()
    for n in range(4):
        for j in range(0, 2 * n + 3):
            f = lambda x: mode_table(n, unit, x)[n] ** 2 * mode_table(j, pump, x)[j]
            a = integrate(f, GAUSS_HERMITE, scale=0.5)
            b = integrate(f, ADAPTIVE_SIMPSON, scale=0.5)
            assert abs(a - b) < 1e-8, (n, j)


def test_complex_integrand():
    val = integrate(lambda x: np.exp(-x * x) * np.exp(1j * x), scale=1.0)
    assert val == pytest.approx(math.sqrt(math.pi) * math.exp(-0.25), abs=1e-12)


def test_adaptive_nonconvergence_is_reported():
    spec = QuadratureSpec(method="adaptive-simpson", tol=1e-300, max_depth=3)
    with pytest.raises(QuadratureError):
        integrate(lambda x: np.exp(-x * x) * np.cos(40 * x), spec)


def test_nonfinite_integrand_is_reported():
    with pytest.raises(QuadratureError):
        integrate(lambda x: np.full_like(x, np.nan))


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(method="trapezoid")
    with pytest.raises(ValueError):
        QuadratureSpec(tol=0.0)
    assert GAUSS_HERMITE.nodes >= 64


@settings(max_examples=40, deadline=None)
@given(n=st.integers(0, 30), x=st.floats(-8, 8), w=st.floats(0.2, 50))
def test_amplitude_scalar_matches_array(n, x, w):
    m = HGMode(n, BeamGeometry(w))
    assert mode_amplitude(m, x) == pytest.approx(mode_amplitude(m, np.array([x]))[0], rel=1e-13, abs=1e-300)
