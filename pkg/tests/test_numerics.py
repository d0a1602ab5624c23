import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relcm.errors import InvalidDecay, NonConvergence
from relcm.numerics import (
    ContourSpec,
    gauss_legendre_panels,
    integrate_real_line,
    residue_numeric,
    sinc_m1,
    sinhc_m1,
    trapezoid_real_line,
)


def test_trapezoid_gaussian_is_spectrally_accurate():
    res = trapezoid_real_line(lambda x: np.exp(-x * x), -12.0, 12.0, tol=1e-14)
    assert abs(res.value - math.sqrt(math.pi)) < 1e-14
    assert res.err_estimate < 1e-12


def test_trapezoid_rejects_empty_range():
    with pytest.raises(ValueError):
        trapezoid_real_line(np.exp, 1.0, 1.0)


def test_trapezoid_reports_nonconvergence():
    with pytest.raises(NonConvergence):
        trapezoid_real_line(lambda x: np.sign(x - 0.1234567), -1.0, 1.0, tol=1e-15, max_halvings=3)


@given(st.floats(0.2, 3.0), st.floats(-2.0, 2.0))
def test_integrate_real_line_sech(a, shift):
    # int sech(a (t - s)) dt = pi / a
    res = integrate_real_line(lambda t: 1 / np.cosh(a * (t - shift)), decay_rate=a, center=shift)
    assert abs(res.value - math.pi / a) < 1e-11


def test_integrate_real_line_validates_decay():
    with pytest.raises(InvalidDecay):
        integrate_real_line(np.exp, decay_rate=0.0)
    with pytest.raises(InvalidDecay):
        integrate_real_line(np.exp, decay_rate=math.inf)


@given(st.integers(0, 31), st.integers(1, 5))
def test_gauss_legendre_panels_exact_for_polynomials(deg, panels):
    x, w = gauss_legendre_panels(-1.0, 2.0, panels, 16)
    exact = (2.0 ** (deg + 1) - (-1.0) ** (deg + 1)) / (deg + 1)
    assert abs(np.sum(w * x**deg) - exact) < 1e-11 * max(1.0, abs(exact))


@given(st.complex_numbers(max_magnitude=3.0), st.complex_numbers(max_magnitude=2.0))
def test_residue_of_simple_pole(pole, c):
    val = residue_numeric(lambda z: c / (z - pole) + np.sin(z), pole, ContourSpec(pole, 0.5, 64))
    assert abs(val - c) < 1e-12 * max(1.0, abs(c))


def test_contour_spec_validation():
    with pytest.raises(ValueError):
        ContourSpec(0j, 0.0, 64)
    with pytest.raises(ValueError):
        ContourSpec(0j, 1.0, 15)


@given(st.floats(-3.0, 3.0))
def test_sinc_and_sinhc_minus_one(u):
    u = np.array([u])
    if abs(u[0]) > 1e-3:
        assert np.allclose(sinc_m1(u), np.sin(u) / u - 1, atol=1e-14)
        assert np.allclose(sinhc_m1(u), np.sinh(u) / u - 1, atol=1e-14)
    assert abs(sinc_m1(np.array([1e-9]))[0]) < 1e-17
