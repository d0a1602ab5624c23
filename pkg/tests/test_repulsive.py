import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relcm.hypgamma import HypGammaEvaluator, ScaleParams
from relcm.repulsive import (
    ADO_KINDS,
    AdoSpec,
    RepulsiveEvaluator,
    apply_ado,
    harish_c,
    r_ren,
    scattering_u,
    weight_w,
)

P = ScaleParams(1.0, 1.4)
G = HypGammaEvaluator(P)
reals = st.floats(-3.0, 3.0)
couplings = st.floats(0.1, 0.9)  # fraction of 2a


def _rep(frac):
    return RepulsiveEvaluator(G, frac * 2 * P.a)


def test_closed_form_at_b_equal_a_plus():
    rep = RepulsiveEvaluator(G, P.a_plus)
    x = np.array([0.4, -1.3, 2.2 + 0.2j])
    y = np.array([1.1, 0.6 - 0.1j, -2.0])
    s = lambda z: np.sinh(math.pi * z / P.a_minus)
    closed = np.sin(math.pi * x * y / (P.a_plus * P.a_minus)) / (2 * s(x) * s(y))
    assert np.allclose(r_ren(rep, x, y), closed, rtol=1e-10, atol=0)


def test_c_and_w_at_b_equal_a_plus():
    rep = RepulsiveEvaluator(G, P.a_plus)
    z = np.array([0.3, 1.7, -0.9 + 0.2j])
    s = np.sinh(math.pi * z / P.a_minus)
    assert np.allclose(harish_c(rep, z), 1 / (2j * s), rtol=1e-12)
    assert np.allclose(weight_w(rep, z), 4 * s * s, rtol=1e-12)


@given(couplings, reals, reals)
def test_self_duality_and_evenness(frac, x, y):
    rep = _rep(frac)
    v = rep.r_ren(x, y)
    scale = max(abs(v), 1e-3)
    assert abs(rep.r_ren(y, x) - v) < 1e-10 * scale
    assert abs(rep.r_ren(-x, y) - v) < 1e-10 * scale
    assert abs(rep.r_ren(x, -y) - v) < 1e-10 * scale


@given(couplings, reals, reals)
def test_modular_invariance(frac, x, y):
    b = frac * 2 * P.a
    a = RepulsiveEvaluator(G, b).r_ren(x, y)
    s = RepulsiveEvaluator(HypGammaEvaluator(P.swapped()), b).r_ren(x, y)
    assert abs(a - s) < 1e-10 * max(abs(a), 1e-3)


@given(couplings, st.floats(-6.0, 6.0))
def test_u_is_a_phase_and_inverts_under_reflection(frac, z):
    rep = _rep(frac)
    u = scattering_u(rep, z)
    assert abs(abs(u) - 1) < 1e-13
    assert abs(u * scattering_u(rep, -z) - 1) < 1e-13


def test_u_limits():
    rep = _rep(0.35)
    phi = rep.phase_phi()
    assert abs(scattering_u(rep, 0.0) - 1) == 0
    assert abs(scattering_u(rep, 15.0) + phi**2) < 1e-9
    assert abs(scattering_u(rep, -15.0) + phi ** (-2)) < 1e-9


@given(couplings, st.floats(0.05, 4.0))
def test_weight_positive_on_half_line(frac, x):
    rep = _rep(frac)
    w = rep.weight_w(x)
    assert abs(w.imag) < 1e-12 * abs(w) and w.real > 0
    assert abs(rep.weight_w_sqrt(x) ** 2 - w) < 1e-12 * abs(w)


@given(couplings, reals.filter(lambda v: abs(v) > 0.05), st.floats(0.1, 3.0))
def test_difference_equation_in_x(frac, x, y):
    rep = _rep(frac)
    spec = AdoSpec("A", P, rep.b)
    lhs = apply_ado(spec, lambda z: rep.r_ren(z, y), x)
    rhs = 2 * np.cosh(math.pi * y / P.a_plus) * rep.r_ren(x, y)
    # the two shifted terms can be far larger than their sum, so the residual
    # is measured against the terms themselves
    v = lambda s: np.sinh(math.pi * (s - 1j * rep.b) / P.a_plus) / np.sinh(math.pi * s / P.a_plus)
    terms = (v(x) * rep.r_ren(x - 1j * P.a_minus, y), v(-x) * rep.r_ren(x + 1j * P.a_minus, y))
    assert abs(sum(terms) - lhs) < 1e-12 * (abs(terms[0]) + abs(terms[1]))
    scale = abs(terms[0]) + abs(terms[1]) + abs(rhs)
    assert abs(lhs - rhs) < 1e-9 * scale


def test_e_function_reflection_and_asymptotics():
    rep = _rep(0.35)
    x, y = 1.3, 0.7
    assert abs(rep.e_function(-x, y) + rep.scattering_u(x) * rep.e_function(x, y)) < 1e-12
    xx, yy = 7.0, 0.9
    e = np.exp(1j * math.pi * xx * yy / (P.a_plus * P.a_minus))
    assert abs(rep.e_function(xx, yy) - (e - rep.scattering_u(-yy) / e)) < 1e-10


def test_ado_kinds_and_validation():
    with pytest.raises(ValueError):
        AdoSpec("nope", P)
    f = lambda z: np.exp(0.3 * z)
    z = np.array([0.2, 1.0])
    out = apply_ado(AdoSpec("H_N_free", P), f, z)
    assert np.allclose(out, 2 * np.cos(0.3 * P.a_minus) * f(z))
    assert "H_CM" in ADO_KINDS and "H_hat_CM" in ADO_KINDS
