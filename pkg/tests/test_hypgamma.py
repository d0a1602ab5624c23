import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relcm.errors import AtPole
from relcm.hypgamma import HypGammaEvaluator, ScaleParams, hyp_gamma, hyp_gamma_asymptotic, log_hyp_gamma

# Reference values from the integral representation evaluated with mpmath at
# 30 digits on Gauss-Legendre panels (scripts/make_gamma_oracle.py).
GAMMA_ORACLE = [
    (1.0, 1.0, 0j, complex(1.0, 0.0)),
    (1.0, 1.0, (0.3 + 0.2j), complex(1.2291468171586186103, -0.37024321872258101828)),
    (1.0, 1.4142135623730951, (1.7 - 0.4j), complex(-0.21758953644613779685, 0.036995358520389931103)),
    (1.0, 1.4142135623730951, (-2.5 + 0.9j), complex(148.05119781958151916, 5.4539927840372392006)),
    (0.7, 1.9, (0.45 + 1j), complex(2.6234064740476060596, 1.0962047789682873096)),
    (2.0, 0.5, (-0.8 - 0.6j), complex(0.11096091996908053979, 0.17763175469564679499)),
    (1.0, 2.6, (3.1 + 0.3j), complex(3.0462773556977749732, 0.43299157067855501736)),
]

periods = st.floats(0.4, 3.0)


@pytest.mark.parametrize("ap, am, z, ref", GAMMA_ORACLE)
def test_matches_independent_oracle(ap, am, z, ref):
    g = hyp_gamma(HypGammaEvaluator(ScaleParams(ap, am)), z)
    assert abs(g / ref - 1) < 1e-13


def test_normalization():
    assert hyp_gamma(HypGammaEvaluator(ScaleParams(1.0, 1.0)), 0.0) == pytest.approx(1.0, abs=1e-15)


@given(periods, periods, st.floats(-5.0, 5.0), st.floats(-0.95, 0.95))
def test_first_order_difference_equations(ap, am, x, t):
    p = ScaleParams(ap, am)
    G = HypGammaEvaluator(p)
    z = complex(x, t * p.a)
    for ad, other in ((ap, am), (am, ap)):
        ratio = np.exp(G.log(z + 0.5j * ad) - G.log(z - 0.5j * ad))
        assert abs(ratio / (2 * np.cosh(math.pi * z / other)) - 1) < 1e-10


@given(periods, periods, st.floats(-5.0, 5.0), st.floats(-0.95, 0.95))
def test_reflection_modular_conjugation(ap, am, x, t):
    p = ScaleParams(ap, am)
    G, Gs = HypGammaEvaluator(p), HypGammaEvaluator(p.swapped())
    z = complex(x, t * p.a)
    assert abs(np.exp(G.log(z) + G.log(-z)) - 1) < 1e-12
    assert abs(np.exp(Gs.log(z) - G.log(z)) - 1) < 1e-12
    assert abs(np.conj(G(z)) / G(-np.conj(z)) - 1) < 1e-12


@given(periods, periods, st.floats(-0.5, 0.5))
def test_asymptotics_for_large_real_part(ap, am, t):
    p = ScaleParams(ap, am)
    G = HypGammaEvaluator(p)
    for sign in (1, -1):
        z = complex(sign * 12.0 * max(ap, am), t * p.a)
        ratio = G(z) / hyp_gamma_asymptotic(G, z, sign)
        assert abs(ratio - 1) < 1e-8


def test_log_is_continuous_across_the_ladder():
    G = HypGammaEvaluator(ScaleParams(1.0, 1.7))
    eta = np.linspace(-2.4, 2.4, 97)
    vals = log_hyp_gamma(G, 0.8 + 1j * eta)
    assert np.abs(np.diff(vals)).max() < 0.5


def test_pole_and_zero_are_reported():
    p = ScaleParams(1.0, 1.3)
    G = HypGammaEvaluator(p)
    with pytest.raises(AtPole):
        G(-1j * p.a)
    with pytest.raises(AtPole):
        G(1j * (p.a + p.a_plus))


def test_scale_params_validation_and_maps():
    with pytest.raises(ValueError):
        ScaleParams(-1.0, 1.0)
    p = ScaleParams.from_rho_kappa(1.3, 2.1)
    assert p.rho_kappa == pytest.approx(1.3 * 2.1)
    assert p.rho_value == pytest.approx(1.3) and p.kappa == pytest.approx(2.1)
    r = np.array([-1.0, 0.5, 2.0])
    assert np.allclose(p.r_of_x(p.x_of_r(r)), r)
    assert np.allclose(p.k_of_y(p.y_of_k(r)), r)
    assert p.swapped().a_plus == p.a_minus
