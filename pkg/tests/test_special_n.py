import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relcm.errors import DegenerateParameters, OutOfWindow, UnsupportedN
from relcm.hypgamma import ScaleParams
from relcm.special_n import (
    N_MAX,
    SpecialNEvaluator,
    amplitudes_n,
    bound_state,
    compute_coeffs,
    k_n,
    psi_n,
    psi_reflectionless,
    is_nonresonant,
)

P = ScaleParams(1.0, 2.6)
xs = st.floats(-3.0, 3.0)


def test_n1_coefficients_closed_form():
    p = ScaleParams(1.0, math.sqrt(2.0))
    q = np.exp(1j * math.pi * p.a_plus / p.a_minus)
    c = compute_coeffs(p, 1).entries
    assert np.allclose(c, [[q, -1 / q], [-1 / q, q]], atol=1e-14)
    assert compute_coeffs(p, 0).entries[0, 0] == pytest.approx(1.0)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_coefficient_symmetries(N):
    assert compute_coeffs(P, N).symmetry_residual() < 1e-10


def test_limits_and_resonances():
    with pytest.raises(UnsupportedN):
        compute_coeffs(P, N_MAX + 1)
    with pytest.raises(DegenerateParameters):
        compute_coeffs(ScaleParams(1.0, 2.0), 1)
    assert not is_nonresonant(ScaleParams(1.0, 2.0), 1)
    assert is_nonresonant(P, 3)


@pytest.mark.parametrize("N", [1, 2])
@given(x=xs, y=xs)
def test_k_difference_equation(N, x, y):
    ev = SpecialNEvaluator(P, N)
    ap = P.a_plus
    s = lambda z: np.sinh(math.pi * z / P.a_minus)
    terms = [s(x + 1j * N * ap) * k_n(ev, x - 1j * ap, y), s(x - 1j * N * ap) * k_n(ev, x + 1j * ap, y)]
    rhs = 2 * s(x) * np.cosh(math.pi * y / P.a_minus) * k_n(ev, x, y)
    scale = sum(abs(t) for t in terms) + abs(rhs)
    assert abs(sum(terms) - rhs) < 1e-11 * scale


@pytest.mark.parametrize("N", [0, 1, 2])
@given(x=xs, y=st.floats(0.1, 3.0))
def test_psi_forms_agree(N, x, y):
    ev = SpecialNEvaluator(P, N)
    a, b = ev.psi(x, y), ev.psi_direct(x, y)
    assert abs(a - b) < 1e-9 * max(abs(b), 1.0)


@pytest.mark.parametrize("N", [0, 1, 2])
@given(y=st.floats(-4.0, 4.0).filter(lambda v: abs(v) > 1e-3))
def test_amplitudes_unitary(N, y):
    u, t, r = amplitudes_n(SpecialNEvaluator(P, N), y)
    assert abs(abs(t) ** 2 + abs(r) ** 2 - 1) < 1e-12
    assert abs(abs(u) - 1) < 1e-12
    if N == 0:
        assert abs(u - 1) < 1e-15


def test_psi_asymptotics_use_t_and_r():
    ev = SpecialNEvaluator(P, 1)
    y = 0.8
    u, t, r = ev.amplitudes(y)
    pw = lambda x, yy: np.exp(1j * math.pi * x * yy / (P.a_plus * P.a_minus))
    x = 9.0
    assert abs(psi_n(ev, x, y) - t * pw(x, y)) < 1e-8
    assert abs(psi_n(ev, -x, y) - (pw(-x, y) - r * pw(-x, -y))) < 1e-8


@pytest.mark.parametrize("N, ratio", [(0, 0.75), (1, 1.7), (2, 2.8)])
def test_bound_state_energy_and_window(N, ratio):
    p = ScaleParams(1.0, ratio)
    ev = SpecialNEvaluator(p, N)
    bs = bound_state(ev)
    assert 0 < bs.energy < 2
    assert bs.norm > 0
    assert bs.norm_x == pytest.approx(bs.norm * p.a_minus / p.rho_value)
    with pytest.raises(OutOfWindow):
        bound_state(SpecialNEvaluator(ScaleParams(1.0, N + 1.2), N))


def test_bound_state_handle_is_finite_far_out():
    ev = SpecialNEvaluator(ScaleParams(1.0, 0.75), 0)
    vals = bound_state(ev).handle(np.array([-1e4, -50.0, 0.0, 50.0, 1e4]))
    assert np.all(np.isfinite(vals))
    assert abs(vals[0]) == 0 and abs(vals[-1]) == 0


@pytest.mark.parametrize("N", [0, 1])
def test_reflectionless_matches_general_coupling(N):
    from relcm.attractive import AttractiveEvaluator
    from relcm.hypgamma import HypGammaEvaluator
    from relcm.repulsive import RepulsiveEvaluator

    p = ScaleParams(3.0, 1.0)
    x = np.array([0.3, -1.2, 2.0])
    y = np.array([0.5, 1.1, 2.2])
    gen = AttractiveEvaluator(RepulsiveEvaluator(HypGammaEvaluator(p), (N + 1) * p.a_minus)).psi(x, y)
    assert np.allclose(psi_reflectionless(p, N, x, y), gen, atol=1e-12)
