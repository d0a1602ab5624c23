import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relcm.attractive import (
    AttractiveEvaluator,
    amplitudes,
    psi_asymptotic_defect,
    psi_general,
    time_reversal_residual,
    yang_baxter_residual,
)
from relcm.hypgamma import HypGammaEvaluator, ScaleParams
from relcm.repulsive import RepulsiveEvaluator

P = ScaleParams(1.0, 1.4)
G = HypGammaEvaluator(P)
B_LO, B_HI = -0.5 * P.a_plus, P.a_minus + 0.5 * P.a_plus


def _ev(b):
    return AttractiveEvaluator(RepulsiveEvaluator(G, b))


def test_plane_wave_at_b_equal_a_minus():
    ev = _ev(P.a_minus)
    x = np.array([-1.5, 0.2, 2.7])
    y = np.array([0.4, 1.9, -0.8])
    assert np.allclose(psi_general(ev, x, y), np.exp(1j * math.pi * x * y / (P.a_plus * P.a_minus)), atol=1e-12)


def test_coupling_window_enforced():
    with pytest.raises(ValueError):
        _ev(B_HI + 0.01)


@given(st.floats(0.02, 0.98), st.floats(-4.0, 4.0), st.floats(-4.0, 4.0), st.floats(-4.0, 4.0))
def test_yang_baxter(frac, y1, y2, y3):
    ev = _ev(B_LO + frac * (B_HI - B_LO))
    r1, r2 = yang_baxter_residual(ev, y1, y2, y3)
    assert abs(r1) < 1e-12 and abs(r2) < 1e-12


@given(st.floats(0.02, 0.98), st.floats(-5.0, 5.0).filter(lambda y: abs(y) > 1e-3))
def test_amplitudes_form_a_unitary_matrix(frac, y):
    t, r, u = amplitudes(_ev(B_LO + frac * (B_HI - B_LO)), y)
    assert abs(abs(t) ** 2 + abs(r) ** 2 - 1) < 1e-12
    assert abs(t * np.conj(r) + r * np.conj(t)) < 1e-12
    assert abs(abs(u) - 1) < 1e-12


@given(st.floats(0.05, 0.95), st.floats(-2.5, 2.5), st.floats(-2.5, 2.5).filter(lambda v: abs(v) > 0.01))
def test_time_reversal(frac, x, y):
    ev = _ev(frac * min(2 * P.a, B_HI))
    assert abs(time_reversal_residual(ev, x, y)) < 1e-9


def test_asymptotic_defect_decays():
    ev = _ev(0.8)
    for side in (1, -1):
        d = [abs(psi_asymptotic_defect(ev, side * x, 0.9, side)) for x in (2.0, 4.0, 6.0)]
        assert d[0] > d[1] > d[2]
        assert d[2] < 1e-10
    with pytest.raises(ValueError):
        psi_asymptotic_defect(ev, 1.0, 0.9, 0)
