import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relcm.errors import IntervalMismatch
from relcm.hypgamma import ScaleParams
from relcm.suites import balanced_params
from relcm.transforms import (
    Bump,
    PositionFn,
    TwoComponentFn,
    default_momentum_basis,
    default_position_basis,
    gram_defect,
    identity_one,
    identity_two,
    make_kernel_example,
    make_kernel_fourier,
    make_kernel_psiN,
    make_kernel_reflectionless,
    numerical_rank,
    predict_defect,
    residue_sum_adjoint,
    residue_sum_forward,
    unitarity_class,
)

PI = math.pi
unit_disc = st.complex_numbers(min_magnitude=0.2, max_magnitude=5.0)


def test_bump_shape_and_support():
    b = Bump(1.0, 0.2, 2.0 - 1j)
    assert b(1.0) == pytest.approx(2.0 - 1j)
    lo, hi = b.support
    assert (lo, hi) == pytest.approx((1.0 - 1.8, 1.0 + 1.8))
    assert b(np.array([lo - 1e-9, hi + 1e-9])).tolist() == [0, 0]
    inside = np.abs(b(np.linspace(lo + 0.1, hi - 0.1, 101)))
    assert np.all(inside > 0)


def test_two_component_and_position_functions():
    f = TwoComponentFn(plus=(Bump(1.0, 0.1),), minus=(Bump(2.0, 0.2, 1j),))
    assert f.component(1, 1.0) == pytest.approx(1.0)
    assert f.component(-1, 2.0) == pytest.approx(1j)
    assert f.min_width == pytest.approx(0.1)
    h = PositionFn(bumps=(Bump(-1.0, 0.3),))
    assert h(-1.0) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        TwoComponentFn(plus=(Bump(-0.5, 0.1),), minus=())


def test_default_bases_are_seeded():
    a, b = default_momentum_basis(3), default_momentum_basis(3)
    assert a == b and a != default_momentum_basis(4)
    assert len(a) == 12 and len(default_position_basis(0)) == 6
    for f in a:
        assert f.support()[0] > 0


@given(unit_disc, unit_disc)
def test_partial_fraction_identities(a, ap):
    if min(abs(a - ap), abs(a * ap - 1), abs(a), abs(ap)) < 1e-2:
        return
    assert abs(identity_one(a, ap)) < 1e-9 * (1 + abs(1 / (1 - ap / a)) + abs(1 / (1 - ap * a)))


def test_unitarity_classification():
    assert unitarity_class(make_kernel_psiN(balanced_params(1.5 * PI), 0)) == "unitary"
    assert unitarity_class(make_kernel_psiN(balanced_params(0.75 * PI), 0)) == "isometric"
    assert unitarity_class(make_kernel_psiN(balanced_params(0.4 * PI), 0)) == "none"
    assert unitarity_class(make_kernel_psiN(balanced_params(1.7 * PI, N=1), 1)) == "isometric"
    p = balanced_params(2.5 * PI, make_kernel_reflectionless)
    assert unitarity_class(make_kernel_reflectionless(p)) == "isometric"
    assert unitarity_class(make_kernel_fourier(p)) == "unitary"


def test_psi0_kernel_equals_the_explicit_example():
    p = balanced_params(1.5 * PI)
    a = make_kernel_psiN(p, 0)
    b = make_kernel_example(1, PI**2 / (2 * p.rho_kappa), p)
    r, k = np.meshgrid(np.linspace(-3, 3, 13), np.linspace(-3, 3, 13))
    assert np.abs(a.psi(r, k) - b.psi(r, k)).max() < 1e-13
    assert b.kernel_id == "F+phi0"


def test_endpoint_kernel_is_signed_fourier():
    for m in (2, 3, 4):
        p = ScaleParams.from_rho_kappa(1.0, PI / m)
        k = make_kernel_psiN(p, 0)
        assert k.flags["plane_wave"] and k.flags["m"] == m
        assert k.psi(0.7, 1.3) == pytest.approx((-1) ** (m - 1) * np.exp(0.91j))


@pytest.mark.parametrize("rk, N", [(1.5 * PI, 0), (2.5 * PI, 0), (2.4 * PI, 1)])
def test_residue_sums_vanish_in_unitary_window(rk, N):
    k = make_kernel_psiN(balanced_params(rk, N=N), N)
    for kk, kp in ((0.7, 1.3), (2.1, 0.4)):
        for d, dp in ((1, 1), (1, -1), (-1, -1)):
            assert abs(residue_sum_forward(k, kk, kp, d, dp)) < 1e-12
    for r, rp in ((0.2, 0.9), (-1.4, 0.6)):
        assert abs(residue_sum_adjoint(k, r, rp)) < 1e-12


@pytest.mark.parametrize("rk, N", [(2.36, 0), (1.7 * PI, 1)])
def test_adjoint_residue_sum_is_the_bound_state_projector(rk, N):
    p = balanced_params(rk, N=N)
    k = make_kernel_psiN(p, N)
    fn, c = predict_defect(k.kernel_id, p, "adjoint").factors[0]
    for r, rp in ((0.3, -0.7), (1.1, 0.4)):
        pred = c * fn(r) * np.conj(fn(rp))
        assert abs(residue_sum_adjoint(k, r, rp) - pred) < 1e-12 * abs(pred)


def test_prediction_interval_errors():
    with pytest.raises(IntervalMismatch):
        predict_defect("psiN-1", balanced_params(0.8 * PI, N=1), "forward")
    with pytest.raises(IntervalMismatch):
        predict_defect("Fa", ScaleParams.from_rho_kappa(1.0, 1.5 * PI), "adjoint")
    with pytest.raises(IntervalMismatch):
        predict_defect("nonsense", ScaleParams(1.0, 1.0), "adjoint")


def test_numerical_rank():
    v = np.array([1.0, 2.0, -1.0j])
    assert numerical_rank(np.outer(v, v.conj()))[0] == 1
    assert numerical_rank(np.zeros((3, 3)))[0] == 0
    assert numerical_rank(np.eye(3) * 1e-3)[0] == 3


def test_fourier_gram_is_identity_and_report_serializes():
    p = ScaleParams.from_rho_kappa(1.0, 1.5)
    k = make_kernel_fourier(p)
    rep = gram_defect(k, default_position_basis(1, count=3), "adjoint")
    assert np.abs(rep.gram_defect).max() < 1e-12 and rep.numerical_rank == 0
    json.dumps(rep.to_json())
    with pytest.raises(ValueError):
        gram_defect(k, [], "sideways")


def test_isometry_violation_window_n1():
    """rho*kappa in (pi, 3pi/2) for N = 1: rank-two forward defect (chi_e, chi_o)
    and rank-one adjoint defect along Psi_1, both matching the closed forms."""
    p = balanced_params(1.3 * PI, N=1)
    k = make_kernel_psiN(p, 1)
    assert unitarity_class(k) == "none"
    for side, basis, rank in (("forward", default_momentum_basis(0, per_component=4), 2),
                              ("adjoint", default_position_basis(0, count=4), 1)):
        meas = gram_defect(k, basis, side)
        pred = predict_defect(k.kernel_id, p, side, basis)
        assert meas.numerical_rank == pred.numerical_rank == rank
        assert np.abs(meas.gram_defect - pred.gram_defect).max() < 1e-9
