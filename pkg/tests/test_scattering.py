import math

import numpy as np
import pytest

from relcm.errors import NonUnitaryKernel
from relcm.hypgamma import ScaleParams
from relcm.scattering import (
    DynamicsSpec,
    ScatteringState,
    d_cm,
    evolve,
    in_out_residual,
    mu_cm,
    s_matrix_unitarity,
    state_norm,
    symmetry_checks,
    time_reversal_residual,
    wave_operator_defect,
)
from relcm.suites import D_STATE, MU_STATE, balanced_params
from relcm.transforms import make_kernel_example, make_kernel_psiN, make_kernel_reflectionless

PI = math.pi


def test_dynamics_validation():
    with pytest.raises(ValueError):
        DynamicsSpec("multiplier_mu", lambda k: np.sinh(k), lambda k: np.cosh(k))
    with pytest.raises(ValueError):
        DynamicsSpec("multiplier_d", lambda r: np.sinh(r), lambda r: -np.cosh(r))
    with pytest.raises(ValueError):
        DynamicsSpec("other", np.cosh, np.sinh)
    assert mu_cm(1.0).max_slope(0.0, 1.0) == pytest.approx(2 * math.sinh(1.0))
    assert d_cm(0.5).name == "d_CM"


def test_kernel_class_gates_the_dynamics():
    iso = make_kernel_psiN(balanced_params(0.75 * PI), 0)
    with pytest.raises(NonUnitaryKernel):
        wave_operator_defect(iso, d_cm(iso.kappa), ScatteringState(position=D_STATE), -5.0)
    broken = make_kernel_psiN(balanced_params(0.4 * PI), 0)
    with pytest.raises(NonUnitaryKernel):
        evolve(broken, mu_cm(broken.rho), ScatteringState(momentum=MU_STATE), 1.0)


def test_evolution_accumulates_time_and_keeps_norm():
    p = ScaleParams.from_rho_kappa(1.0, 1.5 * PI)
    k = make_kernel_psiN(p, 0)
    dyn = mu_cm(p.rho_value)
    s0 = ScatteringState(momentum=MU_STATE)
    s1 = evolve(k, dyn, evolve(k, dyn, s0, 3.0), 4.0)
    assert s1.time == 7.0
    n0, n1 = state_norm(k, dyn, s0), state_norm(k, dyn, s1)
    assert abs(n1 - n0) < 1e-10 * n0


@pytest.mark.parametrize("factory, rk", [
    (lambda p: make_kernel_psiN(p, 0), 1.5 * PI),
    (lambda p: make_kernel_psiN(p, 1), 2.4 * PI),
    (lambda p: make_kernel_example(-1, PI**2 / (2 * p.rho_kappa) + PI / 2, p), 1.5 * PI),
    (make_kernel_reflectionless, 2.5 * PI),
])
def test_s_matrix_symmetries(factory, rk):
    p = balanced_params(rk, factory)
    k = factory(p)
    assert s_matrix_unitarity(k) < 1e-12
    assert time_reversal_residual(k, seed=3) < 1e-10
    assert in_out_residual(k, seed=3) < 1e-10


def test_parity_commutes_with_the_transform():
    p = ScaleParams.from_rho_kappa(1.0, 1.5 * PI)
    rep = symmetry_checks(make_kernel_psiN(p, 0), [MU_STATE], seed=1)
    assert rep["parity_pointwise"] < 1e-10
    assert set(rep) >= {"s_matrix_unitarity", "time_reversal", "in_out"}


def test_wave_operator_defect_shrinks():
    p = ScaleParams.from_rho_kappa(1.0, 1.5 * PI)
    k = make_kernel_psiN(p, 0)
    dyn = mu_cm(p.rho_value)
    state = ScatteringState(momentum=MU_STATE)
    d = [wave_operator_defect(k, dyn, state, t) for t in (-5.0, -20.0)]
    assert d[1] < d[0]
