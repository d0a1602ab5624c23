"""Time-dependent scattering for diagonalized dynamics.

Momentum-side dynamics ``mu`` (even, increasing on k > 0) act as multipliers on
the momentum components and are carried to position space by the forward
transform; position-side dynamics ``d`` (odd, increasing) act as multipliers on
position functions and are carried to momentum space by the adjoint transform.
States keep their defining bump data plus an accumulated evolution time, so
every evolution is a multiplier sandwiched between transforms.

Wave-operator defects compare the interacting evolution with the free one
(plane-wave kernel): for momentum dynamics

    || (F0 - F) exp(-i t mu) f ||,            t -> -inf,
    || (F0 - F S(.)^* ) exp(-i t mu) f ||,    t -> +inf (outgoing form),

and for position dynamics

    || (F0^* - F^* U(+-r)^(1/2)) exp(-i t d) h ||,   t -> -+inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .errors import NonUnitaryKernel
from .numerics import gauss_legendre_panels
from .transforms import (
    Bump,
    KernelSpec,
    PositionFn,
    TwoComponentFn,
    adjoint_many,
    forward_many,
    make_kernel_fourier,
    unitarity_class,
)

__all__ = [
    "DynamicsSpec",
    "ScatteringState",
    "mu_cm",
    "d_cm",
    "evolve",
    "position_values",
    "momentum_values",
    "state_norm",
    "wave_operator_defect",
    "defect_ladder",
    "symmetry_checks",
    "time_reversal_residual",
    "in_out_residual",
    "s_matrix_unitarity",
]

SQRT2PI = math.sqrt(2 * math.pi)


@dataclass(frozen=True)
class DynamicsSpec:
    """A multiplier dynamics with its derivative (the monotonicity certificate)."""

    kind: str  # "multiplier_mu" or "multiplier_d"
    fn: Callable
    derivative: Callable
    name: str = "custom"

    def __post_init__(self) -> None:
        if self.kind not in ("multiplier_mu", "multiplier_d"):
            raise ValueError("kind must be 'multiplier_mu' or 'multiplier_d'")
        t = np.linspace(0.05, 6.0, 64)
        f_pos, f_neg = np.asarray(self.fn(t)), np.asarray(self.fn(-t))
        parity = 1.0 if self.kind == "multiplier_mu" else -1.0
        if not np.allclose(f_neg, parity * f_pos, rtol=1e-12, atol=1e-12):
            raise ValueError(f"{self.kind} needs an {'even' if parity > 0 else 'odd'} function")
        grid = t if self.kind == "multiplier_mu" else np.concatenate([-t, [0.0], t])
        if np.any(np.asarray(self.derivative(grid)) <= 0):
            raise ValueError("derivative certificate fails: fn' must be positive")

    def max_slope(self, lo: float, hi: float) -> float:
        g = np.linspace(lo, hi, 257)
        return float(np.max(np.abs(self.derivative(g))))


def mu_cm(rho: float) -> DynamicsSpec:
    """mu(k) = 2 cosh(rho k)."""
    return DynamicsSpec("multiplier_mu", lambda k: 2 * np.cosh(rho * np.asarray(k)),
                        lambda k: 2 * rho * np.sinh(rho * np.asarray(k)), name="mu_CM")


def d_cm(kappa: float) -> DynamicsSpec:
    """d(r) = 2 sinh(kappa r)."""
    return DynamicsSpec("multiplier_d", lambda r: 2 * np.sinh(kappa * np.asarray(r)),
                        lambda r: 2 * kappa * np.cosh(kappa * np.asarray(r)), name="d_CM")


@dataclass(frozen=True)
class ScatteringState:
    """Bump data on the side where the dynamics is diagonal, plus elapsed time."""

    momentum: TwoComponentFn | None = None
    position: PositionFn | None = None
    time: float = 0.0


class _PhasedMomentum:
    """exp(-i t mu(k)) f(k), quacking like a TwoComponentFn for the transforms."""

    def __init__(self, f: TwoComponentFn, dyn: DynamicsSpec, t: float, matrix: Callable | None = None):
        self.f, self.dyn, self.t, self.matrix = f, dyn, t, matrix
        lo, hi = f.support()
        spread = abs(t) * dyn.max_slope(lo, hi)
        self.min_width = _BUMP_CUT / (_BUMP_CUT / f.min_width + spread)
        self.spread = spread

    def support(self):
        return self.f.support()

    def component(self, delta: int, k):
        k = np.asarray(k, dtype=float)
        phase = np.exp(-1j * self.t * self.dyn.fn(k))
        if self.matrix is None:
            return phase * self.f.component(delta, k)
        # (S(k)^* g)_delta = conj(T) g_delta + conj(R) g_-delta
        t_, r_ = self.matrix(k)
        return phase * (np.conj(t_) * self.f.component(delta, k) + np.conj(r_) * self.f.component(-delta, k))


class _PhasedPosition:
    """exp(-i t d(r)) h(r) * factor(r), quacking like a PositionFn."""

    def __init__(self, h: PositionFn, dyn: DynamicsSpec, t: float, factor: Callable | None = None):
        self.h, self.dyn, self.t, self.factor = h, dyn, t, factor
        lo, hi = h.support()
        spread = abs(t) * dyn.max_slope(lo, hi)
        self.min_width = _BUMP_CUT / (_BUMP_CUT / h.min_width + spread)
        self.spread = spread

    def support(self):
        return self.h.support()

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        val = np.exp(-1j * self.t * self.dyn.fn(r)) * self.h(r)
        if self.factor is not None:
            val = val * self.factor(r)
        return val


_BUMP_CUT = 9.0


def _require(kernel: KernelSpec, dyn: DynamicsSpec) -> None:
    cls = unitarity_class(kernel)
    need = ("unitary", "isometric") if dyn.kind == "multiplier_mu" else ("unitary",)
    if cls not in need:
        raise NonUnitaryKernel(
            f"kernel {kernel.kernel_id} is '{cls}' at rho*kappa = {kernel.params.rho_kappa:.6g}; "
            f"{dyn.kind} dynamics needs {' or '.join(need)}"
        )


def evolve(kernel: KernelSpec, dyn: DynamicsSpec, state: ScatteringState, t: float) -> ScatteringState:
    """Advance ``state`` by time ``t`` under the dynamics diagonalized by ``kernel``."""
    _require(kernel, dyn)
    if dyn.kind == "multiplier_mu" and state.momentum is None:
        raise ValueError("momentum dynamics needs a momentum-side state")
    if dyn.kind == "multiplier_d" and state.position is None:
        raise ValueError("position dynamics needs a position-side state")
    return replace(state, time=state.time + float(t))


def position_values(kernel: KernelSpec, dyn: DynamicsSpec, state: ScatteringState, r) -> np.ndarray:
    """U(t) F f evaluated at ``r`` (momentum dynamics)."""
    return forward_many(kernel, [_PhasedMomentum(state.momentum, dyn, state.time)], r)[0]


def momentum_values(kernel: KernelSpec, dyn: DynamicsSpec, state: ScatteringState, k) -> np.ndarray:
    """U_hat(t) F^* h evaluated at ``k`` (position dynamics); shape (2, len(k))."""
    return adjoint_many(kernel, [_PhasedPosition(state.position, dyn, state.time)], k)[0]


def _r_grid(kernel: KernelSpec, spread: float, width: float, kmax: float, accuracy: float = 30.0):
    d_r, _ = kernel.pole_distances()
    r_max = spread + 9.0 / width + 4.0 * kernel.rho + 8.0
    dr = min(2 * math.pi * d_r / (accuracy + 2 * kmax * d_r), 2 * math.pi / (2 * kmax + 18.0 / width))
    n = int(math.ceil(2 * r_max / dr))
    return np.linspace(-r_max, r_max, n + 1)


def _k_nodes(kernel: KernelSpec, spread: float, width: float, rmax: float):
    _, d_k = kernel.pole_distances()
    k_max = spread + 9.0 / width + 4.0 * kernel.kappa + 8.0
    panel = min(d_k, 1.0, 8.0 / (2 * rmax + 1))
    return gauss_legendre_panels(0.0, k_max, int(math.ceil(k_max / panel)), 16)


def state_norm(kernel: KernelSpec, dyn: DynamicsSpec, state: ScatteringState) -> float:
    """Norm of the evolved state on the opposite side of the transform."""
    if dyn.kind == "multiplier_mu":
        ph = _PhasedMomentum(state.momentum, dyn, state.time)
        r = _r_grid(kernel, ph.spread, state.momentum.min_width, state.momentum.support()[1])
        vals = forward_many(kernel, [ph], r)[0]
        return float(math.sqrt((r[1] - r[0]) * np.sum(np.abs(vals) ** 2)))
    ph = _PhasedPosition(state.position, dyn, state.time)
    rmax = max(abs(x) for x in state.position.support())
    k, w = _k_nodes(kernel, ph.spread, state.position.min_width, rmax)
    vals = adjoint_many(kernel, [ph], k)[0]
    return float(math.sqrt(np.sum(w[None, :] * np.abs(vals) ** 2)))


def wave_operator_defect(kernel: KernelSpec, dyn: DynamicsSpec, state: ScatteringState, t: float) -> float:
    """Distance between the interacting-from-free evolution and its limiting wave operator.

    For ``t < 0`` the incoming form is used, for ``t > 0`` the outgoing one; the
    state's own elapsed time is ignored (the defect is measured at time ``t``).
    """
    _require(kernel, dyn)
    free = make_kernel_fourier(kernel.params)
    if dyn.kind == "multiplier_mu":
        f = state.momentum
        if f is None:
            raise ValueError("momentum dynamics needs a momentum-side state")
        plain = _PhasedMomentum(f, dyn, t)
        if t <= 0:
            twisted = plain
        else:
            twisted = _PhasedMomentum(f, dyn, t, matrix=lambda k: (kernel.T(k), kernel.R(k)))
        r = _r_grid(kernel, plain.spread, f.min_width, f.support()[1])
        diff = forward_many(free, [plain], r)[0] - forward_many(kernel, [twisted], r)[0]
        return float(math.sqrt((r[1] - r[0]) * np.sum(np.abs(diff) ** 2)))
    h = state.position
    if h is None:
        raise ValueError("position dynamics needs a position-side state")
    # incoming: U(r)^(1/2); outgoing: U(-r)^(1/2), which is U(r)^(-1/2) up to the
    # r-independent phase U(r)^(1/2) U(-r)^(1/2)
    side = 1.0 if t <= 0 else -1.0

    def u_half(r):
        rr = side * np.asarray(r, dtype=float)
        return kernel.C(rr) * kernel.w_sqrt(rr)

    plain = _PhasedPosition(h, dyn, t)
    twisted = _PhasedPosition(h, dyn, t, factor=u_half)
    rmax = max(abs(x) for x in h.support())
    k, w = _k_nodes(kernel, plain.spread, h.min_width, rmax)
    diff = adjoint_many(free, [plain], k)[0] - adjoint_many(kernel, [twisted], k)[0]
    return float(math.sqrt(np.sum(w[None, :] * np.abs(diff) ** 2)))


def defect_ladder(kernel: KernelSpec, dyn: DynamicsSpec, state: ScatteringState,
                  times: Sequence[float]) -> list[dict]:
    """[{t, defect}] for plotting and trend checks."""
    return [{"t": float(t), "defect": wave_operator_defect(kernel, dyn, state, t)} for t in times]


# ---------------------------------------------------------------------------
# symmetries
# ---------------------------------------------------------------------------
def _sample_points(seed: int, n: int = 24):
    rng = np.random.default_rng(seed)
    r = rng.uniform(-4.0, 4.0, n)
    k = rng.uniform(0.1, 5.0, n)
    return r, k


def time_reversal_residual(kernel: KernelSpec, seed: int = 0) -> float:
    """max |Psi(r,k) - T(k) Psi(-r,-k) + R(k) Psi(r,-k)| over sampled points."""
    r, k = _sample_points(seed)
    res = kernel.psi(r, k) - kernel.T(k) * kernel.psi(-r, -k) + kernel.R(k) * kernel.psi(r, -k)
    return float(np.max(np.abs(res)))


def in_out_residual(kernel: KernelSpec, seed: int = 0) -> float:
    """max residual of Psi_in = S(k) Psi_out over sampled points."""
    r, k = _sample_points(seed)
    psi_p, psi_m = kernel.psi(r, k), kernel.psi(-r, k)
    tm, rm = kernel.T(-k), kernel.R(-k)
    phi_p = tm * psi_p - rm * psi_m
    phi_m = tm * psi_m - rm * psi_p
    t_, r_ = kernel.T(k), kernel.R(k)
    out_p, out_m = phi_p, -phi_m
    res1 = psi_p - (t_ * out_p + r_ * out_m)
    res2 = -psi_m - (r_ * out_p + t_ * out_m)
    return float(max(np.max(np.abs(res1)), np.max(np.abs(res2))))


def s_matrix_unitarity(kernel: KernelSpec, k=None) -> float:
    """max_k || S(k) S(k)^* - 1 ||_max."""
    k = np.linspace(0.05, 8.0, 200) if k is None else np.asarray(k, dtype=float)
    t_, r_ = kernel.T(k), kernel.R(k)
    d1 = np.abs(t_) ** 2 + np.abs(r_) ** 2 - 1
    d2 = t_ * np.conj(r_) + r_ * np.conj(t_)
    return float(max(np.max(np.abs(d1)), np.max(np.abs(d2))))


def parity_residual(kernel: KernelSpec, states: Sequence[TwoComponentFn], r=None) -> float:
    """max |(P F f)(r) - (F P_hat f)(r)| with (P_hat f)_(+/-) = -f_(-/+)."""
    r = np.linspace(-6.0, 6.0, 121) if r is None else np.asarray(r, dtype=float)
    swapped = [TwoComponentFn(plus=tuple(Bump(b.center, b.width, -b.amplitude) for b in f.minus),
                              minus=tuple(Bump(b.center, b.width, -b.amplitude) for b in f.plus)) for f in states]
    lhs = forward_many(kernel, states, -r)
    rhs = forward_many(kernel, swapped, r)
    return float(np.max(np.abs(lhs - rhs)))


def parity_gram_residual(kernel: KernelSpec, states: Sequence[TwoComponentFn]) -> float:
    """max |<F f_i, P F f_j> - <f_i, P_hat f_j>|; vanishes when F is isometric."""
    width = min(f.min_width for f in states)
    kmax = max(f.support()[1] for f in states)
    r = _r_grid(kernel, 0.0, width, kmax)
    img = forward_many(kernel, states, r)
    gram = (r[1] - r[0]) * (np.conj(img) @ img[:, ::-1].T)
    ref = np.zeros_like(gram)
    for i, f in enumerate(states):
        for j, g in enumerate(states):
            lo = min(f.support()[0], g.support()[0])
            hi = max(f.support()[1], g.support()[1])
            k = np.linspace(lo, hi, 4001)
            dk = k[1] - k[0]
            ref[i, j] = -dk * np.sum(np.conj(f.component(1, k)) * g.component(-1, k)
                                     + np.conj(f.component(-1, k)) * g.component(1, k))
    return float(np.max(np.abs(gram - ref)))


def symmetry_checks(kernel: KernelSpec, states: Sequence[TwoComponentFn] | None = None, seed: int = 0,
                    gram: bool = False) -> dict:
    """Report of S-matrix unitarity, time reversal, in/out relation and parity residuals."""
    report = {
        "kernel": kernel.kernel_id,
        "s_matrix_unitarity": s_matrix_unitarity(kernel),
        "time_reversal": time_reversal_residual(kernel, seed),
        "in_out": in_out_residual(kernel, seed),
    }
    if states:
        report["parity_pointwise"] = parity_residual(kernel, states)
        if gram:
            report["parity_gram"] = parity_gram_residual(kernel, states)
    return report
