"""Quadrature and residue primitives used throughout relcm.

Everything here is generic numerics: a truncated trapezoidal rule for
exponentially decaying integrands on the real line (spectrally accurate for
integrands analytic in a strip), a composite Gauss-Legendre rule for finite
intervals, and a trapezoidal contour rule for residues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ContourThroughSingularity, InvalidDecay, NonConvergence

__all__ = [
    "QuadResult",
    "ContourSpec",
    "integrate_real_line",
    "trapezoid_real_line",
    "residue_numeric",
    "gauss_legendre_panels",
    "sinc_m1",
    "sinhc_m1",
]

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadResult:
    """Value of a quadrature together with its error estimate."""

    value: complex
    err_estimate: float
    evaluations: int


@dataclass(frozen=True)
class ContourSpec:
    """Circle used for numerical residues."""

    center: complex
    radius: float
    points: int = 64

    def __post_init__(self) -> None:
        if self.points < 16 or self.points % 2:
            raise ValueError("contour needs an even number of points >= 16")
        if not self.radius > 0:
            raise ValueError("contour radius must be positive")


def trapezoid_real_line(
    f: ArrayFn,
    lo: float,
    hi: float,
    tol: float = 1e-12,
    h0: float | None = None,
    max_halvings: int = 10,
    min_halvings: int = 1,
) -> QuadResult:
    """Trapezoidal rule on ``[lo, hi]`` with nested step halving.

    Intended for integrands that are negligible at both end points, in which
    case the rule converges geometrically.  The error estimate is the change
    produced by the last halving, which over-estimates the true error.
    """
    if not hi > lo:
        raise ValueError("empty integration range")
    span = hi - lo
    n = max(8, int(math.ceil(span / h0))) if h0 else 64
    h = span / n
    x = lo + h * np.arange(n + 1)
    fx = np.asarray(f(x))
    evals = x.size
    total = h * (fx.sum() - 0.5 * (fx[0] + fx[-1]))
    if not np.isfinite(total):
        raise NonConvergence("integrand is not finite on the grid")
    err = math.inf
    scale = max(h * float(np.abs(fx).sum()), 1e-300)
    for k in range(max_halvings):
        mid = lo + h * (np.arange(n) + 0.5)
        fm = np.asarray(f(mid))
        evals += mid.size
        new = 0.5 * total + 0.5 * h * fm.sum()
        scale = max(scale, 0.5 * h * float(np.abs(fm).sum()) + 0.5 * scale)
        err = abs(new - total)
        total, h, n = new, h / 2, 2 * n
        if not np.isfinite(total):
            raise NonConvergence("integrand is not finite on the grid")
        if k + 1 >= min_halvings and err <= max(tol, 64 * np.finfo(float).eps * scale):
            return QuadResult(complex(total), float(err), evals)
    if err <= tol:
        return QuadResult(complex(total), float(err), evals)
    raise NonConvergence(f"trapezoid did not converge: err={err:.3e} > tol={tol:.1e}")


def integrate_real_line(
    f: ArrayFn,
    decay_rate: float,
    tol: float = 1e-12,
    center: float = 0.0,
    core: float = 0.0,
    h0: float | None = None,
    max_halvings: int = 10,
) -> QuadResult:
    """Integrate ``f`` over the real line.

    ``f`` must be vectorised and decay at least like ``exp(-decay_rate*|t|)``
    outside ``[center-core, center+core]``.  The line is truncated where the
    dropped tails are below ``tol/10`` (checked on the actual end values) and
    the remaining interval is handled by :func:`trapezoid_real_line`.
    """
    if not (decay_rate > 0 and math.isfinite(decay_rate)):
        raise InvalidDecay(f"decay rate must be positive and finite, got {decay_rate!r}")
    length = core + (math.log(10.0 / tol) + 2.0) / decay_rate
    for _ in range(6):
        ends = np.abs(np.asarray(f(np.array([center - length, center + length]))))
        if np.all(np.isfinite(ends)) and ends.max() / decay_rate < tol / 10:
            break
        length *= 1.5
    else:
        raise NonConvergence("integrand does not decay at the advertised rate")
    if h0 is None:
        h0 = min(0.5 / decay_rate, length / 16)
    return trapezoid_real_line(f, center - length, center + length, tol, h0, max_halvings)


@lru_cache(maxsize=64)
def _gl_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def gauss_legendre_panels(lo: float, hi: float, panels: int, order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of a composite Gauss-Legendre rule on ``[lo, hi]``."""
    t, w = _gl_nodes(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def residue_numeric(f: Callable[[np.ndarray], np.ndarray], pole: complex, spec: ContourSpec | None = None) -> complex:
    """Residue of ``f`` at ``pole`` via the trapezoidal rule on a circle.

    ``spec.center`` is ignored when it is ``None``-like; the circle is centred
    at ``pole`` unless a different centre is given explicitly.
    """
    if spec is None:
        spec = ContourSpec(center=pole, radius=1e-2, points=64)
    theta = 2 * np.pi * np.arange(spec.points) / spec.points
    e = np.exp(1j * theta)
    z = spec.center + spec.radius * e
    vals = np.asarray(f(z), dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise ContourThroughSingularity(f"non-finite integrand on contour around {pole!r}")
    return complex(spec.radius * np.mean(vals * e))


# -- cancellation-free elementary helpers ------------------------------------
_SINC_COEFFS = [(-1) ** k / math.factorial(2 * k + 1) for k in range(1, 10)]
_SINHC_COEFFS = [1.0 / math.factorial(2 * k + 1) for k in range(1, 10)]


def _series(u2: np.ndarray, coeffs: list[float]) -> np.ndarray:
    acc = np.zeros_like(u2)
    for c in reversed(coeffs):
        acc = acc * u2 + c
    return acc * u2


def sinc_m1(u: np.ndarray) -> np.ndarray:
    """``sin(u)/u - 1`` without cancellation near ``u = 0`` (complex input)."""
    u = np.asarray(u, dtype=complex)
    out = np.empty_like(u)
    small = np.abs(u) < 0.5
    us = u[small]
    out[small] = _series(us * us, _SINC_COEFFS)
    ub = u[~small]
    out[~small] = np.sin(ub) / ub - 1.0
    return out


def sinhc_m1(v: np.ndarray) -> np.ndarray:
    """``sinh(v)/v - 1`` without cancellation near ``v = 0``."""
    v = np.asarray(v)
    out = np.empty_like(v, dtype=np.result_type(v, float))
    small = np.abs(v) < 0.5
    vs = v[small]
    out[small] = _series(vs * vs, _SINHC_COEFFS)
    vb = v[~small]
    out[~small] = np.sinh(vb) / vb - 1.0
    return out
