"""Hyperbolic gamma function G(a+, a-; z).

G is the minimal meromorphic solution of the pair of shift equations

    G(z + i a_d / 2) / G(z - i a_d / 2) = 2 cosh(pi z / a_{-d}),   d = +, -

normalised by G(0) = 1.  In the horizontal strip |Im z| < a = (a+ + a-)/2 it
is the exponential of an explicit integral; elsewhere we walk back into the
strip with the shift equation in the smaller period.

The evaluator works with ``log G`` throughout.  The logarithm it returns is
analytic in each of the half planes Re z > 0 and Re z < 0 (the ladder factors
use ``log(2 cosh u) = +-u + log1p(exp(-+2u))`` with the sign of Re u), which
is what makes square roots of products of G well defined off the real axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AtPole, LadderOverflow
from .numerics import sinc_m1, sinhc_m1

__all__ = [
    "ScaleParams",
    "HypGammaEvaluator",
    "hyp_gamma",
    "log_hyp_gamma",
    "hyp_gamma_asymptotic",
    "log_two_cosh",
]

_POLE_GUARD = 1e-9


@dataclass(frozen=True)
class ScaleParams:
    """The two positive periods and the dimensionless split used by transforms.

    ``rho`` fixes how the product ``rho*kappa = pi*a_minus/a_plus`` is split;
    by default the two are taken equal.
    """

    a_plus: float
    a_minus: float
    rho: float | None = field(default=None, compare=True)

    def __post_init__(self) -> None:
        if not (self.a_plus > 0 and self.a_minus > 0):
            raise ValueError("a_plus and a_minus must be positive")
        if not (math.isfinite(self.a_plus) and math.isfinite(self.a_minus)):
            raise ValueError("a_plus and a_minus must be finite")
        if self.rho is not None and not self.rho > 0:
            raise ValueError("rho must be positive")

    @classmethod
    def from_rho_kappa(cls, rho: float, kappa: float, a_minus: float = 1.0) -> "ScaleParams":
        """Parameters with ``rho*kappa = pi*a_minus/a_plus`` and the given split."""
        return cls(a_plus=math.pi * a_minus / (rho * kappa), a_minus=a_minus, rho=rho)

    @property
    def a(self) -> float:
        return 0.5 * (self.a_plus + self.a_minus)

    @property
    def a_min(self) -> float:
        return min(self.a_plus, self.a_minus)

    @property
    def a_max(self) -> float:
        return max(self.a_plus, self.a_minus)

    @property
    def rho_kappa(self) -> float:
        return math.pi * self.a_minus / self.a_plus

    @property
    def rho_value(self) -> float:
        return self.rho if self.rho is not None else math.sqrt(self.rho_kappa)

    @property
    def kappa(self) -> float:
        return self.rho_kappa / self.rho_value

    @property
    def chi(self) -> float:
        """Constant phase in the large-|Re z| asymptotics of G."""
        return math.pi / 24 * (self.a_plus / self.a_minus + self.a_minus / self.a_plus)

    def tau_of_b(self, b: float) -> float:
        return math.pi * b / self.a_plus

    def swapped(self) -> "ScaleParams":
        return ScaleParams(self.a_minus, self.a_plus)

    # dimensionless <-> physical variables
    def x_of_r(self, r):
        return self.a_minus * np.asarray(r) / self.rho_value

    def y_of_k(self, k):
        return self.a_minus * np.asarray(k) / self.kappa

    def r_of_x(self, x):
        return self.rho_value * np.asarray(x) / self.a_minus

    def k_of_y(self, y):
        return self.kappa * np.asarray(y) / self.a_minus


def log_two_cosh(u: np.ndarray, sign: np.ndarray | None = None) -> np.ndarray:
    """``log(2 cosh u)`` on the half-plane branch selected by ``sign``.

    With ``sign = +1`` this is ``u + log1p(exp(-2u))`` (analytic for Re u > 0),
    with ``sign = -1`` it is ``-u + log1p(exp(2u))``.  By default the sign of
    Re u is used.
    """
    u = np.asarray(u, dtype=complex)
    if sign is None:
        sign = np.where(u.real >= 0, 1.0, -1.0)
    return sign * u + np.log1p(np.exp(-2 * sign * u))


class HypGammaEvaluator:
    """Vectorised evaluator for G and log G at fixed periods."""

    def __init__(self, params: ScaleParams, strip_margin: float | None = None, ladder_limit: int = 400):
        self.params = params
        a = params.a
        self.strip_margin = 0.5 * params.a_min if strip_margin is None else float(strip_margin)
        if not 0 < self.strip_margin < a:
            raise ValueError("strip_margin must lie in (0, a)")
        self.ladder_limit = ladder_limit
        self._ap, self._am = params.a_plus, params.a_minus
        # half-width of the strip in y where the integrand is analytic
        self._d = 0.9 * math.pi / params.a_max
        self._hmax = 2 * math.pi * self._d / 40.0
        self._cache: dict[tuple[int, int], tuple] = {}

    # -- public API ------------------------------------------------------------
    def __call__(self, z):
        return np.exp(self.log(z))

    def log(self, z):
        """Analytic (per half plane) logarithm of G at ``z``."""
        z = np.asarray(z, dtype=complex)
        shape = z.shape
        zf = z.ravel()
        self._check_poles(zf)
        p = self.params
        step = p.a_min
        other = p.a_max
        eta = zf.imag
        n = np.where(np.abs(eta) <= self.strip_margin, 0, np.rint(eta / step)).astype(int)
        if n.size and np.abs(n).max() > self.ladder_limit:
            raise LadderOverflow(f"|Im z| needs {np.abs(n).max()} ladder steps")
        z0 = zf - 1j * step * n
        out = self._strip_log(z0)
        if np.any(n != 0):
            sign = np.where(zf.real >= 0, 1.0, -1.0)
            for j in range(int(np.abs(n).max())):
                up = n > j
                if np.any(up):
                    w = zf[up] - 1j * step * j - 0.5j * step
                    out[up] += log_two_cosh(np.pi * w / other, sign[up])
                dn = -n > j
                if np.any(dn):
                    w = zf[dn] + 1j * step * j + 0.5j * step
                    out[dn] -= log_two_cosh(np.pi * w / other, sign[dn])
        return out.reshape(shape)

    def asymptotic(self, z, sign: int):
        """Leading behaviour ``exp(-+i(chi + pi z^2 / 2 a+ a-))`` for Re z -> +-inf."""
        z = np.asarray(z, dtype=complex)
        p = self.params
        return np.exp(-sign * 1j * (p.chi + np.pi * z * z / (2 * p.a_plus * p.a_minus)))

    # -- internals -------------------------------------------------------------
    def _check_poles(self, z: np.ndarray) -> None:
        p = self.params
        cand = np.nonzero(np.abs(z.real) < _POLE_GUARD)[0]
        for idx in cand:
            eta = z[idx].imag
            if abs(eta) < p.a - _POLE_GUARD:
                continue
            m = abs(eta) - p.a
            for k in range(int(m / p.a_plus) + 2):
                rem = m - k * p.a_plus
                l = int(round(rem / p.a_minus))
                if l >= 0 and abs(rem - l * p.a_minus) < _POLE_GUARD:
                    raise AtPole(complex(z[idx]), k, l, "zero" if eta > 0 else "pole")

    def _nodes(self, level: int, count: int):
        key = (level, count)
        if key not in self._cache:
            h = self._hmax * 2.0 ** (-0.5 * level)
            y = h * np.arange(1, count + 1)
            ap, am, s = self._ap, self._am, self.params.a
            mp, mm, ms = sinhc_m1(ap * y), sinhc_m1(am * y), sinhc_m1(s * y)
            s_m1 = mp + mm + mp * mm
            q_m1 = -ms * (2 + ms) / (1 + ms) ** 2
            self._cache[key] = (h, y, s_m1, 1 + s_m1, q_m1, 1.0 / (ap * am * y * y))
        return self._cache[key]

    def _strip_log(self, z: np.ndarray) -> np.ndarray:
        p = self.params
        ap, am, s = p.a_plus, p.a_minus, p.a
        d = self._d
        need_h = 2 * math.pi * d / (40.0 + 2 * d * np.abs(z.real))
        level = np.ceil(2 * np.log2(self._hmax / need_h) - 1e-12).astype(int)
        level = np.maximum(level, 0)
        out = np.empty(z.shape, dtype=complex)
        f0 = z / (ap * am) * (-(4 * z * z + ap * ap + am * am) / 6 + s * s / 3)
        for lev in np.unique(level):
            idx = np.nonzero(level == lev)[0]
            zz = z[idx]
            ymax = (42.0 + np.log1p(np.abs(zz)).max()) / (2 * (p.a - np.abs(zz.imag).max()))
            h = self._hmax * 2.0 ** (-0.5 * lev)
            count = int(math.ceil(ymax / h))
            count = 1 << max(4, int(math.ceil(math.log2(count))))  # bucket node counts
            h, y, s_m1, S, q_m1, pref = self._nodes(int(lev), count)
            for start in range(0, idx.size, 256):
                sl = slice(start, start + 256)
                zc = zz[sl][:, None]
                bracket = (sinc_m1(2 * y[None, :] * zc) - s_m1[None, :]) / S[None, :] - q_m1[None, :]
                total = (zc * pref[None, :] * bracket).sum(axis=1)
                integral = h * (0.5 * f0[idx[sl]] + total)
                out[idx[sl]] = 1j * (integral - zz[sl] * s / (ap * am))
        return out


def log_hyp_gamma(ev: HypGammaEvaluator, z):
    """``log G(z)`` (analytic within each half plane)."""
    return ev.log(z)


def hyp_gamma(ev: HypGammaEvaluator, z):
    """``G(z)``; raises :class:`AtPole` at poles and zeros."""
    return ev(z)


def hyp_gamma_asymptotic(ev: HypGammaEvaluator, z, sign: int):
    """Asymptotic form of G for ``Re z -> sign * infinity``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return ev.asymptotic(z, sign)
