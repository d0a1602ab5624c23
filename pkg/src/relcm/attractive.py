"""Attractive-regime eigenfunction built from two shifted copies of the
repulsive integral, its transmission/reflection amplitudes, and the
Yang-Baxter relations those amplitudes satisfy together with ``u``.
"""

from __future__ import annotations

import numpy as np

from .errors import DivisionNearZero
from .repulsive import RepulsiveEvaluator

__all__ = [
    "AttractiveEvaluator",
    "psi_general",
    "amplitudes",
    "yang_baxter_residual",
    "time_reversal_residual",
    "psi_asymptotic_defect",
]

_ZERO_GUARD = 1e-12


class AttractiveEvaluator:
    """Attractive eigenfunction at coupling ``b`` in ``(-a+/2, a- + a+/2)``."""

    def __init__(self, rep: RepulsiveEvaluator, b: float | None = None):
        p = rep.params
        b = rep.b if b is None else float(b)
        if not -0.5 * p.a_plus < b < p.a_minus + 0.5 * p.a_plus:
            raise ValueError(f"b={b} outside the attractive window (-a+/2, a- + a+/2)")
        if b != rep.b:
            rep = RepulsiveEvaluator(rep.gamma, b, rep.tol)
        self.rep = rep
        self.params = p
        self.b = b

    # elementary pieces
    def _s(self, z):
        return np.sinh(np.pi * np.asarray(z, dtype=complex) / self.params.a_minus)

    def _e(self, z):
        return np.exp(np.pi * np.asarray(z, dtype=complex) / self.params.a_minus)

    def plane_wave(self, x, y):
        p = self.params
        return np.exp(1j * np.pi * np.asarray(x) * np.asarray(y) / (p.a_plus * p.a_minus))

    def gauge_part(self, x, y):
        """``psi / w~^(1/2)``: the square-root free part of the eigenfunction."""
        p, b = self.params, self.b
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        den = 2 * self._s(1j * b - y)
        if np.any(np.abs(den) < _ZERO_GUARD):
            raise DivisionNearZero("s_-(ib - y) vanishes")
        plus = self._e((1j * b - y) / 2) * self.rep.r_ren(x + 0.5j * p.a_plus, y)
        minus = self._e((y - 1j * b) / 2) * self.rep.r_ren(x - 0.5j * p.a_plus, y)
        return np.exp(-self.rep.log_c(-y)) / den * (plus - minus)

    def psi(self, x, y):
        return self.rep.weight_w_tilde_sqrt(x) * self.gauge_part(x, y)

    def amplitudes(self, y):
        y = np.asarray(y, dtype=complex)
        b = self.b
        den = self._s(1j * b - y)
        if np.any(np.abs(den) < _ZERO_GUARD):
            raise DivisionNearZero("s_-(ib - y) vanishes")
        u = self.rep.scattering_u(y)
        t = self._s(y) * u / den
        r = self._s(1j * b) * u / den
        return t, r, u


def psi_general(ev: AttractiveEvaluator, x, y):
    """The attractive eigenfunction psi(b; x, y)."""
    return ev.psi(x, y)


def amplitudes(ev: AttractiveEvaluator, y):
    """Transmission ``t``, reflection ``r`` and the repulsive ``u`` at ``y``."""
    return ev.amplitudes(y)


def yang_baxter_residual(ev: AttractiveEvaluator, y1, y2, y3):
    """Left minus right sides of the two (u, t, r) Yang-Baxter equations."""
    t12, r12, u12 = ev.amplitudes(np.asarray(y1) - np.asarray(y2))
    t13, r13, u13 = ev.amplitudes(np.asarray(y1) - np.asarray(y3))
    t23, r23, u23 = ev.amplitudes(np.asarray(y2) - np.asarray(y3))
    res1 = r12 * t13 * u23 - t23 * u13 * r12 - r23 * r13 * t12
    res2 = u12 * r13 * u23 - t23 * r13 * t12 - r23 * u13 * r12
    return res1, res2


def time_reversal_residual(ev: AttractiveEvaluator, x, y):
    """``psi(x,y) - t(y) psi(-x,-y) + r(y) psi(x,-y)`` relative to ``|psi(x,y)|``."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    t, r, _ = ev.amplitudes(y)
    base = ev.psi(x, y)
    res = base - t * ev.psi(-x, -y) + r * ev.psi(x, -y)
    return res / np.maximum(np.abs(base), 1e-300)


def psi_asymptotic_defect(ev: AttractiveEvaluator, x, y, side: int):
    """psi minus its dominant plane-wave form for ``Re x -> side * infinity``."""
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    t, r, _ = ev.amplitudes(y)
    pw = ev.plane_wave(x, y)
    if side == 1:
        lead = t * pw
    else:
        lead = pw - r * ev.plane_wave(x, -np.asarray(y))
    return ev.psi(x, y) - lead
