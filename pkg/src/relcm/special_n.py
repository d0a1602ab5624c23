"""Elementary closed forms at the special couplings b = (N+1) a+.

At these couplings the integral representation collapses to finite sums of
exponentials: a coefficient matrix c^(N)_kl(q), q = exp(i pi a+/a-), fixes a
trigonometric polynomial Sigma_N, and everything else (weights, amplitudes,
asymptotic constants, bound state) is a finite product of sinh factors.

Naming: ``s``, ``c``, ``e`` below are sinh, cosh and exp of ``pi z / a-``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateParameters, DivisionNearZero, OutOfWindow, UnsupportedN
from .hypgamma import ScaleParams

__all__ = [
    "N_MAX",
    "CoeffMatrix",
    "SpecialNEvaluator",
    "compute_coeffs",
    "k_n",
    "sigma_n",
    "psi_n",
    "amplitudes_n",
    "asym_constants",
    "bound_state",
    "BoundState",
    "psi_reflectionless",
    "pair_sqrt",
]

N_MAX = 12


@dataclass(frozen=True)
class CoeffMatrix:
    N: int
    q: complex
    entries: np.ndarray

    def symmetry_residual(self) -> float:
        c = self.entries
        n = self.N
        flip = c[::-1, ::-1]
        conj = (-1) ** n * np.conj(c[:, ::-1])
        return float(max(np.abs(c - c.T).max(), np.abs(c - flip).max(), np.abs(c - conj).max()))


def _poly_of_sinh_product(q: complex, shifts: list[int], sign: int = 1) -> np.ndarray:
    """Coefficients of prod_j (Y q^(sign j) - Y^-1 q^(-sign j)) in powers Y^(M-2l)."""
    coeffs = np.array([1.0 + 0j])
    for j in shifts:
        a, b = q ** (sign * j), -(q ** (-sign * j))
        new = np.zeros(coeffs.size + 1, dtype=complex)
        new[:-1] += a * coeffs
        new[1:] += b * coeffs
        coeffs = new
    return coeffs


def is_nonresonant(params: ScaleParams, N: int) -> bool:
    """True when j a+ is not an integer multiple of a- for j = 1..2N."""
    for j in range(1, 2 * N + 1):
        ratio = j * params.a_plus / params.a_minus
        if abs(ratio - round(ratio)) < 1e-9 and round(ratio) > 0:
            return False
    return True


@lru_cache(maxsize=64)
def _coeffs_cached(a_plus: float, a_minus: float, N: int) -> CoeffMatrix:
    q = complex(np.exp(1j * np.pi * a_plus / a_minus))
    if N == 0:
        return CoeffMatrix(0, q, np.ones((1, 1), dtype=complex))
    size = N + 1
    nunk = size * size
    rows: dict[tuple[int, int], np.ndarray] = {}

    def add(ex: int, ey: int, idx: int, val: complex) -> None:
        row = rows.setdefault((ex, ey), np.zeros(nunk, dtype=complex))
        row[idx] += val

    for k in range(size):
        for l in range(size):
            idx = k * size + l
            mx, my = N - 2 * k, N - 2 * l
            # s(x + iN a+) Y Sigma(x - i a+, y)
            f1 = q ** (-mx)
            add(mx + 1, my + 1, idx, 0.5 * q**N * f1)
            add(mx - 1, my + 1, idx, -0.5 * q ** (-N) * f1)
            # s(x - iN a+) Y^-1 Sigma(x + i a+, y)
            f2 = q**mx
            add(mx + 1, my - 1, idx, 0.5 * q ** (-N) * f2)
            add(mx - 1, my - 1, idx, -0.5 * q**N * f2)
            # - 2 s(x) c(y) Sigma(x, y)
            for sx, sy, v in ((1, 1, 1), (1, -1, 1), (-1, 1, -1), (-1, -1, -1)):
                add(mx + sx, my + sy, idx, -0.5 * v)
    a_eq = np.array(list(rows.values()))
    b_eq = np.zeros(a_eq.shape[0], dtype=complex)
    # row k = 0 fixed by the product expansion
    row0 = _poly_of_sinh_product(q, list(range(1, N + 1)))
    fix = np.zeros((size, nunk), dtype=complex)
    for l in range(size):
        fix[l, l] = 1.0
    a_all = np.vstack([a_eq, fix])
    b_all = np.concatenate([b_eq, row0])
    sv = np.linalg.svd(a_all, compute_uv=False)
    if sv[-1] < 1e-10 * sv[0]:
        raise DegenerateParameters(f"coefficient system singular for a+/a- = {a_plus / a_minus}")
    sol, *_ = np.linalg.lstsq(a_all, b_all, rcond=None)
    resid = np.abs(a_all @ sol - b_all).max()
    if resid > 1e-8 * max(1.0, np.abs(sol).max()):
        raise DegenerateParameters(f"coefficient system inconsistent (residual {resid:.2e})")
    return CoeffMatrix(N, q, sol.reshape(size, size))


def compute_coeffs(params: ScaleParams, N: int) -> CoeffMatrix:
    """Coefficient matrix c^(N)(q) from the x-difference equation and the first row."""
    if not isinstance(N, (int, np.integer)) or N < 0:
        raise UnsupportedN(f"N must be a nonnegative integer, got {N!r}")
    if N > N_MAX:
        raise UnsupportedN(f"N={N} exceeds the supported maximum {N_MAX}")
    if not is_nonresonant(params, N):
        raise DegenerateParameters("j a+ is a multiple of a- for some j <= 2N")
    return _coeffs_cached(params.a_plus, params.a_minus, int(N))


def pair_sqrt(x, c: float, a_minus: float):
    """``sqrt(4 s(x + ic) s(x - ic))``, positive on the real axis and analytic
    in each half plane Re x > 0, Re x < 0."""
    x = np.asarray(x, dtype=complex)
    sg = np.where(x.real >= 0, 1.0, -1.0)
    up = np.pi * (sg * x + 1j * c) / a_minus
    um = np.pi * (sg * x - 1j * c) / a_minus
    return np.exp(np.pi * sg * x / a_minus) * np.sqrt(1 - np.exp(-2 * up)) * np.sqrt(1 - np.exp(-2 * um))


@dataclass(frozen=True)
class BoundState:
    """Bound-state data in the window a- in ((N+1/2) a+, (N+1) a+)."""

    handle: object
    norm: float
    energy: float
    norm_x: float


class SpecialNEvaluator:
    """All elementary functions at b = (N+1) a+."""

    def __init__(self, params: ScaleParams, N: int, coeffs: CoeffMatrix | None = None):
        self.params = params
        self.N = int(N)
        self.coeffs = coeffs if coeffs is not None else compute_coeffs(params, N)
        self.generic = is_nonresonant(params, N)
        self.b = (N + 1) * params.a_plus
        n = self.N
        self._k = np.arange(n + 1)

    # elementary helpers
    def s(self, z):
        return np.sinh(np.pi * np.asarray(z, dtype=complex) / self.params.a_minus)

    def e(self, z):
        return np.exp(np.pi * np.asarray(z, dtype=complex) / self.params.a_minus)

    def plane_wave(self, x, y):
        p = self.params
        return np.exp(1j * np.pi * np.asarray(x) * np.asarray(y) / (p.a_plus * p.a_minus))

    # Sigma_N, K_N
    def sigma(self, x, y):
        x = np.asarray(x, dtype=complex)[..., None, None]
        y = np.asarray(y, dtype=complex)[..., None, None]
        m = (self.N - 2 * self._k)
        ex = self.e(m[:, None] * x)
        ey = self.e(m[None, :] * y)
        return (self.coeffs.entries * ex * ey).sum(axis=(-1, -2))

    def k(self, x, y):
        return self.plane_wave(x, y) * self.sigma(x, y)

    def r_n(self, x, y):
        """The repulsive function at b = (N+1) a+ in elementary form."""
        n, ap = self.N, self.params.a_plus
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        den = np.ones(np.broadcast(x, y).shape, dtype=complex)
        for j in range(-n, n + 1):
            den = den * 4 * self.s(x + 1j * j * ap) * self.s(y + 1j * j * ap)
        return (-1j) ** (n + 1) * (self.k(x, y) - self.k(x, -y)) / den

    # weights
    def w(self, x):
        n, ap = self.N, self.params.a_plus
        x = np.asarray(x, dtype=complex)
        den = np.ones(x.shape, dtype=complex)
        for j in range(n + 1):
            den = den * 4 * self.s(x + 1j * (j + 0.5) * ap) * self.s(x - 1j * (j + 0.5) * ap)
        return 1 / den

    def w_sqrt(self, x):
        n, ap, am = self.N, self.params.a_plus, self.params.a_minus
        x = np.asarray(x, dtype=complex)
        out = np.ones(x.shape, dtype=complex)
        for j in range(n + 1):
            out = out / pair_sqrt(x, (j + 0.5) * ap, am)
        return out

    def v(self, y):
        n, ap = self.N, self.params.a_plus
        y = np.asarray(y, dtype=complex)
        den = np.ones(y.shape, dtype=complex)
        for j in range(1, n + 2):
            den = den * 2j * self.s(y - 1j * j * ap)
        return 1 / den

    def ell(self, x, y, tau: int):
        n, ap = self.N, self.params.a_plus
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        tot = 0
        for d in (1, -1):
            tot = tot + 2 * d * self.s(x - 1j * d * (n + 0.5) * ap) * self.e(d * (1j * (n + 1) * ap - y) / 2) \
                * self.e(-d * tau * y / 2) * self.sigma(x + 0.5j * d * ap, tau * y)
        return (-1) ** n * 1j ** (n + 1) * tau * tot

    def lam(self, x, y, tau: int):
        return self.plane_wave(x, y) ** tau * self.ell(x, y, tau)

    def m(self, x, y, tau: int):
        return self.v(y) * self.ell(x, y, tau)

    def psi_direct(self, x, y):
        """psi_N assembled literally as w^(1/2) v sum_tau lambda^tau (moderate arguments)."""
        return self.w_sqrt(x) * self.v(y) * (self.lam(x, y, 1) + self.lam(x, y, -1))

    def psi(self, x, y):
        """psi_N with all exponentials balanced, stable for large |Re x|, |Re y|."""
        p, n = self.params, self.N
        ap, am = p.a_plus, p.a_minus
        x, y = np.broadcast_arrays(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex))
        shape = x.shape
        x = x.ravel()[:, None]
        y = y.ravel()[:, None]
        sx = np.where(x.real >= 0, 1.0, -1.0)
        sy = np.where(y.real >= 0, 1.0, -1.0)
        # bounded parts of w^(1/2) and v
        w_hat = np.ones(x.shape, dtype=complex)
        for j in range(n + 1):
            c = (j + 0.5) * ap
            up = np.pi * (sx * x + 1j * c) / am
            um = np.pi * (sx * x - 1j * c) / am
            w_hat = w_hat / (np.sqrt(1 - np.exp(-2 * up)) * np.sqrt(1 - np.exp(-2 * um)))
        v_hat = np.ones(y.shape, dtype=complex)
        for j in range(1, n + 2):
            shifted = y - 1j * j * ap
            v_hat = v_hat / (1j * sy * np.exp(-sy * 1j * np.pi * j * ap / am) * (1 - np.exp(-2 * sy * np.pi * shifted / am)))
        # enumerate the exponential terms
        terms = []
        coefs = []
        c = self.coeffs.entries
        pw = 1j * np.pi * x * y / (ap * am)
        for tau in (1, -1):
            for d in (1, -1):
                for eps in (1, -1):
                    for k in range(n + 1):
                        for l in range(n + 1):
                            ex = (-(n + 1) * sx * x - (n + 1) * sy * y
                                  + eps * (x - 1j * d * (n + 0.5) * ap)
                                  + d * (1j * (n + 1) * ap - y) / 2 - d * tau * y / 2
                                  + (n - 2 * k) * (x + 0.5j * d * ap) + (n - 2 * l) * tau * y)
                            terms.append(np.pi * ex / am + tau * pw)
                            coefs.append(tau * d * eps * c[k, l])
        expo = np.concatenate(terms, axis=1)
        total = (np.array(coefs)[None, :] * np.exp(expo)).sum(axis=1)
        out = (-1) ** n * 1j ** (n + 1) * w_hat[:, 0] * v_hat[:, 0] * total
        return out.reshape(shape)

    # amplitudes and asymptotic constants
    def amplitudes(self, y):
        n, ap = self.N, self.params.a_plus
        y = np.asarray(y, dtype=complex)
        u = np.ones(y.shape, dtype=complex)
        for j in range(1, n + 1):
            den = self.s(1j * j * ap - y)
            if np.any(np.abs(den) < 1e-14):
                raise DivisionNearZero("s_-(i j a+ - y) vanishes")
            u = u * self.s(1j * j * ap + y) / den
        den = self.s(1j * (n + 1) * ap - y)
        if np.any(np.abs(den) < 1e-14):
            raise DivisionNearZero("s_-(i(N+1)a+ - y) vanishes")
        t = self.s(y) * u / den
        r = self.s(1j * (n + 1) * ap) * u / den
        return u, t, r

    def asym_constants(self, x):
        n, ap = self.N, self.params.a_plus
        x = np.asarray(x, dtype=complex)
        cn = (-1) ** (n + 1) * self.e(0.5j * (n + 1) ** 2 * ap) * np.ones(x.shape, dtype=complex)
        un = self.e(1j * (n + 1) ** 2 * ap) * np.ones(x.shape, dtype=complex)
        for j in range(n + 1):
            cn = cn * 2 * self.s(x + 1j * (j + 0.5) * ap)
            un = un * self.s(x + 1j * (j + 0.5) * ap) / self.s(x - 1j * (j + 0.5) * ap)
        return cn, un

    def p_n(self) -> complex:
        n, ap = self.N, self.params.a_plus
        return complex(np.prod([2 * self.s(1j * j * ap) for j in range(n + 1, 2 * n + 2)]))

    # bound state
    def in_bound_window(self) -> bool:
        p, n = self.params, self.N
        return (n + 0.5) * p.a_plus < p.a_minus < (n + 1) * p.a_plus

    def bound_state_x(self, x):
        """The bound state in the x variable: 2 cosh(pi x/a+) w_N(x)^(1/2)."""
        n, ap, am = self.N, self.params.a_plus, self.params.a_minus
        x = np.asarray(x, dtype=complex)
        # cosh growth and the weight decay are combined in one exponent so that
        # the tails underflow cleanly instead of producing inf * 0.
        sx = np.where(x.real >= 0, 1.0, -1.0) * x
        out = (1 + np.exp(-2 * np.pi * sx / ap)) * np.exp(np.pi * sx / ap - (n + 1) * np.pi * sx / am)
        for j in range(n + 1):
            c = (j + 0.5) * ap
            out = out / (np.sqrt(1 - np.exp(-2 * np.pi * (sx + 1j * c) / am))
                         * np.sqrt(1 - np.exp(-2 * np.pi * (sx - 1j * c) / am)))
        return out

    def bound_norm(self) -> float:
        """Squared norm of 2 cosh(kappa r) w^(1/2) in L^2(R, dr)."""
        p, n = self.params, self.N
        rk, kap = p.rho_kappa, p.kappa
        num = np.prod([math.sin(j * math.pi**2 / rk) for j in range(1, n + 1)])
        den = np.prod([math.sin(j * math.pi**2 / rk) for j in range(n + 1, 2 * n + 2)])
        return float((-1) ** (n + 1) * math.pi * num / (kap * den))

    def energy(self) -> float:
        p = self.params
        return 2 * (-1) ** (self.N + 1) * math.cos(math.pi * p.a_minus / p.a_plus)

    def residue_factor(self) -> complex:
        """Residue of psi_N at y = i(N+1)a+ - i a- divided by the bound state."""
        p, n = self.params, self.N
        r = p.a_plus / p.a_minus
        num = np.prod([math.sin(math.pi * j * r) for j in range(n + 1, 2 * n + 2)])
        den = np.prod([math.sin(math.pi * j * r) for j in range(1, n + 1)])
        return complex((-1) ** (n + 1) * 1j * p.a_minus * num / (math.pi * den))


def k_n(ev: SpecialNEvaluator, x, y):
    return ev.k(x, y)


def sigma_n(ev: SpecialNEvaluator, x, y):
    return ev.sigma(x, y)


def psi_n(ev: SpecialNEvaluator, x, y):
    return ev.psi(x, y)


def amplitudes_n(ev: SpecialNEvaluator, y):
    """(u_N, t_N, r_N) at y."""
    return ev.amplitudes(y)


def asym_constants(ev: SpecialNEvaluator, x):
    """(C_N, U_N) at x."""
    return ev.asym_constants(x)


def bound_state(ev: SpecialNEvaluator) -> BoundState:
    """Bound-state handle (a function of r), its squared norm and energy."""
    if not ev.in_bound_window():
        raise OutOfWindow("a- must lie in ((N+1/2) a+, (N+1) a+) for a bound state")
    p = ev.params

    def handle(r):
        return ev.bound_state_x(p.x_of_r(r))

    norm = ev.bound_norm()
    return BoundState(handle=handle, norm=norm, energy=ev.energy(), norm_x=norm * p.a_minus / p.rho_value)


def psi_reflectionless(params: ScaleParams, N: int, x, y):
    """Attractive eigenfunction at b = (N+1) a- (vanishing reflection)."""
    ap, am = params.a_plus, params.a_minus
    coeffs = compute_coeffs(params.swapped(), N).entries
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    ep = lambda z: np.exp(np.pi * z / ap)
    num = 0
    for k in range(N + 1):
        for l in range(N + 1):
            num = num + (-1) ** k * coeffs[k, l] * ep((N - 2 * k) * x + (N - 2 * l) * y)
    den = 1
    for j in range(1, N + 1):
        den = den * 2 * np.sinh(np.pi * (y - 1j * j * am) / ap)
        den = den * _cosh_pair_sqrt(x, j * am, ap)
    return np.exp(1j * np.pi * x * y / (ap * am)) * num / den


def _cosh_pair_sqrt(x, c: float, a_plus: float):
    """sqrt(4 cosh(pi(x - ic)/a+) cosh(pi(x + ic)/a+)), positive on the real axis."""
    x = np.asarray(x, dtype=complex)
    sg = np.where(x.real >= 0, 1.0, -1.0)
    up = np.pi * (sg * x + 1j * c) / a_plus
    um = np.pi * (sg * x - 1j * c) / a_plus
    return np.exp(np.pi * sg * x / a_plus) * np.sqrt(1 + np.exp(-2 * up)) * np.sqrt(1 + np.exp(-2 * um))
