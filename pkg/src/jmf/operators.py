"""Differential operators on smooth functions of (eps; tau).

    heat      H_M   = 8 pi i M d/dtau + d^2/deps^2
    raising   R_k   = 2i d/dtau + k/v
    Laplacian Delta_k = -v^2 (d_u^2 + d_v^2) + i k v (d_u + i d_v)

d/dtau is always the holomorphic Wirtinger derivative (d_u - i d_v)/2, since
the completed objects are real-analytic rather than holomorphic in tau.
Mixed partials come from tensor-product central stencils with two levels of
Richardson extrapolation.  Derivatives in eps use a Cauchy circle whenever
the function is holomorphic in eps or can be evaluated in polarised form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import HeatPreconditionFailed, NonFiniteSample, StepUnderflow
from .numerics import DEFAULT_PRECISION, TWO_PI_I, Precision, check_tau, laurent_coefficients

MAX_DEPTH = 4
EPS_RADIUS = 0.05
_MACH = np.finfo(float).eps


@dataclass(frozen=True)
class SmoothFn1:
    """f(tau)."""

    fn: Callable[[complex], complex]

    def __call__(self, tau):
        return complex(self.fn(tau))


@dataclass(frozen=True)
class SmoothFn2:
    """g(eps; tau).

    ``holomorphic_in_eps`` allows Cauchy circles directly.  ``polarized``, if
    given, evaluates g(eps; tau) with Im(eps) replaced by a (complex) y; it turns
    the holomorphic Wirtinger derivative in eps into an ordinary complex one.
    """

    fn: Callable[[complex, complex], complex]
    holomorphic_in_eps: bool = False
    polarized: Callable[[complex, complex, complex], complex] | None = None

    def __call__(self, eps, tau):
        return complex(self.fn(eps, tau))

    def at_eps(self, eps) -> SmoothFn1:
        return SmoothFn1(lambda tau: self.fn(eps, tau))


# ---------------------------------------------------------------------------
# stencils


@lru_cache(maxsize=None)
def _central_weights(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Offsets and weights of the second-order central stencil for the order-th derivative."""
    if order == 0:
        return np.array([0]), np.array([1.0])
    r = (order + 1) // 2
    offs = np.arange(-r, r + 1)
    A = np.vander(offs.astype(float), increasing=True).T
    rhs = np.zeros(len(offs))
    rhs[order] = math.factorial(order)
    return offs, np.linalg.solve(A, rhs)


def _step(order: int, v: float, p: Precision) -> float:
    h = 4.0 * _MACH ** (1.0 / (order + 6))
    h = max(h, p.fd_step)
    return min(h, v / 4)


def _partial(f: Callable, x: float, y: float, a: int, b: int, h: float) -> tuple[complex, float]:
    """d_x^a d_y^b f at (x, y) with step h; returns (value, rounding estimate)."""
    ox, wx = _central_weights(a)
    oy, wy = _central_weights(b)
    total = 0j
    fmax = 0.0
    for i, wi in zip(ox, wx):
        for j, wj in zip(oy, wy):
            if wi == 0 or wj == 0:
                continue
            val = complex(f(complex(x + i * h, y + j * h)))
            if not math.isfinite(val.real) or not math.isfinite(val.imag):
                raise NonFiniteSample(f"non-finite sample at {complex(x + i * h, y + j * h)}")
            fmax = max(fmax, abs(val))
            total += wi * wj * val
    scale = float(np.abs(wx).sum() * np.abs(wy).sum())
    return total / h ** (a + b), _MACH * fmax * scale / h ** (a + b)


def _richardson_partial(f: Callable, pt: complex, a: int, b: int, h: float) -> tuple[complex, float]:
    d = [_partial(f, pt.real, pt.imag, a, b, h / 2 ** i) for i in range(3)]
    r1 = [(4 * d[i + 1][0] - d[i][0]) / 3 for i in range(2)]
    val = (16 * r1[1] - r1[0]) / 15
    return val, 2 * d[2][1]


def wirtinger_nth(f: Callable, pt: complex, m: int, p: Precision = DEFAULT_PRECISION,
                  scale: float | None = None) -> complex:
    """m-th holomorphic Wirtinger derivative ((d_x - i d_y)/2)^m f at pt.

    ``scale`` bounds the step (e.g. the distance to the real axis for tau).
    Raises StepUnderflow when rounding would eat more than half the digits.
    """
    if m == 0:
        return complex(f(pt))
    if m > MAX_DEPTH:
        raise StepUnderflow(f"derivative order {m} exceeds the supported depth {MAX_DEPTH}")
    h = _step(m, scale if scale is not None else 1.0, p)
    total = 0j
    err = 0.0
    for i in range(m + 1):
        c = math.comb(m, i) * (-1j) ** i / 2 ** m
        val, e = _richardson_partial(f, pt, m - i, i, h)
        total += c * val
        err += abs(c) * e
    if err > math.sqrt(_MACH) * max(abs(total), abs(complex(f(pt))), 1e-300):
        raise StepUnderflow(f"finite differences of order {m} lost more than half the digits")
    return total


def tau_derivative(f: Callable, tau, m: int = 1, p: Precision = DEFAULT_PRECISION) -> complex:
    """m-th Wirtinger derivative d^m/dtau^m of f at tau."""
    tau = check_tau(tau)
    return wirtinger_nth(f, tau, m, p, scale=tau.imag)


def eps_derivative(g: SmoothFn2, eps, tau, m: int, p: Precision = DEFAULT_PRECISION,
                   radius: float | None = None) -> complex:
    """m-th (holomorphic Wirtinger) eps-derivative of g at (eps, tau)."""
    eps = complex(eps)
    tau = check_tau(tau)
    r = radius if radius is not None else (p.cauchy_radius or EPS_RADIUS)
    n = max(p.cauchy_samples, 2 * m + 16)
    if g.holomorphic_in_eps:
        h = lambda e: g.fn(e, tau)
    elif g.polarized is not None:
        y0 = eps.imag
        h = lambda e: g.polarized(e, tau, y0 + (e - eps) / 2j)
    else:
        return wirtinger_nth(lambda e: g.fn(e, tau), eps, m, p)
    coef = laurent_coefficients(h, eps, r, n)
    return complex(coef[m] * math.factorial(m))


def delta_eps(g: SmoothFn2, eps, tau, m: int, p: Precision = DEFAULT_PRECISION) -> complex:
    """delta_eps^m g with delta_eps = (1/2 pi i) d/deps."""
    return eps_derivative(g, eps, tau, m, p) / TWO_PI_I ** m


# ---------------------------------------------------------------------------
# operators


def heat_apply(M: int, g: SmoothFn2, eps, tau, p: Precision = DEFAULT_PRECISION) -> complex:
    """H_M g at (eps, tau)."""
    tau = check_tau(tau)
    dtau = tau_derivative(lambda t: g.fn(eps, t), tau, 1, p)
    return 8j * math.pi * M * dtau + eps_derivative(g, eps, tau, 2, p)


def raising_coefficients(k: float, n: int) -> list[complex]:
    """a_m with R_k^n = sum_m a_m v^{m-n} (d/dtau)^m, m = 0..n.

    Built from R_{k'} (v^p D^m) = p v^{p-1} D^m + 2i v^p D^{m+1} + k' v^{p-1} D^m,
    using 2i d/dtau (v^p) = p v^{p-1}.
    """
    coeffs = [1.0 + 0j]
    for step in range(n):
        kk = k + 2 * step
        new = [0j] * (len(coeffs) + 1)
        for m, a in enumerate(coeffs):
            pw = m - step
            new[m] += a * (pw + kk)
            new[m + 1] += 2j * a
        coeffs = new
    return coeffs


def raise_(k: float, f, tau, p: Precision = DEFAULT_PRECISION) -> complex:
    """R_k f at tau."""
    return raise_iter(k, 1, f, tau, p)


def raise_iter(k: float, n: int, f, tau, p: Precision = DEFAULT_PRECISION) -> complex:
    """R_k^n f = R_{k+2(n-1)} o ... o R_k f (identity for n = 0)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > MAX_DEPTH:
        raise StepUnderflow(f"raising depth {n} exceeds {MAX_DEPTH}")
    tau = check_tau(tau)
    fn = f.fn if isinstance(f, SmoothFn1) else f
    v = tau.imag
    total = 0j
    for m, a in enumerate(raising_coefficients(k, n)):
        if a == 0:
            continue
        d = complex(fn(tau)) if m == 0 else tau_derivative(fn, tau, m, p)
        total += a * v ** (m - n) * d
    return total


def laplacian(k: float, f, tau, p: Precision = DEFAULT_PRECISION) -> complex:
    """Delta_k f at tau (u = Re tau, v = Im tau)."""
    tau = check_tau(tau)
    fn = f.fn if isinstance(f, SmoothFn1) else f
    v = tau.imag
    h1 = _step(1, v, p)
    h2 = _step(2, v, p)
    fu, _ = _richardson_partial(fn, tau, 1, 0, h1)
    fv, _ = _richardson_partial(fn, tau, 0, 1, h1)
    fuu, _ = _richardson_partial(fn, tau, 2, 0, h2)
    fvv, _ = _richardson_partial(fn, tau, 0, 2, h2)
    return -v * v * (fuu + fvv) + 1j * k * v * (fu + 1j * fv)


def F00(M: int, eps, tau) -> complex:
    return complex(np.exp(M * math.pi * complex(eps) ** 2 / complex(tau).imag))


@dataclass(frozen=True)
class RaisingIdentityResult:
    lhs: complex
    rhs: complex
    residual: float
    heat_residual: float


def raising_identity_check(g: SmoothFn2, M: int, j: int, tau, p: Precision = DEFAULT_PRECISION, odd: bool = False,
                           heat_tol: float = 1e-4, heat_eps: complex = 0.0) -> RaisingIdentityResult:
    """Compare delta^{2j(+1)}[g / F^(0,0)]_{eps=0} with the raising-operator side.

    even: (M/pi)^j R_{1/2}^j (g(0; tau))
    odd:  (M/pi)^j R_{3/2}^j (delta_eps[g]_{eps=0})
    The heat equation H_M g = 0 is checked first (HeatPreconditionFailed).
    """
    tau = check_tau(tau)
    heat = abs(heat_apply(M, g, heat_eps, tau, p)) / (1.0 + abs(g(heat_eps, tau)))
    if heat > heat_tol:
        raise HeatPreconditionFailed(f"|H_M g| = {heat:.2e} exceeds {heat_tol}")
    order = 2 * j + (1 if odd else 0)

    def ratio(e, t):
        return g.fn(e, t) / F00(M, e, t)

    pol = None
    if g.polarized is not None:
        pol = lambda e, t, y: g.polarized(e, t, y) / F00(M, e, t)
    h = SmoothFn2(ratio, g.holomorphic_in_eps, pol)
    lhs = delta_eps(h, 0.0, tau, order, p)
    if odd:
        inner = lambda t: delta_eps(g, 0.0, t, 1, p)
        rhs = (M / math.pi) ** j * raise_iter(1.5, j, inner, tau, p)
    else:
        rhs = (M / math.pi) ** j * raise_iter(0.5, j, lambda t: g.fn(0.0, t), tau, p)
    return RaisingIdentityResult(lhs, rhs, abs(lhs - rhs) / (1.0 + abs(rhs)), heat)
