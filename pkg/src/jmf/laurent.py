"""Laurent data of a form at its poles.

    phi(z_s + eps)            = sum_j Dt_j / (2 pi i eps)^j + O(1)
    F^(s)(eps) phi(z_s + eps) = sum_j D_j  / (2 pi i eps)^j + O(1)

with F^(s)(eps; tau) = exp(M pi eps^2 / v) e(M a b + 2 M a eps) q^{M a^2}.
Coefficients are read off an FFT of samples on a small circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import LeadingCoefficientVanishes, RadiusTooLarge
from .formspec import ThetaQuotientForm, eval_form, poles
from .numerics import (
    DEFAULT_PRECISION,
    TWO_PI_I,
    Precision,
    TorsionPoint,
    check_tau,
    laurent_coefficients,
    lattice_distance,
    reduce_to_P,
)

MAX_RADIUS = 0.1


@dataclass(frozen=True)
class LaurentData:
    """Dtilde[j-1] and D[j-1] hold the coefficients of 1/(2 pi i eps)^j, j = 1..n_s."""

    s: TorsionPoint
    n_s: int
    tau: complex
    Dtilde: np.ndarray
    D: np.ndarray | None = None
    radius: float = 0.0


def F_s(M: int, s: TorsionPoint, eps, tau):
    """F^(s)(eps; tau); holomorphic in eps."""
    tau = check_tau(tau)
    a, b = float(s.alpha), float(s.beta)
    v = tau.imag
    eps = np.asarray(eps, dtype=complex)
    out = np.exp(M * math.pi * eps * eps / v + TWO_PI_I * (M * a * b + 2 * M * a * eps + M * a * a * tau))
    return complex(out) if out.ndim == 0 else out


def F_deriv_poly(M: int, s: TorsionPoint, n: int, tau) -> complex:
    """n-th eps-derivative of F^(s) at eps = 0 in closed form.

    F = C exp(A eps^2 + B eps) with A = M pi / v, B = 4 pi i M a, so
    F^(n)(0) = C sum_k n! / (k! (n-2k)!) A^k B^(n-2k).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    tau = check_tau(tau)
    a = float(s.alpha)
    A = M * math.pi / tau.imag
    B = 4j * math.pi * M * a
    C = F_s(M, s, 0.0, tau)
    total = sum(math.factorial(n) / (math.factorial(k) * math.factorial(n - 2 * k)) * A ** k * B ** (n - 2 * k)
                for k in range(n // 2 + 1))
    return complex(C * total)


def pole_order(form: ThetaQuotientForm, s: TorsionPoint) -> int:
    s0, _ = reduce_to_P(s)
    for d in poles(form):
        if d.s == s0:
            return d.order
    raise ValueError(f"{s} is not a pole of the form")


def default_radius(form: ThetaQuotientForm, tau) -> float:
    """1/4 of the minimal distance between distinct singularity translates, capped at 0.1."""
    tau = check_tau(tau)
    pts = [d.z(tau) for d in poles(form)]
    best = min(abs(tau), 1.0, abs(tau - 1), abs(tau + 1))
    for i, a in enumerate(pts):
        for b in pts[i + 1:]:
            best = min(best, lattice_distance(a - b, tau))
    return min(best / 4, MAX_RADIUS)


def _principal(g, c, radius: float, n_s: int, samples: int) -> np.ndarray:
    coef = laurent_coefficients(g, c, radius, samples)
    # coefficient of eps^{-j} sits at FFT index -j
    return np.array([coef[-j] * TWO_PI_I ** j for j in range(1, n_s + 1)])


def _resolve_radius(form, tau, p: Precision) -> float:
    safe = default_radius(form, tau)
    if p.cauchy_radius is None:
        return safe
    if p.cauchy_radius >= 2 * safe:
        raise RadiusTooLarge(f"radius {p.cauchy_radius} reaches past half the distance to the next singularity")
    return p.cauchy_radius


def laurent_tilde(form: ThetaQuotientForm, s: TorsionPoint, tau, p: Precision = DEFAULT_PRECISION,
                  tol: float = 1e-12) -> LaurentData:
    """Dt_j^(s)(tau) for j = 1..n_s by the Cauchy integral on a circle around z_s."""
    tau = check_tau(tau)
    n_s = pole_order(form, s)
    r = _resolve_radius(form, tau, p)
    zs = s.z(tau)
    samples = max(p.cauchy_samples, 4 * n_s + 16)
    Dt = _principal(lambda w: eval_form(form, w, tau, p, check_poles=False), zs, r, n_s, samples)
    scale = max(1.0, float(np.max(np.abs(Dt))))
    if abs(Dt[-1]) < tol * scale:
        raise LeadingCoefficientVanishes(f"|Dt_{n_s}| = {abs(Dt[-1]):.2e}: pole order overstated")
    return LaurentData(s, n_s, tau, Dt, None, r)


def laurent_D(form: ThetaQuotientForm, s: TorsionPoint, tau, p: Precision = DEFAULT_PRECISION,
              tol: float = 1e-12) -> LaurentData:
    """Both Dt_j and D_j; D from the Cauchy integral of F^(s)(eps) phi(z_s + eps)."""
    base = laurent_tilde(form, s, tau, p, tol)
    M = form.index
    zs = s.z(base.tau)
    samples = max(p.cauchy_samples, 4 * base.n_s + 16)

    def g(w):
        return F_s(M, s, w - zs, base.tau) * eval_form(form, w, base.tau, p, check_poles=False)

    D = _principal(g, zs, base.radius, base.n_s, samples)
    return LaurentData(s, base.n_s, base.tau, base.Dtilde, D, base.radius)


def laurent_D_closed(Dtilde, M: int, s: TorsionPoint, tau) -> np.ndarray:
    """D_j = sum_{lam=j}^{n_s} Dt_lam * delta^{lam-j} F^(s)(0) / (lam-j)!, delta = d/(2 pi i d eps)."""
    Dt = np.asarray(Dtilde, dtype=complex)
    n_s = len(Dt)
    dF = [F_deriv_poly(M, s, m, tau) / TWO_PI_I ** m for m in range(n_s)]
    out = np.zeros(n_s, dtype=complex)
    for j in range(1, n_s + 1):
        out[j - 1] = sum(Dt[lam - 1] * dF[lam - j] / math.factorial(lam - j) for lam in range(j, n_s + 1))
    return out


def reconstruction_residual(form: ThetaQuotientForm, data: LaurentData, p: Precision = DEFAULT_PRECISION) -> tuple[float, float]:
    """(max |phi - principal part| on the half-radius circle, same on the full circle).

    The regular remainder is holomorphic, so the first number should not exceed
    about twice the second.
    """
    zs = data.s.z(data.tau)
    out = []
    for r in (data.radius / 2, data.radius):
        eps = r * np.exp(2j * math.pi * np.arange(32) / 32)
        phi = eval_form(form, zs + eps, data.tau, p, check_poles=False)
        pp = sum(data.Dtilde[j - 1] / (TWO_PI_I * eps) ** j for j in range(1, data.n_s + 1))
        out.append(float(np.max(np.abs(phi - pp))))
    return out[0], out[1]
