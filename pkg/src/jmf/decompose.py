"""Finite/polar splitting of a theta-quotient form and its completion.

    h_l(tau)  = q^{-l^2/4M} int_{-l tau/2M}^{-l tau/2M + 1} phi(z) e(-l z) dz
    phi^F     = sum_{l mod 2M} h_l theta_{M,l},     phi^P = phi - phi^F

The polar part is computed three ways (difference, Laurent/Appell formula,
residue sum over the strip between the z-line and the canonical lines), and
the completions phi^P-hat, h_l-hat, phi^F-hat are built from the Laurent
data D_j and the R-function completions.

Poles lying on a canonical path are handled by averaging the integrals just
above and below the path (``path_policy="average"``); ``"raise"`` refuses.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .completions import R_M_ell, f_M, f_M_hat, rho, rho_hat, xi
from .errors import PathThroughPole, PoleCollision, TruncationInsufficient
from .formspec import ThetaQuotientForm, eval_form, poles
from .laurent import F_s, laurent_D
from .numerics import (
    DEFAULT_PRECISION,
    LATTICE_THRESHOLD,
    TWO_PI_I,
    Precision,
    TorsionPoint,
    check_tau,
    contour_integrate,
    laurent_coefficients,
    lattice_distance,
)
from .operators import raise_iter
from .theta import theta_level

PATH_POLICIES = ("average", "raise")
MAX_SAMPLES = 1 << 15
EPS_RADIUS = 0.05


@dataclass(frozen=True)
class SplitReport:
    finite: complex
    polar: complex
    total: complex
    residual: float


@dataclass(frozen=True)
class CoeffVector:
    M: int
    values: tuple[complex, ...]
    tau: complex
    kind: str

    def __getitem__(self, ell: int) -> complex:
        return self.values[ell % (2 * self.M)]


# ---------------------------------------------------------------------------
# geometry


def pole_heights(form: ThetaQuotientForm, lo: float, hi: float, tau) -> list[tuple[TorsionPoint, int, float]]:
    """Pole translates (s, lam, height/v) with lo <= alpha + lam <= hi, s reduced."""
    out = []
    for d in poles(form):
        a = float(d.s.alpha)
        for lam in range(math.floor(lo - a) - 1, math.ceil(hi - a) + 2):
            h = a + lam
            if lo - 1e-12 <= h <= hi + 1e-12:
                out.append((d.s, lam, h))
    return out


def elliptic_multiplier(form: ThetaQuotientForm, lam: int, mu: int) -> complex:
    """Constant eps_phi with phi(z + lam tau + mu) = eps_phi e(-M(lam^2 tau + 2 lam z)) phi(z).

    Per normalised factor: th_s(z + tau) = -e(-b) q^{-1/2} e(-z) th_s(z) and th_s(z + 1) = -e(a) th_s(z).
    """
    out = 1 + 0j
    for s, e in form.factors:
        u_tau = -cmath.exp(-2j * math.pi * float(s.beta))
        u_one = -cmath.exp(2j * math.pi * float(s.alpha))
        out *= (u_tau ** lam * u_one ** mu) ** e
    return out


def _samples_for(dist: float, p: Precision) -> int:
    need = int(math.ceil(40.0 / (2 * math.pi * max(dist, 1e-9))))
    n = max(p.contour_samples, need)
    if n > MAX_SAMPLES:
        raise PathThroughPole(f"a pole lies {dist:.2e} from the integration path")
    return n


# ---------------------------------------------------------------------------
# canonical Fourier coefficients


def _line_integral(form, ell: int, y: float, tau: complex, p: Precision, n: int) -> complex:
    start = complex(0.0, y)

    def g(w):
        return eval_form(form, w, tau, p, check_poles=False) * np.exp(-2j * math.pi * ell * w)

    return contour_integrate(g, start, start + 1, n)


def _h_at_height(form, ell: int, y: float, tau: complex, p: Precision, policy: str) -> complex:
    """q^{-l^2/4M} times the integral of phi e(-l z) along Im z = y (with the pole policy)."""
    v = tau.imag
    hts = [h * v for _, _, h in pole_heights(form, y / v - 1.5, y / v + 1.5, tau)]
    on = [h for h in hts if abs(h - y) < LATTICE_THRESHOLD]
    M = form.index
    pref = cmath.exp(-2j * math.pi * ell * ell / (4 * M) * tau)
    if not on:
        dist = min((abs(h - y) for h in hts), default=v)
        return pref * _line_integral(form, ell, y, tau, p, _samples_for(dist, p))
    if policy == "raise":
        raise PathThroughPole(f"a pole lies on the path Im z = {y:.6g}")
    if policy != "average":
        raise ValueError(f"unknown path policy {policy!r}")
    others = [abs(h - y) for h in hts if abs(h - y) >= LATTICE_THRESHOLD]
    delta = min(min(others, default=v) / 2, v / 4)
    n = _samples_for(delta, p)
    up = _line_integral(form, ell, y + delta, tau, p, n)
    down = _line_integral(form, ell, y - delta, tau, p, n)
    return pref * 0.5 * (up + down)


@lru_cache(maxsize=4096)
def _canonical_h_cached(form, ell: int, tau: complex, p: Precision, policy: str) -> complex:
    M = form.index
    y = -ell * tau.imag / (2 * M)
    return _h_at_height(form, ell, y, tau, p, policy)


def canonical_h(form: ThetaQuotientForm, ell: int, tau, p: Precision = DEFAULT_PRECISION,
                path_policy: str = "average") -> complex:
    """Canonical Fourier coefficient h_l(tau) along Im z = -l v / 2M."""
    return _canonical_h_cached(form, int(ell), check_tau(tau), p, path_policy)


def h_at_height(form: ThetaQuotientForm, ell: int, height, tau, p: Precision = DEFAULT_PRECISION,
                path_policy: str = "raise") -> complex:
    """Fourier coefficient of phi along Im z = height * v, normalised like h_l."""
    tau = check_tau(tau)
    return _h_at_height(form, int(ell), float(height) * tau.imag, tau, p, path_policy)


def h_vector(form: ThetaQuotientForm, tau, p: Precision = DEFAULT_PRECISION, path_policy: str = "average") -> CoeffVector:
    M = form.index
    return CoeffVector(M, tuple(canonical_h(form, l, tau, p, path_policy) for l in range(2 * M)), check_tau(tau), "h")


def finite_part(form: ThetaQuotientForm, z, tau, p: Precision = DEFAULT_PRECISION, path_policy: str = "average"):
    """phi^F(z) = sum_{l mod 2M} h_l theta_{M,l}(z)."""
    tau = check_tau(tau)
    M = form.index
    return sum(canonical_h(form, l, tau, p, path_policy) * theta_level(M, l, z, tau, p) for l in range(2 * M))


def polar_direct(form: ThetaQuotientForm, z, tau, p: Precision = DEFAULT_PRECISION, path_policy: str = "average"):
    """phi^P = phi - phi^F."""
    return eval_form(form, z, tau, p) - finite_part(form, z, tau, p, path_policy)


def split(form: ThetaQuotientForm, z, tau, p: Precision = DEFAULT_PRECISION, path_policy: str = "average") -> SplitReport:
    total = eval_form(form, z, tau, p)
    fin = finite_part(form, z, tau, p, path_policy)
    pol = polar_formula(form, z, tau, p)
    return SplitReport(complex(fin), complex(pol), complex(total), abs(total - fin - pol))


# ---------------------------------------------------------------------------
# Laurent data (cached per tau)


@lru_cache(maxsize=4096)
def _laurent(form, s: TorsionPoint, tau: complex, p: Precision):
    return laurent_D(form, s, tau, p)


def laurent_table(form: ThetaQuotientForm, tau, p: Precision = DEFAULT_PRECISION):
    """{s: LaurentData} over the reduced poles."""
    tau = check_tau(tau)
    return {d.s: _laurent(form, d.s, tau, p) for d in poles(form)}


def _eps_radius(z: complex, zs: complex, tau: complex) -> float:
    dist = lattice_distance(complex(z) - zs, tau)
    if dist < LATTICE_THRESHOLD:
        raise PoleCollision(f"z={z} coincides with a pole translate")
    return min(EPS_RADIUS, dist / 3)


def _taylor(fn, radius: float, order: int, n: int = 64) -> np.ndarray:
    """Taylor coefficients a_0..a_order of fn around eps = 0."""
    n = max(n, 2 * order + 16)
    return laurent_coefficients(fn, 0.0, radius, n)[: order + 1]


def _delta_series(coeffs: np.ndarray) -> np.ndarray:
    """delta^m at 0 from Taylor coefficients: m! a_m / (2 pi i)^m."""
    return np.array([math.factorial(m) * c / TWO_PI_I ** m for m, c in enumerate(coeffs)])


# ---------------------------------------------------------------------------
# polar part: Laurent/Appell formula and residue sum


def polar_formula(form: ThetaQuotientForm, z, tau, p: Precision = DEFAULT_PRECISION) -> complex:
    """-sum_s sum_j Dt_j/(j-1)! delta^{j-1}[f^(M)_{z_s+eps}(z) - sum_l xi(eps+z_s) theta_{M,l}(z)]_0."""
    tau = check_tau(tau)
    z = complex(z)
    M = form.index
    thetas = [theta_level(M, l, z, tau, p) for l in range(2 * M)]
    total = 0j
    for s, data in laurent_table(form, tau, p).items():
        zs = s.z(tau)
        r = _eps_radius(z, zs, tau)

        def g(eps):
            w = zs + np.asarray(eps)
            out = f_M(M, w, z, tau, p)
            for l in range(2 * M):
                out = out - xi(M, l, s, w, tau) * thetas[l]
            return out

        d = _delta_series(_taylor(g, r, data.n_s - 1))
        total -= sum(data.Dtilde[j - 1] / math.factorial(j - 1) * d[j - 1] for j in range(1, data.n_s + 1))
    return total


def _residue_term(form, ell: int, z: complex, yz: float, tau: complex, table, eps_tau: complex) -> complex:
    """Contribution of index l to the residue route (see polar_residue_sum)."""
    M = form.index
    yc = -ell / (2 * M)
    lo, hi = min(yz, yc), max(yz, yc)
    sign = -1.0 if yz > yc else 1.0
    term = 0j
    for s, lam, h in pole_heights(form, lo, hi, tau):
        if abs(h - yz) < 1e-12:
            raise PathThroughPole("a pole lies on the reference line Im z")
        weight = 0.5 if abs(h - yc) < 1e-12 else 1.0
        data = table[s]
        zs = s.z(tau)
        c = TWO_PI_I * (-2 * M * lam - ell)
        # phi(z_s + lam tau + eps) = eps_phi e(-M(lam^2 tau + 2 lam (z_s + eps))) phi(z_s + eps)
        base = eps_tau ** lam * np.exp(TWO_PI_I * (ell * (z - zs - lam * tau) - M * lam * lam * tau - 2 * M * lam * zs))
        res = sum(data.Dtilde[j - 1] / TWO_PI_I ** j * c ** (j - 1) / math.factorial(j - 1)
                  for j in range(1, data.n_s + 1))
        term += weight * base * res
    return sign * TWO_PI_I * term


def polar_residue_sum(form: ThetaQuotientForm, z, tau, reference_z=None, p: Precision = DEFAULT_PRECISION,
                      ell_max: int = 4000, tail_tol: float = 1e-15) -> complex:
    """Residue-theorem route: sum over l of +-2 pi i Res[phi e(-l w)] e(l z).

    For each l the poles strictly between Im w = Im(reference) and the
    canonical line Im w = -l v / 2M contribute fully; poles on the canonical
    line contribute half, matching the averaged path.  The l-sum runs outward
    until three consecutive terms on both sides fall below ``tail_tol``
    relative to the running total.
    """
    tau = check_tau(tau)
    z = complex(z)
    if reference_z is None:
        ref = z
    elif isinstance(reference_z, TorsionPoint):
        ref = reference_z.z(tau)
    else:
        ref = complex(reference_z)
    yz = ref.imag / tau.imag
    table = laurent_table(form, tau, p)
    eps_tau = elliptic_multiplier(form, 1, 0)
    total = _residue_term(form, 0, z, yz, tau, table, eps_tau)
    quiet = 0
    for ell in range(1, ell_max + 1):
        a = _residue_term(form, ell, z, yz, tau, table, eps_tau)
        b = _residue_term(form, -ell, z, yz, tau, table, eps_tau)
        total += a + b
        quiet = quiet + 1 if max(abs(a), abs(b)) < tail_tol * max(1.0, abs(total)) else 0
        if quiet >= 3:
            return total
    raise TruncationInsufficient(f"residue sum not converged after |l| = {ell_max}")


# ---------------------------------------------------------------------------
# completions


def _hat_kernel_deltas(M: int, ell: int, s: TorsionPoint, tau: complex, order: int, p: Precision) -> np.ndarray:
    """delta^m [ (R_{M,l}/2 - xi)(eps + z_s) / F^(s)(eps) ]_{eps=0} for m = 0..order (polarised)."""
    a = float(s.alpha)
    zs = s.z(tau)
    ell = ell % (2 * M)

    def g(eps):
        eps = np.asarray(eps, dtype=complex)
        y = a * tau.imag + eps / 2j
        val = 0.5 * R_M_ell(M, ell, zs + eps, tau, p, y_w=y) - xi(M, ell, s, zs + eps, tau)
        return val / F_s(M, s, eps, tau)

    return _delta_series(_taylor(g, EPS_RADIUS, order))


def completion_correction(form: ThetaQuotientForm, ell: int, tau, p: Precision = DEFAULT_PRECISION) -> complex:
    """sum_s sum_j D_j/(j-1)! delta^{j-1}[(R_{M,l}/2 - xi)/F^(s)]_0, so that h-hat = h - this."""
    tau = check_tau(tau)
    M = form.index
    total = 0j
    for s, data in laurent_table(form, tau, p).items():
        d = _hat_kernel_deltas(M, ell, s, tau, data.n_s - 1, p)
        total += sum(data.D[j - 1] / math.factorial(j - 1) * d[j - 1] for j in range(1, data.n_s + 1))
    return total


def completed_h(form: ThetaQuotientForm, ell: int, tau, p: Precision = DEFAULT_PRECISION,
                path_policy: str = "average") -> complex:
    """h-hat_l = h_l - completion_correction."""
    return canonical_h(form, ell, tau, p, path_policy) - completion_correction(form, ell, tau, p)


def h_hat_vector(form: ThetaQuotientForm, tau, p: Precision = DEFAULT_PRECISION, path_policy: str = "average") -> CoeffVector:
    M = form.index
    tau = check_tau(tau)
    return CoeffVector(M, tuple(completed_h(form, l, tau, p, path_policy) for l in range(2 * M)), tau, "h_hat")


def completed_finite(form: ThetaQuotientForm, z, tau, p: Precision = DEFAULT_PRECISION, path_policy: str = "average"):
    """phi^F-hat = sum_l h-hat_l theta_{M,l}."""
    tau = check_tau(tau)
    M = form.index
    return sum(completed_h(form, l, tau, p, path_policy) * theta_level(M, l, z, tau, p) for l in range(2 * M))


def completed_polar(form: ThetaQuotientForm, z, tau, p: Precision = DEFAULT_PRECISION) -> complex:
    """phi^P-hat = -sum_s sum_j D_j/(j-1)! delta^{j-1}[f-hat_{z_s+eps}(z) / F^(s)(eps)]_0."""
    tau = check_tau(tau)
    z = complex(z)
    M = form.index
    total = 0j
    for s, data in laurent_table(form, tau, p).items():
        zs = s.z(tau)
        a = float(s.alpha)
        r = _eps_radius(z, zs, tau)

        def g(eps):
            eps = np.asarray(eps, dtype=complex)
            y = a * tau.imag + eps / 2j
            return f_M_hat(M, zs + eps, z, tau, p, y_w=y) / F_s(M, s, eps, tau)

        d = _delta_series(_taylor(g, r, data.n_s - 1))
        total -= sum(data.D[j - 1] / math.factorial(j - 1) * d[j - 1] for j in range(1, data.n_s + 1))
    return total


def completed_split(form: ThetaQuotientForm, z, tau, p: Precision = DEFAULT_PRECISION,
                    path_policy: str = "average") -> SplitReport:
    total = eval_form(form, z, tau, p)
    fin = completed_finite(form, z, tau, p, path_policy)
    pol = completed_polar(form, z, tau, p)
    return SplitReport(complex(fin), complex(pol), complex(total), abs(total - fin - pol))


# ---------------------------------------------------------------------------
# raising-operator form of h-hat


def raising_depth(form: ThetaQuotientForm) -> int:
    """[(N-1)/2] with N the highest pole order (0 for holomorphic forms)."""
    N = max((d.order for d in poles(form)), default=1)
    return (N - 1) // 2


def _rho_pieces(M: int, ell: int, s: TorsionPoint, tau: complex, p: Precision, hat: bool) -> tuple[complex, complex]:
    """(rho(0; tau), delta_eps rho(eps; tau)|_0) or the hatted pair (polarised in eps)."""
    if hat:
        def g(eps):
            eps = np.asarray(eps, dtype=complex)
            return rho_hat(M, ell, s, eps, tau, p, y=eps / 2j)
    else:
        def g(eps):
            return rho(M, ell, s, np.asarray(eps, dtype=complex), tau, p)
    c = _taylor(g, EPS_RADIUS / 2, 1)
    return complex(c[0]), complex(c[1] / TWO_PI_I)


def _raising_terms(form, ell: int, tau: complex, p: Precision, piece) -> complex:
    """sum_s sum_h D_{2h+1}/(2h)! (M/pi)^h R_{1/2}^h piece0 + D_{2h+2}/(2h+1)! (M/pi)^h R_{3/2}^h piece1."""
    M = form.index
    total = 0j
    for s, data in laurent_table(form, tau, p).items():
        n_s = data.n_s

        def f0(t, s=s):
            return piece(s, t)[0]

        def f1(t, s=s):
            return piece(s, t)[1]

        for h in range((n_s - 1) // 2 + 1):
            total += data.D[2 * h] / math.factorial(2 * h) * (M / math.pi) ** h * raise_iter(0.5, h, f0, tau, p)
        for h in range(n_s // 2):
            total += data.D[2 * h + 1] / math.factorial(2 * h + 1) * (M / math.pi) ** h * raise_iter(1.5, h, f1, tau, p)
    return total


def raising_sum(form: ThetaQuotientForm, ell: int, tau, p: Precision = DEFAULT_PRECISION, hat: bool = True) -> complex:
    """The raising-operator sums built from rho-hat (``hat=True``) or from rho."""
    tau = check_tau(tau)
    M = form.index
    ell = ell % (2 * M)
    return _raising_terms(form, ell, tau, p, lambda s, t: _rho_pieces(M, ell, s, t, p, hat))


def h_hat_raising_form(form: ThetaQuotientForm, ell: int, tau, p: Precision = DEFAULT_PRECISION,
                       path_policy: str = "average") -> complex:
    """h_l + (rho sums) - (rho-hat sums), with the two sums differenced before raising."""
    tau = check_tau(tau)
    M = form.index
    ell = ell % (2 * M)

    def diff(s, t):
        a = _rho_pieces(M, ell, s, t, p, False)
        b = _rho_pieces(M, ell, s, t, p, True)
        return a[0] - b[0], a[1] - b[1]

    return canonical_h(form, ell, tau, p, path_policy) + _raising_terms(form, ell, tau, p, diff)
