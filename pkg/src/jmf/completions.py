"""Mock and non-holomorphic building blocks.

E, R, R_{M,l}, xi^{(s)}_{M,l}, f^{(M)}_w and its completion, the
multivariable Appell functions mu_n, mu_{n,l}, their completions, and the
rho / rho-hat functions built from them.

Several functions take an optional ``y`` (or ``y_w``) argument.  It replaces
the imaginary part that feeds the non-holomorphic E-brackets while the
holomorphic exponentials keep the true complex argument.  Passing a complex
``y`` evaluates the polarised function (eps and conj(eps) treated as
independent variables); this is how holomorphic Wirtinger derivatives in
eps are taken with Cauchy circles.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import special

from .errors import PoleCollision, TruncationInsufficient
from .numerics import (
    DEFAULT_PRECISION,
    LATTICE_THRESHOLD,
    Precision,
    TorsionPoint,
    check_tau,
    gaussian_cutoff,
    lattice_distance,
)
from .theta import theta, theta_level

SQRT_PI = math.sqrt(math.pi)


def _arr(x):
    a = np.asarray(x, dtype=complex)
    return a, a.ndim == 0


def _out(a, scalar):
    return complex(a) if scalar else a


def sgn(x) -> int:
    """Sign with sgn(0) = 0."""
    return (x > 0) - (x < 0)


# ---------------------------------------------------------------------------
# E and R


def E(t):
    """E(t) = 2 * int_0^t exp(-pi u^2) du = erf(sqrt(pi) t)."""
    return special.erf(SQRT_PI * np.asarray(t)) if np.ndim(t) else float(special.erf(SQRT_PI * t)) if np.isrealobj(t) else complex(special.erf(SQRT_PI * t))


def _bracket_times_exp(sign_nu: np.ndarray, t: np.ndarray, log_exp: np.ndarray) -> np.ndarray:
    """(sgn(nu) - E(t)) * exp(log_exp), evaluated without overflow or cancellation."""
    st = SQRT_PI * t
    same = sign_nu * st.real > 0
    out = np.empty(np.broadcast(sign_nu, st, log_exp).shape, dtype=complex)
    sn = np.broadcast_to(sign_nu, out.shape)
    st_b = np.broadcast_to(st, out.shape)
    le = np.broadcast_to(log_exp, out.shape)
    same = np.broadcast_to(same, out.shape)
    # same sign: sgn - erf(t) = sgn * erfc(sgn t) = sgn * erfcx(sgn t) exp(-(sgn t)^2)
    a = sn[same] * st_b[same]
    out[same] = sn[same] * special.erfcx(a) * np.exp(le[same] - a * a)
    # opposite sign (or t on the imaginary axis): sgn - erf(t) = sgn * (2 - erfc(-sgn t))
    b = -sn[~same] * st_b[~same]
    out[~same] = sn[~same] * (2.0 - special.erfc(b)) * np.exp(le[~same])
    return out


def R(u, tau, p: Precision = DEFAULT_PRECISION, y=None):
    """Zwegers' real-analytic R function.

    R(u; tau) = sum_{nu in 1/2+Z} (sgn(nu) - E((nu + Im u / v) sqrt(2v)))
                (-1)^{nu - 1/2} exp(-pi i nu^2 tau - 2 pi i nu u)

    ``y`` overrides Im(u) inside the E-bracket (see module docstring).
    """
    tau = check_tau(tau)
    uu, scalar = _arr(u)
    yy = uu.imag if y is None else np.asarray(y, dtype=complex) + 0 * uu
    V = tau.imag
    centers = -np.real(yy) / V
    if p.series_terms is None:
        W = gaussian_cutoff(0.0, V, p.target_tol)
        lo = math.floor(min(0.0, float(np.min(centers, initial=0.0))) - W) - 1
        hi = math.ceil(max(0.0, float(np.max(centers, initial=0.0))) + W) + 1
        nus = np.arange(lo, hi + 1) + 0.5
    else:
        nus = np.arange(-p.series_terms, p.series_terms) + 0.5
    nu = nus.reshape((-1,) + (1,) * uu.ndim)
    t = (nu + yy / V) * math.sqrt(2 * V)
    log_exp = -1j * math.pi * nu * nu * tau - 2j * math.pi * nu * uu + 1j * math.pi * (nu - 0.5)
    terms = _bracket_times_exp(np.sign(nu), t, log_exp)
    out = terms.sum(axis=0)
    if p.series_terms is not None:
        tail = np.abs(terms[0]) + np.abs(terms[-1])
        if np.any(tail > p.target_tol * 1e3 * np.maximum(1.0, np.abs(out))):
            raise TruncationInsufficient("R: last term exceeds tolerance")
    return _out(out, scalar)


def R_M_ell(M: int, ell: int, w, tau, p: Precision = DEFAULT_PRECISION, y_w=None):
    """R_{M,l}(w; tau) = -i e(w(M-l)) q^{-(l-M)^2/4M} R(2Mw - 1/2 + tau(l-M); 2M tau).

    Defined for every integer l; it is *not* periodic in l (shifting l by 2M adds
    -2 q^{-l^2/4M} e(-l w)).  The completions use representatives 0 <= l < 2M.
    """
    tau = check_tau(tau)
    ww, scalar = _arr(w)
    c = ell - M
    arg = 2 * M * ww - 0.5 + tau * c
    y_arg = None if y_w is None else 2 * M * np.asarray(y_w, dtype=complex) + tau.imag * c
    pref = -1j * np.exp(2j * math.pi * (ww * (M - ell) - c * c / (4 * M) * tau))
    return _out(pref * R(arg, 2 * M * tau, p, y=y_arg), scalar)


# ---------------------------------------------------------------------------
# xi


def xi_terms(M: int, ell: int, s: TorsionPoint) -> list[tuple[int, Fraction]]:
    """The finitely many (r, weight) with weight = (sgn(r+1/2) - sgn(r+2M alpha)) / 2 != 0."""
    a2 = 2 * M * s.alpha
    lo = math.floor(min(-a2, Fraction(-1, 2))) - 1
    hi = math.ceil(max(-a2, Fraction(-1, 2))) + 1
    out = []
    for r in range(lo, hi + 1):
        if (r - ell) % (2 * M):
            continue
        wgt = Fraction(sgn(r + Fraction(1, 2)) - sgn(r + a2), 2)
        if wgt:
            out.append((r, wgt))
    return out


def xi(M: int, ell: int, s: TorsionPoint, u, tau):
    """xi^{(s)}_{M,l}(u; tau): finite theta-like sum, exactly 0 when no r qualifies."""
    tau = check_tau(tau)
    uu, scalar = _arr(u)
    out = np.zeros(uu.shape, dtype=complex)
    for r, wgt in xi_terms(M, ell, s):
        out = out + float(wgt) * np.exp(2j * math.pi * (-r * r / (4 * M) * tau - r * uu))
    return _out(out, scalar)


# ---------------------------------------------------------------------------
# f^{(M)} and its completion


def f_M(M: int, w, z, tau, p: Precision = DEFAULT_PRECISION):
    """f^{(M)}_w(z; tau) = sum_a (-1)^{2Ma} q^{Ma^2} e(2Maz) / (1 - e(z-w) q^a)."""
    tau = check_tau(tau)
    ww = np.asarray(w, dtype=complex)
    zz = np.asarray(z, dtype=complex)
    scalar = ww.ndim == 0 and zz.ndim == 0
    ww, zz = np.broadcast_arrays(ww, zz)
    diff = zz - ww
    dmin = min((lattice_distance(complex(d), tau) for d in diff.ravel()), default=1.0)
    if dmin < LATTICE_THRESHOLD:
        raise PoleCollision(f"z - w is within {dmin:.2e} of the lattice")
    v = tau.imag
    if p.series_terms is None:
        W = gaussian_cutoff(0.0, v, p.target_tol, scale=2 * M)
        ys = zz.imag / v
        shift = np.abs(diff.imag).max(initial=0.0) / v + 1
        lo = math.floor(float(np.min(-ys, initial=0.0)) - W - shift)
        hi = math.ceil(float(np.max(-ys, initial=0.0)) + W + shift)
        alphas = np.arange(lo, hi + 1)
    else:
        alphas = np.arange(-p.series_terms, p.series_terms + 1)
    a = alphas.reshape((-1,) + (1,) * zz.ndim)
    sign = np.where((2 * M * a) % 2 == 0, 1.0, -1.0)
    num = sign * np.exp(2j * math.pi * (M * a * a * tau + 2 * M * a * zz))
    den = 1 - np.exp(2j * math.pi * (diff + a * tau))
    terms = num / den
    out = terms.sum(axis=0)
    return complex(out) if scalar else out


def f_M_hat(M: int, w, z, tau, p: Precision = DEFAULT_PRECISION, y_w=None):
    """Completion f^(M)_w(z) - 1/2 sum_{0<=l<2M} R_{M,l}(w) theta_{M,l}(z)."""
    out = f_M(M, w, z, tau, p)
    for ell in range(2 * M):
        out = out - 0.5 * R_M_ell(M, ell, w, tau, p, y_w=y_w) * theta_level(M, ell, z, tau, p)
    return out


# ---------------------------------------------------------------------------
# Appell functions


def _box_cutoff(n: int, u_im: float, v_im: Sequence[float], V: float, tol: float) -> int:
    off = (max((abs(x) for x in v_im), default=0.0) + abs(u_im)) / V
    return int(math.ceil(off + math.sqrt(max(-math.log(tol), 1.0) / (math.pi * V)) + 2))


def mu(n: int, u, vvec: Sequence[complex], tau, p: Precision = DEFAULT_PRECISION):
    """Multivariable Appell function mu_n(u, v; tau).

    e^{pi i u} / prod_j theta(v_j) * sum_{k in Z^n} (-1)^{|k|} q^{(|k|^2 + |k|)/2} e(k.v) / (1 - e(u) q^{|k|})
    (first |k| is the Euclidean norm squared, second the coordinate sum).
    """
    tau = check_tau(tau)
    vvec = [complex(x) for x in vvec]
    if len(vvec) != n:
        raise ValueError("v must have n components")
    uu, scalar = _arr(u)
    V = tau.imag
    for x in vvec:
        if lattice_distance(x, tau) < LATTICE_THRESHOLD:
            raise PoleCollision(f"v component {x} lies on the lattice")
    if min((lattice_distance(complex(x), tau) for x in uu.ravel()), default=1.0) < LATTICE_THRESHOLD:
        raise PoleCollision("u lies on the lattice")
    if p.series_terms is None:
        K = _box_cutoff(n, float(np.max(np.abs(uu.imag), initial=0.0)), [x.imag for x in vvec], V, p.target_tol)
    else:
        K = p.series_terms
    rng = np.arange(-K, K + 1)
    grids = np.meshgrid(*([rng] * n), indexing="ij")
    ks = np.stack([g.ravel() for g in grids], axis=1)
    norm2 = (ks * ks).sum(axis=1)
    ksum = ks.sum(axis=1)
    kv = ks @ np.array(vvec)
    log_num = 1j * math.pi * (norm2 + ksum) * tau + 2j * math.pi * kv + 1j * math.pi * ksum
    shape = (-1,) + (1,) * uu.ndim
    log_num = log_num.reshape(shape)
    den = 1 - np.exp(2j * math.pi * (uu + ksum.reshape(shape) * tau))
    lattice = (np.exp(log_num) / den).sum(axis=0)
    thetas = np.prod([theta(x, tau, p) for x in vvec])
    out = np.exp(1j * math.pi * uu) / thetas * lattice
    return _out(out, scalar)


def mu_shift(n: int, ell: int, u, vvec: Sequence[complex], tau, p: Precision = DEFAULT_PRECISION):
    """mu_{n,l}(u, v) = (-1)^l q^{-l^2/2n} e(-(l/n)(u - |v|)) mu_n(u + l tau, v)."""
    tau = check_tau(tau)
    uu, scalar = _arr(u)
    vs = complex(sum(complex(x) for x in vvec))
    pref = (-1) ** (ell % 2) * np.exp(2j * math.pi * (-ell * ell / (2 * n) * tau - ell / n * (uu - vs)))
    return _out(pref * mu(n, uu + ell * tau, vvec, tau, p), scalar)


def mu_hat_correction(n: int, ell: int, u, vvec: Sequence[complex], tau, p: Precision = DEFAULT_PRECISION,
                      y=None, r_func=None):
    """mu_hat_{n,l} - mu_{n,l}.

    The completion of mu_n, -(i/2) R(u - |v| - (n+1)/2; n tau), carried through the
    same shift and prefactor that turn mu_n into mu_{n,l}.  ``y`` overrides Im(u - |v|).
    ``r_func`` swaps the R implementation (negative controls).
    """
    tau = check_tau(tau)
    r_func = R if r_func is None else r_func
    uu, scalar = _arr(u)
    vs = complex(sum(complex(x) for x in vvec))
    d = uu - vs
    y_arg = None if y is None else np.asarray(y, dtype=complex) + ell * tau.imag
    pref = (-1) ** (ell % 2) * np.exp(2j * math.pi * (-ell * ell / (2 * n) * tau - ell / n * d))
    corr = -0.5j * r_func(d + ell * tau - (n + 1) / 2, n * tau, p, y=y_arg)
    return _out(pref * corr, scalar)


def mu_hat(n: int, ell: int, u, vvec: Sequence[complex], tau, p: Precision = DEFAULT_PRECISION, y=None,
           r_func=None):
    """Completed shifted Appell function mu_hat_{n,l}(u, v; tau)."""
    return mu_shift(n, ell, u, vvec, tau, p) + mu_hat_correction(n, ell, u, vvec, tau, p, y=y, r_func=r_func)


# ---------------------------------------------------------------------------
# rho and rho-hat


def _appell_setup(M: int, ell: int, s: TorsionPoint, u, tau):
    """(appell argument, v-vector, prefactor, shift index) for rho^{(s)}_{M,l}(u)."""
    n = 2 * M
    ell = ell % n
    shift = ell - M
    vvec = [-0.5, 0.5] * M
    if s.alpha == 0 and s.beta == 0:
        wvec = list(vvec)
        wvec[0] = wvec[0] + tau / 2
        return 2 * M * u + tau / 2, wvec, 1.0, shift
    a, b = float(s.alpha), float(s.beta)
    zs = a * tau + b
    pref = np.exp(2j * math.pi * (-M * a * b - 2 * M * a * u - M * a * a * tau))
    return 2 * M * (u + zs), vvec, pref, shift


def rho(M: int, ell: int, s: TorsionPoint, u, tau, p: Precision = DEFAULT_PRECISION):
    """rho^{(s)}_{M,l}(u; tau): holomorphic Appell-type companion of the pole s.

    The Appell part carries a factor (-1)^l so that rho-hat - rho is exactly
    e(-M a b - 2M a u) q^{-M a^2} (R_{M,l}/2 - xi)(u + z_s).
    """
    tau = check_tau(tau)
    uu, scalar = _arr(u)
    arg, vvec, pref, shift = _appell_setup(M, ell, s, uu, tau)
    zs = s.z(tau)
    sign = -1.0 if ell % 2 else 1.0
    val = pref * (sign * mu_shift(2 * M, shift, arg, vvec, tau, p) + xi(M, ell, s, uu + zs, tau))
    return _out(val, scalar)


def rho_hat(M: int, ell: int, s: TorsionPoint, u, tau, p: Precision = DEFAULT_PRECISION, y=None):
    """Completion rho-hat^{(s)}_{M,l}(u; tau); ``y`` overrides Im(u)."""
    tau = check_tau(tau)
    uu, scalar = _arr(u)
    arg, vvec, pref, shift = _appell_setup(M, ell, s, uu, tau)
    y_d = None
    if y is not None:
        # Im(appell argument - |v|) = 2M (Im u + Im z_s) in both variants
        y_d = 2 * M * (np.asarray(y, dtype=complex) + float(s.alpha) * tau.imag)
    sign = -1.0 if ell % 2 else 1.0
    val = sign * pref * mu_hat(2 * M, shift, arg, vvec, tau, p, y=y_d)
    return _out(val, scalar)
