"""Classical Jacobi theta function and the level-M theta functions.

Conventions:

    theta(z; tau)        = sum_{nu in 1/2+Z} exp(pi i nu^2 tau + 2 pi i nu (z + 1/2))
    theta_{M,l}(z; tau)  = sum_{lam = l mod 2M} q^{lam^2/4M} zeta^lam

All routines accept scalar or ndarray ``z`` and derive their cutoff from the
Gaussian tail unless ``Precision.series_terms`` pins it.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np

from .errors import TruncationInsufficient
from .numerics import DEFAULT_PRECISION, Precision, TorsionPoint, check_tau, gaussian_cutoff


def _as_array(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _half_integers(center: float, width: float) -> np.ndarray:
    lo = math.floor(center - width) - 1
    hi = math.ceil(center + width) + 1
    return np.arange(lo, hi + 1) + 0.5


def _check_tail(last: np.ndarray, total: np.ndarray, p: Precision, what: str):
    scale = np.maximum(np.abs(total), 1.0)
    if np.any(np.abs(last) > p.target_tol * 1e3 * scale):
        raise TruncationInsufficient(f"{what}: last term {np.max(np.abs(last)):.3e} exceeds tolerance")


def _sum_exponents(log_terms: np.ndarray) -> np.ndarray:
    """Sum exp(log_terms) over axis 0."""
    return np.exp(log_terms).sum(axis=0)


def theta(z, tau, p: Precision = DEFAULT_PRECISION):
    """The classical Jacobi theta function (odd in z, zeros at Z*tau + Z)."""
    tau = check_tau(tau)
    if p.extended:
        return _theta_mp(z, tau)
    zz, scalar = _as_array(z)
    v = tau.imag
    y = zz.imag
    if p.series_terms is None:
        width = gaussian_cutoff(0.0, v, p.target_tol) + float(np.max(np.abs(y), initial=0.0)) / v
        nus = _half_integers(0.0, width)
    else:
        nus = np.arange(-p.series_terms, p.series_terms) + 0.5
    nu = nus.reshape((-1,) + (1,) * zz.ndim)
    logs = 1j * math.pi * nu ** 2 * tau + 2j * math.pi * nu * (zz + 0.5)
    terms = np.exp(logs)
    out = terms.sum(axis=0)
    if p.series_terms is not None:
        _check_tail(terms[0] + terms[-1], out, p, "theta")
    return complex(out) if scalar else out


def _theta_mp(z, tau, dps: int = 40):
    zz, scalar = _as_array(z)
    with mpmath.workdps(dps):
        t = mpmath.mpc(tau.real, tau.imag)
        out = []
        for w in zz.ravel():
            w = mpmath.mpc(w.real, w.imag)
            # theta(z) = -jtheta_1(pi z, e^{pi i tau})
            out.append(complex(-mpmath.jtheta(1, mpmath.pi * w, mpmath.exp(1j * mpmath.pi * t))))
    arr = np.array(out).reshape(zz.shape)
    return complex(arr) if scalar else arr


def theta_triple_product(z, tau, p: Precision = DEFAULT_PRECISION):
    """Jacobi triple product form of ``theta``; an independent route to the same function.

    theta(z) = i q^{1/8} (zeta^{1/2} - zeta^{-1/2}) prod_{n>=1} (1-q^n)(1-zeta q^n)(1-zeta^{-1} q^n)
    with zeta^{1/2} = exp(pi i z).
    """
    tau = check_tau(tau)
    zz, scalar = _as_array(z)
    v = tau.imag
    if p.series_terms is None:
        ymax = float(np.max(np.abs(zz.imag), initial=0.0))
        N = int(math.ceil(ymax / v + (-math.log(p.target_tol)) / (2 * math.pi * v))) + 2
    else:
        N = p.series_terms
    q = np.exp(2j * math.pi * tau)
    zeta = np.exp(2j * math.pi * zz)
    n = np.arange(1, N + 1).reshape((-1,) + (1,) * zz.ndim)
    qn = q ** n
    prod = np.prod((1 - qn) * (1 - zeta * qn) * (1 - qn / zeta), axis=0)
    out = 1j * np.exp(1j * math.pi * tau / 4) * (np.exp(1j * math.pi * zz) - np.exp(-1j * math.pi * zz)) * prod
    if p.series_terms is not None:
        last = np.abs(zeta * q ** N) + np.abs(q ** N / zeta)
        if np.any(last > p.target_tol * 1e3):
            raise TruncationInsufficient("triple product: last factor not close to 1")
    return complex(out) if scalar else out


def theta_char(s: TorsionPoint, z, tau, p: Precision = DEFAULT_PRECISION):
    """Theta with characteristic: q^{a^2/2} e(a(z+b)) theta(z + a tau + b; tau), s = (a, b).

    Summed directly as sum_nu q^{(nu+a)^2/2} e((nu+a)(z+b)) e(nu/2), which keeps the
    normalising prefactor inside the Gaussian.
    """
    tau = check_tau(tau)
    a = float(s.alpha)
    b = float(s.beta)
    if p.extended:
        w = np.asarray(z, dtype=complex) + a * tau + b
        pref = np.exp(1j * math.pi * a * a * tau + 2j * math.pi * a * (np.asarray(z, dtype=complex) + b))
        val = _theta_mp(w, tau) * pref
        return complex(val) if np.ndim(val) == 0 else val
    zz, scalar = _as_array(z)
    v = tau.imag
    if p.series_terms is None:
        ymax = float(np.max(np.abs(zz.imag), initial=0.0))
        width = gaussian_cutoff(0.0, v, p.target_tol) + ymax / v + abs(a)
        nus = _half_integers(-a, width)
    else:
        nus = np.arange(-p.series_terms, p.series_terms) + 0.5
    nu = nus.reshape((-1,) + (1,) * zz.ndim)
    x = nu + a
    logs = 1j * math.pi * x ** 2 * tau + 2j * math.pi * x * (zz + b) + 1j * math.pi * nu
    terms = np.exp(logs)
    out = terms.sum(axis=0)
    if p.series_terms is not None:
        _check_tail(terms[0] + terms[-1], out, p, "theta_char")
    return complex(out) if scalar else out


def theta_level(M: int, ell: int, z, tau, p: Precision = DEFAULT_PRECISION):
    """theta_{M,l}(z; tau) = sum over lam = l (mod 2M) of q^{lam^2/4M} zeta^lam."""
    if M <= 0:
        raise ValueError("index M must be positive")
    tau = check_tau(tau)
    ell = ell % (2 * M)
    zz, scalar = _as_array(z)
    v = tau.imag
    if p.series_terms is None:
        # |term| = exp(-pi v (lam + 2M y/v)^2 / 2M + ...): centre -2M y / v
        ymax = float(np.max(np.abs(zz.imag), initial=0.0))
        width = gaussian_cutoff(0.0, v, p.target_tol, scale=1.0 / (2 * M)) + 2 * M * ymax / v
        kmax = int(math.ceil(width / (2 * M))) + 1
    else:
        kmax = p.series_terms
    lam = (ell + 2 * M * np.arange(-kmax, kmax + 1)).reshape((-1,) + (1,) * zz.ndim)
    logs = 2j * math.pi * (lam ** 2 / (4 * M) * tau + lam * zz)
    terms = np.exp(logs)
    out = terms.sum(axis=0)
    if p.series_terms is not None:
        _check_tail(terms[0] + terms[-1], out, p, "theta_level")
    return complex(out) if scalar else out


def theta_vector(M: int, z, tau, p: Precision = DEFAULT_PRECISION) -> np.ndarray:
    """The 2M-vector (theta_{M,l}(z; tau))_{l mod 2M}; extra axes follow z."""
    return np.array([theta_level(M, ell, z, tau, p) for ell in range(2 * M)])
