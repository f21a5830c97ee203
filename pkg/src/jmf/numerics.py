"""Shared numerical engines.

Segment quadrature, Cauchy-circle Taylor/Laurent extraction, Wirtinger
finite differences, and exact bookkeeping of rational torsion points.
Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import NonFiniteSample, RadiusTooLarge

TWO_PI_I = 2j * math.pi

# distance below which a point counts as sitting on a lattice point / pole
LATTICE_THRESHOLD = 1e-6


def e(w):
    """The normalised exponential e(w) = exp(2 pi i w); works on arrays."""
    return np.exp(TWO_PI_I * np.asarray(w)) if isinstance(w, np.ndarray) else complex(np.exp(TWO_PI_I * w))


def check_tau(tau) -> complex:
    tau = complex(tau)
    if not tau.imag > 0:
        raise ValueError(f"tau={tau} is not in the upper half-plane")
    return tau


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("torsion coordinates must be exact rationals, not floats")
    return Fraction(x)


@dataclass(frozen=True, order=True)
class TorsionPoint:
    """A rational pair s = (alpha, beta) labelling z_s = alpha*tau + beta."""

    alpha: Fraction
    beta: Fraction

    def __init__(self, alpha=0, beta=0):
        object.__setattr__(self, "alpha", _frac(alpha))
        object.__setattr__(self, "beta", _frac(beta))

    def z(self, tau) -> complex:
        return float(self.alpha) * complex(tau) + float(self.beta)

    def shifted(self, lam: int, mu: int) -> "TorsionPoint":
        return TorsionPoint(self.alpha + lam, self.beta + mu)

    def act(self, g) -> "TorsionPoint":
        """Right action s -> s*g of an SL2(Z) matrix (a, b, c, d)."""
        a, b, c, d = g
        return TorsionPoint(a * self.alpha + c * self.beta, b * self.alpha + d * self.beta)

    def __iter__(self):
        yield self.alpha
        yield self.beta

    def __repr__(self) -> str:
        return f"TorsionPoint({self.alpha}, {self.beta})"


def reduce_to_P(s: TorsionPoint) -> tuple[TorsionPoint, tuple[int, int]]:
    """Reduce s modulo Z^2 into [0,1)^2; returns (s0, shift) with s = s0 + shift."""
    fa = math.floor(s.alpha)
    fb = math.floor(s.beta)
    return TorsionPoint(s.alpha - fa, s.beta - fb), (fa, fb)


@dataclass(frozen=True)
class Precision:
    """Truncation and quadrature parameters.

    ``series_terms=None`` lets every series derive its own cutoff from the
    Gaussian tail bound; an explicit value is used as-is and checked.
    ``cauchy_radius=None`` means "choose from the singularity geometry".
    """

    series_terms: int | None = None
    contour_samples: int = 256
    cauchy_radius: float | None = None
    cauchy_samples: int = 64
    fd_step: float = 1e-4
    target_tol: float = 1e-16
    extended: bool = False

    def __post_init__(self):
        if self.contour_samples < 16:
            raise ValueError("contour_samples must be >= 16")
        if self.series_terms is not None and self.series_terms < 1:
            raise ValueError("series_terms must be positive")
        if self.fd_step <= 0 or self.target_tol <= 0:
            raise ValueError("fd_step and target_tol must be positive")

    def with_(self, **kw) -> "Precision":
        return replace(self, **kw)


DEFAULT_PRECISION = Precision()


def _sample(f, nodes: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(f(nodes), dtype=complex)
        if vals.shape != nodes.shape:
            raise ValueError
    except (TypeError, ValueError):
        vals = np.array([complex(f(w)) for w in nodes])
    if not np.all(np.isfinite(vals)):
        raise NonFiniteSample("non-finite sample in quadrature")
    return vals


def contour_integrate(f: Callable, start: complex, end: complex, n: int = 256) -> complex:
    """Composite trapezoid rule for the integral of f along [start, end].

    Spectrally accurate when f is periodic along the segment.
    """
    if n < 1:
        raise ValueError("n must be positive")
    nodes = start + (end - start) * np.arange(n + 1) / n
    vals = _sample(f, nodes)
    w = np.ones(n + 1)
    w[0] = w[-1] = 0.5
    return complex(np.dot(w, vals) * (end - start) / n)


def laurent_coefficients(g: Callable, c: complex, radius: float, n: int = 64) -> np.ndarray:
    """Coefficients a_k of g(c+eps) = sum a_k eps^k from n samples on a circle.

    Returned array is in FFT order: index k holds a_k for 0 <= k < n/2 and
    a_{k-n} for the upper half (principal-part coefficients).
    """
    theta = 2 * math.pi * np.arange(n) / n
    w = np.exp(1j * theta)
    vals = _sample(g, c + radius * w)
    coef = np.fft.fft(vals) / n
    k = np.fft.fftfreq(n, d=1.0 / n).astype(int)
    return coef * np.power(float(radius), -k.astype(float))


def cauchy_derivative(g: Callable, c: complex, order: int, radius: float, n: int = 64,
                      singularity_distance: float | None = None) -> complex:
    """order-th derivative of a holomorphic g at c by the Cauchy integral formula."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    if singularity_distance is not None and radius >= singularity_distance:
        raise RadiusTooLarge(f"radius {radius} reaches a singularity at distance {singularity_distance}")
    n = max(n, 2 * order + 8)
    a = laurent_coefficients(g, c, radius, n)
    return complex(a[order] * math.factorial(order))


def taylor_coefficients(g: Callable, c: complex, radius: float, count: int, n: int = 64) -> np.ndarray:
    """a_0..a_{count-1} of the Taylor expansion of g around c."""
    n = max(n, 2 * count + 8)
    return laurent_coefficients(g, c, radius, n)[:count]


def wirtinger_derivative(g: Callable, p: complex, step: float = 1e-4) -> complex:
    """(d/dx - i d/dy) g / 2 at p by central differences plus one Richardson level."""

    def central(h):
        gx = (complex(g(p + h)) - complex(g(p - h))) / (2 * h)
        gy = (complex(g(p + 1j * h)) - complex(g(p - 1j * h))) / (2 * h)
        return 0.5 * (gx - 1j * gy)

    d1 = central(step)
    d2 = central(step / 2)
    out = (4 * d2 - d1) / 3
    if not np.isfinite(out):
        raise NonFiniteSample(f"non-finite Wirtinger derivative at {p}")
    return out


def lattice_distance(w: complex, tau: complex) -> float:
    """Euclidean distance from w to the nearest point of Z*tau + Z."""
    tau = complex(tau)
    m = round(w.imag / tau.imag)
    best = math.inf
    for mm in (m - 1, m, m + 1):
        r = w - mm * tau
        for nn in (math.floor(r.real), math.floor(r.real) + 1):
            best = min(best, abs(r - nn))
    return best


def gaussian_cutoff(center: float, v: float, tol: float, scale: float = 1.0) -> float:
    """Half-width W such that exp(-pi*scale*v*(x-center)^2) < tol beyond |x-center| > W."""
    return math.sqrt(max(-math.log(tol), 1.0) / (math.pi * scale * v)) + 2.0
