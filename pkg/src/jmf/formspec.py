"""Theta-quotient meromorphic Jacobi forms.

A form is  c * prod_i th_{s_i}(z; tau)^{e_i}  where

    th_s(z; tau) = q^{a^2/2} e(a(z+b)) theta(z + a tau + b; tau),   s = (a, b).

The normalising factor makes every th_s an index-1/2 Jacobi form for the
lattice (up to a constant multiplier), so a quotient with sum e_i = 2M is an
index-M meromorphic Jacobi form.  For a = 0 it is literally theta(z + b).

Form documents are JSON:

    {"factors": [{"alpha": "0", "beta": "1/2", "exponent": 4},
                 {"alpha": "0", "beta": "0", "exponent": -2}],
     "prefactor": {"re": 1.0, "im": 0.0}}

A bare list of factor records is accepted as well.
"""

from __future__ import annotations

import cmath
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import IndexNotIntegral, IndexNotPositive, ParseError, PoleCollision
from .numerics import (
    DEFAULT_PRECISION,
    LATTICE_THRESHOLD,
    Precision,
    TorsionPoint,
    check_tau,
    lattice_distance,
    reduce_to_P,
)
from .theta import theta_char

S_MATRIX = (0, -1, 1, 0)
T_MATRIX = (1, 1, 0, 1)
IDENTITY = (1, 0, 0, 1)

_RATIONAL = re.compile(r"^\s*[+-]?\d+(\s*/\s*[+-]?\d+)?\s*$")


@dataclass(frozen=True)
class GammaElement:
    """An element (a b; c d) of SL2(Z)."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self.as_tuple()} is not 1")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __iter__(self):
        return iter(self.as_tuple())

    def __matmul__(self, other: "GammaElement") -> "GammaElement":
        a, b, c, d = self
        e, f, g, h = other
        return GammaElement(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def act(self, tau) -> complex:
        a, b, c, d = self
        return (a * tau + b) / (c * tau + d)

    def j(self, tau) -> complex:
        return self.c * tau + self.d


def as_gamma(g) -> GammaElement:
    return g if isinstance(g, GammaElement) else GammaElement(*g)


@dataclass(frozen=True)
class PoleDatum:
    s: TorsionPoint
    order: int

    def z(self, tau) -> complex:
        return self.s.z(tau)


@dataclass(frozen=True)
class ThetaQuotientForm:
    """prefactor * prod th_s(z)^e over ``factors`` (shifts reduced to [0,1)^2)."""

    factors: tuple[tuple[TorsionPoint, int], ...]
    prefactor: complex = 1.0
    name: str = field(default="", compare=False)

    @property
    def exponent_sum(self) -> int:
        return sum(e for _, e in self.factors)

    @property
    def index(self) -> int:
        return self.exponent_sum // 2

    @property
    def weight(self) -> int:
        return self.exponent_sum // 2

    @property
    def is_holomorphic(self) -> bool:
        return all(e > 0 for _, e in self.factors)

    def poles(self) -> list[PoleDatum]:
        return poles(self)

    def __str__(self) -> str:
        parts = []
        for s, e in self.factors:
            parts.append(f"th[{s.alpha},{s.beta}]^{e}")
        pre = "" if self.prefactor == 1 else f"{self.prefactor} * "
        return pre + " ".join(parts)


# ---------------------------------------------------------------------------
# construction and parsing


def _reduce_factor(s: TorsionPoint) -> tuple[TorsionPoint, complex]:
    """Reduce s into [0,1)^2; returns the reduced shift and the unit c with th_s = c th_{s0}."""
    s0, (fa, fb) = reduce_to_P(s)
    # th_{(a, b+1)} = -e(a) th_{(a, b)}  and  th_{(a+1, b)} = -th_{(a, b)}
    a = s0.alpha
    phase = (-1) ** (fa % 2) * (-1) ** (fb % 2) * cmath.exp(2j * math.pi * float(a * fb))
    return s0, phase


def make_form(factors: Iterable[tuple], prefactor: complex = 1.0, name: str = "") -> ThetaQuotientForm:
    """Normalise (shift, exponent) pairs: reduce shifts, merge coincident ones, validate."""
    merged: dict[TorsionPoint, int] = {}
    pre = complex(prefactor)
    for s, e in factors:
        if not isinstance(s, TorsionPoint):
            s = TorsionPoint(*s)
        e = int(e)
        if e == 0:
            raise ParseError("exponents must be nonzero")
        s0, unit = _reduce_factor(s)
        pre *= unit ** e
        merged[s0] = merged.get(s0, 0) + e
    facs = tuple(sorted((s, e) for s, e in merged.items() if e != 0))
    if not facs:
        raise IndexNotPositive("form has no theta factors")
    total = sum(e for _, e in facs)
    if total % 2:
        raise IndexNotIntegral(f"exponent sum {total} is odd")
    if total <= 0:
        raise IndexNotPositive(f"exponent sum {total} gives index {total / 2} <= 0")
    return ThetaQuotientForm(facs, pre, name)


def _rational(x, what: str) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise ParseError(f"{what} must be an exact rational (int or 'p/q' string), got {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str) and _RATIONAL.match(x):
        try:
            return Fraction(x.replace(" ", ""))
        except ZeroDivisionError as exc:
            raise ParseError(f"{what}: zero denominator") from exc
    raise ParseError(f"{what}: cannot parse {x!r} as a rational")


def parse_form(text: str) -> ThetaQuotientForm:
    """Parse a JSON form document (see module docstring)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    name = ""
    pre = 1.0
    if isinstance(doc, dict):
        unknown = set(doc) - {"factors", "prefactor", "name"}
        if unknown:
            raise ParseError(f"unknown keys {sorted(unknown)}")
        if "factors" not in doc:
            raise ParseError("missing 'factors'")
        recs = doc["factors"]
        name = str(doc.get("name", ""))
        if "prefactor" in doc:
            p = doc["prefactor"]
            if not isinstance(p, dict) or set(p) - {"re", "im"}:
                raise ParseError("prefactor must be {re, im}")
            try:
                pre = complex(float(p.get("re", 0.0)), float(p.get("im", 0.0)))
            except (TypeError, ValueError) as exc:
                raise ParseError("prefactor components must be numbers") from exc
            if pre == 0:
                raise ParseError("prefactor must be nonzero")
    elif isinstance(doc, list):
        recs = doc
    else:
        raise ParseError("form document must be an object or a list")
    if not isinstance(recs, list) or not recs:
        raise ParseError("'factors' must be a nonempty list")
    factors = []
    for i, r in enumerate(recs):
        if not isinstance(r, dict) or set(r) - {"alpha", "beta", "exponent"} or "exponent" not in r:
            raise ParseError(f"factor {i}: expected {{alpha, beta, exponent}}")
        e = r["exponent"]
        if isinstance(e, bool) or not isinstance(e, int):
            raise ParseError(f"factor {i}: exponent must be an integer")
        if e == 0:
            raise ParseError(f"factor {i}: exponent must be nonzero")
        a = _rational(r.get("alpha", 0), f"factor {i} alpha")
        b = _rational(r.get("beta", 0), f"factor {i} beta")
        factors.append((TorsionPoint(a, b), e))
    return make_form(factors, pre, name)


def load_form(path) -> ThetaQuotientForm:
    with open(path, encoding="utf-8") as fh:
        return parse_form(fh.read())


def dump_form(form: ThetaQuotientForm) -> str:
    doc = {
        "factors": [{"alpha": str(s.alpha), "beta": str(s.beta), "exponent": e} for s, e in form.factors],
        "prefactor": {"re": form.prefactor.real, "im": form.prefactor.imag},
    }
    if form.name:
        doc["name"] = form.name
    return json.dumps(doc, sort_keys=True)


def kac_wakimoto(m: int, n: int) -> ThetaQuotientForm:
    """theta(z+1/2)^m / theta(z)^n."""
    return make_form([(TorsionPoint(0, Fraction(1, 2)), m), (TorsionPoint(0, 0), -n)], name=f"kw{m}_{n}")


def shifted_pole_form(m: int = 4, n: int = 2) -> ThetaQuotientForm:
    """theta(z+1/2)^m / theta(z+tau/2+1/2)^n, pole at s=(1/2,1/2)."""
    half = Fraction(1, 2)
    return make_form([(TorsionPoint(0, half), m), (TorsionPoint(half, half), -n)], name=f"shifted{m}_{n}")


# ---------------------------------------------------------------------------
# poles and evaluation


def poles(form: ThetaQuotientForm, tau=None) -> list[PoleDatum]:
    """Reduced poles with orders, sorted by (alpha, beta).

    th_s vanishes at z = -z_s, so a negative factor with shift s gives a pole at -s mod Z^2.
    (``tau`` is accepted for interface symmetry; pole labels do not depend on it.)
    """
    out = []
    for s, e in form.factors:
        if e < 0:
            ps, _ = reduce_to_P(TorsionPoint(-s.alpha, -s.beta))
            out.append(PoleDatum(ps, -e))
    return sorted(out, key=lambda d: (d.s.alpha, d.s.beta))


def pole_distance(form: ThetaQuotientForm, z, tau) -> float:
    """Distance from z to the nearest pole translate (inf for holomorphic forms)."""
    best = math.inf
    for d in poles(form):
        best = min(best, lattice_distance(complex(z) - d.z(tau), tau))
    return best


def eval_form(form: ThetaQuotientForm, z, tau, p: Precision = DEFAULT_PRECISION, check_poles: bool = True):
    """prefactor * prod th_{s_i}(z; tau)^{e_i}; scalar or array z."""
    tau = check_tau(tau)
    zz = np.asarray(z, dtype=complex)
    if check_poles and not form.is_holomorphic:
        for w in zz.ravel():
            dist = pole_distance(form, complex(w), tau)
            if dist < LATTICE_THRESHOLD:
                raise PoleCollision(f"z={complex(w)} is within {dist:.2e} of a pole")
    out = np.full(zz.shape, form.prefactor, dtype=complex)
    for s, e in form.factors:
        out = out * theta_char(s, zz, tau, p) ** e
    return complex(out) if zz.ndim == 0 else out


# ---------------------------------------------------------------------------
# subgroups


def gamma_ab_contains(g, alpha, beta, M: int) -> bool:
    """Exact membership test for Gamma_{alpha,beta} at index M."""
    a, b, c, d = as_gamma(g)
    alpha = Fraction(alpha)
    beta = Fraction(beta)
    conds = (
        (a - 1) * alpha + c * beta,
        b * alpha + (d - 1) * beta,
        M * (c * beta ** 2 - b * alpha ** 2 + (d - a) * alpha * beta),
    )
    return all(x.denominator == 1 for x in conds)


def gamma_phi_contains(g, form: ThetaQuotientForm) -> bool:
    return all(gamma_ab_contains(g, d.s.alpha, d.s.beta, form.index) for d in poles(form))


def pole_set_action(form: ThetaQuotientForm, g) -> list[TorsionPoint]:
    """Reduced images s*g of the pole labels (sorted)."""
    g = as_gamma(g)
    return sorted(reduce_to_P(d.s.act(g.as_tuple()))[0] for d in poles(form))


def gamma4_samples() -> list[GammaElement]:
    """A few elements of Gamma(4) (congruent to the identity mod 4)."""
    return [
        GammaElement(1, 4, 0, 1),
        GammaElement(1, 0, 4, 1),
        GammaElement(5, 4, 16, 13),
        GammaElement(1, -4, 4, -15),
        GammaElement(-3, 4, -4, 5),
    ]


# ---------------------------------------------------------------------------
# slashing and transformation checks


def slash(form: ThetaQuotientForm, g) -> ThetaQuotientForm:
    """The form whose factor characteristics are s_i * g.

    th_s(z/(c tau+d); g tau) = kappa (c tau+d)^{1/2} e(c z^2 / 2(c tau+d)) th_{s g}(z; tau)
    with a constant unit kappa, so  phi(z/(c tau+d); g tau) = chi (c tau+d)^k e(M c z^2/(c tau+d)) (phi|g)(z; tau).
    """
    g = as_gamma(g)
    return make_form([(s.act(g.as_tuple()), e) for s, e in form.factors], form.prefactor, form.name)


def check_elliptic(form: ThetaQuotientForm, lam: int, mu: int, z, tau, p: Precision = DEFAULT_PRECISION):
    """Residual of phi(z + lam tau + mu) = e(-M(lam^2 tau + 2 lam z)) phi(z), up to a reported phase.

    Returns (residual, phase) where phase is the observed ratio divided by the
    expected automorphy factor and residual = ||phase| - 1|.
    """
    tau = check_tau(tau)
    z = complex(z)
    M = form.index
    base = eval_form(form, z, tau, p)
    shifted = eval_form(form, z + lam * tau + mu, tau, p)
    expected = cmath.exp(-2j * math.pi * M * (lam * lam * tau + 2 * lam * z))
    phase = shifted / (expected * base)
    return abs(abs(phase) - 1.0), phase


def check_modular(form: ThetaQuotientForm, g, z, tau, p: Precision = DEFAULT_PRECISION,
                  against_slash: bool = False):
    """Multiplier of phi(z/(c tau+d); g tau) against (c tau+d)^k e(M c z^2/(c tau+d)) phi(z; tau).

    With ``against_slash`` the comparison form is phi|g instead of phi, which is
    the meaningful check when g does not fix the factor characteristics.
    Returns (residual, multiplier) with residual = ||multiplier| - 1|.
    """
    g = as_gamma(g)
    tau = check_tau(tau)
    z = complex(z)
    j = g.j(tau)
    lhs = eval_form(form, z / j, g.act(tau), p)
    ref = slash(form, g) if against_slash else form
    rhs = j ** form.weight * cmath.exp(2j * math.pi * form.index * g.c * z * z / j) * eval_form(ref, z, tau, p)
    mult = lhs / rhs
    return abs(abs(mult) - 1.0), mult


def fit_weight_index(form: ThetaQuotientForm, p: Precision = DEFAULT_PRECISION) -> tuple[float, float]:
    """Numerically fit (k, M) from the S-inversion automorphy factor.

    M from the z^2 coefficient at fixed tau, k from |tau|-scaling on the
    imaginary axis.  Both are compared against phi|S so that forms which S
    does not fix are handled.
    """
    ref = slash(form, S_MATRIX)

    def ratio(z, tau):
        return eval_form(form, z / tau, -1 / tau, p) / eval_form(ref, z, tau, p)

    tau = 1.1j
    z1, z2 = 0.11 + 0.07j, 0.23 + 0.05j
    # ratio = chi tau^k e(M z^2 / tau)  =>  log r1 - log r2 = 2 pi i M (z1^2 - z2^2) / tau
    d = cmath.log(ratio(z1, tau) / ratio(z2, tau))
    M = (d * tau / (2j * math.pi * (z1 * z1 - z2 * z2))).real
    t1, t2 = 1.0j, 1.5j
    z = 0.05 + 0.02j
    r1 = ratio(z, t1) / cmath.exp(2j * math.pi * M * z * z / t1)
    r2 = ratio(z, t2) / cmath.exp(2j * math.pi * M * z * z / t2)
    k = math.log(abs(r2 / r1)) / math.log(1.5)
    return k, M
