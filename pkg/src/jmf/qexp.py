"""Exact truncated q-series and band-dependent Fourier expansions.

A theta-quotient is expanded in (zeta, q) inside a horizontal band
A_lo < Im(z)/v < A_hi free of pole lines.  Each normalised factor is written
through the triple product

    th_s(z) = i e(a b + b/2) q^{a^2/2 + 1/8 + a/2} zeta^{a + 1/2}
              prod_{m>=1} (1 - q^m)(1 - e(b) zeta q^{m+a})(1 - e(-b) zeta^{-1} q^{m-1-a}),

and after the substitution zeta = xi q^A (A a rational point of the band)
every factor becomes a monomial times (1 - y) with y of positive q-weight,
so inverse powers expand geometrically.  The result is stored on a dense
grid indexed by (q-weight, xi-power).

The wall-crossing oracle builds the principal parts at the poles from exact
t = 2 pi i eps expansions of each factor, so it shares nothing with the band
expansion except the definition of the factors.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BandContainsPole, LeadingZero
from .formspec import ThetaQuotientForm, poles
from .numerics import TorsionPoint, check_tau

PRUNE = 1e-30
LEAD_TOL = 1e-13
_BAND_POINTS = tuple(Fraction(n, d) for d in (2, 3, 4, 5, 7) for n in range(1, d) if math.gcd(n, d) == 1)


def _frac(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("exponents must be exact (int or Fraction)")
    return Fraction(x)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _e(x: Fraction) -> complex:
    """e(x) for exact rational x, reduced mod 1 first."""
    x = Fraction(x) % 1
    return cmath.exp(2j * math.pi * float(x))


# ---------------------------------------------------------------------------
# QSeries


class QSeries:
    """sum_n c_n q^{n/d} for start <= n < trunc; coefficients beyond trunc are unknown."""

    __slots__ = ("d", "start", "coeffs")

    def __init__(self, d: int, start: int, coeffs):
        if int(d) != d or d <= 0:
            raise ValueError("denominator must be a positive integer")
        arr = np.array(coeffs, dtype=complex).ravel()
        arr.setflags(write=False)
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "start", int(start))
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("QSeries is immutable")

    # construction

    @classmethod
    def from_terms(cls, terms: dict, trunc) -> "QSeries":
        """From {exponent: coefficient} (exponents exact) with exclusive bound trunc."""
        trunc = _frac(trunc)
        exps = {_frac(k): complex(c) for k, c in terms.items()}
        d = trunc.denominator
        for k in exps:
            d = _lcm(d, k.denominator)
        lo = min([k for k in exps if k < trunc], default=trunc)
        start, stop = int(lo * d), int(trunc * d)
        arr = np.zeros(stop - start, dtype=complex)
        for k, c in exps.items():
            if k < trunc:
                arr[int(k * d) - start] += c
        return cls(d, start, arr)

    @classmethod
    def from_grid(cls, base, D: int, values) -> "QSeries":
        """Coefficients of q^{base + i/D}, i = 0..len-1; exact up to base + len/D."""
        base = _frac(base)
        d = _lcm(D, base.denominator)
        k = d // D
        values = np.asarray(values, dtype=complex)
        arr = np.zeros(len(values) * k, dtype=complex)
        arr[::k] = values
        return cls(d, int(base * d), arr)

    @classmethod
    def one(cls, trunc=40) -> "QSeries":
        return cls.from_terms({0: 1.0}, trunc)

    @classmethod
    def monomial(cls, exponent, coefficient=1.0, trunc=None) -> "QSeries":
        exponent = _frac(exponent)
        trunc = exponent + 40 if trunc is None else _frac(trunc)
        return cls.from_terms({exponent: coefficient}, trunc)

    # views

    @property
    def trunc(self) -> int:
        """Exclusive bound on stored numerators."""
        return self.start + len(self.coeffs)

    @property
    def order(self) -> Fraction:
        """O(q^order) remainder."""
        return Fraction(self.trunc, self.d)

    @property
    def terms(self) -> dict[Fraction, complex]:
        """Sparse view {exponent: coefficient}, pruned below PRUNE."""
        return {Fraction(self.start + i, self.d): complex(c)
                for i, c in enumerate(self.coeffs) if abs(c) > PRUNE}

    def coefficient(self, exponent) -> complex:
        x = _frac(exponent) * self.d
        if x.denominator != 1:
            return 0j
        n = int(x)
        if n >= self.trunc:
            raise ValueError(f"q^{exponent} lies beyond the truncation q^{self.order}")
        return complex(self.coeffs[n - self.start]) if n >= self.start else 0j

    def to_records(self) -> list[tuple[int, int, float, float]]:
        """Export as (numerator, denominator, re, im) with reduced fractions."""
        out = []
        for k, c in sorted(self.terms.items()):
            out.append((k.numerator, k.denominator, c.real, c.imag))
        return out

    def evaluate(self, tau) -> complex:
        tau = check_tau(tau)
        n = np.arange(self.start, self.trunc)
        mask = np.abs(self.coeffs) > PRUNE
        if not mask.any():
            return 0j
        return complex(np.sum(self.coeffs[mask] * np.exp(2j * math.pi * tau * n[mask] / self.d)))

    def __repr__(self) -> str:
        shown = list(self.terms.items())[:4]
        body = " + ".join(f"({c:.6g}) q^{k}" for k, c in shown)
        return f"QSeries({body}{' + ...' if len(self.terms) > 4 else ''} + O(q^{self.order}))"

    # arithmetic

    def with_denominator(self, d: int) -> "QSeries":
        if d % self.d:
            raise ValueError("new denominator must be a multiple of the old one")
        k = d // self.d
        if k == 1:
            return self
        arr = np.zeros(len(self.coeffs) * k, dtype=complex)
        arr[::k] = self.coeffs
        return QSeries(d, self.start * k, arr)

    @staticmethod
    def _align(a: "QSeries", b: "QSeries") -> tuple["QSeries", "QSeries"]:
        d = _lcm(a.d, b.d)
        return a.with_denominator(d), b.with_denominator(d)

    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries.from_terms({0: complex(other)}, self.order)
        a, b = self._align(self, other)
        start, stop = min(a.start, b.start), min(a.trunc, b.trunc)
        arr = np.zeros(max(stop - start, 0), dtype=complex)
        for s in (a, b):
            n = max(0, min(stop, s.trunc) - s.start)
            arr[s.start - start: s.start - start + n] += s.coeffs[:n]
        return QSeries(a.d, start, arr)

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.d, self.start, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return QSeries(self.d, self.start, self.coeffs * complex(other))
        a, b = self._align(self, other)
        start = a.start + b.start
        n = min(len(a.coeffs), len(b.coeffs))
        if n == 0:
            return QSeries(a.d, start, [])
        conv = np.convolve(a.coeffs[:n], b.coeffs[:n])[:n]
        return QSeries(a.d, start, conv)

    __rmul__ = __mul__

    def shift(self, exponent) -> "QSeries":
        """Multiply by q^exponent."""
        x = _frac(exponent)
        d = _lcm(self.d, x.denominator)
        a = self.with_denominator(d)
        return QSeries(d, a.start + int(x * d), a.coeffs)

    def leading_index(self, tol: float = LEAD_TOL) -> int:
        scale = float(np.max(np.abs(self.coeffs))) if len(self.coeffs) else 0.0
        if scale == 0.0:
            raise LeadingZero("series vanishes to its truncation order")
        idx = np.nonzero(np.abs(self.coeffs) > tol * scale)[0]
        return int(idx[0])

    def invert(self) -> "QSeries":
        """Multiplicative inverse to the stored relative truncation."""
        i0 = self.leading_index()
        a = self.coeffs[i0:]
        n = len(a)
        b = np.zeros(n, dtype=complex)
        inv0 = 1.0 / a[0]
        b[0] = inv0
        for k in range(1, n):
            b[k] = -inv0 * np.dot(a[1:k + 1], b[k - 1::-1])
        return QSeries(self.d, -(self.start + i0), b)

    def max_difference(self, other: "QSeries", relative: bool = True) -> float:
        """max |a_n - b_n| / max(1, |b_n|) over the common truncation."""
        a, b = self._align(self, other)
        diff = a - b
        if not len(diff.coeffs):
            return 0.0
        if not relative:
            return float(np.max(np.abs(diff.coeffs)))
        ref = np.zeros(len(diff.coeffs))
        n = max(0, min(b.trunc, diff.trunc) - max(b.start, diff.start))
        off = b.start - diff.start
        if off >= 0:
            ref[off:off + n] = np.abs(b.coeffs[:n])
        else:
            ref[:n] = np.abs(b.coeffs[-off:-off + n])
        return float(np.max(np.abs(diff.coeffs) / np.maximum(1.0, ref)))


def qs_arith(a: QSeries, b: QSeries, op: str) -> QSeries:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def qs_invert(a: QSeries) -> QSeries:
    return a.invert()


# ---------------------------------------------------------------------------
# bands


def pole_line_heights(form: ThetaQuotientForm) -> list[Fraction]:
    """Heights Im(z)/v of pole lines mod 1, as fractions in [0, 1)."""
    return sorted({Fraction(d.s.alpha) % 1 for d in poles(form)})


def _walls_inside(form, lo: Fraction, hi: Fraction) -> list[Fraction]:
    out = []
    for a in pole_line_heights(form):
        k = math.floor(lo - a)
        while a + k < hi:
            if a + k > lo:
                out.append(a + k)
            k += 1
    return out


def band_around(form: ThetaQuotientForm, height) -> tuple[Fraction, Fraction]:
    """The maximal open band between consecutive pole lines containing ``height``."""
    y = _frac(height)
    hs = pole_line_heights(form)
    if not hs:
        return (y - 1, y + 1)
    cands = [a + k for a in hs for k in range(math.floor(y) - 2, math.floor(y) + 3)]
    if y in cands:
        raise BandContainsPole(f"height {y} is a pole line")
    return (max(c for c in cands if c < y), min(c for c in cands if c > y))


def _zero_heights(form) -> list[Fraction]:
    return [(-Fraction(s.alpha)) % 1 for s, _ in form.factors]


def _band_point(form, lo: Fraction, hi: Fraction) -> Fraction:
    zs = _zero_heights(form)
    for t in _BAND_POINTS:
        A = lo + t * (hi - lo)
        if all((A - z) % 1 != 0 for z in zs):
            return A
    raise BandContainsPole("could not place a generic point inside the band")


@dataclass(frozen=True)
class BandSeries:
    """phi = C zeta^{J0} q^{E0 - A J0} sum_{i,j} grid[i, j] xi^{j - jc} q^{i/D}, xi = zeta q^{-A}."""

    band: tuple[Fraction, Fraction]
    A: Fraction
    D: int
    C: complex
    J0: Fraction
    E0: Fraction
    grid: np.ndarray
    jc: int
    index: int
    truncation: int

    def zeta_exponents(self) -> list[Fraction]:
        cols = np.nonzero(np.any(np.abs(self.grid) > PRUNE, axis=0))[0]
        return [self.J0 + int(c) - self.jc for c in cols]

    def coefficient(self, r) -> QSeries:
        """Coefficient of zeta^r as a q-series, exact below q^{E0 - r A + truncation}."""
        r = _frac(r)
        j = r - self.J0
        base = self.E0 - r * self.A
        rows = self.grid.shape[0]
        if j.denominator != 1 or not 0 <= int(j) + self.jc < self.grid.shape[1]:
            return QSeries.from_grid(base, self.D, np.zeros(rows))
        return QSeries.from_grid(base, self.D, self.C * self.grid[:, int(j) + self.jc])

    @property
    def series(self) -> dict[Fraction, QSeries]:
        return {r: self.coefficient(r) for r in self.zeta_exponents()}

    def evaluate(self, z, tau) -> complex:
        tau = check_tau(tau)
        z = complex(z)
        y = z.imag / tau.imag
        if not self.band[0] < y < self.band[1]:
            raise BandContainsPole(f"Im(z)/v = {y:.6g} lies outside the band {self.band}")
        A = float(self.A)
        lxi = 2j * math.pi * (z - A * tau)
        lq = 2j * math.pi * tau
        i, j = np.nonzero(np.abs(self.grid) > PRUNE)
        expo = (i / self.D) * lq + (j - self.jc) * lxi
        lead = 2j * math.pi * (float(self.J0) * (z - A * tau) + float(self.E0) * tau)
        return complex(self.C * np.sum(self.grid[i, j] * np.exp(expo + lead)))

    def h(self, ell: int) -> QSeries:
        """q^{-l^2/4M} times the zeta^l coefficient."""
        return self.coefficient(ell).shift(Fraction(-ell * ell, 4 * self.index))


def _factor_monomials(s: TorsionPoint, A: Fraction, T: Fraction):
    """Prefactor (coef, zeta power, q power at xi-scale) and the list of (c, r, E) for the product."""
    a, b = Fraction(s.alpha), Fraction(s.beta)
    pref = (1j * _e(a * b + b / 2), a + Fraction(1, 2), a * a / 2 + Fraction(1, 8) + a / 2 + A * (a + Fraction(1, 2)))
    ys = []
    m = 1
    while True:
        cands = [(1.0 + 0j, 0, Fraction(m)),
                 (_e(b), 1, m + a + A),
                 (_e(-b), -1, m - 1 - a - A)]
        live = [c for c in cands if abs(c[2]) < T + 2]
        ys.extend(live)
        if not live and m > abs(a) + abs(A) + 2:
            break
        m += 1
    return pref, ys


def band_expand(form: ThetaQuotientForm, band, trunc: int = 40) -> BandSeries:
    """Fourier expansion of the form valid for band[0] < Im(z)/v < band[1]."""
    lo, hi = _frac(band[0]), _frac(band[1])
    if not lo < hi:
        raise ValueError("band must satisfy lo < hi")
    walls = _walls_inside(form, lo, hi)
    if walls:
        raise BandContainsPole(f"pole line(s) at Im(z)/v = {', '.join(map(str, walls))} inside the band")
    A = _band_point(form, lo, hi)
    T = Fraction(trunc)
    C = complex(form.prefactor)
    J0 = Fraction(0)
    E0 = Fraction(0)
    ops = []  # (c, r, E, power)
    for s, e in form.factors:
        (pc, pz, pq), ys = _factor_monomials(s, A, T)
        C *= pc ** e
        J0 += e * pz
        E0 += e * pq
        for c, r, E in ys:
            if E == 0:
                raise BandContainsPole("a factor has a zero line through the expansion point")
            if E < 0:
                # 1 - y = -y (1 - 1/y)
                C *= (-c) ** e
                J0 += e * r
                E0 += e * E
                c, r, E = 1 / c, -r, -E
            if E < T:
                ops.append((c, r, E, e))
    D = 1
    for x in [A, E0] + [op[2] for op in ops]:
        D = _lcm(D, Fraction(x).denominator)
    gmin = min((op[2] / abs(op[1]) for op in ops if op[1]), default=T)
    jc = int(math.ceil(T / gmin)) + 1
    N = int(T * D)
    grid = np.zeros((N, 2 * jc + 1), dtype=complex)
    grid[0, jc] = 1.0

    def shifted(X, r):
        out = np.zeros_like(X)
        if r > 0:
            out[:, r:] = X[:, :-r]
        elif r < 0:
            out[:, :r] = X[:, -r:]
        else:
            out[:] = X
        return out

    for c, r, E, power in ops:
        k = int(E * D)
        for _ in range(abs(power)):
            if power > 0:
                grid[k:] -= c * shifted(grid[:N - k].copy(), r)
            else:
                for i in range(k, N, k):
                    grid[i:i + k] += c * shifted(grid[i - k:i], r)[: N - i]
    return BandSeries((lo, hi), A, D, C, J0, E0, grid, jc, form.index, int(trunc))


def h_band(form: ThetaQuotientForm, ell: int, band, trunc: int = 40) -> QSeries:
    return band_expand(form, band, trunc).h(ell)


def h_band_canonical(form: ThetaQuotientForm, ell: int, trunc: int = 40) -> QSeries:
    """Band oracle for the canonical coefficient; averages the two bands when the path is a pole line."""
    M = form.index
    y = Fraction(-ell, 2 * M)
    try:
        return h_band(form, ell, band_around(form, y), trunc)
    except BandContainsPole:
        below = band_around(form, y - Fraction(1, 10**6))
        above = band_around(form, y + Fraction(1, 10**6))
        return (h_band(form, ell, below, trunc) + h_band(form, ell, above, trunc)) * 0.5


# ---------------------------------------------------------------------------
# principal parts and residue series


def _factor_t_series(si: TorsionPoint, s: TorsionPoint, K: int, T: Fraction) -> list[QSeries]:
    """Coefficients of t^k (k = 0..K) of th_{si}(z_s + t / 2 pi i) as exact q-series."""
    a, b = Fraction(si.alpha), Fraction(si.beta)
    al, be = Fraction(s.alpha), Fraction(s.beta)

    def ex(nu):
        x = nu + a
        return x * x / 2 + x * al

    # exponent is a convex quadratic in nu; collect nu with exponent < emin + T
    centre = -a - al
    nus = [Fraction(2 * n + 1, 2) for n in range(math.floor(centre) - 200, math.floor(centre) + 201)]
    emin = min(ex(nu) for nu in nus)
    keep = [nu for nu in nus if ex(nu) < emin + T]
    out = []
    for k in range(K + 1):
        terms: dict[Fraction, complex] = {}
        for nu in keep:
            x = nu + a
            c = float(x) ** k / math.factorial(k) * _e(x * (be + b) + nu / 2)
            terms[ex(nu)] = terms.get(ex(nu), 0j) + c
        out.append(QSeries.from_terms(terms, emin + T))
    return out


def _t_mul(u: list[QSeries], w: list[QSeries], K: int) -> list[QSeries]:
    return [sum((u[i] * w[k - i] for i in range(k + 1)), start=u[0] * 0) for k in range(K + 1)]


def _t_invert(u: list[QSeries], K: int) -> list[QSeries]:
    w0 = u[0].invert()
    w = [w0]
    for k in range(1, K + 1):
        acc = sum((u[i] * w[k - i] for i in range(1, k + 1)), start=u[0] * 0)
        w.append(-(w0 * acc))
    return w


def _vanishes_at(si: TorsionPoint, s: TorsionPoint) -> bool:
    return (Fraction(si.alpha) + Fraction(s.alpha)) % 1 == 0 and (Fraction(si.beta) + Fraction(s.beta)) % 1 == 0


def principal_part_series(form: ThetaQuotientForm, s: TorsionPoint, trunc: int = 40) -> list[QSeries]:
    """[a_{-1}, ..., a_{-n_s}] with phi(z_s + eps) = sum_j a_{-j} t^{-j} + O(1), t = 2 pi i eps.

    a_{-j} equals the Laurent coefficient Dt_j as a q-series.
    """
    T = Fraction(trunc)
    vn = sum(e for si, e in form.factors if e > 0 and _vanishes_at(si, s))
    vd = sum(-e for si, e in form.factors if e < 0 and _vanishes_at(si, s))
    n_s = vd - vn
    if n_s <= 0:
        raise ValueError(f"{s} is not a pole of the form")
    K = max(vn, vd) + n_s
    num = [QSeries.one(T)] + [QSeries.one(T) * 0] * K
    den = [QSeries.one(T)] + [QSeries.one(T) * 0] * K
    for si, e in form.factors:
        f = _factor_t_series(si, s, K, T)
        for _ in range(abs(e)):
            if e > 0:
                num = _t_mul(num, f, K)
            else:
                den = _t_mul(den, f, K)
    num = num[vn:] + [num[0] * 0] * vn
    den = den[vd:] + [den[0] * 0] * vd
    prod = _t_mul(num, _t_invert(den, n_s - 1), n_s - 1)
    # phi = t^{-n_s} prod(t)  =>  a_{-j} = prod[n_s - j]
    return [prod[n_s - j] * complex(form.prefactor) for j in range(1, n_s + 1)]


def _elliptic_unit(form: ThetaQuotientForm, lam: int) -> complex:
    out = 1 + 0j
    for s, e in form.factors:
        out *= (-_e(-Fraction(s.beta))) ** (lam * e)
    return out


def residue_series(form: ThetaQuotientForm, ell: int, wall, trunc: int = 40) -> QSeries:
    """h^{above} - h^{below} across the pole line Im(z)/v = wall, as a q-series.

    Equals -q^{-l^2/4M} sum 2 pi i Res[phi(w) e(-l w)] over the poles on the wall.
    """
    wall = _frac(wall)
    M = form.index
    total = None
    for d in poles(form):
        s = d.s
        lam = wall - Fraction(s.alpha)
        if lam.denominator != 1:
            continue
        lam = int(lam)
        al, be = Fraction(s.alpha), Fraction(s.beta)
        a = principal_part_series(form, s, trunc)
        c = -(2 * M * lam + ell)
        res = sum((a[j - 1] * (c ** (j - 1) / math.factorial(j - 1)) for j in range(1, len(a) + 1)), start=a[0] * 0)
        phase = _elliptic_unit(form, lam) * _e(-2 * M * lam * be - ell * be)
        X = Fraction(-ell * ell, 4 * M) - M * lam * lam - 2 * M * lam * al - ell * (al + lam)
        term = res.shift(X) * (-phase)
        total = term if total is None else total + term
    if total is None:
        raise BandContainsPole(f"no pole line at height {wall}")
    return total


@dataclass(frozen=True)
class WallCrossing:
    difference: QSeries
    residue: QSeries
    above: QSeries
    below: QSeries

    @property
    def residual(self) -> float:
        """max |difference_n - residue_n| / max(1, |above_n|, |below_n|) over the common truncation."""
        diff = self.difference - self.residue
        d = diff.d
        for s in (self.above, self.below):
            d = _lcm(d, s.d)
        diff = diff.with_denominator(d)
        scale = np.ones(len(diff.coeffs))
        for s in (self.above, self.below):
            s = s.with_denominator(d)
            lo = max(s.start, diff.start)
            hi = min(s.trunc, diff.trunc)
            if hi > lo:
                seg = np.abs(s.coeffs[lo - s.start: hi - s.start])
                scale[lo - diff.start: hi - diff.start] = np.maximum(scale[lo - diff.start: hi - diff.start], seg)
        return float(np.max(np.abs(diff.coeffs) / scale)) if len(scale) else 0.0


def wall_crossing(form: ThetaQuotientForm, ell: int, wall, trunc: int = 40) -> WallCrossing:
    """Band coefficients on both sides of a pole line and the residue series across it."""
    wall = _frac(wall)
    eps = Fraction(1, 10**6)
    above = h_band(form, ell, band_around(form, wall + eps), trunc)
    below = h_band(form, ell, band_around(form, wall - eps), trunc)
    return WallCrossing(above - below, residue_series(form, ell, wall, trunc), above, below)
