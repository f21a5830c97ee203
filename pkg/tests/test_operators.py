import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jmf.errors import HeatPreconditionFailed, StepUnderflow
from jmf.numerics import TorsionPoint
from jmf.operators import (
    SmoothFn1,
    SmoothFn2,
    delta_eps,
    eps_derivative,
    heat_apply,
    laplacian,
    raising_identity_check,
    raise_,
    raise_iter,
    raising_coefficients,
    tau_derivative,
    wirtinger_nth,
)
from jmf.theta import theta_level
from jmf.verify import exact_kernel, completion_kernel
from strategies import taus

HALF = Fraction(1, 2)


def test_raising_coefficients_small_cases():
    assert raising_coefficients(0.5, 0) == [1]
    assert raising_coefficients(0.5, 1) == [0.5, 2j]
    # R_{k+2} R_k = (k+1) k v^-2 + 2i (2k+2) v^-1 D + (2i)^2 D^2 ... first coefficient k(k+1)
    c = raising_coefficients(1.5, 2)
    assert abs(c[0] - 1.5 * 2.5) < 1e-15 and abs(c[2] + 4) < 1e-15


@given(taus(), st.sampled_from([0.5, 1.5, 2.0]))
def test_raising_kills_v_power(tau, k):
    # R_k v^{-k} = 0
    assert abs(raise_(k, lambda t: t.imag ** (-k), tau)) < 1e-8


@given(taus())
def test_tau_derivative_holomorphic(tau):
    f = lambda t: cmath.exp(2j * math.pi * t)
    assert abs(tau_derivative(f, tau) - 2j * math.pi * f(tau)) < 1e-7 * abs(f(tau)) * 40
    assert abs(tau_derivative(f, tau, 2) - (2j * math.pi) ** 2 * f(tau)) < 1e-5 * abs(f(tau)) * 40 ** 2


def test_wirtinger_kills_antiholomorphic():
    f = lambda t: np.conj(t) ** 2
    assert abs(wirtinger_nth(f, 0.3 + 1.1j, 1)) < 1e-9


def test_depth_limits():
    with pytest.raises(StepUnderflow):
        raise_iter(0.5, 5, lambda t: 1.0, 1j)
    with pytest.raises(StepUnderflow):
        wirtinger_nth(lambda t: t, 1j, 5)
    with pytest.raises(ValueError):
        raise_iter(0.5, -1, lambda t: 1.0, 1j)


def test_raise_iter_zero_is_identity():
    assert raise_iter(0.5, 0, lambda t: 3.0 + t, 1j) == 3.0 + 1j


@pytest.mark.parametrize("k", [0.5, 2.0])
def test_laplacian_annihilates_holomorphic(k):
    f = lambda t: cmath.exp(2j * math.pi * t) * (1 + t)
    assert abs(laplacian(k, f, 0.2 + 1.1j)) < 1e-6


def test_laplacian_eigenfunction():
    # Delta_k v^{1-k} = 0 and Delta_{k+2} R_k v^{1-k} = k R_k v^{1-k}
    k = 1.5
    f = SmoothFn1(lambda t: t.imag ** (1 - k))
    assert abs(laplacian(k, f, 1.2j)) < 1e-6
    Rf = lambda t: raise_(k, f, t)
    assert abs(laplacian(k + 2, Rf, 1.2j) - k * Rf(1.2j)) < 1e-3


def test_eps_derivative_routes_agree():
    fn = lambda e, t: np.exp(2j * math.pi * (e * e + t * e))
    holo = SmoothFn2(fn, True)
    plain = SmoothFn2(fn, False)
    a = eps_derivative(holo, 0.1, 1.1j, 2)
    b = eps_derivative(plain, 0.1, 1.1j, 2)
    assert abs(a - b) < 1e-5 * abs(a)
    assert abs(delta_eps(holo, 0.1, 1.1j, 1) - eps_derivative(holo, 0.1, 1.1j, 1) / (2j * math.pi)) < 1e-15


@pytest.mark.parametrize("M,r", [(1, 1), (2, 3)])
def test_heat_annihilates_exact_kernel(M, r):
    g = exact_kernel(M, r)
    assert abs(heat_apply(M, g, 0.05, 1.1j)) / (1 + abs(g(0.05, 1.1j))) < 1e-6


@pytest.mark.parametrize("s", [TorsionPoint(0, 0), TorsionPoint(HALF, HALF)])
@pytest.mark.parametrize("ell", [0, 1])
def test_heat_annihilates_R_kernel(s, ell):
    g = completion_kernel(1, ell, s)
    assert abs(heat_apply(1, g, 0.03 + 0.02j, 0.1 + 1.1j)) / (1 + abs(g(0.03 + 0.02j, 0.1 + 1.1j))) < 1e-4


def test_theta_is_not_heat_annihilated():
    g = SmoothFn2(lambda e, t: theta_level(1, 0, e, t), True)
    assert abs(heat_apply(1, g, 0.1, 1j)) > 1e-2


@pytest.mark.parametrize("j", [1, 2])
@pytest.mark.parametrize("odd", [False, True])
def test_raising_identity_exact_kernel(j, odd):
    res = raising_identity_check(exact_kernel(1, 1), 1, j, 1.1j, odd=odd)
    assert res.residual < 1e-4
    assert res.heat_residual < 1e-6


def test_raising_identity_requires_heat():
    g = SmoothFn2(lambda e, t: theta_level(1, 0, e, t), True)
    with pytest.raises(HeatPreconditionFailed):
        raising_identity_check(g, 1, 1, 1.1j)
