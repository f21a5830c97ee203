import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given

import oracles
from jmf import completions as cp
from jmf.errors import PoleCollision
from jmf.numerics import TorsionPoint
from strategies import small_z, taus

HALF = Fraction(1, 2)

# [DERIVED] mpmath erf / jtheta oracles (tests/oracles.py)
R_REF = [
    (0.2 + 0.3j, 0.15 + 1.1j, 0.3388213173306127 + 0.1625072312913359j),
    (-0.4 - 0.35j, -0.2 + 0.9j, 0.08077407953749678 + 0.4610027263480168j),
]
MU_REF = (0.21 + 0.13j, 0.37 - 0.08j, 0.15 + 1.1j, -0.3832082039138534 - 0.744993903313971j)


def e(x):
    return cmath.exp(2j * math.pi * x)


@pytest.mark.parametrize("u,tau,ref", R_REF)
def test_R_frozen(u, tau, ref):
    assert abs(cp.R(u, tau) - ref) < 1e-14


def test_mu_frozen():
    u, v, tau, ref = MU_REF
    assert abs(cp.mu(1, u, [v], tau) - ref) < 1e-14


def test_mu_hat_against_live_oracle():
    u, v, tau = 0.31 - 0.2j, -0.12 + 0.27j, -0.25 + 0.95j
    ref = oracles.mu1(u, v, tau) + 0.5j * oracles.R(u - v, tau)
    assert abs(cp.mu_hat(1, 0, u, [v], tau) - ref) < 1e-13


@given(small_z(), taus())
def test_R_even_and_antiperiodic(u, tau):
    r = cp.R(u, tau)
    assert abs(cp.R(-u, tau) - r) < 1e-12
    assert abs(cp.R(u + 1, tau) + r) < 1e-12


@given(small_z(), taus())
def test_R_tau_shift_identity(u, tau):
    # R(u) + e(-u - tau/2) R(u + tau) = 2 e(-u/2 - tau/8)
    lhs = cp.R(u, tau) + e(-u - tau / 2) * cp.R(u + tau, tau)
    assert abs(lhs - 2 * e(-u / 2 - tau / 8)) < 1e-11


@given(small_z(0.4), small_z(0.4), taus())
def test_mu_symmetries(u, v, tau):
    if abs(u) < 0.05 or abs(v) < 0.05 or abs(u - v) < 0.05:
        return
    a = cp.mu(1, u, [v], tau)
    assert abs(cp.mu(1, v, [u], tau) - a) < 1e-10 * max(1, abs(a))
    assert abs(cp.mu(1, -u, [-v], tau) - a) < 1e-10 * max(1, abs(a))


def test_mu_pole_collision():
    with pytest.raises(PoleCollision):
        cp.mu(1, 0.3, [0.0], 1j)
    with pytest.raises(ValueError):
        cp.mu(2, 0.3, [0.1], 1j)


def test_xi_explicit_values():
    s = TorsionPoint(HALF, HALF)
    u, tau = 0.13 + 0.04j, 0.1 + 1.2j
    # only r = -1 carries weight -1/2 at M = 1, l = 1
    assert cp.xi_terms(1, 1, s) == [(-1, Fraction(-1, 2))]
    assert abs(cp.xi(1, 1, s, u, tau) - (-0.5 * e(-tau / 4 + u))) < 1e-15
    assert cp.xi_terms(1, 0, s) == []
    assert cp.xi(1, 0, s, u, tau) == 0


def test_R_M_ell_not_periodic_in_ell():
    M, ell, w, tau = 1, 1, 0.1 + 0.2j, 0.2 + 1.1j
    diff = cp.R_M_ell(M, ell + 2 * M, w, tau) - cp.R_M_ell(M, ell, w, tau)
    assert abs(diff - (-2 * e(-ell * ell / (4 * M) * tau - ell * w))) < 1e-12


@given(small_z(0.3), taus())
def test_f_M_periodic_in_z(z, tau):
    w = 0.27 + 0.11j
    if abs(z - w) < 0.05:
        return
    a = cp.f_M(1, w, z, tau)
    assert abs(cp.f_M(1, w, z + 1, tau) - a) < 1e-10 * max(1, abs(a))


def test_f_M_pole():
    with pytest.raises(PoleCollision):
        cp.f_M(1, 0.2, 0.2 + 1.1j, 1.1j)


@given(small_z(0.2), taus())
def test_f_M_hat_elliptic_in_z(z, tau):
    M, w = 2, 0.31 + 0.07j
    a = cp.f_M_hat(M, w, z, tau)
    shifted = cp.f_M_hat(M, w, z + tau, tau)
    expected = e(-M * (tau + 2 * z)) * a
    assert abs(shifted - expected) < 1e-9 * max(1, abs(expected))


@pytest.mark.parametrize("ell", [0, 1])
@pytest.mark.parametrize("s", [TorsionPoint(HALF, HALF), TorsionPoint(HALF, 0)])
def test_rho_hat_minus_rho_is_kernel(ell, s):
    M, u, tau = 1, 0.03 - 0.02j, 0.15 + 1.05j
    a, b = float(s.alpha), float(s.beta)
    w = u + s.z(tau)
    kernel = e(-M * a * b - 2 * M * a * u - M * a * a * tau) * (0.5 * cp.R_M_ell(M, ell, w, tau) - cp.xi(M, ell, s, w, tau))
    diff = cp.rho_hat(M, ell, s, u, tau) - cp.rho(M, ell, s, u, tau)
    assert abs(diff - kernel) < 1e-12


def test_mu_shift_zero_is_mu():
    u, v, tau = 0.2 + 0.1j, [0.3, -0.15 + 0.1j], 1.05j
    assert abs(cp.mu_shift(2, 0, u, v, tau) - cp.mu(2, u, v, tau)) < 1e-15


def test_polarised_R_reduces_to_R():
    u, tau = 0.2 + 0.3j, 0.1 + 1.2j
    assert abs(cp.R(u, tau, y=u.imag) - cp.R(u, tau)) < 1e-15
