import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

import oracles
from jmf.errors import TruncationInsufficient
from jmf.numerics import Precision, TorsionPoint
from jmf.theta import theta, theta_char, theta_level, theta_triple_product, theta_vector
from strategies import small_z, taus

# [DERIVED] mpmath jtheta (tests/oracles.py), 30 digits
THETA_REF = [
    (0.1 + 0.2j, 1.1j, -0.3113465331980362 - 0.5359648190788967j),
    (0.37 - 0.21j, -0.3 + 0.8j, -1.0724024354891992 + 0.5674075326609747j),
]
THETA_LEVEL_REF = [
    (2, 1, 0.13 + 0.05j, 0.2 + 1.1j, 0.17359379406139663 + 0.2537007237485032j),
    (1, 0, -0.2 + 0.1j, 1j, 0.9942617137319528 + 0.003544302557929725j),
]


@pytest.mark.parametrize("z,tau,ref", THETA_REF)
def test_theta_frozen(z, tau, ref):
    assert abs(theta(z, tau) - ref) < 1e-14


def test_theta_series_matches_jtheta_oracle():
    z, tau = 0.37 - 0.21j, -0.3 + 0.8j
    assert abs(oracles.theta_series(z, tau) - oracles.theta(z, tau)) < 1e-14


@pytest.mark.parametrize("M,ell,z,tau,ref", THETA_LEVEL_REF)
def test_theta_level_frozen(M, ell, z, tau, ref):
    assert abs(theta_level(M, ell, z, tau) - ref) < 1e-14


@given(small_z(), taus())
def test_three_routes_agree(z, tau):
    a = theta(z, tau)
    assert abs(theta_triple_product(z, tau) - a) < 1e-12 * max(1, abs(a))
    assert abs(theta(z, tau, Precision(extended=True)) - a) < 1e-12 * max(1, abs(a))


@given(small_z(), taus())
def test_theta_odd_and_quasi_periodic(z, tau):
    a = theta(z, tau)
    assert abs(theta(-z, tau) + a) < 1e-12
    assert abs(theta(z + 1, tau) + a) < 1e-12
    expected = -cmath.exp(-1j * math.pi * tau - 2j * math.pi * z) * a
    assert abs(theta(z + tau, tau) - expected) < 1e-11 * max(1, abs(expected))


def test_theta_zero_at_lattice():
    assert abs(theta(0, 1j)) < 1e-15
    assert abs(theta(1j, 1j)) < 1e-13


@given(small_z(), taus())
def test_theta_char_alpha_zero_is_shift(z, tau):
    s = TorsionPoint(0, Fraction(1, 3))
    assert abs(theta_char(s, z, tau) - theta(z + 1 / 3, tau)) < 1e-12


@given(small_z(), taus())
def test_theta_char_matches_definition(z, tau):
    s = TorsionPoint(Fraction(1, 2), Fraction(1, 4))
    a, b = 0.5, 0.25
    direct = cmath.exp(1j * math.pi * a * a * tau + 2j * math.pi * a * (z + b)) * theta(z + a * tau + b, tau)
    assert abs(theta_char(s, z, tau) - direct) < 1e-11 * max(1, abs(direct))


@given(small_z(), taus())
def test_theta_level_periodic_in_ell_and_elliptic(z, tau):
    M = 2
    for ell in range(2 * M):
        a = theta_level(M, ell, z, tau)
        assert abs(theta_level(M, ell + 2 * M, z, tau) - a) < 1e-13
        shifted = theta_level(M, ell, z + tau, tau)
        expected = cmath.exp(-2j * math.pi * M * (tau + 2 * z)) * a
        assert abs(shifted - expected) < 1e-11 * max(1, abs(expected))


def test_theta_vector_array_shape():
    z = np.array([0.1, 0.2 + 0.1j, -0.3j])
    vec = theta_vector(2, z, 1.1j)
    assert vec.shape == (4, 3)
    assert abs(vec[1, 1] - theta_level(2, 1, 0.2 + 0.1j, 1.1j)) < 1e-15


def test_fixed_terms_report_truncation():
    with pytest.raises(TruncationInsufficient):
        theta(0.1, 0.3j, Precision(series_terms=1))
    assert abs(theta(0.1, 1j, Precision(series_terms=12)) - theta(0.1, 1j)) < 1e-15


def test_theta_level_rejects_bad_index():
    with pytest.raises(ValueError):
        theta_level(0, 0, 0.1, 1j)
