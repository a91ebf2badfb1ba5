import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import hermite_e, legendre
from scipy import special as sps

from capchaos.exceptions import DomainError
from capchaos.special import (
    SphericalPoint,
    gauss_legendre,
    geodesic_distance,
    hermite,
    legendre_p,
    legendre_table,
    normal_cdf,
    normal_pdf,
    normal_ppf,
    normalized_assoc_legendre,
    spherical_harmonic,
)


@pytest.mark.parametrize("ell", [0, 1, 2, 7, 30, 100])
def test_legendre_matches_numpy(ell):
    x = np.linspace(-1, 1, 41)
    ref = legendre.legval(x, [0] * ell + [1])
    np.testing.assert_allclose(legendre_p(ell, x), ref, atol=1e-12)


def test_legendre_known_value():
    assert legendre_p(10, 0.5) == pytest.approx(-0.18822860717773438, abs=1e-15)


def test_legendre_table_rows():
    x = np.array([-0.3, 0.1, 0.9])
    t = legendre_table(6, x)
    assert t.shape == (7, 3)
    for n in range(7):
        np.testing.assert_allclose(t[n], legendre_p(n, x), atol=1e-14)


def test_legendre_rejects_out_of_range():
    with pytest.raises(DomainError):
        legendre_p(3, 1.5)
    with pytest.raises(DomainError):
        legendre_p(-1, 0.5)


@given(st.integers(0, 60), st.floats(-1, 1))
def test_legendre_bounded_by_one(ell, x):
    assert abs(legendre_p(ell, x)) <= 1.0 + 1e-12


@pytest.mark.parametrize("n", [1, 2, 5, 16, 65, 200])
def test_gauss_legendre_matches_numpy(n):
    rule = gauss_legendre(n)
    x, w = legendre.leggauss(n)
    np.testing.assert_allclose(rule.nodes, x, atol=1e-14)
    np.testing.assert_allclose(rule.weights, w, atol=1e-14)


def test_gauss_legendre_exactness_and_scaling():
    rule = gauss_legendre(10)
    # degree 19 is the highest integrated exactly
    assert rule.integrate(lambda t: t**18) == pytest.approx(2.0 / 19, rel=1e-13)
    assert rule.integrate(np.exp, 0.0, 2.0) == pytest.approx(math.e**2 - 1, rel=1e-13)
    assert not rule.nodes.flags.writeable


@pytest.mark.parametrize("ell,m", [(0, 0), (1, 1), (3, -2), (8, 5), (20, 20), (100, 57)])
def test_spherical_harmonic_matches_scipy(ell, m):
    theta = np.linspace(0.05, 3.1, 9)
    phi = np.linspace(0.0, 6.0, 9)
    ref = sps.sph_harm_y(ell, m, theta, phi)
    np.testing.assert_allclose(spherical_harmonic(ell, m, theta, phi), ref, atol=1e-12)


def test_spherical_harmonic_point_argument():
    p = SphericalPoint(0.4, 1.2)
    assert spherical_harmonic(3, 2, p) == pytest.approx(spherical_harmonic(3, 2, 0.4, 1.2))


@given(st.integers(0, 40), st.floats(-1, 1))
@settings(max_examples=50)
def test_addition_theorem_on_diagonal(ell, x):
    # sum_m |Y_lm|^2 = (2l+1)/4pi
    p = normalized_assoc_legendre(ell, np.array(x))
    total = p[0] ** 2 + 2.0 * np.sum(p[1:] ** 2)
    assert total == pytest.approx((2 * ell + 1) / (4 * math.pi), rel=1e-10)


@pytest.mark.parametrize("q", range(8))
def test_hermite_matches_numpy(q):
    x = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(hermite(q, x), hermite_e.hermeval(x, [0] * q + [1]), atol=1e-10)


def test_normal_helpers():
    assert normal_pdf(0.0) == pytest.approx(1 / math.sqrt(2 * math.pi))
    assert normal_cdf(0.0) == 0.5
    assert normal_ppf(normal_cdf(1.3)) == pytest.approx(1.3, abs=1e-12)


def test_spherical_point_validation_and_distance():
    with pytest.raises(DomainError):
        SphericalPoint(-0.1, 0.0)
    with pytest.raises(DomainError):
        SphericalPoint(0.1, 2 * math.pi)
    assert geodesic_distance(SphericalPoint(0.0, 0.0), SphericalPoint(0.7, 2.0)) == pytest.approx(0.7)
