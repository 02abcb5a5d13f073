import math

import numpy as np
import pytest
from scipy import integrate, special

from gpd.errors import DomainError
from gpd.specfun.basic import log_gamma, std_normal_cdf
from gpd.specfun.bessel import besselk_power_scaled, besselk_power_scaled_pair, besselk_scaled

X = np.concatenate([np.geomspace(1e-6, 2.0, 60), np.geomspace(2.0001, 700.0, 60)])
ORDERS = [0, 0.5, 1, 1.5, 2, 3.5, 7, 15.5, 32]


@pytest.mark.parametrize("nu", ORDERS)
def test_scaled_matches_scipy_kve(nu):
    ours = besselk_scaled(nu, X)
    ref = special.kve(nu, X)
    np.testing.assert_allclose(ours, ref, rtol=1e-13)


@pytest.mark.parametrize("nu", ORDERS)
def test_power_scaled_matches_scipy(nu):
    x = X[X > 1e-3]
    ref = np.exp(nu * np.log(x)) * special.kve(nu, x)
    np.testing.assert_allclose(besselk_power_scaled(nu, x), ref, rtol=1e-13)


def test_power_scaled_finite_at_small_argument():
    # x^nu K_nu(x) -> 2^(nu-1) Gamma(nu) as x -> 0
    for nu in (1.5, 4, 31.5):
        assert besselk_power_scaled(nu, 1e-12) == pytest.approx(2 ** (nu - 1) * math.gamma(nu), rel=1e-10)


def test_pair_is_consecutive_orders():
    x = np.array([0.1, 1.0, 5.0, 90.0])
    lo, hi = besselk_power_scaled_pair(2.5, x)
    np.testing.assert_array_equal(lo, besselk_power_scaled(2.5, x))
    np.testing.assert_array_equal(hi, besselk_power_scaled(3.5, x))


def test_half_integer_elementary_values():
    assert besselk_scaled(0.5, 1.0) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-15)
    assert besselk_scaled(1.5, 2.0) == pytest.approx(math.sqrt(math.pi / 4) * 1.5, rel=1e-15)


@pytest.mark.parametrize("nu", [1, 1.5, 2, 4.5, 9])
def test_recurrence(nu):
    x = np.geomspace(1e-3, 600, 200)
    lhs = besselk_scaled(nu + 1, x)
    rhs = besselk_scaled(nu - 1, x) + (2 * nu / x) * besselk_scaled(nu, x)
    assert np.max(np.abs(lhs - rhs) / np.abs(lhs)) <= 1e-12


@pytest.mark.parametrize("nu", [0, 1])
@pytest.mark.parametrize("a,b", [(0.5, 0.5), (1.0, 3.0), (4.0, 0.25), (2.0, 10.0)])
def test_laplace_integral_identity(nu, a, b):
    # int_0^inf t^(nu-1) e^(-a t - b/t) dt = 2 (b/a)^(nu/2) K_nu(2 sqrt(ab))
    f = lambda t: t ** (nu - 1) * math.exp(-a * t - b / t)
    peak = math.sqrt(b / a)
    val = sum(integrate.quad(f, lo, hi, epsabs=0, epsrel=1e-13, limit=200)[0]
              for lo, hi in [(0, peak), (peak, 10 * peak), (10 * peak, math.inf)])
    x = 2 * math.sqrt(a * b)
    closed = 2 * (b / a) ** (nu / 2) * besselk_scaled(nu, x) * math.exp(-x)
    assert val == pytest.approx(closed, rel=1e-10)


@pytest.mark.parametrize("bad", [(0, 0.0), (0, -1.0), (0.3, 1.0), (-1, 1.0), (1, math.inf)])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        besselk_scaled(*bad)


def test_log_gamma():
    # Gamma(7.5) from the recurrence on Gamma(1/2)
    g = math.sqrt(math.pi)
    for k in range(7):
        g *= 0.5 + k
    assert log_gamma(7.5) == pytest.approx(math.log(g), rel=1e-15)
    with pytest.raises(DomainError):
        log_gamma(0.0)


def test_normal_cdf_tails():
    assert std_normal_cdf(0.0) == 0.5
    # lower tail keeps relative precision
    assert std_normal_cdf(-30.0) == pytest.approx(4.906713927148187e-198, rel=1e-13)
    v = std_normal_cdf(np.linspace(-40, 40, 2001))
    assert np.all(np.diff(v) >= 0)
