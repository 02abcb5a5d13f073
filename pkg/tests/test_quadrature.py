import math

import numpy as np
import pytest
from scipy import special

from gpd.errors import ConfigurationError
from gpd.specfun.quadrature import MAX_ORDER, RuleKind, make_rule


def test_two_point_legendre():
    rule = make_rule(RuleKind.GAUSS_LEGENDRE, 2)
    s3 = math.sqrt(3.0)
    np.testing.assert_allclose(rule.nodes, [(3 - s3) / 6, (3 + s3) / 6], rtol=0, atol=1e-15)
    np.testing.assert_allclose(rule.weights, [0.5, 0.5], rtol=0, atol=1e-15)


@pytest.mark.parametrize("order", [4, 16, 80, 256])
def test_legendre_exact_for_polynomials(order):
    rule = make_rule("gauss_legendre", order)
    for k in (0, 1, order, 2 * order - 1):
        assert rule.integrate(rule.nodes ** k) == pytest.approx(1.0 / (k + 1), rel=1e-13)


def test_legendre_sqrt_singularity_via_substitution():
    # int_0^1 u^{-1/2} du with u = t^2 becomes int_0^1 2 dt
    rule = make_rule(RuleKind.GAUSS_LEGENDRE, 64)
    t = rule.nodes
    assert abs(rule.integrate(2 * t / np.sqrt(t * t)) - 2.0) < 1e-13


@pytest.mark.parametrize("a,b", [(-0.5, 0.0), (0.5, 1.5), (0.0, -0.5), (3.5, 0.0), (-0.9, 2.0)])
@pytest.mark.parametrize("order", [8, 80])
def test_jacobi_exact_against_beta_function(a, b, order):
    rule = make_rule(RuleKind.GAUSS_JACOBI, order, a, b)
    for k in (0, 3, 2 * order - 1):
        exact = math.exp(special.betaln(a + k + 1, b + 1))
        assert rule.integrate(rule.nodes ** k) == pytest.approx(exact, rel=1e-12)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0, 31.0])
@pytest.mark.parametrize("order", [16, 128, 512])
def test_laguerre_moments(alpha, order):
    rule = make_rule(RuleKind.GEN_LAGUERRE, order, alpha)
    assert rule.weights.sum() == pytest.approx(math.gamma(alpha + 1), rel=1e-12)
    for k in (1, 5, 20):
        exact = math.exp(special.gammaln(alpha + k + 1))
        assert rule.integrate(rule.nodes ** k) == pytest.approx(exact, rel=1e-12)


def test_laguerre_half_sums_to_sqrt_pi():
    rule = make_rule(RuleKind.GEN_LAGUERRE, 128, -0.5)
    assert rule.weights.sum() == pytest.approx(math.sqrt(math.pi), rel=1e-14)


@pytest.mark.parametrize("kind,args,n", [
    (RuleKind.GAUSS_JACOBI, (0.5, 1.5), 40),
    (RuleKind.GEN_LAGUERRE, (1.5,), 40),
])
def test_matches_scipy_nodes(kind, args, n):
    rule = make_rule(kind, n, *args)
    if kind is RuleKind.GEN_LAGUERRE:
        x, w = special.roots_genlaguerre(n, args[0])
    else:
        # scipy's Jacobi weight is (1-x)^alpha (1+x)^beta on (-1, 1)
        x, w = special.roots_jacobi(n, args[1], args[0])
        x = (x + 1) / 2
        w = w / 2 ** (args[0] + args[1] + 1)
    np.testing.assert_allclose(rule.nodes, x, rtol=1e-12)
    np.testing.assert_allclose(rule.weights, w, rtol=1e-9)


def test_nodes_sorted_inside_interval_and_read_only():
    for rule in (make_rule("gauss_jacobi", 80, -0.5, 0.3), make_rule("gen_laguerre", 300, 2.0)):
        lo, hi = rule.interval
        assert np.all(np.diff(rule.nodes) > 0)
        assert rule.nodes[0] > lo and rule.nodes[-1] < hi
        assert np.all(rule.weights > 0)
        with pytest.raises(ValueError):
            rule.nodes[0] = 0.0


@pytest.mark.parametrize("bad", [0, MAX_ORDER + 1, 2.5, -3])
def test_order_out_of_range(bad):
    with pytest.raises(ConfigurationError):
        make_rule(RuleKind.GAUSS_LEGENDRE, bad)


def test_bad_exponents_and_kind():
    with pytest.raises(ConfigurationError):
        make_rule(RuleKind.GEN_LAGUERRE, 10, -1.0)
    with pytest.raises(ConfigurationError):
        make_rule(RuleKind.GAUSS_JACOBI, 10, 0.0, -1.5)
    with pytest.raises(ConfigurationError):
        make_rule("simpson", 10)
