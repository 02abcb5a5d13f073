"""Pins which Phi1 argument pairing reproduces the distribution."""

import numpy as np
import pytest

from conftest import mp_mixture_cdf
from gpd.prodist import PINNED_CONVENTION, DistSpec, Phi1Convention, cdf_closed_array

POINTS = np.array([-2.0, -0.5, 0.7, 1.5])
SPECS = [DistSpec("product", 1, 0.5), DistSpec("product", 1, -0.7), DistSpec("sum", 3, 0.4),
         DistSpec("mean", 4, -0.5)]


def _reference(spec):
    return np.array([mp_mixture_cdf(spec.c_factor * z, spec.rho, spec.n_hat) for z in POINTS])


@pytest.mark.parametrize("spec", SPECS)
def test_pinned_convention_matches_mixture(spec):
    v, _ = cdf_closed_array(POINTS, spec, convention=PINNED_CONVENTION)
    np.testing.assert_allclose(v, _reference(spec), rtol=0, atol=1e-14)


@pytest.mark.parametrize("spec", SPECS)
@pytest.mark.parametrize("conv", [c for c in Phi1Convention if c is not PINNED_CONVENTION])
def test_other_conventions_do_not(spec, conv):
    try:
        v, _ = cdf_closed_array(POINTS, spec, convention=conv, clamp=False)
    except (ValueError, ArithmeticError):
        return  # the power argument leaves the unit disc: clearly not a valid reading
    assert np.max(np.abs(v - _reference(spec))) > 1e-3


def test_pinned_is_power_kappa_exponential_y():
    assert PINNED_CONVENTION is Phi1Convention.POWER_MINUS
