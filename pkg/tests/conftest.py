"""Shared high-precision references (mpmath) for the test-suite."""

import mpmath as mp
import pytest


def mp_mixture_cdf(t, rho, n, dps=30):
    """P(S <= t) for the sum of n products via the normal-gamma mixture.

    With y = u^2: 2/Gamma(n/2) int_0^inf u^(n-1) e^(-u^2) N((t - 2 rho u^2)/(sqrt(2B) u)) du.
    """
    with mp.workdps(dps):
        t = mp.mpf(t)
        rho = mp.mpf(rho)
        B = 1 - rho * rho
        sq = mp.sqrt(2 * B)
        f = lambda u: u ** (n - 1) * mp.exp(-u * u) * mp.ncdf((t - 2 * rho * u * u) / (sq * u))
        uc = abs(t) / sq
        pts = {mp.mpf(0), mp.mpf(2), mp.mpf(4), mp.mpf(6), mp.mpf(9), mp.mpf(14)}
        if uc > 0:
            pts |= {uc * mp.mpf(2) ** k for k in range(-6, 5)}
        if t * rho > 0:
            # the normal factor switches sign at u* on a scale ~ sqrt(B)
            ustar = mp.sqrt(t / (2 * rho))
            reach = 24 if B < 0.05 else 4
            pts |= {ustar + k * sq / 4 for k in range(-reach, reach + 1)}
        pts = sorted(p for p in pts if 0 <= p <= 14)
        return float(2 / mp.gamma(mp.mpf(n) / 2) * mp.quad(f, pts))


def mp_sum_density(t, rho, n, dps=30):
    with mp.workdps(dps):
        t, rho = mp.mpf(t), mp.mpf(rho)
        B = 1 - rho * rho
        nu = mp.mpf(n - 1) / 2
        return float(mp.power(2, -nu) * abs(t) ** nu / (mp.sqrt(mp.pi * B) * mp.gamma(mp.mpf(n) / 2))
                     * mp.exp(rho * t / B) * mp.besselk(nu, abs(t) / B))


@pytest.fixture
def mixture_ref():
    return mp_mixture_cdf
