r"""Exponentially scaled modified Bessel functions of the second kind.

Only integer and half-integer orders are supported; that is all the product
distributions need.  For integer orders the seeds :math:`K_0, K_1` come from
the ascending series when :math:`x \le 2` and from the trapezoidal rule
applied to

.. math::
    e^x K_\nu(x) = \int_0^\infty e^{-2x\sinh^2(t/2)} \cosh(\nu t)\,dt

when :math:`x > 2`.  The integrand is even and entire, so the trapezoidal
rule converges geometrically; after the substitution :math:`t = s/\sqrt{x}`
a fixed grid of 41 points reaches double precision for every :math:`x > 2`.
Half-integer orders start from the elementary :math:`K_{1/2}, K_{3/2}`.
Higher orders follow by the (stable, upward) recurrence
:math:`K_{\nu+1} = K_{\nu-1} + (2\nu/x) K_\nu`.
"""

from __future__ import annotations

import math

import numpy as np

from gpd.errors import DomainError

SERIES_SWITCH = 2.0
EULER_GAMMA = 0.57721566490153286061

_N_SERIES = 20
_TRAP_STEP = 0.25
_TRAP_S = np.arange(0.0, 10.0 + 0.5 * _TRAP_STEP, _TRAP_STEP)
_TRAP_W = np.full(_TRAP_S.size, _TRAP_STEP)
_TRAP_W[0] = 0.5 * _TRAP_STEP

# Series coefficients, k = 0.._N_SERIES-1, with y = x^2/4:
#   I0 = sum y^k/(k!)^2,  I1 = (x/2) sum y^k/(k!(k+1)!)
_K = np.arange(_N_SERIES)
_FACT = np.array([math.factorial(int(k)) for k in _K], dtype=float)
_C_I0 = 1.0 / _FACT ** 2
_C_I1 = 1.0 / (_FACT * _FACT * (_K + 1))
_HARM = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1, _N_SERIES))])
_PSI1 = _HARM - EULER_GAMMA                       # psi(k+1)
_PSI2 = _HARM + 1.0 / (_K + 1) - EULER_GAMMA      # psi(k+2)


def _order_kind(nu: float) -> tuple[int, bool]:
    """Return (integer floor of nu, is_half_integer) or raise."""
    nu = float(nu)
    if not math.isfinite(nu) or nu < 0:
        raise DomainError(f"Bessel order must be a non-negative integer or half-integer, got {nu}")
    twice = 2.0 * nu
    if twice != round(twice):
        raise DomainError(f"Bessel order must be an integer or half-integer, got {nu}")
    return int(math.floor(nu)), bool(int(round(twice)) % 2)


def _check_x(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)) or np.any(~np.isfinite(x)):
        raise DomainError("Bessel argument must be finite and > 0")
    return x


def _k01_series(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unscaled (K0(x), x*K1(x)) for 0 < x <= 2."""
    y = (0.25 * x * x)[..., None] ** _K
    log_half = np.log(0.5 * x)
    i0 = y @ _C_I0
    k0 = -(log_half + EULER_GAMMA) * i0 + y @ (_C_I0 * _HARM)
    i1_over_half_x = y @ _C_I1
    i1 = 0.5 * x * i1_over_half_x
    xk1 = 1.0 + x * log_half * i1 - 0.25 * x * x * (y @ (_C_I1 * (_PSI1 + _PSI2)))
    return k0, xk1


def _k01_trapezoid(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scaled (e^x K0(x), e^x K1(x)) for x > 2."""
    rx = np.sqrt(x)[..., None]
    t = _TRAP_S / rx
    g = np.exp(-2.0 * x[..., None] * np.sinh(0.5 * t) ** 2) / rx
    return g @ _TRAP_W, (g * np.cosh(t)) @ _TRAP_W


def _k01_scaled(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    k0 = np.empty_like(x)
    k1 = np.empty_like(x)
    small = x <= SERIES_SWITCH
    if np.any(small):
        xs = x[small]
        a, b = _k01_series(xs)
        e = np.exp(xs)
        k0[small] = e * a
        k1[small] = e * b / xs
    if not np.all(small):
        xl = x[~small]
        k0[~small], k1[~small] = _k01_trapezoid(xl)
    return k0, k1


def _seeds(x: np.ndarray, half: bool) -> tuple[float, np.ndarray, np.ndarray]:
    """Lowest order nu0 and scaled K_{nu0}, K_{nu0+1}."""
    if half:
        k_half = np.sqrt(0.5 * math.pi / x)
        return 0.5, k_half, k_half * (1.0 + 1.0 / x)
    k0, k1 = _k01_scaled(x)
    return 0.0, k0, k1


def besselk_scaled(nu: float, x) -> np.ndarray | float:
    """Return ``exp(x) * K_nu(x)``.

    Parameters
    ----------
    nu : float
        Non-negative integer or half-integer order.
    x : float or array_like
        Positive, finite argument(s).

    Raises
    ------
    DomainError
        For x <= 0, or an order that is negative or not a multiple of 1/2.
    """
    _, half = _order_kind(nu)
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(_check_x(x))
    order, k_lo, k_hi = _seeds(xa, half)
    while order < nu:
        k_lo, k_hi = k_hi, k_lo + (2.0 * (order + 1.0) / xa) * k_hi
        order += 1.0
    out = k_lo
    return float(out[0]) if scalar else out


def besselk_power_scaled_pair(nu: float, x) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(P_nu(x), P_{nu+1}(x))`` with ``P_mu = x**mu * exp(x) * K_mu(x)``.

    One recurrence pass gives both orders; ``x`` is treated as an array.
    """
    _, half = _order_kind(nu)
    xa = np.atleast_1d(_check_x(x))
    if half:
        order = 0.5
        p_lo = np.full_like(xa, math.sqrt(0.5 * math.pi))
        p_hi = p_lo * (1.0 + xa)
    else:
        order = 0.0
        k0, k1 = _k01_scaled(xa)
        p_lo, p_hi = k0, xa * k1
    x2 = xa * xa
    while order < nu:
        p_lo, p_hi = p_hi, x2 * p_lo + 2.0 * (order + 1.0) * p_hi
        order += 1.0
    return p_lo, p_hi


def besselk_power_scaled(nu: float, x) -> np.ndarray | float:
    """Return ``x**nu * exp(x) * K_nu(x)``, finite as x -> 0 for nu > 0.

    Uses the recurrence ``P_{nu+1} = x^2 P_{nu-1} + 2 nu P_nu`` for
    ``P_nu = x^nu e^x K_nu(x)``, so large orders at small arguments never
    form the (overflowing) factor ``K_nu(x)`` on its own.
    """
    scalar = np.ndim(x) == 0
    out, _ = besselk_power_scaled_pair(nu, x)
    return float(out[0]) if scalar else out
