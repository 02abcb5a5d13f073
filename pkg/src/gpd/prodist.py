r"""Closed-form CDFs and densities of correlated Gaussian products.

For standard bivariate normal pairs :math:`(X_i, Y_i)` with correlation
:math:`\rho` this module handles

* the product :math:`Z = XY`,
* the sample mean :math:`\hat Z` of :math:`\hat n` independent products,
* the sample sum :math:`Z_\Sigma = \hat n \hat Z`.

With :math:`B = 1-\rho^2`, :math:`s = \operatorname{sgn}(z)`,
:math:`\kappa = (1-\rho)/2`, :math:`Y = -sC(1-\rho)` and
:math:`\nu = (\hat n - 1)/2` the CDF is

.. math::
    F(z) = \frac{C^{\nu+1} e^{sC} (1-\rho)^{\hat n/2}}{\sqrt{2\pi}\,\Gamma(\hat n/2)}
    \Big[\tfrac{2}{\hat n} K_{\nu+1}(C)\,\Phi_1(\tfrac{\hat n}{2}, 1-\tfrac{\hat n}{2}; \tfrac{\hat n}{2}+1; \kappa, Y)
    - s\tfrac{2(1-\rho)}{\hat n+2} K_\nu(C)\,\Phi_1(\tfrac{\hat n}{2}+1, 1-\tfrac{\hat n}{2}; \tfrac{\hat n}{2}+2; \kappa, Y)
    + s\tfrac{2}{\hat n} K_\nu(C)\,\Phi_1(\tfrac{\hat n}{2}, 1-\tfrac{\hat n}{2}; \tfrac{\hat n}{2}+1; \kappa, Y)\Big]

where :math:`C = |z|/B` for the product and the sum and :math:`C = \hat n|z|/B`
for the mean.  In each :math:`\Phi_1` the first argument :math:`\kappa` is the
*power* argument and :math:`Y` the *exponential* one (the standard Humbert
ordering).  That pairing, and the power :math:`C^{\nu+1}` (which reduces to
:math:`C` for a single product), were pinned against the normal-gamma mixture
representation; ``tests/test_convention.py`` re-checks the choice.

Numerically, :math:`C^{\mu} e^{C} K_\mu(C)` is formed with
:func:`~gpd.specfun.bessel.besselk_power_scaled` and the leftover exponent
:math:`(s-1)C`, together with the log of the constant prefactor, is folded into
the :math:`\Phi_1` integrand.  The largest exponent inside that integrand is
then :math:`\le 0`, so nothing overflows for any :math:`z` or :math:`\rho`.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field

import numpy as np

from gpd.config import settings
from gpd.errors import ConfigurationError, DomainError, GpdError, SingularityError
from gpd.specfun.bessel import besselk_power_scaled, besselk_power_scaled_pair
from gpd.specfun.hypergeometric import phi1_integrals

ZERO_TOL = 1e-300
CLAMP_LIMIT = 1e-10


class NumericalError(GpdError, ArithmeticError):
    """A raw CDF value left [0, 1] by more than the clamping allowance."""


class Variable(str, enum.Enum):
    PRODUCT = "product"
    MEAN = "mean"
    SUM = "sum"


class Method(str, enum.Enum):
    CLOSED = "closed"
    MIXTURE = "mixture"
    K0_INTEGRAL = "k0"
    MONTE_CARLO = "mc"


class Phi1Convention(str, enum.Enum):
    """Candidate readings of the (kappa, Y) arguments handed to Phi1.

    ``power_minus`` is the one that reproduces the mixture representation;
    the others exist so the test-suite and ``gpd selftest`` can show that they
    do not.
    """

    POWER_MINUS = "power_minus"        # pow=(1-rho)/2, exp=-sC(1-rho)
    POWER_PLUS = "power_plus"          # pow=(1+rho)/2, exp=+sC(1+rho)
    EXP_FIRST_MINUS = "exp_first_minus"  # exp=(1-rho)/2, pow=-sC(1-rho)
    EXP_FIRST_PLUS = "exp_first_plus"    # exp=(1+rho)/2, pow=+sC(1+rho)


PINNED_CONVENTION = Phi1Convention.POWER_MINUS


@dataclass(frozen=True)
class DistSpec:
    """Which variable, how many products, and the correlation."""

    variable: Variable = Variable.PRODUCT
    n_hat: int = 1
    rho: float = 0.0
    rho_max: float = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        cfg = settings()
        object.__setattr__(self, "variable", Variable(self.variable))
        rho_max = cfg.rho_max if self.rho_max is None else float(self.rho_max)
        object.__setattr__(self, "rho_max", rho_max)
        if isinstance(self.n_hat, bool) or int(self.n_hat) != self.n_hat or self.n_hat < 1:
            raise ConfigurationError(f"n_hat must be a positive integer, got {self.n_hat}")
        object.__setattr__(self, "n_hat", int(self.n_hat))
        if self.variable is Variable.PRODUCT and self.n_hat != 1:
            raise ConfigurationError("the product variable has n_hat = 1")
        if self.n_hat > cfg.n_max:
            raise ConfigurationError(f"n_hat must not exceed {cfg.n_max}, got {self.n_hat}")
        _check_rho(self.rho, rho_max)
        object.__setattr__(self, "rho", float(self.rho))

    @property
    def c_factor(self) -> float:
        """Multiplier of |z| inside C (n_hat for the mean, else 1)."""
        return float(self.n_hat) if self.variable is Variable.MEAN else 1.0


@dataclass(frozen=True)
class CorrelationParams:
    rho: float
    B: float
    C: float
    s: int
    kappa: float
    Y: float


@dataclass(frozen=True)
class MeanSumRates:
    beta: float
    gamma_rate: float
    beta_hat: float
    gamma_hat: float


@dataclass(frozen=True)
class EvalResult:
    """A CDF or density value with the method that produced it.

    ``raw`` keeps the unclamped number; ``err_estimate`` already includes the
    size of any clamping.
    """

    value: float
    method: Method
    err_estimate: float
    raw: float | None = None


def _check_rho(rho, rho_max: float):
    rho = float(rho)
    if not math.isfinite(rho) or abs(rho) > rho_max:
        raise DomainError(f"|rho| must not exceed {rho_max}, got {rho}")


def product_spec(rho: float) -> DistSpec:
    return DistSpec(Variable.PRODUCT, 1, rho)


def _standardize(z, sigma_x: float, sigma_y: float):
    if not (sigma_x > 0 and sigma_y > 0 and math.isfinite(sigma_x) and math.isfinite(sigma_y)):
        raise DomainError("sigma_x and sigma_y must be positive and finite")
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise DomainError("z must be finite")
    return z / (sigma_x * sigma_y)


def cdf_at_zero(rho: float) -> float:
    """P(Z <= 0) = 1/2 - arcsin(rho)/pi; shared by product, mean and sum."""
    rho = float(rho)
    if not abs(rho) < 1:
        raise DomainError(f"|rho| must be < 1, got {rho}")
    return 0.5 - math.asin(rho) / math.pi


@functools.lru_cache(maxsize=256)
def cdf_at_zero_limit(rho: float, n_hat: int) -> float:
    """P(S <= 0) for the sum (or mean) of ``n_hat`` products.

    The limit of the closed form as C -> 0+: the Bessel factor tends to
    ``2^nu Gamma(nu+1)`` and Phi1 to the Gauss function
    ``2F1(n/2, 1-n/2; n/2+1; (1-rho)/2)``.  For ``n_hat = 1`` this is
    :func:`cdf_at_zero`; for ``n_hat >= 2`` and ``rho != 0`` it differs.
    """
    n = int(n_hat)
    if n == 1:
        return cdf_at_zero(rho)
    rho = float(rho)
    if not abs(rho) < 1:
        raise DomainError(f"|rho| must be < 1, got {rho}")
    nu = 0.5 * (n - 1)
    alpha = 0.5 * n
    log_const = (alpha * math.log1p(-rho) - math.lgamma(alpha) - 0.5 * math.log(2.0 * math.pi)
                 + nu * math.log(2.0) + math.lgamma(nu + 1.0))
    (gauss,) = phi1_integrals(alpha, 1.0 - alpha, alpha + 1.0, 0.0, (1.0 - rho) / 2.0, log_const)
    return float((2.0 / n) * gauss)


def derive_params(z: float, spec: DistSpec) -> tuple[CorrelationParams, MeanSumRates]:
    """B, C, s, kappa, Y for ``z`` plus the mean/sum exponential rates."""
    z = float(z)
    if not math.isfinite(z):
        raise DomainError("z must be finite")
    rho = spec.rho
    B = 1.0 - rho * rho
    C = spec.c_factor * abs(z) / B
    s = 0 if z == 0 else (1 if z > 0 else -1)
    kappa = (1.0 - rho) / 2.0
    Y = -s * C * (1.0 - rho)
    n = spec.n_hat
    rates = MeanSumRates(beta=n / (1.0 - rho), gamma_rate=n / (1.0 + rho),
                         beta_hat=1.0 / (1.0 - rho), gamma_hat=1.0 / (1.0 + rho))
    return CorrelationParams(rho=rho, B=B, C=C, s=s, kappa=kappa, Y=Y), rates


def _phi1_arguments(convention: Phi1Convention, rho: float, s: np.ndarray, C: np.ndarray):
    conv = Phi1Convention(convention)
    if conv is Phi1Convention.POWER_MINUS:
        return (1.0 - rho) / 2.0, -s * C * (1.0 - rho)
    if conv is Phi1Convention.POWER_PLUS:
        return (1.0 + rho) / 2.0, s * C * (1.0 + rho)
    # exponential argument first: the "power" slot receives the C-dependent term
    pow_arg = -s * C * (1.0 - rho) if conv is Phi1Convention.EXP_FIRST_MINUS else s * C * (1.0 + rho)
    exp_arg = (1.0 - rho) / 2.0 if conv is Phi1Convention.EXP_FIRST_MINUS else (1.0 + rho) / 2.0
    return pow_arg, np.full_like(C, exp_arg)


def _closed_raw(C: np.ndarray, s: np.ndarray, rho: float, n: int, order: int,
                convention: Phi1Convention) -> tuple[np.ndarray, np.ndarray]:
    """Raw closed-form values and a rounding-level error bound for C > 0."""
    nu = 0.5 * (n - 1)
    omr = 1.0 - rho
    log_const = 0.5 * n * math.log(omr) - math.lgamma(0.5 * n) - 0.5 * math.log(2.0 * math.pi)
    pow_arg, exp_arg = _phi1_arguments(convention, rho, s, C)
    shift = (s - 1.0) * C + log_const
    alpha = 0.5 * n
    if np.ndim(pow_arg) == 0:
        phi_a, phi_b = phi1_integrals(alpha, 1.0 - alpha, alpha + 1.0, exp_arg, float(pow_arg), shift,
                                      order=order, raise_by=(0, 1))
    else:
        # the C-dependent power argument varies per point; evaluate one at a time
        phi_a = np.empty_like(C)
        phi_b = np.empty_like(C)
        for i in range(C.size):
            a, b = phi1_integrals(alpha, 1.0 - alpha, alpha + 1.0, exp_arg[i], float(pow_arg[i]), shift[i],
                                  order=order, raise_by=(0, 1))
            phi_a[i], phi_b[i] = float(a), float(b)
    p_nu, p_hi = besselk_power_scaled_pair(nu, C)     # C^mu e^C K_mu(C), mu = nu, nu+1
    p_lo = C * p_nu                                   # C^{nu+1} e^C K_nu(C)
    t1 = (2.0 / n) * p_hi * phi_a
    t2 = s * p_lo * (2.0 / n) * phi_a
    t3 = -s * p_lo * (2.0 / (n + 2.0)) * omr * phi_b
    raw = t1 + t2 + t3
    err = 1e-14 * (np.abs(t1) + np.abs(t2) + np.abs(t3))
    return raw, err


def cdf_closed_array(z, spec: DistSpec, *, sigma_x: float = 1.0, sigma_y: float = 1.0,
                     order: int | None = None,
                     convention: Phi1Convention = PINNED_CONVENTION,
                     clamp: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form CDF over an array of ``z``; returns ``(values, err_estimates)``.

    Raises
    ------
    NumericalError
        If a raw value leaves [0, 1] by more than 1e-10.
    """
    zs = _standardize(z, sigma_x, sigma_y)
    shape = zs.shape
    zf = zs.ravel()
    order = settings().phi1_order if order is None else int(order)
    rho = spec.rho
    B = 1.0 - rho * rho
    C = spec.c_factor * np.abs(zf) / B
    s = np.sign(zf)
    values = np.empty_like(zf)
    errs = np.zeros_like(zf)
    zero = np.abs(zf) < ZERO_TOL
    values[zero] = cdf_at_zero_limit(rho, spec.n_hat)
    live = ~zero
    if np.any(live):
        raw, err = _closed_raw(C[live], s[live], rho, spec.n_hat, order, convention)
        values[live] = raw
        errs[live] = err
    if clamp:
        clipped = np.clip(values, 0.0, 1.0)
        excess = np.abs(clipped - values)
        bad = excess > CLAMP_LIMIT
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            raise NumericalError(f"closed-form CDF {values[i]!r} at z={zf[i]!r} is outside [0, 1]")
        errs = errs + excess
        values = clipped
    return values.reshape(shape), errs.reshape(shape)


def _closed_result(z, spec, **kw) -> EvalResult:
    z = float(z)
    if not math.isfinite(z):
        raise DomainError("z must be finite")
    raw, _ = cdf_closed_array(np.array([z]), spec, clamp=False, **kw)
    val, err = cdf_closed_array(np.array([z]), spec, **kw)
    return EvalResult(value=float(val[0]), method=Method.CLOSED, err_estimate=float(err[0]), raw=float(raw[0]))


def cdf_product_closed(z: float, rho: float, **kw) -> EvalResult:
    """CDF of the product XY of correlated standard normals at ``z``.

    Keyword arguments ``sigma_x``, ``sigma_y`` rescale to non-unit variances;
    ``order`` sets the Phi1 quadrature order.
    """
    return _closed_result(z, product_spec(rho), **kw)


def cdf_mean_closed(z: float, spec: DistSpec, **kw) -> EvalResult:
    """CDF of the sample mean of ``spec.n_hat`` independent products."""
    return _closed_result(z, _as(spec, Variable.MEAN), **kw)


def cdf_sum_closed(z: float, spec: DistSpec, **kw) -> EvalResult:
    """CDF of the sum of ``spec.n_hat`` independent products."""
    return _closed_result(z, _as(spec, Variable.SUM), **kw)


def _as(spec: DistSpec, variable: Variable) -> DistSpec:
    if spec.variable is variable:
        return spec
    if spec.variable is Variable.PRODUCT:
        return DistSpec(variable, 1, spec.rho, rho_max=spec.rho_max)
    raise ConfigurationError(f"expected a {variable.value} spec, got {spec.variable.value}")


# ---------------------------------------------------------------- densities

def _sum_density(t: np.ndarray, rho: float, n: int) -> np.ndarray:
    """Density of the sum of n products at t (t != 0 when n == 1)."""
    B = 1.0 - rho * rho
    nu = 0.5 * (n - 1)
    rates = MeanSumRates(beta=n / (1.0 - rho), gamma_rate=n / (1.0 + rho),
                         beta_hat=1.0 / (1.0 - rho), gamma_hat=1.0 / (1.0 + rho))
    drift = 0.5 * (rates.beta_hat - rates.gamma_hat)      # rho / B
    rate = 0.5 * (rates.beta_hat + rates.gamma_hat)       # 1 / B
    x = rate * np.abs(t)
    log_const = -nu * math.log(2.0) + nu * math.log(B) - 0.5 * math.log(math.pi * B) - math.lgamma(0.5 * n)
    out = np.empty_like(x)
    pos = x > 0
    if np.any(pos):
        # |t|^nu K_nu(|t|/B) = B^nu * x^nu K_nu(x)
        out[pos] = np.exp(log_const + drift * t[pos] - x[pos]) * besselk_power_scaled(nu, x[pos])
    if not np.all(pos):
        # finite limit x^nu K_nu(x) -> 2^(nu-1) Gamma(nu) for nu > 0
        out[~pos] = math.exp(log_const + (nu - 1.0) * math.log(2.0) + math.lgamma(nu))
    return out


def pdf_array(z, spec: DistSpec, *, sigma_x: float = 1.0, sigma_y: float = 1.0) -> np.ndarray:
    """Density over an array of ``z``.

    Raises
    ------
    SingularityError
        At z = 0 for the single product (n_hat = 1), where the density has a
        logarithmic singularity.
    """
    zs = _standardize(z, sigma_x, sigma_y)
    n = spec.n_hat
    if n == 1 and np.any(zs == 0):
        raise SingularityError("the product density is singular at z = 0")
    scale = spec.c_factor
    dens = scale * _sum_density(scale * zs.ravel(), spec.rho, n)
    return (dens / (sigma_x * sigma_y)).reshape(zs.shape)


def pdf_product(z: float, rho: float, **kw) -> float:
    return float(pdf_array(np.array([z], dtype=float), product_spec(rho), **kw)[0])


def pdf_mean(z: float, spec: DistSpec, **kw) -> float:
    return float(pdf_array(np.array([z], dtype=float), _as(spec, Variable.MEAN), **kw)[0])


def pdf_sum(z: float, spec: DistSpec, **kw) -> float:
    return float(pdf_array(np.array([z], dtype=float), _as(spec, Variable.SUM), **kw)[0])


@dataclass(frozen=True)
class ProductNormal:
    """Distribution object bundling a :class:`DistSpec` with evaluation settings.

    Immutable and safe to share between threads.
    """

    spec: DistSpec
    order: int | None = None

    def cdf(self, z, method: Method | str = Method.CLOSED):
        method = Method(method)
        if method is Method.CLOSED:
            return cdf_closed_array(z, self.spec, order=self.order)
        from gpd import oracles
        if method is Method.MIXTURE:
            return oracles.cdf_mixture_array(z, self.spec)
        if method is Method.K0_INTEGRAL:
            return oracles.cdf_k0_integral_array(z, self.spec)
        raise ConfigurationError(f"method {method.value} does not evaluate a CDF pointwise")

    def pdf(self, z):
        return pdf_array(z, self.spec)
