"""Gaussian quadrature rules on (0, 1) and (0, inf).

Nodes come from the eigenvalues of the symmetric tridiagonal Jacobi matrix
(Golub-Welsch), are polished with two Newton steps on the orthonormal
three-term recurrence, and the weights are evaluated from the Christoffel
function ``1 / sum_k p_k(x)^2``.  The last step keeps small weights accurate
in a relative sense, which the squared eigenvector components do not.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import betaln, gammaln

from gpd.errors import ConfigurationError

MIN_ORDER = 1
MAX_ORDER = 512

_RESCALE = 1e100
_LOG_RESCALE = 100.0 * math.log(10.0)


class RuleKind(str, enum.Enum):
    GAUSS_LEGENDRE = "gauss_legendre"
    GAUSS_JACOBI = "gauss_jacobi"
    GEN_LAGUERRE = "gen_laguerre"


@dataclass(frozen=True)
class QuadratureRule:
    """Immutable set of quadrature nodes and positive weights.

    ``alpha`` and ``beta`` are the weight exponents.  For a Jacobi rule the
    weight is ``u**alpha * (1 - u)**beta`` on (0, 1); for a generalised
    Laguerre rule it is ``y**alpha * exp(-y)`` on (0, inf) and ``beta`` is 0.
    Legendre rules carry ``alpha = beta = 0``.

    Nodes whose weight underflows to zero (only the far tail of Laguerre rules
    beyond order ~300) are dropped, so ``len(nodes)`` may be below ``order``.
    """

    kind: RuleKind
    order: int
    nodes: np.ndarray
    weights: np.ndarray
    alpha: float = 0.0
    beta: float = 0.0

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Contract ``values`` (last axis aligned with the nodes) against the weights."""
        return np.asarray(values) @ self.weights

    @property
    def interval(self) -> tuple[float, float]:
        if self.kind is RuleKind.GEN_LAGUERRE:
            return (0.0, math.inf)
        return (0.0, 1.0)


def _jacobi_recurrence(m: int, a: float, b: float):
    """Monic recurrence coefficients for ``u^a (1-u)^b`` on (0, 1).

    Built from the classical (1-t)^b (1+t)^a coefficients on (-1, 1) and the
    affine map u = (1+t)/2.
    """
    k = np.arange(m, dtype=float)
    s = a + b
    diag = np.empty(m)
    with np.errstate(divide="ignore", invalid="ignore"):
        diag[:] = (a * a - b * b) / ((2 * k + s) * (2 * k + s + 2))
    diag[0] = (a - b) / (s + 2)
    off = np.empty(max(m - 1, 0))
    if m > 1:
        kk = np.arange(1, m, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            off[:] = (4 * kk * (kk + a) * (kk + b) * (kk + s)
                      / ((2 * kk + s) ** 2 * (2 * kk + s + 1) * (2 * kk + s - 1)))
        # k = 1 with a + b = -1 and similar removable 0/0 cases
        off[0] = 4 * (1 + a) * (1 + b) / ((2 + s) ** 2 * (3 + s))
    diag = (1.0 + diag) / 2.0
    off = off / 4.0
    log_mu0 = betaln(a + 1.0, b + 1.0)
    return diag, off, log_mu0


def _laguerre_recurrence(m: int, a: float):
    k = np.arange(m, dtype=float)
    diag = 2 * k + a + 1
    kk = np.arange(1, m, dtype=float)
    off = kk * (kk + a)
    return diag, off, float(gammaln(a + 1.0))


def _orthonormal_sweep(x, diag, sqrt_off, log_mu0):
    """Evaluate p_m, p_m' and log sum_{k<m} p_k^2 at ``x`` (scaled recurrence)."""
    m = diag.size
    p_prev = np.zeros_like(x)
    dp_prev = np.zeros_like(x)
    p = np.full_like(x, math.exp(-0.5 * log_mu0))
    dp = np.zeros_like(x)
    ssum = p * p
    log_scale = np.zeros_like(x)
    for k in range(m):
        beta_next = sqrt_off[k] if k < m - 1 else 1.0
        beta_k = sqrt_off[k - 1] if k > 0 else 0.0
        p_new = ((x - diag[k]) * p - beta_k * p_prev) / beta_next
        dp_new = (p + (x - diag[k]) * dp - beta_k * dp_prev) / beta_next
        p_prev, p, dp_prev, dp = p, p_new, dp, dp_new
        if k < m - 1:
            ssum = ssum + p * p
        big = np.abs(p) > _RESCALE
        if np.any(big):
            for arr in (p, p_prev, dp, dp_prev):
                arr[big] /= _RESCALE
            ssum[big] /= _RESCALE ** 2
            log_scale[big] += _LOG_RESCALE
    # p here is p_m divided by the last (dummy) off-diagonal, which cancels in p/dp
    return p, dp, np.log(ssum) + 2.0 * log_scale


def _golub_welsch(diag: np.ndarray, off: np.ndarray, log_mu0: float):
    sqrt_off = np.sqrt(off)
    if diag.size == 1:
        x = diag.copy()
    else:
        x = eigh_tridiagonal(diag, sqrt_off, eigvals_only=True)
    for _ in range(2):
        p, dp, _ = _orthonormal_sweep(x, diag, sqrt_off, log_mu0)
        x = x - p / dp
    _, _, log_s = _orthonormal_sweep(x, diag, sqrt_off, log_mu0)
    w = np.exp(-log_s)
    return x, w


@functools.lru_cache(maxsize=256)
def _cached_rule(kind: RuleKind, order: int, alpha: float, beta: float) -> QuadratureRule:
    if kind is RuleKind.GEN_LAGUERRE:
        diag, off, log_mu0 = _laguerre_recurrence(order, alpha)
    else:
        diag, off, log_mu0 = _jacobi_recurrence(order, alpha, beta)
    x, w = _golub_welsch(diag, off, log_mu0)
    order_idx = np.argsort(x)
    x, w = x[order_idx], w[order_idx]
    keep = w > 0.0
    x, w = x[keep], w[keep]
    x.flags.writeable = False
    w.flags.writeable = False
    return QuadratureRule(kind=kind, order=order, nodes=x, weights=w, alpha=alpha, beta=beta)


def make_rule(kind: RuleKind | str, order: int, alpha: float = 0.0, beta: float = 0.0) -> QuadratureRule:
    """Build (or fetch from cache) a Gaussian quadrature rule.

    Parameters
    ----------
    kind : RuleKind or str
        ``gauss_legendre`` on (0, 1), ``gauss_jacobi`` with weight
        ``u**alpha (1-u)**beta`` on (0, 1), or ``gen_laguerre`` with weight
        ``y**alpha exp(-y)`` on (0, inf).
    order : int
        Number of nodes, between 1 and 512.
    alpha, beta : float
        Weight exponents, each > -1.  Ignored for Legendre; ``beta`` is
        ignored for Laguerre.

    Raises
    ------
    ConfigurationError
        For an unknown kind, an out-of-range order or exponents <= -1.
    """
    try:
        kind = RuleKind(kind)
    except ValueError as exc:
        raise ConfigurationError(f"unknown quadrature kind {kind!r}") from exc
    if isinstance(order, bool) or int(order) != order or not MIN_ORDER <= order <= MAX_ORDER:
        raise ConfigurationError(f"quadrature order must be an integer in [{MIN_ORDER}, {MAX_ORDER}], got {order}")
    order = int(order)
    if kind is RuleKind.GAUSS_LEGENDRE:
        alpha = beta = 0.0
    elif kind is RuleKind.GEN_LAGUERRE:
        beta = 0.0
    alpha, beta = float(alpha), float(beta)
    if not (math.isfinite(alpha) and alpha > -1.0 and math.isfinite(beta) and beta > -1.0):
        raise ConfigurationError(f"weight exponents must exceed -1, got alpha={alpha}, beta={beta}")
    return _cached_rule(kind, order, alpha, beta)
