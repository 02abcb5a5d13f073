r"""Humbert's confluent hypergeometric function :math:`\Phi_1`.

Evaluated from the Euler-type integral

.. math::
    \Phi_1(\alpha, \beta; \gamma; y, x) = \frac{\Gamma(\gamma)}{\Gamma(\alpha)\Gamma(\gamma-\alpha)}
    \int_0^1 u^{\alpha-1} (1-u)^{\gamma-\alpha-1} (1-yu)^{-\beta} e^{xu}\,du

with ``y`` the power argument and ``x`` the exponential argument.  An extra
additive constant ``exp_shift`` may be folded into the exponent so callers can
pass ``e^{s} \Phi_1`` without ever forming ``e^{s}`` on its own.

For moderate ``|x|`` a single Gauss-Jacobi rule absorbing both endpoint
factors is used.  Otherwise the integral is split at ``u = 1/2``.  The left piece uses a Gauss-Jacobi rule
that absorbs ``u^{alpha-1}``; the right piece one that absorbs
``(1-u)^{gamma-alpha-1}``.  For large ``|x|`` the piece holding the mass is
shrunk to the window where the integrand is not negligible (the other piece is
then below ``e^{-40}`` relative and skipped).  When ``y`` is close to 1 the
right piece is graded geometrically towards the branch point ``u = 1/y``.
Everything is vectorised over arrays of ``x`` and ``exp_shift``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from gpd.errors import ConfigurationError, DomainError, OverflowRiskError
from gpd.specfun.quadrature import QuadratureRule, RuleKind, make_rule

DEFAULT_ORDER = 80
MAX_EXPONENT = 700.0

_TAIL_LOG = 40.0
_SPLIT = 0.5
_GRADE_MIN_RATIO = 0.25
_GRADE_ORDER = 24
_SINGLE_MAX = 100.0


@dataclass(frozen=True)
class Phi1Args:
    """Parameters and arguments of one :math:`\\Phi_1` evaluation."""

    alpha: float
    beta: float
    gamma: float
    exp_arg: float
    pow_arg: float
    exp_shift: float = 0.0

    def __post_init__(self):
        _validate(self.alpha, self.beta, self.gamma, self.pow_arg)
        if not (math.isfinite(self.exp_arg) and math.isfinite(self.exp_shift)):
            raise DomainError("Phi1 exponential argument and shift must be finite")


def _validate(alpha, beta, gamma, pow_arg):
    if not alpha > 0:
        raise DomainError(f"Phi1 needs alpha > 0, got {alpha}")
    if not gamma - alpha > 0:
        raise DomainError(f"Phi1 integral needs gamma > alpha, got alpha={alpha}, gamma={gamma}")
    if not math.isfinite(beta):
        raise DomainError("Phi1 beta must be finite")
    if not pow_arg < 1:
        raise DomainError(f"power-term singularity inside integration range (pow_arg={pow_arg} >= 1)")


def _norm(alpha, gamma):
    """Gamma(gamma) / (Gamma(alpha) Gamma(gamma - alpha))."""
    b = special.beta(alpha, gamma - alpha)
    if 0.0 < b < math.inf:
        return 1.0 / b
    return math.exp(-special.betaln(alpha, gamma - alpha))


def _window(shape: float) -> float:
    """Exponent span that holds all but ~e^-40 of a gamma(shape) weight."""
    return shape + _TAIL_LOG + 9.0 * math.sqrt(shape)


def _spans(a_exp, c_exp, beta, y, raise_by):
    """Exponent spans of the left and right pieces.

    A negative ``beta`` makes the power term grow like ``u^|beta|`` (left, for
    ``y < 0``) or ``(1-u)^|beta|`` (right, for ``y`` near 1), which widens the
    region holding the mass by the same amount as a larger gamma shape.
    """
    grow = max(0.0, -beta)
    span_l = _window(a_exp + 1.0 + max(raise_by) + (grow if y < 0 else 0.0))
    span_r = _window(c_exp + 1.0 + (grow if y > 0 else 0.0))
    return span_l, span_r


def _power_term(u, y, beta):
    """(1 - y u)^(-beta); integer and half-integer powers avoid exp/log."""
    if beta == 0.0 or y == 0.0:
        return 1.0
    base = 1.0 - y * u
    p = -beta
    twice = 2.0 * p
    if twice == round(twice) and abs(p) <= 64:
        whole = math.floor(p)
        out = base ** int(whole) if whole else 1.0
        if p != whole:
            out = out * np.sqrt(base)
        return out
    return np.exp(p * np.log1p(-y * u))


def _needs_grading(beta, y) -> bool:
    """True when the power term has a branch point just beyond u = 1."""
    polynomial = beta <= 0 and float(beta).is_integer()
    return y > 0.0 and not polynomial and beta != 0.0 and (1.0 - y) / y < _GRADE_MIN_RATIO * _SPLIT


def _single_rule(a_exp, c_exp, beta, y, x, shift, raise_by, order):
    """Whole-interval Gauss-Jacobi sum; fine for |x| <= 100 without grading."""
    rule = make_rule(RuleKind.GAUSS_JACOBI, order, a_exp, c_exp)
    u = rule.nodes
    base = rule.weights * _power_term(u, y, beta)
    e = np.exp(np.multiply.outer(x, u) + shift[:, None])
    return [e @ (base * u ** j) for j in raise_by]


def _left_piece(a_exp, c_exp, beta, y, x, shift, raise_by, order):
    """Integrals over (0, w) of u^{a_exp+j}(1-u)^c (1-yu)^-beta e^{xu+shift}, w <= 1/2."""
    span = _spans(a_exp, c_exp, beta, y, raise_by)[0]
    w = np.where(x < -span / _SPLIT, span / np.maximum(np.abs(x), 1e-300), _SPLIT)
    rule = make_rule(RuleKind.GAUSS_JACOBI, order, a_exp, 0.0)
    u = w[:, None] * rule.nodes
    g = np.exp(x[:, None] * u + shift[:, None])
    if c_exp != 0.0:
        g = g * np.exp(c_exp * np.log1p(-u))
    g = g * _power_term(u, y, beta)
    scale = w ** (a_exp + 1.0)
    return [scale * w ** j * ((g * rule.nodes ** j) @ rule.weights) for j in raise_by]


def _right_piece(a_exp, c_exp, beta, y, x, shift, raise_by, order):
    """Integrals over (1 - w, 1), w <= 1/2, with geometric grading when y -> 1."""
    span = _spans(a_exp, c_exp, beta, y, raise_by)[1]
    w = np.where(x > span / _SPLIT, span / np.maximum(x, 1e-300), _SPLIT)
    # breakpoints in v = (1 - u)/w on [0, 1]
    if _needs_grading(beta, y):
        delta = (1.0 - y) / y
        eta = np.minimum(delta / w, 1.0)
        n_panels = int(math.ceil(math.log2(1.0 / float(eta.min()) + 1.0)))
        k = np.arange(n_panels + 1, dtype=float)
        edges = np.minimum(eta[:, None] * (2.0 ** k - 1.0), 1.0)
        edges[:, -1] = 1.0
    else:
        edges = np.tile([0.0, 1.0], (x.size, 1))
    first = make_rule(RuleKind.GAUSS_JACOBI, order, c_exp, 0.0)
    out = [np.zeros_like(x) for _ in raise_by]
    for p in range(edges.shape[1] - 1):
        lo = edges[:, p]
        width = edges[:, p + 1] - lo
        if p == 0:
            rule = first
            v = width[:, None] * rule.nodes
            wt = rule.weights[None, :] * width[:, None] ** (c_exp + 1.0)
        else:
            rule = make_rule(RuleKind.GAUSS_LEGENDRE, min(order, _GRADE_ORDER))
            v = lo[:, None] + width[:, None] * rule.nodes
            wt = rule.weights[None, :] * width[:, None]
            if c_exp != 0.0:
                wt = wt * v ** c_exp
        u = 1.0 - w[:, None] * v
        g = np.exp(x[:, None] * u + shift[:, None]) * _power_term(u, y, beta)
        g = g * u ** a_exp * wt * (w ** (c_exp + 1.0))[:, None]
        for idx, j in enumerate(raise_by):
            out[idx] = out[idx] + (g * u ** j).sum(axis=1)
    return out


def phi1_integrals(alpha, beta, gamma, exp_arg, pow_arg, exp_shift=0.0,
                   order: int = DEFAULT_ORDER, raise_by=(0,)):
    """Vectorised ``e^{exp_shift} * Phi1(alpha + j, beta; gamma + j; pow_arg, exp_arg)``.

    One pass over the quadrature nodes serves every ``j`` in ``raise_by``:
    raising ``alpha`` and ``gamma`` together by ``j`` only multiplies the
    integrand by ``u**j``.

    Returns a list with one array (shaped like the broadcast of ``exp_arg``
    and ``exp_shift``) per entry of ``raise_by``.
    """
    _validate(alpha, beta, gamma, pow_arg)
    x, shift = np.broadcast_arrays(np.asarray(exp_arg, dtype=float), np.asarray(exp_shift, dtype=float))
    shape = x.shape
    x = x.ravel().copy()
    shift = shift.ravel().copy()
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(shift))):
        raise DomainError("Phi1 exponential argument and shift must be finite")
    peak = np.maximum(shift, x + shift)
    if np.any(peak > MAX_EXPONENT):
        raise OverflowRiskError("fused exponent exceeds 700 inside the Phi1 integrand")
    a_exp = alpha - 1.0
    c_exp = gamma - alpha - 1.0
    raise_by = tuple(int(j) for j in raise_by)

    total = [np.zeros_like(x) for _ in raise_by]
    span_l, span_r = _spans(a_exp, c_exp, beta, pow_arg, raise_by)
    single = np.abs(x) <= _SINGLE_MAX
    if _needs_grading(beta, pow_arg):
        single[:] = False
    need_left = ~(x > span_r / _SPLIT) & ~single
    need_right = ~(x < -span_l / _SPLIT) & ~single
    for mask, piece in ((single, _single_rule), (need_left, _left_piece), (need_right, _right_piece)):
        if np.any(mask):
            parts = piece(a_exp, c_exp, beta, pow_arg, x[mask], shift[mask], raise_by, order)
            for t, part in zip(total, parts):
                t[mask] += part
    result = []
    for t, j in zip(total, raise_by):
        result.append((_norm(alpha + j, gamma + j) * t).reshape(shape))
    return result


def _plain(args: Phi1Args, rule: QuadratureRule) -> float:
    a_exp = args.alpha - 1.0
    c_exp = args.gamma - args.alpha - 1.0
    if rule.kind is not RuleKind.GAUSS_JACOBI or not (
            math.isclose(rule.alpha, a_exp, abs_tol=1e-14) and math.isclose(rule.beta, c_exp, abs_tol=1e-14)):
        raise ConfigurationError(
            f"Phi1 needs a Gauss-Jacobi rule with exponents ({a_exp}, {c_exp}); got {rule.kind.value} "
            f"({rule.alpha}, {rule.beta})")
    u = rule.nodes
    g = np.exp(args.exp_arg * u + args.exp_shift) * _power_term(u, args.pow_arg, args.beta)
    return float(_norm(args.alpha, args.gamma) * (g @ rule.weights))


def phi1_fused(args: Phi1Args, rule: QuadratureRule | None = None, order: int = DEFAULT_ORDER) -> float:
    """Return ``exp(exp_shift) * Phi1(alpha, beta; gamma; pow_arg, exp_arg)``.

    With ``rule`` given, the integral is evaluated by that single Gauss-Jacobi
    rule on (0, 1); the rule's exponents must be ``(alpha-1, gamma-alpha-1)``.
    This is adequate for moderate ``|exp_arg|``.  Without ``rule`` the windowed
    composite scheme of :func:`phi1_integrals` is used at the given order.

    Raises
    ------
    DomainError
        If ``pow_arg >= 1`` (the power term would be singular on the path).
    OverflowRiskError
        If ``exp_arg + exp_shift`` or ``exp_shift`` exceeds 700.
    """
    if max(args.exp_shift, args.exp_arg + args.exp_shift) > MAX_EXPONENT:
        raise OverflowRiskError("fused exponent exceeds 700 inside the Phi1 integrand")
    if rule is not None:
        return _plain(args, rule)
    (value,) = phi1_integrals(args.alpha, args.beta, args.gamma, args.exp_arg, args.pow_arg,
                              args.exp_shift, order=order)
    return float(value)


def phi1_series(alpha, beta, gamma, pow_arg, exp_arg, terms: int = 200) -> float:
    """Double power series of Phi1; a test oracle for small arguments only.

    ``sum_{m,n} (alpha)_{m+n} (beta)_m / ((gamma)_{m+n} m! n!) y^m x^n``
    """
    total = 0.0
    # row recursion over m with inner n sums; adequate for |y| < 1, |x| ~ O(10)
    coef_m = 1.0  # (alpha)_m (beta)_m / ((gamma)_m m!) y^m
    for m in range(terms):
        inner = 0.0
        term = coef_m
        for n in range(terms):
            inner += term
            if abs(term) < 1e-18 * max(abs(inner), 1e-300) and n > 5:
                break
            term *= (alpha + m + n) / (gamma + m + n) * exp_arg / (n + 1)
        total += inner
        if abs(coef_m) < 1e-18 * max(abs(total), 1e-300) and m > 5:
            break
        coef_m *= (alpha + m) * (beta + m) / ((gamma + m) * (m + 1)) * pow_arg
    return total
