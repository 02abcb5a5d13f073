"""Reference evaluations used to validate the closed form.

Three independent routes to the same CDFs:

* the normal-gamma mixture ``Z | y ~ N(2 rho y, 2 (1 - rho^2) y)`` with
  ``y ~ Gamma(n_hat / 2, 1)``,
* numerical integration of the Bessel-K density from its lower tail,
* Monte Carlo sampling of correlated pairs.

Plus :func:`bench_compare`, which times the closed form against the first two.
"""

from __future__ import annotations

import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from gpd.config import settings
from gpd.errors import ConfigurationError, DomainError
from gpd.prodist import (DistSpec, EvalResult, Method, Variable, _as, _standardize,
                         _sum_density, cdf_closed_array, product_spec)
from gpd.specfun.basic import std_normal_cdf
from gpd.specfun.quadrature import MAX_ORDER, QuadratureRule, RuleKind, make_rule

# ------------------------------------------------------------------ mixture

_GEO_POWERS = 2.0 ** np.arange(-4, 8)
_MIX_CHUNK = 256


def _check_rule(rule: QuadratureRule, n: int) -> None:
    want = 0.5 * n - 1.0
    if rule.kind is not RuleKind.GEN_LAGUERRE or not math.isclose(rule.alpha, want, abs_tol=1e-14):
        raise ConfigurationError(
            f"mixture needs a generalized Gauss-Laguerre rule with alpha = {want}; "
            f"got {rule.kind.value} with alpha = {rule.alpha}")


def _laguerre_sum(t: np.ndarray, rho: float, n: int, rule: QuadratureRule) -> np.ndarray:
    B = 1.0 - rho * rho
    y = rule.nodes
    arg = (t[:, None] - 2.0 * rho * y) / np.sqrt(2.0 * B * y)
    return (std_normal_cdf(arg) @ rule.weights) / math.gamma(0.5 * n)


def _mixture_laguerre(t, rho, n, rule):
    _check_rule(rule, n)
    value = _laguerre_sum(t, rho, n, rule)
    # compare with the doubled order, or with the halved one at the top of the range
    other = 2 * rule.order if 2 * rule.order <= MAX_ORDER else max(rule.order // 2, 1)
    err = np.abs(_laguerre_sum(t, rho, n, make_rule(RuleKind.GEN_LAGUERRE, other, rule.alpha)) - value)
    return value, err


def _mixture_panels(t: np.ndarray, rho: float, n: int, order: int):
    r"""Mixture integral after ``y = u^2``, on composite Gauss-Legendre panels.

    ``F = 2/Gamma(n/2) * int_0^inf u^{n-1} e^{-u^2} N((t - 2 rho u^2) / (sqrt(2B) u)) du``.
    The normal factor switches from 0 or 1 to its smooth bulk form around
    ``u_c = |t| / sqrt(2B)``, so panels are graded geometrically about ``u_c``
    and uniform elsewhere.  The error estimate compares ``order`` with
    ``2 * order`` points per panel.
    """
    B = 1.0 - rho * rho
    sq = math.sqrt(2.0 * B)
    half = 0.5 * n
    u_end = math.sqrt(half + 46.0 + 10.0 * math.sqrt(half))
    h = 0.25 * min(1.0, math.sqrt(B) / 0.45)
    uniform = np.arange(0.0, u_end + 0.5 * h, h)
    uniform[-1] = u_end
    log_norm = math.log(2.0) - math.lgamma(half)
    coarse = make_rule(RuleKind.GAUSS_LEGENDRE, order)
    fine = make_rule(RuleKind.GAUSS_LEGENDRE, 2 * order)

    def panel_sum(rule, lo, width, tt):
        u = lo[..., None] + width[..., None] * rule.nodes
        arg = (tt[:, None, None] - 2.0 * rho * u * u) / (sq * u)
        g = np.exp(log_norm + (n - 1.0) * np.log(u) - u * u) * std_normal_cdf(arg)
        return (g @ rule.weights * width).sum(axis=1)

    values = np.empty_like(t)
    errs = np.empty_like(t)
    for start in range(0, t.size, _MIX_CHUNK):
        tt = t[start:start + _MIX_CHUNK]
        uc = np.abs(tt) / sq
        geo = np.clip(uc[:, None] * _GEO_POWERS, 0.0, u_end)
        edges = np.sort(np.concatenate([np.broadcast_to(uniform, (tt.size, uniform.size)), geo], axis=1), axis=1)
        lo = edges[:, :-1]
        width = edges[:, 1:] - lo
        # zero-width panels (duplicated edges) contribute nothing; move their nodes off u = 0
        lo = np.where(width > 0, lo, u_end)
        v_coarse = panel_sum(coarse, lo, width, tt)
        v_fine = panel_sum(fine, lo, width, tt)
        values[start:start + tt.size] = v_fine
        errs[start:start + tt.size] = np.abs(v_fine - v_coarse)
    return values, errs


def cdf_mixture_array(z, spec: DistSpec, rule: QuadratureRule | None = None, *,
                      panel_order: int | None = None, sigma_x: float = 1.0, sigma_y: float = 1.0):
    """Mixture-representation CDF over an array of ``z``; returns ``(values, errs)``.

    Parameters
    ----------
    rule : QuadratureRule, optional
        A generalized Gauss-Laguerre rule with ``alpha = n_hat/2 - 1``.  When
        given, the mixture integral is the plain weighted sum over its nodes
        and the error estimate is the change on doubling its order.  This is
        fast but loses accuracy close to ``z = 0``, where the normal factor
        becomes a step in ``y``.  Without a rule, the graded composite scheme is
        used, which holds about 1e-14 everywhere.
    """
    zs = _standardize(z, sigma_x, sigma_y)
    t = (spec.c_factor * zs).ravel()
    if rule is not None:
        values, errs = _mixture_laguerre(t, spec.rho, spec.n_hat, rule)
    else:
        order = settings().panel_order if panel_order is None else int(panel_order)
        values, errs = _mixture_panels(t, spec.rho, spec.n_hat, order)
    return np.clip(values, 0.0, 1.0).reshape(zs.shape), errs.reshape(zs.shape)


def _mixture_result(z, spec, rule):
    z = float(z)
    if not math.isfinite(z):
        raise DomainError("z must be finite")
    v, e = cdf_mixture_array(np.array([z]), spec, rule)
    return EvalResult(value=float(v[0]), method=Method.MIXTURE, err_estimate=float(e[0]))


def cdf_product_mixture(z: float, rho: float, rule: QuadratureRule | None = None) -> EvalResult:
    """Mixture CDF of the product; ``rule`` must have ``alpha = -1/2`` if given."""
    return _mixture_result(z, product_spec(rho), rule)


def cdf_mean_mixture(z: float, spec: DistSpec, rule: QuadratureRule | None = None) -> EvalResult:
    return _mixture_result(z, _as(spec, Variable.MEAN), rule)


def cdf_sum_mixture(z: float, spec: DistSpec, rule: QuadratureRule | None = None) -> EvalResult:
    return _mixture_result(z, _as(spec, Variable.SUM), rule)


# ------------------------------------------------------- density integration

K0_TRUNCATION = 1e-18
K0_TOL = 1e-14
_K0_MAX_SPLITS = 40
_K0_GRADE_DEPTH = 50


def _lower_limit(rho: float, n: int, t_min: float) -> float:
    """Most negative point needed: density below 1e-18 there, found by doubling."""
    lo = -1.0
    while _sum_density(np.array([lo]), rho, n)[0] >= K0_TRUNCATION:
        lo *= 2.0
        if lo < -1e6:
            raise DomainError("could not bracket the lower tail of the density")
    return min(lo, t_min)


def _integrate_panels(a: np.ndarray, b: np.ndarray, rho: float, n: int, tol: float):
    """Adaptive GL16/GL32 integral of the sum density over each [a_i, b_i]."""
    g16 = make_rule(RuleKind.GAUSS_LEGENDRE, 16)
    g32 = make_rule(RuleKind.GAUSS_LEGENDRE, 32)
    out = np.zeros(a.size)
    err = np.zeros(a.size)
    owner = np.arange(a.size)
    lo, hi = a.copy(), b.copy()
    for depth in range(_K0_MAX_SPLITS + 1):
        if lo.size == 0:
            break
        width = hi - lo
        i16 = (_sum_density(lo[:, None] + width[:, None] * g16.nodes, rho, n) @ g16.weights) * width
        i32 = (_sum_density(lo[:, None] + width[:, None] * g32.nodes, rho, n) @ g32.weights) * width
        diff = np.abs(i32 - i16)
        done = (diff <= tol * np.maximum(width, 1e-3)) | (depth == _K0_MAX_SPLITS)
        np.add.at(out, owner[done], i32[done])
        np.add.at(err, owner[done], diff[done])
        keep = ~done
        mid = 0.5 * (lo[keep] + hi[keep])
        lo = np.concatenate([lo[keep], mid])
        hi = np.concatenate([mid, hi[keep]])
        owner = np.concatenate([owner[keep], owner[keep]])
    return out, err


def cdf_k0_integral_array(z, spec: DistSpec, *, tol: float = K0_TOL, sigma_x: float = 1.0,
                          sigma_y: float = 1.0):
    """CDF by integrating the Bessel-K density; returns ``(values, errs)``.

    The lower limit is where the density falls below 1e-18.  Breakpoints are
    placed at every requested point and, on a scale of ``1 - rho^2``, graded
    geometrically towards 0 (where the single-product density has a
    logarithmic singularity).  Each panel is integrated adaptively and the
    panel integrals are accumulated, so one pass serves the whole grid.
    """
    zs = _standardize(z, sigma_x, sigma_y)
    t = (spec.c_factor * zs).ravel()
    rho, n = spec.rho, spec.n_hat
    B = 1.0 - rho * rho
    if t.size == 0:
        return np.empty(zs.shape), np.empty(zs.shape)
    lower = _lower_limit(rho, n, float(t.min()))
    top = float(t.max())
    grade = B * 2.0 ** -np.arange(-3, _K0_GRADE_DEPTH + 1, dtype=float)
    pts = np.concatenate([[lower, 0.0], t, grade, -grade])
    pts = np.unique(pts[(pts >= lower) & (pts <= max(top, lower))])
    piece, piece_err = _integrate_panels(pts[:-1], pts[1:], rho, n, tol)
    cum = np.concatenate([[0.0], np.cumsum(piece)])
    cum_err = np.concatenate([[0.0], np.cumsum(piece_err)])
    idx = np.searchsorted(pts, t)
    values = np.clip(cum[idx], 0.0, 1.0)
    return values.reshape(zs.shape), cum_err[idx].reshape(zs.shape)


def cdf_k0_integral(z: float, spec: DistSpec) -> EvalResult:
    """CDF of ``spec`` at ``z`` by integrating its density."""
    z = float(z)
    if not math.isfinite(z):
        raise DomainError("z must be finite")
    v, e = cdf_k0_integral_array(np.array([z]), spec)
    return EvalResult(value=float(v[0]), method=Method.K0_INTEGRAL, err_estimate=float(e[0]))


# --------------------------------------------------------------- Monte Carlo

MC_MIN_SAMPLES = 10_000
_MC_CHUNK = 1 << 17


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo run description.  The shard count is part of the result."""

    spec: DistSpec
    z_grid: tuple
    n_samples: int = 1_000_000
    seed: int = 0
    shards: int = 1

    def __post_init__(self):
        grid = tuple(float(v) for v in self.z_grid)
        object.__setattr__(self, "z_grid", grid)
        if len(grid) == 0 or not all(math.isfinite(v) for v in grid):
            raise ConfigurationError("z grid must be a non-empty list of finite values")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigurationError("z grid must be strictly increasing")
        if int(self.n_samples) != self.n_samples or self.n_samples < MC_MIN_SAMPLES:
            raise ConfigurationError(f"n_samples must be an integer >= {MC_MIN_SAMPLES}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise ConfigurationError("seed must be an unsigned 64-bit integer")
        if int(self.shards) != self.shards or not 1 <= self.shards <= 1024:
            raise ConfigurationError("shards must be an integer in [1, 1024]")


@dataclass(frozen=True)
class McSummary:
    z_grid: tuple
    empirical_cdf: np.ndarray = field(repr=False)
    closed_cdf: np.ndarray = field(repr=False)
    ks_distance: float
    sample_mean: float
    sample_var: float
    seed: int
    n_samples: int

    def to_json_dict(self) -> dict:
        return {"ks_distance": self.ks_distance, "sample_mean": self.sample_mean,
                "sample_var": self.sample_var, "seed": self.seed, "n_samples": self.n_samples}


def _draw(gen: np.random.Generator, size: int, rho: float, n: int, mean: bool) -> np.ndarray:
    u = gen.standard_normal((size, n))
    v = gen.standard_normal((size, n))
    z = (u * (rho * u + math.sqrt(1.0 - rho * rho) * v)).sum(axis=1)
    return z / n if mean else z


def _run_shard(seq: np.random.SeedSequence, size: int, cfg: McConfig, grid: np.ndarray):
    gen = np.random.Generator(np.random.Philox(seq))
    counts = np.zeros(grid.size, dtype=np.int64)
    count, mean, m2 = 0, 0.0, 0.0
    is_mean = cfg.spec.variable is Variable.MEAN
    done = 0
    while done < size:
        k = min(_MC_CHUNK, size - done)
        z = np.sort(_draw(gen, k, cfg.spec.rho, cfg.spec.n_hat, is_mean))
        counts += np.searchsorted(z, grid, side="right")
        # merge chunk moments (Chan et al. pairwise update)
        c_mean = float(z.mean())
        c_m2 = float(((z - c_mean) ** 2).sum())
        delta = c_mean - mean
        total = count + k
        mean += delta * k / total
        m2 += c_m2 + delta * delta * count * k / total
        count = total
        done += k
    return counts, count, mean, m2


def mc_run(cfg: McConfig, workers: int = 1) -> McSummary:
    """Empirical CDF on ``cfg.z_grid`` and its sup-distance to the closed form.

    Shard ``i`` draws from a Philox stream seeded by child ``i`` of
    ``SeedSequence(cfg.seed)``; counts and moments are merged in shard order,
    so the result depends on the seed and shard count only, not on
    ``workers``.
    """
    grid = np.asarray(cfg.z_grid)
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.shards)
    base, extra = divmod(cfg.n_samples, cfg.shards)
    sizes = [base + (1 if i < extra else 0) for i in range(cfg.shards)]
    jobs = list(zip(children, sizes))
    if workers > 1 and cfg.shards > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _run_shard(job[0], job[1], cfg, grid), jobs))
    else:
        parts = [_run_shard(seq, size, cfg, grid) for seq, size in jobs]
    counts = np.zeros(grid.size, dtype=np.int64)
    count, mean, m2 = 0, 0.0, 0.0
    for c, k, m, s in parts:
        counts += c
        if k == 0:
            continue
        delta = m - mean
        total = count + k
        mean += delta * k / total
        m2 += s + delta * delta * count * k / total
        count = total
    empirical = counts / cfg.n_samples
    closed, _ = cdf_closed_array(grid, cfg.spec)
    ks = float(np.max(np.abs(empirical - closed)))
    return McSummary(z_grid=cfg.z_grid, empirical_cdf=empirical, closed_cdf=closed, ks_distance=ks,
                     sample_mean=mean, sample_var=m2 / (count - 1), seed=int(cfg.seed),
                     n_samples=int(cfg.n_samples))


# ---------------------------------------------------------------- benchmark

BENCH_METHODS = (Method.CLOSED, Method.MIXTURE, Method.K0_INTEGRAL)
BENCH_PAIRS = ((Method.CLOSED, Method.MIXTURE), (Method.CLOSED, Method.K0_INTEGRAL),
               (Method.MIXTURE, Method.K0_INTEGRAL))


def evaluate(method: Method, z, spec: DistSpec):
    """Dispatch to one of the array evaluators; returns ``(values, errs)``."""
    method = Method(method)
    if method is Method.CLOSED:
        return cdf_closed_array(z, spec)
    if method is Method.MIXTURE:
        return cdf_mixture_array(z, spec)
    if method is Method.K0_INTEGRAL:
        return cdf_k0_integral_array(z, spec)
    raise ConfigurationError(f"method {method.value} has no pointwise CDF")


@dataclass(frozen=True)
class BenchRow:
    spec: DistSpec
    median_seconds: dict
    max_diff: dict
    mean_diff: dict


def bench_compare(specs, z_grid, repetitions: int = 5) -> list[BenchRow]:
    """Median wall time per method and pairwise differences, one row per spec.

    Each method gets one untimed warm-up call, then ``repetitions`` timed
    calls over the whole grid.
    """
    if int(repetitions) != repetitions or repetitions < 3:
        raise ConfigurationError("repetitions must be an integer >= 3")
    grid = np.asarray(z_grid, dtype=float)
    rows = []
    for spec in specs:
        values, times = {}, {}
        for method in BENCH_METHODS:
            values[method], _ = evaluate(method, grid, spec)
            samples = []
            for _ in range(repetitions):
                t0 = time.perf_counter()
                evaluate(method, grid, spec)
                samples.append(time.perf_counter() - t0)
            times[method] = statistics.median(samples)
        max_diff, mean_diff = {}, {}
        for a, b in BENCH_PAIRS:
            d = np.abs(values[a] - values[b])
            max_diff[(a, b)] = float(d.max())
            mean_diff[(a, b)] = float(d.mean())
        rows.append(BenchRow(spec=spec, median_seconds=times, max_diff=max_diff, mean_diff=mean_diff))
    return rows
