"""Log-gamma and the standard normal CDF."""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from gpd.errors import DomainError


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0."""
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"log_gamma needs a finite x > 0, got {x}")
    return math.lgamma(x)


def std_normal_cdf(x):
    """Standard normal CDF, accurate in both tails.

    ``ndtr`` switches to ``erfc`` for negative arguments, so small lower-tail
    probabilities keep full relative precision and the result is monotone.
    """
    return special.ndtr(np.asarray(x, dtype=float))
