"""Runtime settings read from the environment."""

from __future__ import annotations

import os
from dataclasses import dataclass

from gpd.errors import ConfigurationError

RHO_MAX_DEFAULT = 0.99
RHO_MAX_CEILING = 0.9999
N_MAX_DEFAULT = 64
PHI1_ORDER_DEFAULT = 80
PANEL_ORDER_DEFAULT = 16


@dataclass(frozen=True)
class Settings:
    rho_max: float = RHO_MAX_DEFAULT
    n_max: int = N_MAX_DEFAULT
    phi1_order: int = PHI1_ORDER_DEFAULT
    panel_order: int = PANEL_ORDER_DEFAULT


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigurationError(f"{name} must be a number, got {raw!r}") from exc


def settings() -> Settings:
    """Current settings; ``GPD_RHO_MAX`` and ``GPD_QUAD_ORDER`` override the defaults.

    ``GPD_QUAD_ORDER`` sets the Gauss-Jacobi order used for Phi1.
    """
    rho_max = _env_float("GPD_RHO_MAX", RHO_MAX_DEFAULT)
    if not 0.0 < rho_max <= RHO_MAX_CEILING:
        raise ConfigurationError(f"GPD_RHO_MAX must lie in (0, {RHO_MAX_CEILING}], got {rho_max}")
    order = _env_float("GPD_QUAD_ORDER", PHI1_ORDER_DEFAULT)
    if order != int(order) or not 8 <= order <= 512:
        raise ConfigurationError(f"GPD_QUAD_ORDER must be an integer in [8, 512], got {order}")
    return Settings(rho_max=rho_max, phi1_order=int(order))
