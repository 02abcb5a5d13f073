"""Render CDF tables and Monte Carlo comparisons to image files.

Uses the non-interactive Agg backend; nothing is ever shown on screen.
"""

from __future__ import annotations

import math
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_STYLES = {"closed": "-", "mixture": "--", "k0": ":"}


def _figure(n_rows: int = 1, width: float = 6.5):
    fig, axes = plt.subplots(n_rows, 1, figsize=(width, width * _GOLDEN * (1.0 + 0.45 * (n_rows - 1))),
                             squeeze=False, sharex=True)
    for ax in axes[:, 0]:
        ax.spines["right"].set_visible(False)
        ax.spines["top"].set_visible(False)
    return fig, axes[:, 0]


def plot_table(rows, path: str, title: str | None = None) -> None:
    """CDF curves, one colour per rho and one line style per method.

    ``rows`` are dicts with keys ``rho``, ``z``, ``method`` and ``value``, as
    written by ``gpd table``.
    """
    curves = defaultdict(lambda: ([], []))
    for row in rows:
        zs, vs = curves[(row["rho"], row["method"])]
        zs.append(row["z"])
        vs.append(row["value"])
    fig, (ax,) = _figure()
    colours = {}
    for (rho, method), (zs, vs) in sorted(curves.items()):
        colour = colours.setdefault(rho, f"C{len(colours)}")
        ax.plot(zs, vs, _STYLES.get(method, "-"), color=colour, lw=1.2,
                label=f"rho={rho:g} ({method})")
    ax.set_xlabel("z")
    ax.set_ylabel("F(z)")
    ax.set_ylim(-0.02, 1.02)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=7, frameon=False, ncol=2)
    fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)


def plot_mc(summary, path: str, title: str | None = None) -> None:
    """Empirical against closed-form CDF, with the absolute gap below."""
    fig, (top, bottom) = _figure(2)
    z = summary.z_grid
    top.plot(z, summary.closed_cdf, "-", color="C0", lw=1.2, label="closed form")
    top.plot(z, summary.empirical_cdf, "--", color="C3", lw=1.0, label=f"Monte Carlo (n={summary.n_samples})")
    top.set_ylabel("F(z)")
    top.legend(fontsize=8, frameon=False)
    if title:
        top.set_title(title)
    bottom.plot(z, abs(summary.empirical_cdf - summary.closed_cdf), color="C2", lw=1.0)
    bottom.axhline(summary.ks_distance, color="0.5", lw=0.8, ls=":")
    bottom.set_xlabel("z")
    bottom.set_ylabel("|difference|")
    fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)
