"""Figure rendering for CLI reports.

Each run mode can render a PNG next to its CSV. The CSV remains the
canonical output; figures are a convenience view of the same data.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 150


def save_xy(path, x, series: dict[str, np.ndarray], xlabel: str,
            ylabel: str = "value", logy: bool = False, title: str | None = None):
    """Line plot of one or more named series over a common x axis."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for label, y in series.items():
        ax.plot(x, y, marker=".", markersize=3, linewidth=1.2, label=label)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(series) > 1:
        ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_matrix(path, rho: np.ndarray, title: str | None = None):
    """Magnitude heat map of a density matrix."""
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    im = ax.imshow(np.abs(rho), cmap="viridis")
    fig.colorbar(im, ax=ax, label="|entry|")
    ax.set_xlabel("column")
    ax.set_ylabel("row")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_enhancement(path, ns, peak_gammas, peak_values):
    """Peak response and peak location versus chain size."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.0, 3.6))
    ax1.plot(ns, peak_values, "o-")
    ax1.set_xlabel("chain size N")
    ax1.set_ylabel("peak qubit-1 response")
    ax1.grid(alpha=0.3)
    ax2.plot(ns, peak_gammas, "s-", color="tab:orange")
    ax2.set_xlabel("chain size N")
    ax2.set_ylabel("peak noise strength")
    ax2.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
