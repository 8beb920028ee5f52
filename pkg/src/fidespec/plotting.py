"""Render convergence reports as semi-log figures.

Uses the Agg backend so figure export works headless; the output format
follows the file extension (png, pdf, svg, ...).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .analysis import ConvergenceReport

__all__ = ["render_convergence_figure"]


def render_convergence_figure(report: ConvergenceReport, path: str) -> str:
    """Plot L2 error against approximation order on a log scale and save it."""
    orders = [row.order for row in report.rows]
    errors = [max(row.l2_error, 1e-300) for row in report.rows]
    fig, ax = plt.subplots(figsize=(4.8, 3.4))
    ax.semilogy(orders, errors, marker="o", markersize=4, lw=1.2, color="tab:blue")
    ax.set_xlabel("approximation order N")
    ax.set_ylabel(r"$L^2$ error")
    ax.set_title(report.problem)
    ax.set_xticks(orders)
    ax.grid(True, which="both", ls=":", alpha=0.5)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
