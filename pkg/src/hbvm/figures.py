"""Render drift, convergence and trajectory reports to figure files.

Imported lazily by the CLI so that plain CSV runs never touch matplotlib.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .harness import ConvergenceReport, DriftResult
from .integrator import Trajectory

__all__ = ["save_drift_figure", "save_convergence_figure", "save_trajectory_figure"]


def save_drift_figure(result: DriftResult, path: str, title: str = "") -> None:
    """Energy error versus time, with the fitted drift line overlaid."""
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(result.times, result.energy_delta, lw=0.8, label="H - H_0")
    fit = np.polyfit(result.times, result.energy_delta, 1)
    ax.plot(result.times, np.polyval(fit, result.times), "r--", lw=1.0,
            label=f"drift slope {result.slope:.3e}")
    ax.set_xlabel("t")
    ax.set_ylabel("H - H_0")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_convergence_figure(report: ConvergenceReport, path: str, title: str = "") -> None:
    """Error against stepsize on log-log axes with an order guide line."""
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.loglog(report.stepsizes, report.errors, "o-", label="error")
    if len(report.orders):
        p = report.orders[-1]
        guide = report.errors[-1] * (report.stepsizes / report.stepsizes[-1]) ** p
        ax.loglog(report.stepsizes, guide, "k--", lw=0.8, label=f"h^{p:.2f}")
    ax.set_xlabel("h")
    ax.set_ylabel("max error")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_trajectory_figure(trajectory: Trajectory, path: str, title: str = "") -> None:
    """State components and energy error of a run, stacked panels."""
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(7, 5.5), sharex=True)
    d = trajectory.states.shape[1]
    for i in range(d):
        ax0.plot(trajectory.times, trajectory.states[:, i], lw=0.8, label=f"y_{i + 1}")
    ax0.set_ylabel("state")
    if d <= 6:
        ax0.legend(loc="best", fontsize=8, ncol=3)
    ax1.semilogy(trajectory.times, np.maximum(trajectory.energy_error, 1e-17), lw=0.8)
    ax1.set_xlabel("t")
    ax1.set_ylabel("|H - H_0|")
    if title:
        ax0.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
