"""
SVG line charts of estimates against true derivatives.

Uses the non-interactive Agg backend; SVG ids are salted with a fixed
string and no date is embedded, so repeated runs write identical files.
"""

import logging
import os
from typing import Dict, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from core.models import Trajectory  # noqa: E402

logger = logging.getLogger(__name__)

plt.rcParams["svg.hashsalt"] = "sdbench"
plt.rcParams["svg.fonttype"] = "none"

_SAVE_KWARGS = {"format": "svg", "metadata": {"Date": None}}


def _save(fig, path: str) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
    logger.info(f" Wrote plot {path}")
    return path


def plot_estimates(traj: Trajectory, estimate_columns: Sequence[str], truth_columns: Sequence[str],
                   path: str, title: str = "") -> str:
    """One panel per derivative order: estimate against truth."""
    n = len(estimate_columns)
    fig, axes = plt.subplots(n, 1, figsize=(8, 2.4 * n), sharex=True, squeeze=False)
    for order, (ax, est, truth) in enumerate(zip(axes[:, 0], estimate_columns, truth_columns), start=1):
        ax.plot(traj.times, traj.column(truth), "k--", linewidth=1.0, label=truth)
        ax.plot(traj.times, traj.column(est), linewidth=0.8, label=est)
        ax.set_ylabel(f"order {order}")
        ax.grid(True, alpha=0.3)
        ax.legend(loc="upper right", fontsize="small")
    axes[-1, 0].set_xlabel("t [s]")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_overlay(members: Dict[str, Trajectory], estimates: Dict[str, str], truth_column: str,
                 path: str, title: str = "") -> str:
    """Several methods' estimates of one derivative order over a shared truth curve."""
    fig, ax = plt.subplots(figsize=(8, 3.5))
    first = next(iter(members.values()))
    ax.plot(first.times, first.column(truth_column), "k--", linewidth=1.0, label=truth_column)
    for name, traj in members.items():
        ax.plot(traj.times, traj.column(estimates[name]), linewidth=0.8, label=f"{name}: {estimates[name]}")
    ax.set_xlabel("t [s]")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="upper right", fontsize="small")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_return_map(rows: Sequence[dict], path: str, title: str = "") -> str:
    """e_out against e_in, one curve per (rho, k), with the identity lines for reference."""
    fig, ax = plt.subplots(figsize=(6, 6))
    curves: Dict[tuple, list] = {}
    for row in rows:
        curves.setdefault((row["rho"], row["k"]), []).append((row["e_in"], row["e_out"]))
    for (rho, k), points in curves.items():
        points.sort()
        ax.plot([p[0] for p in points], [p[1] for p in points], marker=".", markersize=3,
                linewidth=0.8, label=f"rho={rho:g}, k={k:g}")
    lim = max(abs(row["e_in"]) for row in rows) if rows else 1.0
    ax.plot([-lim, lim], [lim, -lim], "k:", linewidth=0.8, label="|e_out| = |e_in|")
    ax.set_xlabel("e_sigma (i)")
    ax.set_ylabel("e_sigma (i+1)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize="small")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)
