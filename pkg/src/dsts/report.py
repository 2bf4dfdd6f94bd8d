"""Figure rendering for solver reports.

Figures are written next to the delimited outputs so a run leaves both a
machine-readable table and something to look at. Rendering is headless
(Agg); nothing here affects solver results.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .core import Instance, Schedule
from .vns import VnsStats


def save_convergence_figure(stats: VnsStats, path: str) -> None:
    """Best-found cost trace over iterations."""
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.step(range(len(stats.best_costs)), stats.best_costs, where="post", color="tab:blue")
    ax.set_xlabel("iteration")
    ax.set_ylabel("best cost")
    ax.set_title("Best-found cost")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_schedule_figure(inst: Instance, s: Schedule, path: str) -> None:
    """Dock occupancy chart: one bar per served trailer, labeled with its id."""
    fig, ax = plt.subplots(figsize=(9, 1 + 0.5 * inst.docks))
    for run in s.runs:
        for j, start in run.entries:
            t = inst.trailer(j)
            ax.barh(run.dock, t.block, left=start, height=0.6,
                    color="tab:blue", edgecolor="black", alpha=0.8)
            ax.text(start + t.block / 2, run.dock, str(j),
                    ha="center", va="center", color="white", fontsize=8)
    ax.set_yticks(range(inst.docks))
    ax.set_yticklabels([f"dock {d}" for d in range(inst.docks)])
    ax.set_xlim(0, inst.horizon)
    ax.set_xlabel("period")
    title = f"{inst.name}: {inst.n - len(s.unserved)}/{inst.n} served, cost {s.cost}"
    ax.set_title(title)
    ax.grid(True, axis="x", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_service_ratio_figure(rows: list[dict], path: str) -> None:
    """Per-instance service ratio across benchmark repetitions."""
    fig, ax = plt.subplots(figsize=(9, 4))
    by_instance: dict[str, list[float]] = {}
    for row in rows:
        by_instance.setdefault(row["instance"], []).append(row["ratio"])
    names = list(by_instance)
    means = [sum(v) / len(v) for v in by_instance.values()]
    ax.bar(range(len(names)), means, color="tab:green", alpha=0.8)
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("served / total")
    ax.set_title("Service ratio by instance")
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
