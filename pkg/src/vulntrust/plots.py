"""Matplotlib figure rendering for the report path (PNG next to each CSV)."""

from __future__ import annotations

from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from . import months


def _finish(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_yearly_totals(totals: Mapping[int, int], path: str) -> None:
    fig, ax = plt.subplots(figsize=(8, 4.5))
    years = sorted(totals)
    ax.bar(years, [totals[y] for y in years], color="#3465a4")
    ax.set_xlabel("year")
    ax.set_ylabel("vulnerabilities reported")
    ax.set_title("Total vulnerabilities per calendar year")
    _finish(fig, path)


def save_avg_per_affected(values: Mapping[int, float], path: str) -> None:
    fig, ax = plt.subplots(figsize=(8, 4.5))
    years = sorted(values)
    ax.plot(years, [values[y] for y in years], marker="o", color="#3465a4")
    ax.set_xlabel("year")
    ax.set_ylabel("vulnerabilities per affected package")
    ax.set_title("Average vulnerabilities per affected package")
    _finish(fig, path)


def save_distribution(pairs: Sequence[tuple[str, int]], path: str) -> None:
    fig, ax = plt.subplots(figsize=(10, 4.5))
    totals = [t for _, t in pairs]
    ax.bar(range(len(totals)), totals, width=1.0, color="#3465a4")
    ax.set_yscale("log")
    ax.set_xlabel("packages, most vulnerable first")
    ax.set_ylabel("total vulnerabilities (log)")
    ax.set_title("Distribution of vulnerabilities across packages")
    step = max(1, len(pairs) // 10)
    ax.set_xticks(range(0, len(pairs), step))
    ax.set_xticklabels([pairs[i][0] for i in range(0, len(pairs), step)], rotation=60, ha="right", fontsize=7)
    _finish(fig, path)


def save_component_history(
    component: str,
    start: str,
    counts: Sequence[int],
    path: str,
    predicted_rate: float | None = None,
    horizon_months: int = 0,
) -> None:
    """Actual monthly counts (blue), optional flat predicted rate (red)."""
    base = months.parse_month(start)
    xs = list(range(len(counts)))
    fig, ax = plt.subplots(figsize=(9, 4))
    ax.plot(xs, counts, color="#3465a4", label="reported")
    if predicted_rate is not None and horizon_months > 0:
        future = list(range(len(counts), len(counts) + horizon_months))
        ax.plot(future, [predicted_rate] * horizon_months, color="#cc0000", label="predicted rate")
    tick_positions = list(range(0, len(xs) + horizon_months, max(1, (len(xs) + horizon_months) // 8)))
    ax.set_xticks(tick_positions)
    ax.set_xticklabels([months.format_month(base + p) for p in tick_positions], rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("vulnerabilities / month")
    ax.set_title(component)
    ax.legend()
    _finish(fig, path)
