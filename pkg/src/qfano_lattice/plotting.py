"""Figures written next to the text/CSV reports."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_cube_contributions(contributions: Mapping[str, str], total, path, title: str = ""):
    """Bar chart of each component's share of H^3, with the total as a dashed line."""
    names = list(contributions)
    values = [Fraction(v) for v in contributions.values()]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.7 * len(names) + 2), 3.2))
    colors = ["#4c72b0" if v >= 0 else "#c44e52" for v in values]
    # float conversion is for drawing only
    ax.bar(names, [float(v) for v in values], color=colors)
    ax.axhline(float(Fraction(total)), ls="--", color="k", lw=1, label=f"H^3 = {total}")
    ax.axhline(0, color="0.5", lw=0.5)
    ax.set_ylabel("contribution to H^3")
    ax.set_title(title or "H^3 by component")
    ax.legend(frameon=False, fontsize=8)
    return _save(fig, path)


def plot_sweep(rows: Sequence[Mapping], path):
    """H_X^3 against h^3 for every swept scenario, over the line 2 h^3."""
    fig, ax = plt.subplots(figsize=(5, 3.6))
    ns = sorted({row["N"] for row in rows})
    cmap = plt.get_cmap("viridis", max(len(ns), 2))
    for idx, n in enumerate(ns):
        pts = [(float(Fraction(r["h3"])), float(r["HX3"])) for r in rows if r["N"] == n and r["HX3"] is not None]
        if pts:
            xs, ys = zip(*pts)
            ax.scatter(xs, ys, s=14 + 4 * idx, color=cmap(idx), label=f"N = {n}", alpha=0.8)
    hs = sorted({float(Fraction(r["h3"])) for r in rows})
    if hs:
        ax.plot(hs, [2 * h for h in hs], color="k", lw=0.8, ls=":", label="2 h^3")
    failed = [r for r in rows if not r["passed"]]
    if failed:
        ax.scatter([float(Fraction(r["h3"])) for r in failed], [0] * len(failed), marker="x", color="r",
                   label="failed")
    ax.set_xlabel("h^3")
    ax.set_ylabel("H_X^3")
    ax.legend(frameon=False, fontsize=7, ncol=2)
    return _save(fig, path)
