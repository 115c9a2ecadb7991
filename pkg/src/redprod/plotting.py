"""Matplotlib figures written next to the CLI's delimited/JSON output."""

from __future__ import annotations

import math
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .products import ReducedProduct  # noqa: E402

LABEL_LIMIT = 24


def _circle_layout(n: int) -> list[tuple[float, float]]:
    if n == 1:
        return [(0.0, 0.0)]
    return [(math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n)) for k in range(n)]


def plot_quotient(rp: ReducedProduct, partition: Sequence[frozenset[int]], path: str, title: str = "") -> None:
    """Draw the quotient structure, one color per component; loops are omitted."""
    n = len(rp.classes)
    pos = _circle_layout(n)
    comp = {k: c for c, part in enumerate(partition) for k in part}
    cmap = plt.get_cmap("tab10" if len(partition) <= 10 else "tab20")

    fig, ax = plt.subplots(figsize=(6, 6))
    for a, b in sorted(rp.quotient.relation):
        if a == b:
            continue
        (x0, y0), (x1, y1) = pos[a], pos[b]
        ax.annotate(
            "", xy=(x1, y1), xytext=(x0, y0),
            arrowprops=dict(arrowstyle="->", color="0.6", lw=0.6, shrinkA=6, shrinkB=6),
        )
    xs, ys = zip(*pos)
    ax.scatter(xs, ys, s=120, c=[cmap(comp[k] % cmap.N) for k in range(n)], zorder=3, edgecolors="k")
    if n <= LABEL_LIMIT:
        for k, (x, y) in enumerate(pos):
            ax.text(x * 1.12, y * 1.12, "(" + ",".join(map(str, rp.reps[k])) + ")", ha="center", va="center", fontsize=8)
    ax.set_title(title or f"{n} classes, {len(partition)} component(s)")
    ax.set_aspect("equal")
    ax.axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_verify_summary(counts: dict[str, tuple[int, int]], path: str, title: str = "") -> None:
    """Agreement rate per check; ``counts`` maps check name to (agreed, total)."""
    names = list(counts)
    rates = [a / t if t else 1.0 for a, t in counts.values()]
    fig, ax = plt.subplots(figsize=(6, 3))
    bars = ax.barh(names, rates, color=["tab:green" if r == 1.0 else "tab:red" for r in rates])
    for bar, (a, t) in zip(bars, counts.values()):
        ax.text(bar.get_width() * 0.98, bar.get_y() + bar.get_height() / 2, f"{a}/{t}", ha="right", va="center", fontsize=8, color="w")
    ax.set_xlim(0, 1)
    ax.set_xlabel("agreement rate")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
