"""Success-ratio curves over interactions: seen/unseen/all ratios with std
bands, the baseline level, and the cumulative demonstration count on a
second axis."""
from __future__ import annotations

import math
from typing import Sequence

from .harness import MetricsRow, aggregate

COLORS = {
    "seen": "#2ca02c",
    "unseen": "#ff7f0e",
    "all": "#1f77b4",
    "baseline": "#808080",
    "demos": "#3d283f",
}


def plot_metrics(
    rows: Sequence[MetricsRow],
    out_path: str,
    baseline_rows: Sequence[MetricsRow] | None = None,
    title: str = "Task success over interactions",
) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    agg = aggregate(rows)
    ks = sorted(agg)

    def series(metric):
        means = [agg[k][metric][0] for k in ks]
        stds = [agg[k][metric][1] for k in ks]
        return means, stds

    fig, ax = plt.subplots(figsize=(7, 4.2))
    for metric, label in (("seen_ratio", "seen"), ("unseen_ratio", "unseen"), ("all_ratio", "all")):
        means, stds = series(metric)
        xs = [k for k, m in zip(ks, means) if not math.isnan(m)]
        ms = [m for m in means if not math.isnan(m)]
        ss = [s for m, s in zip(means, stds) if not math.isnan(m)]
        ax.plot(xs, [100 * m for m in ms], color=COLORS[label], label=f"{label} tasks")
        ax.fill_between(
            xs,
            [100 * max(m - s, 0.0) for m, s in zip(ms, ss)],
            [100 * min(m + s, 1.0) for m, s in zip(ms, ss)],
            color=COLORS[label],
            alpha=0.15,
        )
    if baseline_rows:
        bagg = aggregate(baseline_rows)
        bks = sorted(bagg)
        ax.plot(
            bks,
            [100 * bagg[k]["all_ratio"][0] for k in bks],
            color=COLORS["baseline"],
            linestyle="--",
            label="baseline (all tasks)",
        )
    ax.set_xlabel("interactions")
    ax.set_ylabel("solved tasks [%]")
    ax.set_ylim(-2, 102)
    ax.set_title(title)

    ax2 = ax.twinx()
    means, stds = series("demos_received")
    ax2.plot(ks, means, color=COLORS["demos"], linestyle=":", label="demonstrations")
    ax2.set_ylabel("demonstrations", color=COLORS["demos"])
    ax2.set_ylim(bottom=0)

    handles1, labels1 = ax.get_legend_handles_labels()
    handles2, labels2 = ax2.get_legend_handles_labels()
    ax.legend(handles1 + handles2, labels1 + labels2, loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
