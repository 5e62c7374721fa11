"""Matplotlib renderings of benchmark reports.

Figures are rendered headlessly (Agg) and written next to the delimited
report output; they visualize the same per-trial numbers the CSV carries.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "plot_intersection_matrix",
    "plot_probability_vector",
    "plot_report",
    "save_figure",
]

_RC = {
    "figure.figsize": (7.2, 4.2),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.frameon": False,
}


def save_figure(fig, path) -> None:
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def _paired_bars(ax, rows, learned_key, classic_key, ylabel):
    x = np.arange(len(rows))
    width = 0.38
    learned = [row[learned_key] for row in rows]
    classic = [row[classic_key] for row in rows]
    ax.bar(x - width / 2, learned, width, label="learned", color="#2a6fbb")
    ax.bar(x + width / 2, classic, width, label="classic", color="#b35a2a")
    ax.set_xticks(x)
    ax.set_xticklabels([str(row["trial"]) for row in rows])
    ax.set_xlabel("trial")
    ax.set_ylabel(ylabel)


def _plot_paired(report, learned_key, classic_key, ylabel):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        _paired_bars(ax, report.trials, learned_key, classic_key, ylabel)
        entropies = [row["entropy_reference"] for row in report.trials]
        ax.axhline(
            float(np.median(entropies)),
            color="0.25",
            linestyle="--",
            linewidth=1,
            label="entropy H(f)",
        )
        if "bound_value" in report.trials[0]:
            bounds = [row["bound_value"] for row in report.trials]
            ax.axhline(
                float(np.median(bounds)),
                color="0.25",
                linestyle=":",
                linewidth=1,
                label="step bound",
            )
        ax.set_title(report.experiment)
        ax.legend(ncol=2)
        return fig


def _plot_robustness(report):
    labels = sorted({row["window"] for row in report.trials})
    series = ("perfect_mean_steps", "history_mean_steps", "classic_mean_steps")
    colors = ("#2a6fbb", "#4da04d", "#b35a2a")
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        x = np.arange(len(labels))
        width = 0.26
        for k, (key, color) in enumerate(zip(series, colors)):
            values = []
            for label in labels:
                group = [r[key] for r in report.trials if r["window"] == label]
                values.append(float(np.median(group)))
            ax.bar(x + (k - 1) * width, values, width, label=key.replace("_mean_steps", ""), color=color)
        ax.set_xticks(x)
        ax.set_xticklabels(labels)
        ax.set_xlabel("window (train_test)")
        ax.set_ylabel("mean search steps")
        ax.set_title(report.experiment)
        ax.legend(ncol=3)
        return fig


def plot_report(report):
    """Figure for a BenchReport; the panel layout follows the experiment."""
    if report.experiment == "skiplist-robustness":
        return _plot_robustness(report)
    if report.experiment.startswith("skiplist"):
        return _plot_paired(report, "mean_steps", "classic_mean_steps", "mean search steps")
    return _plot_paired(report, "mean_depth", "classic_mean_depth", "mean query depth")


def plot_intersection_matrix(labels, matrix):
    """Heatmap of pairwise window overlap."""
    with plt.rc_context({**_RC, "axes.grid": False}):
        fig, ax = plt.subplots(figsize=(5.6, 4.8))
        arr = np.asarray(matrix)
        image = ax.imshow(arr, cmap="viridis", vmin=arr.min(), vmax=1.0)
        ax.set_xticks(range(len(labels)))
        ax.set_yticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=90)
        ax.set_yticklabels(labels)
        fig.colorbar(image, ax=ax, label="intersection index")
        ax.set_title("window overlap")
        return fig


def plot_probability_vector(pv):
    """Rank-frequency view on log-log axes."""
    probs = np.sort(pv.probs)[::-1]
    ranks = np.arange(1, len(probs) + 1)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        positive = probs > 0
        ax.loglog(ranks[positive], probs[positive], marker=".", linestyle="none")
        ax.set_xlabel("rank")
        ax.set_ylabel("probability")
        ax.set_title("rank-frequency")
        return fig
