"""Matplotlib renderings of the report artifacts: the per-news group
composition on the 2-simplex, accuracy bars, and accuracy gains."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SQRT3_2 = np.sqrt(3.0) / 2.0


def _simplex_xy(frac_l, frac_e, frac_c):
    # corners: lurker (0,0), engager (1,0), contributor (0.5, sqrt(3)/2)
    x = np.asarray(frac_e) + 0.5 * np.asarray(frac_c)
    y = _SQRT3_2 * np.asarray(frac_c)
    return x, y


def read_ternary_csv(path: str | Path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        reader = csv.DictReader(line for line in fh if not line.startswith("#"))
        for row in reader:
            rows.append(
                {
                    "news_id": row["news_id"],
                    "frac_lurker": float(row["frac_lurker"]),
                    "frac_engager": float(row["frac_engager"]),
                    "frac_contributor": float(row["frac_contributor"]),
                    "label": int(row["label"]),
                }
            )
    return rows


def plot_ternary(rows: list[dict], out_path: str | Path) -> None:
    """Scatter of per-news group composition, colored by label."""
    fig, ax = plt.subplots(figsize=(6, 5.5))
    corners = np.array([[0, 0], [1, 0], [0.5, _SQRT3_2], [0, 0]])
    ax.plot(corners[:, 0], corners[:, 1], color="black", linewidth=1)
    for label, color, name in ((0, "tab:blue", "real"), (1, "tab:red", "fake")):
        sub = [r for r in rows if r["label"] == label]
        if not sub:
            continue
        x, y = _simplex_xy(
            [r["frac_lurker"] for r in sub],
            [r["frac_engager"] for r in sub],
            [r["frac_contributor"] for r in sub],
        )
        ax.scatter(x, y, s=14, alpha=0.6, color=color, label=name)
    ax.text(-0.02, -0.04, "lurkers", ha="right")
    ax.text(1.02, -0.04, "engagers", ha="left")
    ax.text(0.5, _SQRT3_2 + 0.03, "contributors", ha="center")
    ax.set_xlim(-0.2, 1.2)
    ax.set_ylim(-0.12, 1.0)
    ax.set_aspect("equal")
    ax.axis("off")
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def plot_accuracy(rows: list[dict], out_path: str | Path) -> None:
    """Bar chart of mean accuracy with std error bars per grid cell."""
    labels = [f"{r['condition']}\na={r['alpha']:g}" for r in rows]
    means = [r["mean_acc"] for r in rows]
    stds = [r["std_acc"] for r in rows]
    fig, ax = plt.subplots(figsize=(max(6, 1.2 * len(rows)), 4))
    ax.bar(range(len(rows)), means, yerr=stds, capsize=4, color="tab:gray")
    ax.set_xticks(range(len(rows)), labels, fontsize=8)
    ax.set_ylabel("test accuracy")
    ax.set_ylim(0, 1)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def plot_gains(rows: list[dict], out_path: str | Path) -> None:
    """Accuracy gain versus the binary interaction baseline."""
    rows = [r for r in rows if r.get("gain_vs_binary_un") not in (None, "")]
    labels = [f"{r['condition']}\na={r['alpha']:g}" for r in rows]
    gains = [float(r["gain_vs_binary_un"]) for r in rows]
    fig, ax = plt.subplots(figsize=(max(6, 1.2 * max(len(rows), 1)), 4))
    colors = ["tab:green" if g >= 0 else "tab:red" for g in gains]
    ax.bar(range(len(rows)), gains, color=colors)
    ax.axhline(0.0, color="black", linewidth=1)
    ax.set_xticks(range(len(rows)), labels, fontsize=8)
    ax.set_ylabel("accuracy gain vs binary_un")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def read_results_csv(path: str | Path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            rows.append(
                {
                    "condition": row["condition"],
                    "alpha": float(row["alpha"]),
                    "seed_count": int(row["seed_count"]),
                    "mean_acc": float(row["mean_acc"]),
                    "std_acc": float(row["std_acc"]),
                    "gain_vs_binary_un": (
                        float(row["gain_vs_binary_un"])
                        if row["gain_vs_binary_un"] != ""
                        else None
                    ),
                }
            )
    return rows
