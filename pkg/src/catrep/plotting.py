"""Figure rendering for the report outputs (loss trace, goodness curve,
retrieval precision).  Every figure lands next to its delimited twin."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_trace_figure(losses, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(np.arange(1, len(losses) + 1), losses, lw=1.2)
    ax.set_xlabel("iteration")
    ax.set_ylabel("loss")
    ax.set_title("Training loss")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_goodness_figure(curves: dict, path) -> None:
    """curves: method name -> (m, 2) array of (epsilon, gamma) samples."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, curve in curves.items():
        curve = np.atleast_2d(curve)
        if curve.size:
            ax.plot(curve[:, 0], curve[:, 1], lw=1.2, label=name)
    ax.set_xlabel("epsilon")
    ax.set_ylabel("gamma")
    ax.set_title("Margin goodness curve")
    if curves:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_precision_figure(precision: dict, path) -> None:
    """precision: k -> mean precision at k."""
    ks = sorted(precision)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ks, [precision[k] for k in ks], marker="o", lw=1.2)
    ax.set_xlabel("k")
    ax.set_ylabel("precision@k")
    ax.set_ylim(0.0, 1.05)
    ax.set_title("Retrieval precision")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
