"""Render per-input distribution figures next to the delimited output."""

from __future__ import annotations

import os
import re

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import ResultRecord


def _safe_filename(input_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", input_id) or "input"


def render_series_figure(series, num_classes: int, path: str, title: str = "",
                         class_labels=None) -> None:
    """Grouped bar chart of one or more dense distributions.

    ``series`` is a list of (label, dense probability vector) pairs.
    """
    n = len(series)
    width = 0.8 / max(n, 1)
    x = np.arange(num_classes)
    fig, ax = plt.subplots(figsize=(max(6.0, 0.6 * num_classes), 3.2))
    for i, (label, probs) in enumerate(series):
        ax.bar(x + (i - (n - 1) / 2) * width, probs, width=width, label=label)
    ax.set_xlabel("latent class")
    ax.set_ylabel("probability")
    ax.set_xticks(x)
    if class_labels is not None:
        ax.set_xticklabels(class_labels, rotation=45, ha="right", fontsize=8)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_record_figure(record: ResultRecord, path: str, class_labels=None) -> None:
    """One record's method output against its softmax distribution."""
    series = [("softmax", record.softmax_probs)]
    if record.method != "softmax":
        series.append((record.method, record.distribution.dense()))
    render_series_figure(
        series,
        record.distribution.num_classes,
        path,
        title=record.input_id,
        class_labels=class_labels,
    )


def render_batch_figures(records, directory: str, class_labels=None) -> list[str]:
    """Write one PNG per record into ``directory``; returns the paths."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for rec in records:
        path = os.path.join(directory, f"{_safe_filename(rec.input_id)}.png")
        render_record_figure(rec, path, class_labels=class_labels)
        paths.append(path)
    return paths


def render_pair_figures(pairs, directory: str) -> list[str]:
    """Comparison figures for (id, record_a, record_b) triples."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for input_id, rec_a, rec_b in pairs:
        path = os.path.join(directory, f"{_safe_filename(input_id)}.png")
        render_series_figure(
            [
                (f"a:{rec_a.method}", rec_a.distribution.dense()),
                (f"b:{rec_b.method}", rec_b.distribution.dense()),
            ],
            rec_a.distribution.num_classes,
            path,
            title=input_id,
        )
        paths.append(path)
    return paths
