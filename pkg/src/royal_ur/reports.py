"""Training-report figures rendered from a metrics CSV.

The CSV is the boundary: this module reads the delimited output of a
training run and writes PNG figures next to it (or wherever asked).
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .storage import read_metrics
from .training import MetricsPoint


def _rolling_mean(values: Sequence[float], window: int) -> list[float]:
    out = []
    acc = 0.0
    for i, v in enumerate(values):
        acc += v
        if i >= window:
            acc -= values[i - window]
        out.append(acc / min(i + 1, window))
    return out


def _new_axes(title: str, ylabel: str):
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.set_title(title)
    ax.set_xlabel("episode")
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def render_report(metrics: Sequence[MetricsPoint], out_dir: str | Path, prefix: str = "") -> list[Path]:
    """Write the three standard figures; returns the paths written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    episodes = [p.episode for p in metrics]
    written: list[Path] = []

    window = max(1, len(metrics) // 50)

    fig, ax = _new_axes("Time to finish", "plies per episode")
    ttf = [p.time_to_finish for p in metrics]
    ax.plot(episodes, ttf, color="#b0c4de", linewidth=0.8, label="per recorded episode")
    ax.plot(episodes, _rolling_mean(ttf, window), color="#1f4e8c", linewidth=1.8,
            label=f"rolling mean (window {window})")
    ax.legend()
    path = out_dir / f"{prefix}time_to_finish.png"
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    fig, ax = _new_axes("Tracked-state value", "value at episode start")
    ax.plot(episodes, [p.tracked_value for p in metrics], color="#2e7d32", linewidth=1.2)
    path = out_dir / f"{prefix}tracked_value.png"
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    fig, ax = _new_axes("Cumulative wins", "games won")
    ax.plot(episodes, [p.wins_p1 for p in metrics], label="P1", color="#1f4e8c")
    ax.plot(episodes, [p.wins_p2 for p in metrics], label="P2", color="#c62828")
    ax.legend()
    path = out_dir / f"{prefix}wins.png"
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    return written


def report_from_csv(csv_path: str | Path, out_dir: str | Path | None = None, prefix: str = "") -> list[Path]:
    """Render the figures for a metrics CSV, defaulting to its directory."""
    csv_path = Path(csv_path)
    metrics = read_metrics(csv_path)
    if not metrics:
        raise ValueError(f"{csv_path} holds no recorded points")
    return render_report(metrics, out_dir if out_dir is not None else csv_path.parent, prefix)
