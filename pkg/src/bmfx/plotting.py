"""Area/error trade-off figures."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .explore import TradeoffRecord  # noqa: E402


def tradeoff_figure(
    records: Sequence[TradeoffRecord],
    path,
    title: str = "",
    threshold: float | None = None,
):
    """Area against Hamming-distance error, one marker per committed step."""
    err = [100.0 * r.hd_error for r in records]
    ar = [r.area for r in records]
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(err, ar, "-o", ms=3.5, lw=1.2, color="#1f4e79")
    if records:
        ax.plot(err[:1], ar[:1], "s", ms=5, color="#a61c00", label="exact")
    if threshold is not None:
        ax.axvline(100.0 * threshold, ls="--", lw=0.8, color="0.4", label=f"threshold {100 * threshold:g}%")
    ax.set_xlabel("HD error (%)")
    ax.set_ylabel("area (cell units)")
    if title:
        ax.set_title(title, fontsize=10)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def gnuplot_script(csv_name: str, image_name: str, title: str = "") -> str:
    """Plain gnuplot commands that redraw the figure from the trajectory CSV."""
    return "\n".join([
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set terminal pngcairo size 800,560",
        f"set output '{image_name}'",
        f"set title '{title}'",
        "set xlabel 'HD error (%)'",
        "set ylabel 'area (cell units)'",
        "set grid",
        f"plot '{csv_name}' every ::1 using ($5*100):4 with linespoints pt 7 ps 0.6 title 'trajectory'",
        "",
    ])
