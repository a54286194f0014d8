"""Figure rendering for the report path.

Every trace the CLI writes as CSV also gets a self-contained SVG figure.
Output is deterministic: the SVG date metadata is suppressed and the id
hash salt pinned, so repeated runs differ at most in nothing.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_SAVE_KWARGS = {"format": "svg", "metadata": {"Date": None}}

plt.rcParams["svg.hashsalt"] = "rabiflux"


def save_line_svg(path, x, y, xlabel: str, ylabel: str,
                  title: str | None = None) -> Path:
    """Single labeled trace rendered to an SVG file."""
    return save_traces_svg(path, [(x, y, None)], xlabel, ylabel, title)


def save_traces_svg(path, traces, xlabel: str, ylabel: str,
                    title: str | None = None) -> Path:
    """Several (x, y, label) traces on shared axes rendered to SVG."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    labelled = False
    for x, y, label in traces:
        ax.plot(x, y, linewidth=1.0, label=label)
        labelled = labelled or label is not None
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if labelled:
        ax.legend(loc="best", fontsize=9)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, **_SAVE_KWARGS)
    plt.close(fig)
    return out


def save_marked_spectrum_svg(path, field, amplitude, marks_x, marks_y,
                             xlabel: str, ylabel: str,
                             title: str | None = None) -> Path:
    """Spectrum trace with detected peak markers."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.plot(field, amplitude, linewidth=0.8)
    ax.plot(marks_x, marks_y, "x", markersize=5, color="crimson")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, **_SAVE_KWARGS)
    plt.close(fig)
    return out
