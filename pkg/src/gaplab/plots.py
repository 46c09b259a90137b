"""Report figures rendered to files next to the delimited output.

Uses the Agg backend so figure rendering works headless; figures are written
atomically like every other artifact.
"""

from __future__ import annotations

import io as _io

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .io import atomic_write_bytes

_FIGSIZE = (6.4, 4.0)


def _save(fig, path: str) -> None:
    buf = _io.BytesIO()
    fig.savefig(buf, format="png", dpi=120)
    plt.close(fig)
    atomic_write_bytes(path, buf.getvalue())


def render_curves(path: str, x, curves: dict[str, object], xlabel: str,
                  ylabel: str, title: str) -> None:
    """Line plot of one or more named curves over a shared x grid."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for label, y in curves.items():
        ax.plot(x, y, label=label, linewidth=1.2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    fig.tight_layout()
    _save(fig, path)


def render_stage_bars(path: str, stages, left_fractions, title: str) -> None:
    """Per-stage left-half fractions against the 1/2 reference line."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.bar([str(k) for k in stages], left_fractions, color="#4878b0")
    ax.axhline(0.5, color="black", linestyle="--", linewidth=1.0,
               label="uniform reference")
    ax.set_xlabel("stage")
    ax.set_ylabel("fraction of points below the stage midpoint")
    ax.set_title(title)
    ax.legend(loc="lower right")
    fig.tight_layout()
    _save(fig, path)
