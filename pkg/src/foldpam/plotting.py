"""SVG line plots of curves, curve families and simulation traces.

Plots are written straight to files with the non-interactive Agg backend; no
figure window is ever opened.
"""

from __future__ import annotations

import io
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .curves import ForceStrainCurve  # noqa: E402
from .errors import DomainError  # noqa: E402
from .io import atomic_write_text  # noqa: E402
from .scenarios import SimTrace  # noqa: E402

__all__ = ["render_plot", "write_plot"]

_STYLES = ("-", "--", "-.", ":", (0, (5, 1, 1, 1, 1, 1)))
_MARKERS = (None, "o", "s", "^", "D", "v", "x")


def _curves_figure(curves: Sequence[ForceStrainCurve]):
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for i, c in enumerate(curves):
        ax.plot(
            c.strain,
            c.force,
            linestyle=_STYLES[i % len(_STYLES)],
            marker=_MARKERS[(i // len(_STYLES)) % len(_MARKERS)],
            markevery=max(len(c) // 8, 1),
            label=c.label or f"curve {i}",
        )
    ax.set_xlabel("strain")
    ax.set_ylabel("force (N)")
    if len(curves) > 1:
        ax.legend(fontsize="small")
    return fig


def _trace_figure(trace: SimTrace):
    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(5.0, 4.8))
    top.plot(trace.time, trace.command)
    top.set_ylabel("command")
    bottom.plot(trace.time, trace.error * 1e3)
    bottom.set_ylabel("error (mm)")
    bottom.set_xlabel("time (s)")
    fig.suptitle(trace.name)
    return fig


def render_plot(data) -> str:
    """SVG text for a curve, a sequence of curves, or a trace."""
    if isinstance(data, SimTrace):
        if len(data) == 0:
            raise DomainError("cannot plot an empty trace")
        fig = _trace_figure(data)
    else:
        curves = [data] if isinstance(data, ForceStrainCurve) else list(data)
        if not curves or any(len(c) == 0 for c in curves):
            raise DomainError("cannot plot empty curve data")
        fig = _curves_figure(curves)
    buf = io.StringIO()
    try:
        fig.tight_layout()
        # a fixed salt keeps element ids, and so the file, reproducible
        with matplotlib.rc_context({"svg.hashsalt": "foldpam"}):
            fig.savefig(buf, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    return buf.getvalue()


def write_plot(data, path) -> None:
    """Write :func:`render_plot` output to ``path``."""
    atomic_write_text(path, render_plot(data))
