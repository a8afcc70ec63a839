"""Figures for rasters, stairs, escape series and tent scans."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .phase import Space  # noqa: E402

STYLE = {
    "figure.dpi": 120,
    "savefig.dpi": 150,
    "font.size": 9,
    "axes.linewidth": 0.8,
    "image.interpolation": "nearest",
}


def _square_axes(ax, r):
    lo_a, hi_a = r.a_edges[0], r.a_edges[-1]
    lo_b, hi_b = r.b_edges[0], r.b_edges[-1]
    ax.set_xlim(lo_a, hi_a)
    ax.set_ylim(lo_b, hi_b)
    ax.set_aspect("equal")
    ax.set_xlabel("a")
    ax.set_ylabel("b")


def stair_segments(st, space: Space):
    """Line segments of a stair: each step's vertical segment down to the
    diagonal and horizontal segment across to it (terminal ones included)."""
    segs = []
    for s in st.steps:
        a, b = (float(v) for v in s.corner)
        if s.wraps:
            b += 1.0
        segs.append(((a, b), (a, a)))       # vertical from the corner to the diagonal
        segs.append(((a, b), (b, b)))       # horizontal to the diagonal
    return segs


def plot_raster(r, stairs=(), path=None, title=None, stairs_only=False):
    """Raster image with b increasing upward; stairs drawn on top."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 5))
        if not stairs_only:
            img = r.to_image()
            ax.imshow(img, cmap="gray", vmin=0, vmax=255, origin="upper",
                      extent=(r.a_edges[0], r.a_edges[-1], r.b_edges[0], r.b_edges[-1]))
        lo, hi = r.a_edges[0], r.a_edges[-1]
        ax.plot([lo, hi], [lo, hi], color="0.6", lw=0.6)
        colors = plt.cm.viridis(np.linspace(0.1, 0.9, max(1, len(stairs))))
        for st, col in zip(stairs, colors):
            for (x0, y0), (x1, y1) in stair_segments(st, r.space):
                ax.plot([x0, x1], [y0, y1], color=col, lw=0.9)
            xs = [float(s.corner[0]) for s in st.steps]
            ys = [float(s.corner[1]) + (1.0 if s.wraps else 0.0) for s in st.steps]
            ax.plot(xs, ys, "o", ms=2.5, color=col)
        _square_axes(ax, r)
        if r.space is Space.CIRCLE and r.full:
            ax.set_ylim(0, 1)
        ax.set_title(title or f"{r.label}, N={r.horizon}")
        fig.tight_layout()
        if path:
            fig.savefig(path)
        plt.close(fig)
    return path


def plot_escape(series, path=None):
    ns = np.array(series.horizons, dtype=float)
    ms = np.array([float(m) for m in series.measures])
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3.2))
        ok = ms > 0
        ax.plot(ns[ok], -np.log(ms[ok]), "o-", ms=3, lw=0.8)
        ax.set_xlabel("N")
        ax.set_ylabel("-log measure of survivors")
        ax.set_title(f"fitted rate {series.fitted_rate:.6g}")
        fig.tight_layout()
        if path:
            fig.savefig(path)
        plt.close(fig)
    return path


def plot_scan(report, path=None):
    d = np.array(report.deltas, dtype=float)
    h = np.array(report.distances, dtype=float)
    ok = d > 0
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3.2))
        ax.semilogx(d[ok], h[ok], "o-", ms=3, lw=0.8)
        ax.set_xlabel("delta")
        ax.set_ylabel("Hausdorff distance")
        ax.set_title(f"s0={float(report.s0):.6g} ({report.verdict})")
        ax.set_ylim(bottom=0)
        fig.tight_layout()
        if path:
            fig.savefig(path)
        plt.close(fig)
    return path
