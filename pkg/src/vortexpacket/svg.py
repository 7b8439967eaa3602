"""Tiny dependency-free SVG writer: polylines with axis ticks, and heatmaps.

Output is a pure function of the input arrays, so repeated runs produce
identical bytes.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

__all__ = ["line_plot", "heatmap", "save"]

_W, _H = 640, 480
_M = 60  # margin
_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _n(x):
    return format(float(x), ".6g")


def _nice_ticks(lo, hi, count=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** np.floor(np.log10(raw))
    step = min((s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return [t for t in np.arange(start, hi + 0.5 * step, step) if lo - 1e-12 <= t <= hi + 1e-12]


def _frame(parts, xlo, xhi, ylo, yhi, title, xlabel, ylabel):
    pw, ph = _W - 2 * _M, _H - 2 * _M

    def sx(x):
        return _M + (x - xlo) / (xhi - xlo) * pw

    def sy(y):
        return _H - _M - (y - ylo) / (yhi - ylo) * ph

    parts.append(f'<rect x="{_M}" y="{_M}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for t in _nice_ticks(xlo, xhi):
        x = sx(t)
        parts.append(f'<line x1="{_n(x)}" y1="{_H - _M}" x2="{_n(x)}" y2="{_H - _M + 5}" stroke="black"/>')
        parts.append(f'<text x="{_n(x)}" y="{_H - _M + 18}" font-size="11" text-anchor="middle">{_n(t)}</text>')
    for t in _nice_ticks(ylo, yhi):
        y = sy(t)
        parts.append(f'<line x1="{_M - 5}" y1="{_n(y)}" x2="{_M}" y2="{_n(y)}" stroke="black"/>')
        parts.append(f'<text x="{_M - 8}" y="{_n(y + 4)}" font-size="11" text-anchor="end">{_n(t)}</text>')
    parts.append(f'<text x="{_W / 2}" y="{_M / 2}" font-size="14" text-anchor="middle">{title}</text>')
    parts.append(f'<text x="{_W / 2}" y="{_H - 15}" font-size="12" text-anchor="middle">{xlabel}</text>')
    parts.append(f'<text x="15" y="{_H / 2}" font-size="12" text-anchor="middle" '
                 f'transform="rotate(-90 15 {_H / 2})">{ylabel}</text>')
    return sx, sy


def _open():
    return [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}">', '<rect width="100%" height="100%" fill="white"/>']


def line_plot(series, title="", xlabel="", ylabel="") -> str:
    """``series`` is a list of ``(label, x, y)`` triples."""
    xs = np.concatenate([np.asarray(s[1], float) for s in series])
    ys = np.concatenate([np.asarray(s[2], float) for s in series])
    xlo, xhi = float(xs.min()), float(xs.max())
    ylo, yhi = float(ys.min()), float(ys.max())
    pad = 0.05 * (yhi - ylo) if yhi > ylo else 1.0
    ylo, yhi = ylo - pad, yhi + pad
    if xhi <= xlo:
        xhi = xlo + 1.0
    parts = _open()
    sx, sy = _frame(parts, xlo, xhi, ylo, yhi, title, xlabel, ylabel)
    for k, (label, x, y) in enumerate(series):
        color = _COLORS[k % len(_COLORS)]
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        stride = max(1, len(x) // 2000)
        idx = list(range(0, len(x), stride))
        if idx[-1] != len(x) - 1:
            idx.append(len(x) - 1)
        pts = " ".join(f"{_n(sx(x[i]))},{_n(sy(y[i]))}" for i in idx)
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        parts.append(f'<text x="{_W - _M + 5}" y="{_M + 14 * (k + 1)}" font-size="11" fill="{color}">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def heatmap(values, extent, title="", arrows=None, cells=64) -> str:
    """Grayscale-to-blue map of a non-negative array on ``[-extent, extent]^2``.

    ``values[i, j]`` is at ``(x_i, y_j)``.  ``arrows`` is an optional list
    of ``(x, y, dx, dy)`` in data units.
    """
    v = np.asarray(values, float)
    n = v.shape[0]
    step = max(1, n // cells)
    v = v[::step, ::step]
    vmax = float(v.max()) or 1.0
    parts = _open()
    sx, sy = _frame(parts, -extent, extent, -extent, extent, title, "x", "y")
    m = v.shape[0]
    cw = (sx(extent) - sx(-extent)) / m
    for i in range(m):
        for j in range(m):
            level = int(round(255 * (1.0 - v[i, j] / vmax)))
            if level >= 255:
                continue
            x0 = sx(-extent + 2 * extent * i / m)
            y0 = sy(-extent + 2 * extent * (j + 1) / m)
            parts.append(f'<rect x="{_n(x0)}" y="{_n(y0)}" width="{_n(cw)}" height="{_n(cw)}" '
                         f'fill="rgb({level},{level},255)"/>')
    for x, y, dx, dy in arrows or ():
        parts.append(f'<line x1="{_n(sx(x))}" y1="{_n(sy(y))}" x2="{_n(sx(x + dx))}" y2="{_n(sy(y + dy))}" '
                     f'stroke="#d62728" stroke-width="1.2"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def save(text: str, path):
    Path(path).write_text(text, encoding="utf-8")
