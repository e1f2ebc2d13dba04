"""Minimal self-contained SVG line and scatter charts.

Charts carry the CSV data visually; the CSV stays the ground truth, so
this emitter keeps to polylines, circles, axis frames, and text labels.
"""

from __future__ import annotations

import math
from html import escape

__all__ = ["line_chart", "scatter_chart"]

_WIDTH, _HEIGHT = 640, 420
_MARGIN = 60
_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _axis_map(values, lo_px, hi_px, log=False):
    vals = [math.log10(v) for v in values] if log else list(values)
    lo, hi = min(vals), max(vals)
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    span = hi - lo

    def to_px(v):
        v = math.log10(v) if log else v
        return lo_px + (v - lo) / span * (hi_px - lo_px)

    return to_px, lo, hi


def _frame(title, xlabel, ylabel, xlo, xhi, ylo, yhi, logx, logy):
    def fmt(v, log):
        return f"{10**v:.3g}" if log else f"{v:.3g}"

    x0, x1 = _MARGIN, _WIDTH - _MARGIN
    y0, y1 = _HEIGHT - _MARGIN, _MARGIN
    return [
        f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" fill="none" stroke="#333"/>',
        f'<text x="{_WIDTH / 2}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<text x="{_WIDTH / 2}" y="{_HEIGHT - 14}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
        f'<text x="16" y="{_HEIGHT / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {_HEIGHT / 2})">{escape(ylabel)}</text>',
        f'<text x="{x0}" y="{y0 + 16}" font-size="11">{fmt(xlo, logx)}</text>',
        f'<text x="{x1}" y="{y0 + 16}" text-anchor="end" font-size="11">{fmt(xhi, logx)}</text>',
        f'<text x="{x0 - 6}" y="{y0}" text-anchor="end" font-size="11">{fmt(ylo, logy)}</text>',
        f'<text x="{x0 - 6}" y="{y1 + 4}" text-anchor="end" font-size="11">{fmt(yhi, logy)}</text>',
    ]


def _write(path, body):
    content = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}" font-family="sans-serif">\n'
        + "\n".join(body)
        + "\n</svg>\n"
    )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(content)


def line_chart(path, series: dict, title="", xlabel="", ylabel="", logx=False, logy=False):
    """series maps a legend name to a list of (x, y) points."""
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    if not xs:
        raise ValueError("no points to plot")
    to_x, xlo, xhi = _axis_map(xs, _MARGIN, _WIDTH - _MARGIN, logx)
    to_y, ylo, yhi = _axis_map(ys, _HEIGHT - _MARGIN, _MARGIN, logy)
    body = _frame(title, xlabel, ylabel, xlo, xhi, ylo, yhi, logx, logy)
    for idx, (name, pts) in enumerate(series.items()):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = sorted(pts)
        coords = " ".join(f"{to_x(x):.2f},{to_y(y):.2f}" for x, y in pts)
        body.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for x, y in pts:
            body.append(f'<circle cx="{to_x(x):.2f}" cy="{to_y(y):.2f}" r="2.5" fill="{color}"/>')
        body.append(
            f'<text x="{_WIDTH - _MARGIN + 4}" y="{_MARGIN + 14 * idx}" font-size="11" '
            f'fill="{color}">{escape(name)}</text>'
        )
    _write(path, body)


def scatter_chart(path, points, title="", xlabel="", ylabel=""):
    """points: iterable of (x, y, highlighted) triples."""
    points = list(points)
    if not points:
        raise ValueError("no points to plot")
    to_x, xlo, xhi = _axis_map([p[0] for p in points], _MARGIN, _WIDTH - _MARGIN)
    to_y, ylo, yhi = _axis_map([p[1] for p in points], _HEIGHT - _MARGIN, _MARGIN)
    body = _frame(title, xlabel, ylabel, xlo, xhi, ylo, yhi, False, False)
    for x, y, highlighted in points:
        color = "#d62728" if highlighted else "#1f77b4"
        r = 3.5 if highlighted else 2.0
        body.append(f'<circle cx="{to_x(x):.2f}" cy="{to_y(y):.2f}" r="{r}" fill="{color}"/>')
    _write(path, body)
