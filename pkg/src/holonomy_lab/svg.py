"""Static SVG renderings: rectangles and leaf segments on the unit square,
plus a bar-chart renderer for convergence tables.

Geometry is drawn modulo 1 on the fundamental domain; any segment that
crosses an edge is split at the integer crossings and each piece is shifted
back into the square.  Output is deterministic except for the tool-version
comment on the first line.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import UnsupportedDimension
from .reporting import TOOL_VERSION

_SIZE = 720.0
_MARGIN = 40.0
_SPAN = _SIZE - 2 * _MARGIN
_GOLDEN_ANGLE = 137.50776405003785


def _px(x: float) -> float:
    return _MARGIN + x * _SPAN


def _py(y: float) -> float:
    return _MARGIN + (1.0 - y) * _SPAN


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def band_color(index: int) -> str:
    hue = (index * _GOLDEN_ANGLE) % 360.0
    return f"hsl({hue:.2f},65%,45%)"


def wrap_segments(p, q) -> list[tuple[tuple[float, float], tuple[float, float]]]:
    """Split the segment p->q (plane coordinates) at integer crossings and
    shift every piece into [0,1]^2."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    cuts = {0.0, 1.0}
    for axis in range(2):
        a, b = p[axis], q[axis]
        if a == b:
            continue
        lo, hi = sorted((a, b))
        k = math.ceil(lo)
        while k <= math.floor(hi):
            if lo < k < hi:
                cuts.add((k - a) / (b - a))
            k += 1
    ts = sorted(cuts)
    pieces = []
    for t0, t1 in zip(ts, ts[1:]):
        if t1 - t0 <= 1e-12:
            continue
        mid = p + 0.5 * (t0 + t1) * (q - p)
        shift = np.floor(mid)
        a = p + t0 * (q - p) - shift
        b = p + t1 * (q - p) - shift
        pieces.append(((float(a[0]), float(a[1])), (float(b[0]), float(b[1]))))
    return pieces


def _polyline_paths(lifts, stroke: str, width: float, cls: str) -> list[str]:
    out = []
    for a, b in zip(lifts[:-1], lifts[1:]):
        for (x0, y0), (x1, y1) in wrap_segments(a, b):
            out.append(
                f'<line class="{cls}" x1="{_fmt(_px(x0))}" y1="{_fmt(_py(y0))}" '
                f'x2="{_fmt(_px(x1))}" y2="{_fmt(_py(y1))}" '
                f'stroke="{stroke}" stroke-width="{width}"/>')
    return out


def _document(title: str, body: list[str]) -> str:
    head = [
        f"<!-- holonomy-lab {TOOL_VERSION} -->",
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SIZE:.0f}" '
        f'height="{_SIZE:.0f}" viewBox="0 0 {_SIZE:.0f} {_SIZE:.0f}">',
        f"<title>{title}</title>",
        f'<rect x="0" y="0" width="{_SIZE:.0f}" height="{_SIZE:.0f}" fill="white"/>',
        f'<rect x="{_fmt(_MARGIN)}" y="{_fmt(_MARGIN)}" width="{_fmt(_SPAN)}" '
        f'height="{_fmt(_SPAN)}" fill="none" stroke="#222" stroke-width="1.5"/>',
    ]
    return "\n".join(head + body + ["</svg>"]) + "\n"


def render_rectangle_svg(rect, title: str = "s/u-rectangle") -> str:
    """Rows colored per construction stage, columns in one stable stroke."""
    if rect.splitting.dimension != 2:
        raise UnsupportedDimension("geometric plots need a 2-D torus system")
    lifts = rect.lifts
    n_rows = lifts.shape[1]
    n_cols = lifts.shape[0]
    bands = max(1, len(rect.provenance))
    body = []
    for i in range(n_cols):
        body += _polyline_paths(lifts[i, :, :], "#7f8c99", 0.6, "stable")
    for j in range(n_rows):
        if n_rows > 1:
            band = min(j * bands // (n_rows - 1), bands - 1)
        else:
            band = 0
        body += _polyline_paths(lifts[:, j, :], band_color(band), 0.9, "unstable")
    for j in (0, n_rows - 1):
        body += _polyline_paths(lifts[:, j, :], "#111111", 2.0, "boundary")
    for i in (0, n_cols - 1):
        body += _polyline_paths(lifts[i, :, :], "#111111", 2.0, "boundary")
    return _document(title, body)


def render_segments_svg(segments, points=None, title: str = "leaf segments") -> str:
    """segments: iterable of (start, end, kind) with kind 'stable'/'unstable';
    points: iterable of (position, label)."""
    body = []
    for start, end, kind in segments:
        if len(np.asarray(start)) != 2:
            raise UnsupportedDimension("geometric plots need a 2-D torus system")
        color = "#2462c0" if kind == "stable" else "#c03324"
        body += _polyline_paths(np.array([start, end], dtype=float), color, 1.6, kind)
    for pos, label in points or []:
        x, y = (float(v % 1.0) for v in pos)
        body.append(f'<circle cx="{_fmt(_px(x))}" cy="{_fmt(_py(y))}" r="4" fill="#111"/>')
        body.append(f'<text x="{_fmt(_px(x) + 7)}" y="{_fmt(_py(y) - 7)}" '
                    f'font-family="monospace" font-size="14">{label}</text>')
    return _document(title, body)


def render_table_svg(title: str, headers, rows) -> str:
    """Log-scale bar chart for positive-valued convergence tables; renders
    for any system dimension."""
    rows = [list(r) for r in rows]
    body = [f'<text x="{_fmt(_MARGIN)}" y="{_fmt(_MARGIN - 12)}" '
            f'font-family="monospace" font-size="16">{title}</text>']
    if rows:
        series = len(rows[0]) - 1
        vals = [float(v) for r in rows for v in r[1:] if float(v) > 0]
        lo = min(vals) if vals else 1e-1
        hi = max(vals) if vals else 1.0
        lo_l, hi_l = math.log10(lo), math.log10(max(hi, lo * 10))
        slot = _SPAN / len(rows)
        bar = slot / (series + 1)
        for r_idx, row in enumerate(rows):
            for s_idx, v in enumerate(row[1:]):
                v = float(v)
                frac = 0.0 if v <= 0 else (math.log10(v) - lo_l) / (hi_l - lo_l)
                h = max(frac, 0.0) * (_SPAN - 20)
                x = _MARGIN + r_idx * slot + (s_idx + 0.5) * bar
                y = _MARGIN + _SPAN - h
                body.append(
                    f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(bar * 0.9)}" '
                    f'height="{_fmt(h)}" fill="{band_color(s_idx)}"/>')
        for s_idx, name in enumerate(list(headers)[1:]):
            body.append(f'<text x="{_fmt(_MARGIN + 10)}" y="{_fmt(_MARGIN + 18 + 16 * s_idx)}" '
                        f'font-family="monospace" font-size="13" '
                        f'fill="{band_color(s_idx)}">{name}</text>')
    return _document(title, body)
