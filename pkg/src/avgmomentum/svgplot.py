"""Minimal static SVG line charts.

Output depends only on the data passed in, so files are reproducible byte for byte.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2")


@dataclass
class Line:
    label: str
    x: Sequence[float]
    y: Sequence[float]
    dashed: bool = False


@dataclass
class Panel:
    title: str
    lines: list[Line] = field(default_factory=list)
    hlines: list[tuple[str, float]] = field(default_factory=list)
    xlabel: str = "iteration"
    ylabel: str = ""
    logy: bool = False
    logx: bool = False


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    return f"{v:.3g}"


def _finite_points(line: Line, logx: bool, logy: bool):
    for x, y in zip(line.x, line.y):
        if x is None or y is None or not (math.isfinite(x) and math.isfinite(y)):
            continue
        if (logx and x <= 0) or (logy and y <= 0):
            continue
        yield (math.log10(x) if logx else x), (math.log10(y) if logy else y)


def _ticks(lo: float, hi: float, log: bool, count: int = 5) -> list[tuple[float, str]]:
    if log:
        start, stop = math.ceil(lo), math.floor(hi)
        step = max(1, int(math.ceil((stop - start + 1) / count)))
        return [(e, f"1e{e}") for e in range(start, stop + 1, step)]
    if hi == lo:
        return [(lo, _tick_label(lo))]
    return [(lo + (hi - lo) * k / (count - 1), _tick_label(lo + (hi - lo) * k / (count - 1)))
            for k in range(count)]


def _panel_svg(panel: Panel, ox: float, oy: float, w: float, h: float) -> list[str]:
    left, right, top, bottom = 60.0, 10.0, 28.0, 40.0
    pw, ph = w - left - right, h - top - bottom
    pts = [list(_finite_points(ln, panel.logx, panel.logy)) for ln in panel.lines]
    xs = [p[0] for ps in pts for p in ps]
    ys = [p[1] for ps in pts for p in ps]
    for _, v in panel.hlines:
        if not panel.logy or v > 0:
            ys.append(math.log10(v) if panel.logy else v)
    if not xs:
        xs = [0.0, 1.0]
    if not ys:
        ys = [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def sx(x):
        return ox + left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return oy + top + (1.0 - (y - y0) / (y1 - y0)) * ph

    out = [f'<text x="{_fmt(ox + w / 2)}" y="{_fmt(oy + 18)}" text-anchor="middle" '
           f'font-size="13">{escape(panel.title)}</text>',
           f'<rect x="{_fmt(ox + left)}" y="{_fmt(oy + top)}" width="{_fmt(pw)}" height="{_fmt(ph)}" '
           f'fill="none" stroke="#444"/>']
    for v, lab in _ticks(y0, y1, panel.logy):
        out.append(f'<text x="{_fmt(ox + left - 4)}" y="{_fmt(sy(v) + 4)}" text-anchor="end" '
                   f'font-size="10">{lab}</text>')
    for v, lab in _ticks(x0, x1, panel.logx):
        out.append(f'<text x="{_fmt(sx(v))}" y="{_fmt(oy + top + ph + 14)}" text-anchor="middle" '
                   f'font-size="10">{lab}</text>')
    out.append(f'<text x="{_fmt(ox + left + pw / 2)}" y="{_fmt(oy + h - 6)}" text-anchor="middle" '
               f'font-size="11">{escape(panel.xlabel)}</text>')
    if panel.ylabel:
        cx, cy = ox + 12, oy + top + ph / 2
        out.append(f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" text-anchor="middle" font-size="11" '
                   f'transform="rotate(-90 {_fmt(cx)} {_fmt(cy)})">{escape(panel.ylabel)}</text>')
    legend_y = oy + top + 12
    for i, (ln, ps) in enumerate(zip(panel.lines, pts)):
        color = PALETTE[i % len(PALETTE)]
        if ps:
            d = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in ps)
            dash = ' stroke-dasharray="5,3"' if ln.dashed else ""
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{d}"/>')
        out.append(f'<text x="{_fmt(ox + left + pw - 6)}" y="{_fmt(legend_y)}" text-anchor="end" '
                   f'font-size="10" fill="{color}">{escape(ln.label)}</text>')
        legend_y += 12
    for label, v in panel.hlines:
        if panel.logy and v <= 0:
            continue
        y = sy(math.log10(v) if panel.logy else v)
        out.append(f'<line x1="{_fmt(ox + left)}" y1="{_fmt(y)}" x2="{_fmt(ox + left + pw)}" '
                   f'y2="{_fmt(y)}" stroke="#000" stroke-dasharray="2,2"/>')
        out.append(f'<text x="{_fmt(ox + left + 4)}" y="{_fmt(y - 3)}" font-size="10">{escape(label)}</text>')
    return out


def render(panels: Sequence[Sequence[Panel]], title: Optional[str] = None,
           panel_width: float = 360.0, panel_height: float = 260.0) -> str:
    """Render a grid of panels (rows of columns) to an SVG document string."""
    rows = len(panels)
    cols = max(len(r) for r in panels)
    head = 30.0 if title else 0.0
    width, height = cols * panel_width, rows * panel_height + head
    body = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" height="{_fmt(height)}" '
            f'viewBox="0 0 {_fmt(width)} {_fmt(height)}" font-family="sans-serif">',
            f'<rect width="{_fmt(width)}" height="{_fmt(height)}" fill="#fff"/>']
    if title:
        body.append(f'<text x="{_fmt(width / 2)}" y="20" text-anchor="middle" font-size="15">'
                    f'{escape(title)}</text>')
    for i, row in enumerate(panels):
        for j, panel in enumerate(row):
            body.extend(_panel_svg(panel, j * panel_width, head + i * panel_height,
                                   panel_width, panel_height))
    body.append("</svg>")
    return "\n".join(body) + "\n"
