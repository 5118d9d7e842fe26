"""Minimal, byte-deterministic SVG line and scatter plots."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

# thin solid, dashed, dotted, dash-dot, thick solid
LINE_STYLES = [(1.0, None), (1.5, "6,4"), (1.5, "1.5,3"), (1.5, "8,3,2,3"), (3.0, None)]

PANEL_W, PANEL_H = 360, 300
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 52, 16, 30, 44


def _f(x):
    return f"{x:.2f}"


def _nice_ticks(hi, count=5):
    if hi <= 0:
        return [0.0]
    raw = hi / count
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    return [i * step for i in range(int(hi / step + 1e-9) + 1)]


def _tick_label(v):
    return f"{v:g}" if abs(v) < 1e4 else f"{v:.3g}"


class _Panel:
    def __init__(self, out, x0, y0, xmax, ymax, title, xlabel, ylabel):
        self.out, self.x0, self.y0 = out, x0, y0
        self.w = PANEL_W - MARGIN_L - MARGIN_R
        self.h = PANEL_H - MARGIN_T - MARGIN_B
        self.xmax = xmax if xmax > 0 else 1.0
        self.ymax = ymax if ymax > 0 else 1.0
        left, top = x0 + MARGIN_L, y0 + MARGIN_T
        out.append(f'<rect x="{_f(left)}" y="{_f(top)}" width="{_f(self.w)}" height="{_f(self.h)}" '
                   'fill="none" stroke="black" stroke-width="1"/>')
        out.append(f'<text x="{_f(left + self.w / 2)}" y="{_f(y0 + 18)}" text-anchor="middle" '
                   f'font-size="13">{escape(title)}</text>')
        out.append(f'<text x="{_f(left + self.w / 2)}" y="{_f(top + self.h + 36)}" '
                   f'text-anchor="middle" font-size="12">{escape(xlabel)}</text>')
        cy = top + self.h / 2
        out.append(f'<text x="{_f(x0 + 14)}" y="{_f(cy)}" text-anchor="middle" font-size="12" '
                   f'transform="rotate(-90 {_f(x0 + 14)} {_f(cy)})">{escape(ylabel)}</text>')
        for t in _nice_ticks(self.xmax):
            x = self.sx(t)
            out.append(f'<line x1="{_f(x)}" y1="{_f(top + self.h)}" x2="{_f(x)}" '
                       f'y2="{_f(top + self.h + 4)}" stroke="black"/>')
            out.append(f'<text x="{_f(x)}" y="{_f(top + self.h + 16)}" text-anchor="middle" '
                       f'font-size="10">{_tick_label(t)}</text>')
        for t in _nice_ticks(self.ymax):
            y = self.sy(t)
            out.append(f'<line x1="{_f(left - 4)}" y1="{_f(y)}" x2="{_f(left)}" y2="{_f(y)}" '
                       'stroke="black"/>')
            out.append(f'<text x="{_f(left - 6)}" y="{_f(y + 3)}" text-anchor="end" '
                       f'font-size="10">{_tick_label(t)}</text>')

    def sx(self, v):
        return self.x0 + MARGIN_L + self.w * min(max(v / self.xmax, 0.0), 1.0)

    def sy(self, v):
        return self.y0 + MARGIN_T + self.h * (1.0 - min(max(v / self.ymax, 0.0), 1.0))

    def polyline(self, xs, ys, width=1.0, dash=None, color="black"):
        pts = " ".join(f"{_f(self.sx(x))},{_f(self.sy(y))}" for x, y in zip(xs, ys))
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                        f'stroke-width="{width}"{dash_attr}/>')

    def points(self, xs, ys, r=2.0):
        for x, y in zip(xs, ys):
            self.out.append(f'<circle cx="{_f(self.sx(x))}" cy="{_f(self.sy(y))}" r="{r}" '
                            'fill="none" stroke="black" stroke-width="0.8"/>')

    def legend(self, entries):
        left, top = self.x0 + MARGIN_L + self.w - 96, self.y0 + MARGIN_T + self.h - 14 * len(entries) - 8
        for i, (label, width, dash) in enumerate(entries):
            y = top + 14 * i + 7
            dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
            self.out.append(f'<line x1="{_f(left)}" y1="{_f(y)}" x2="{_f(left + 28)}" y2="{_f(y)}" '
                            f'stroke="black" stroke-width="{width}"{dash_attr}/>')
            self.out.append(f'<text x="{_f(left + 34)}" y="{_f(y + 4)}" font-size="10">'
                            f'{escape(label)}</text>')


def _document(width, height, body):
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" font-family="sans-serif">')
    return "\n".join([head, f'<rect width="{width}" height="{height}" fill="white"/>',
                      *body, "</svg>", ""])


def screening_svg(curves, n_values, sigma_values):
    """One panel per sigma; one polyline per n. ``curves[(n, sigma)]`` holds
    probabilities at model sizes 0, 1, ..., S."""
    body = []
    smax = max((len(v) - 1 for v in curves.values()), default=1)
    for col, sigma in enumerate(sigma_values):
        panel = _Panel(body, col * PANEL_W, 0, smax, 1.0, f"sigma = {sigma:g}",
                       "sparse model size", "sure screening probability")
        legend = []
        for i, n in enumerate(n_values):
            width, dash = LINE_STYLES[i % len(LINE_STYLES)]
            probs = curves[(n, sigma)]
            panel.polyline(range(len(probs)), probs, width, dash)
            legend.append((f"n = {n}", width, dash))
        panel.legend(legend)
    return _document(PANEL_W * max(len(sigma_values), 1), PANEL_H, body)


def qq_svg(sorted_stats, q_exp1, q_chisq1, c0, c):
    """Two stacked panels: sample quantiles versus Exp(1) (top) and chi2_1 (bottom)."""
    body = []
    for row, (q, name) in enumerate(((q_exp1, "Exp(1)"), (q_chisq1, "chi-squared, 1 df"))):
        hi = max([0.0, *q, *sorted_stats]) * 1.05 or 1.0
        panel = _Panel(body, 0, row * PANEL_H, hi, hi, f"c0 = {c0:g}, c = {c:g}",
                       f"{name} quantiles", "sample quantiles of T")
        panel.polyline([0.0, hi], [0.0, hi], 1.0, "4,3", color="gray")
        panel.points(q, sorted_stats)
    return _document(PANEL_W, 2 * PANEL_H, body)
