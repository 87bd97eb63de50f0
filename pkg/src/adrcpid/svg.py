"""Minimal self-contained SVG line charts with linear or log axes.

Plots are conveniences next to the CSV data, so the emitter stays small:
fixed layout, a deterministic color cycle, no external dependencies.  Output
is a pure function of the input series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)

WIDTH = 920
HEIGHT = 560
MARGIN_LEFT = 72
MARGIN_RIGHT = 180  # legend lives here
MARGIN_TOP = 44
MARGIN_BOTTOM = 56


@dataclass(frozen=True)
class Series:
    name: str
    x: np.ndarray
    y: np.ndarray


def _linear_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / target
    mag = 10.0 ** math.floor(math.log10(raw))
    step = 10 * mag
    for mult in (1.0, 2.0, 5.0, 10.0):
        if span / (mult * mag) <= target + 0.5:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-9 * step else t)
        t += step
    return ticks


def _log_ticks(lo: float, hi: float) -> list[float]:
    d0 = math.ceil(math.log10(lo) - 1e-9)
    d1 = math.floor(math.log10(hi) + 1e-9)
    decades = list(range(d0, d1 + 1))
    stride = 1 + len(decades) // 9
    return [10.0**d for d in decades[::stride]]


def _fmt_tick(v: float) -> str:
    return f"{v:g}"


def _transform(v: np.ndarray, log: bool) -> np.ndarray:
    return np.log10(v) if log else v


def line_chart(
    series: list[Series],
    *,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    xlog: bool = False,
    ylog: bool = False,
) -> str:
    """Render named (x, y) series as one SVG line chart."""
    finite_x: list[np.ndarray] = []
    finite_y: list[np.ndarray] = []
    cleaned: list[tuple[str, np.ndarray, np.ndarray]] = []
    for s in series:
        x = np.asarray(s.x, dtype=float)
        y = np.asarray(s.y, dtype=float)
        ok = np.isfinite(x) & np.isfinite(y)
        if xlog:
            ok &= x > 0
        if ylog:
            ok &= y > 0
        cleaned.append((s.name, x, np.where(ok, y, np.nan)))
        if ok.any():
            finite_x.append(x[ok])
            finite_y.append(y[ok])
    if not finite_x:
        raise ValueError("no finite data to plot")

    x_all = np.concatenate(finite_x)
    y_all = np.concatenate(finite_y)
    tx_lo, tx_hi = float(_transform(x_all, xlog).min()), float(_transform(x_all, xlog).max())
    ty_lo, ty_hi = float(_transform(y_all, ylog).min()), float(_transform(y_all, ylog).max())
    if tx_hi <= tx_lo:
        tx_lo, tx_hi = tx_lo - 0.5, tx_hi + 0.5
    if ty_hi <= ty_lo:
        ty_lo, ty_hi = ty_lo - 0.5, ty_hi + 0.5
    pad_y = 0.05 * (ty_hi - ty_lo)
    ty_lo -= pad_y
    ty_hi += pad_y

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(tv: float) -> float:
        return MARGIN_LEFT + (tv - tx_lo) / (tx_hi - tx_lo) * plot_w

    def py(tv: float) -> float:
        return MARGIN_TOP + (ty_hi - tv) / (ty_hi - ty_lo) * plot_h

    out: list[str] = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">'
    )
    out.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    if title:
        out.append(
            f'<text x="{MARGIN_LEFT + plot_w / 2:.1f}" y="24" text-anchor="middle" '
            f'font-size="15">{escape(title)}</text>'
        )

    x_ticks = _log_ticks(x_all.min(), x_all.max()) if xlog else _linear_ticks(tx_lo, tx_hi)
    y_ticks = _log_ticks(y_all.min(), y_all.max()) if ylog else _linear_ticks(ty_lo, ty_hi)
    for tick in x_ticks:
        tv = math.log10(tick) if xlog else tick
        if not tx_lo - 1e-9 <= tv <= tx_hi + 1e-9:
            continue
        x = px(tv)
        out.append(
            f'<line x1="{x:.2f}" y1="{MARGIN_TOP}" x2="{x:.2f}" '
            f'y2="{MARGIN_TOP + plot_h}" stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{x:.2f}" y="{MARGIN_TOP + plot_h + 18}" '
            f'text-anchor="middle">{escape(_fmt_tick(tick))}</text>'
        )
    for tick in y_ticks:
        tv = math.log10(tick) if ylog else tick
        if not ty_lo - 1e-9 <= tv <= ty_hi + 1e-9:
            continue
        y = py(tv)
        out.append(
            f'<line x1="{MARGIN_LEFT}" y1="{y:.2f}" x2="{MARGIN_LEFT + plot_w}" '
            f'y2="{y:.2f}" stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{MARGIN_LEFT - 6}" y="{y + 4:.2f}" '
            f'text-anchor="end">{escape(_fmt_tick(tick))}</text>'
        )
    out.append(
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333333"/>'
    )
    if xlabel:
        out.append(
            f'<text x="{MARGIN_LEFT + plot_w / 2:.1f}" y="{HEIGHT - 14}" '
            f'text-anchor="middle">{escape(xlabel)}</text>'
        )
    if ylabel:
        yc = MARGIN_TOP + plot_h / 2
        out.append(
            f'<text x="18" y="{yc:.1f}" text-anchor="middle" '
            f'transform="rotate(-90 18 {yc:.1f})">{escape(ylabel)}</text>'
        )

    for idx, (name, x, y) in enumerate(cleaned):
        color = PALETTE[idx % len(PALETTE)]
        tx = _transform(np.where(x > 0, x, np.nan), xlog) if xlog else x
        ty = _transform(np.where(y > 0, y, np.nan), ylog) if ylog else y
        points: list[str] = []
        segments: list[list[str]] = []
        for xv, yv in zip(tx, ty):
            if np.isfinite(xv) and np.isfinite(yv):
                points.append(f"{px(float(xv)):.2f},{py(float(yv)):.2f}")
            elif points:
                segments.append(points)
                points = []
        if points:
            segments.append(points)
        for seg in segments:
            if len(seg) < 2:
                continue
            out.append(
                f'<polyline fill="none" stroke="{color}" stroke-width="1.4" '
                f'points="{" ".join(seg)}"/>'
            )
        ly = MARGIN_TOP + 14 + 16 * idx
        lx = MARGIN_LEFT + plot_w + 12
        out.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        out.append(f'<text x="{lx + 28}" y="{ly}">{escape(name)}</text>')

    out.append("</svg>")
    return "\n".join(out) + "\n"
