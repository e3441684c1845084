"""Self-contained SVG line charts (inline styles, no external assets)."""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")
WIDTH, HEIGHT = 720, 420
LEFT, RIGHT, TOP, BOTTOM = 80, 150, 40, 60


def _ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / (count - 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    first = math.ceil(lo / step) * step
    out = []
    v = first
    while v <= hi + 1e-9 * step:
        out.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return out


def _thin(x: np.ndarray, y: np.ndarray, limit: int = 2000) -> tuple[np.ndarray, np.ndarray]:
    if x.size <= limit:
        return x, y
    stride = int(math.ceil(x.size / limit))
    idx = np.unique(np.r_[np.arange(0, x.size, stride), x.size - 1])
    return x[idx], y[idx]


def line_chart(
    series: dict[str, tuple[np.ndarray, np.ndarray]],
    title: str = "",
    xlabel: str = "t",
    ylabel: str = "",
    log: bool = False,
    floor: float = 1e-16,
) -> str:
    """Render named ``(x, y)`` series as an SVG document string.

    With ``log=True`` the y axis is log10 and values below ``floor`` are
    drawn at ``floor``.
    """
    if not series:
        raise ValueError("no series to plot")
    prepared = {}
    for name, (x, y) in series.items():
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        keep = np.isfinite(x) & np.isfinite(y)
        x, y = x[keep], y[keep]
        if log:
            y = np.log10(np.maximum(y, floor))
        prepared[name] = _thin(x, y)
    xs = np.concatenate([p[0] for p in prepared.values()])
    ys = np.concatenate([p[1] for p in prepared.values()])
    if xs.size == 0:
        raise ValueError("series contain no finite points")
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def sx(v):
        return LEFT + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return TOP + (y1 - v) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333" stroke-width="1"/>',
    ]
    for v in _ticks(x0, x1):
        px = sx(v)
        out.append(f'<line x1="{px:.2f}" y1="{TOP + ph}" x2="{px:.2f}" y2="{TOP + ph + 5}" stroke="#333"/>')
        out.append(f'<text x="{px:.2f}" y="{TOP + ph + 18}" text-anchor="middle">{v:g}</text>')
    for v in _ticks(y0, y1):
        py = sy(v)
        label = f"1e{v:g}" if log else f"{v:g}"
        out.append(f'<line x1="{LEFT - 5}" y1="{py:.2f}" x2="{LEFT}" y2="{py:.2f}" stroke="#333"/>')
        out.append(f'<line x1="{LEFT}" y1="{py:.2f}" x2="{LEFT + pw}" y2="{py:.2f}" stroke="#ddd"/>')
        out.append(f'<text x="{LEFT - 8}" y="{py + 4:.2f}" text-anchor="end">{escape(label)}</text>')
    for i, (name, (x, y)) in enumerate(prepared.items()):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = TOP + 16 * i + 10
        out.append(f'<line x1="{LEFT + pw + 10}" y1="{ly}" x2="{LEFT + pw + 30}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{LEFT + pw + 35}" y="{ly + 4}">{escape(name)}</text>')
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="{TOP - 14}" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle">{escape(xlabel)}</text>')
    ylab = f"log10 {ylabel}" if log and ylabel else ylabel
    if ylab:
        out.append(
            f'<text x="18" y="{TOP + ph / 2:.1f}" text-anchor="middle" '
            f'transform="rotate(-90 18 {TOP + ph / 2:.1f})">{escape(ylab)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_chart(path: str | Path, columns: list[str], table: np.ndarray, selected: list[str], **kwargs) -> None:
    """Plot ``selected`` CSV-style columns against ``t``."""
    missing = [c for c in selected if c not in columns]
    if missing:
        raise KeyError(f"unknown columns {missing}; available: {columns}")
    t = table[:, columns.index("t")]
    series = {c: (t, table[:, columns.index(c)]) for c in selected}
    kwargs.setdefault("ylabel", ", ".join(selected))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(line_chart(series, **kwargs), encoding="utf-8")
