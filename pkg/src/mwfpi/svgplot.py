"""Small static SVG renderer for line plots and heatmaps.

No plotting dependencies: scenario outputs are CSV first, these SVGs are a
convenience rendering of the same data.
"""

from __future__ import annotations

import numpy as np

_W, _H = 640, 440
_ML, _MR, _MT, _MB = 70, 20, 36, 52
_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]


def _esc(s):
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _ticks(lo, hi, n=6):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** np.floor(np.log10(raw))
    step = min(s for s in (1 * mag, 2 * mag, 5 * mag, 10 * mag) if s >= raw)
    start = np.ceil(lo / step) * step
    return np.arange(start, hi + 0.5 * step, step)


def _axes(xs_lo, xs_hi, ys_lo, ys_hi, title, xlabel, ylabel):
    pw, ph = _W - _ML - _MR, _H - _MT - _MB

    def px(x):
        return _ML + (x - xs_lo) / (xs_hi - xs_lo) * pw

    def py(y):
        return _MT + ph - (y - ys_lo) / (ys_hi - ys_lo) * ph

    parts = [
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>'
    ]
    for t in _ticks(xs_lo, xs_hi):
        if xs_lo <= t <= xs_hi:
            parts.append(
                f'<line x1="{px(t):.1f}" y1="{_MT+ph}" x2="{px(t):.1f}" y2="{_MT+ph+4}" stroke="#333"/>'
                f'<text x="{px(t):.1f}" y="{_MT+ph+18}" font-size="11" text-anchor="middle">{t:.4g}</text>'
            )
    for t in _ticks(ys_lo, ys_hi):
        if ys_lo <= t <= ys_hi:
            parts.append(
                f'<line x1="{_ML-4}" y1="{py(t):.1f}" x2="{_ML}" y2="{py(t):.1f}" stroke="#333"/>'
                f'<text x="{_ML-8}" y="{py(t)+4:.1f}" font-size="11" text-anchor="end">{t:.4g}</text>'
            )
    parts.append(
        f'<text x="{_ML+pw/2}" y="{_H-12}" font-size="13" text-anchor="middle">{_esc(xlabel)}</text>'
    )
    parts.append(
        f'<text x="16" y="{_MT+ph/2}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {_MT+ph/2})">{_esc(ylabel)}</text>'
    )
    parts.append(
        f'<text x="{_ML+pw/2}" y="20" font-size="14" text-anchor="middle">{_esc(title)}</text>'
    )
    return parts, px, py


def line_plot(path, x, ys, labels=None, title="", xlabel="", ylabel="", logy=False):
    """Write a multi-series line plot; ys is a list of arrays over x."""
    x = np.asarray(x, dtype=float)
    series = [np.asarray(y, dtype=float) for y in ys]
    if logy:
        series = [np.log10(np.clip(y, 1e-300, None)) for y in series]
        ylabel = f"log10({ylabel})" if ylabel else "log10"
    finite = np.concatenate([y[np.isfinite(y)] for y in series]) if series else np.array([0.0])
    ylo, yhi = float(finite.min()), float(finite.max())
    if yhi - ylo < 1e-300:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    pad = 0.05 * (yhi - ylo)
    parts, px, py = _axes(x.min(), x.max(), ylo - pad, yhi + pad, title, xlabel, ylabel)
    for i, y in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(
            f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y) if np.isfinite(b)
        )
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        if labels:
            parts.append(
                f'<text x="{_W-_MR-8}" y="{_MT+16+14*i}" font-size="11" text-anchor="end" '
                f'fill="{color}">{_esc(labels[i])}</text>'
            )
    _write(path, parts)


def _viridis(u):
    """Coarse viridis-like gradient on [0, 1]."""
    stops = np.array(
        [
            (0.267, 0.005, 0.329),
            (0.283, 0.141, 0.458),
            (0.254, 0.265, 0.530),
            (0.207, 0.372, 0.553),
            (0.164, 0.471, 0.558),
            (0.128, 0.567, 0.551),
            (0.135, 0.659, 0.518),
            (0.267, 0.749, 0.441),
            (0.478, 0.821, 0.318),
            (0.741, 0.873, 0.150),
            (0.993, 0.906, 0.144),
        ]
    )
    u = np.clip(u, 0.0, 1.0) * (len(stops) - 1)
    i = np.minimum(u.astype(int), len(stops) - 2)
    f = (u - i)[..., None]
    rgb = stops[i] * (1 - f) + stops[i + 1] * f
    return rgb


def heatmap(path, x, y, z, title="", xlabel="", ylabel="", clip_percentile=None):
    """Write a heatmap; z has shape (len(y), len(x)); NaNs render white."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    finite = z[np.isfinite(z)]
    if finite.size == 0:
        finite = np.array([0.0, 1.0])
    zhi = (
        float(np.percentile(finite, clip_percentile))
        if clip_percentile is not None
        else float(finite.max())
    )
    zlo = float(finite.min())
    if zhi - zlo < 1e-300:
        zhi = zlo + 1.0
    parts, px, py = _axes(x.min(), x.max(), y.min(), y.max(), title, xlabel, ylabel)
    xe = _edges(x)
    ye = _edges(y)
    for j in range(y.size):
        for i in range(x.size):
            v = z[j, i]
            if not np.isfinite(v):
                continue
            r, g, b = (_viridis(np.array((v - zlo) / (zhi - zlo))) * 255).astype(int)
            x0, x1 = px(xe[i]), px(xe[i + 1])
            y0, y1 = py(ye[j + 1]), py(ye[j])
            parts.append(
                f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{x1-x0:.2f}" height="{y1-y0:.2f}" '
                f'fill="rgb({r},{g},{b})"/>'
            )
    parts.append(
        f'<text x="{_W-_MR-8}" y="{_MT-6}" font-size="10" text-anchor="end">'
        f"range [{zlo:.3g}, {zhi:.3g}]</text>"
    )
    _write(path, parts)


def _edges(v):
    mid = 0.5 * (v[1:] + v[:-1])
    first = v[0] - (mid[0] - v[0]) if v.size > 1 else v[0] - 0.5
    last = v[-1] + (v[-1] - mid[-1]) if v.size > 1 else v[-1] + 0.5
    return np.concatenate([[first], mid, [last]])


def _write(path, parts):
    body = "\n".join(parts)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}">\n<rect width="{_W}" height="{_H}" fill="white"/>\n'
            f"{body}\n</svg>\n"
        )
