"""Hand-written SVG 1.1 line plots.

Output depends only on the input numbers (no timestamps, ids or dict order
surprises), so identical data gives identical bytes.
"""

import math
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _series(data):
    """Normalise input to ``[(label, x, y), ...]``."""
    # an EnvelopePolyline or a bare complex array plots as one curve in the plane
    pts = getattr(data, "points", None)
    if pts is not None:
        pts = np.asarray(pts)
        return [("envelope", pts.real, pts.imag)]
    if isinstance(data, np.ndarray) and np.iscomplexobj(data):
        return [("curve", data.real, data.imag)]
    if isinstance(data, dict):
        data = list(data.items())
    out = []
    for item in data:
        if len(item) == 2:
            label, xy = item
            if np.iscomplexobj(np.asarray(xy)):
                xy = np.asarray(xy)
                x, y = xy.real, xy.imag
            else:
                x, y = xy
        else:
            label, x, y = item
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != y.shape:
            raise ValueError(f"series {label!r}: x and y differ in length")
        out.append((str(label), x, y))
    return out


def _nice_ticks(lo, hi, target=5):
    span = hi - lo
    raw = span / target
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _fmt(v):
    return f"{v:.2f}"


def _label(v):
    return f"{v:.6g}"


def _thin(x, y, max_points):
    if x.size <= max_points:
        return x, y
    idx = np.unique(np.linspace(0, x.size - 1, max_points).round().astype(np.int64))
    return x[idx], y[idx]


def emit_svg(data, *, title="", xlabel="", ylabel="", width=640, height=480,
             equal_aspect=False, max_points=20000):
    """Return an SVG document plotting one path per series.

    ``data`` is an envelope, a complex array, a mapping ``label -> (x, y)``
    or a list of ``(label, x, y)``. Long series are thinned to
    ``max_points`` evenly spaced samples. ``equal_aspect`` keeps one unit
    the same length on both axes (useful for cluster pictures).
    """
    series = _series(data)
    series = [(lab, *_thin(x, y, max_points)) for lab, x, y in series if x.size]
    if not series:
        raise ValueError("nothing to plot")
    xs = np.concatenate([s[1] for s in series])
    ys = np.concatenate([s[2] for s in series])
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise ValueError("data contains non-finite values")
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad_l, pad_r, pad_t, pad_b = 70, 20, 40 if title else 20, 50
    pw = width - pad_l - pad_r
    ph = height - pad_t - pad_b
    sx = pw / (x1 - x0)
    sy = ph / (y1 - y0)
    if equal_aspect:
        s = min(sx, sy)
        # recentre the tighter axis
        cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
        x0, x1 = cx - 0.5 * pw / s, cx + 0.5 * pw / s
        y0, y1 = cy - 0.5 * ph / s, cy + 0.5 * ph / s
        sx = sy = s

    def px(v):
        return pad_l + (v - x0) * sx

    def py(v):
        return pad_t + ph - (v - y0) * sy

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        '<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" '
        '"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">',
        f'<svg version="1.1" xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{_fmt(width / 2)}" y="24" font-family="sans-serif" '
                   f'font-size="16" text-anchor="middle">{escape(title)}</text>')
    # axes and ticks
    out.append(f'<rect x="{pad_l}" y="{pad_t}" width="{pw}" height="{ph}" fill="none" '
               f'stroke="black" stroke-width="1"/>')
    for v in _nice_ticks(x0, x1):
        X = _fmt(px(v))
        out.append(f'<line x1="{X}" y1="{pad_t + ph}" x2="{X}" y2="{pad_t + ph + 5}" '
                   f'stroke="black"/>')
        out.append(f'<text x="{X}" y="{pad_t + ph + 18}" font-family="sans-serif" '
                   f'font-size="11" text-anchor="middle">{_label(v)}</text>')
    for v in _nice_ticks(y0, y1):
        Y = _fmt(py(v))
        out.append(f'<line x1="{pad_l - 5}" y1="{Y}" x2="{pad_l}" y2="{Y}" stroke="black"/>')
        out.append(f'<text x="{pad_l - 8}" y="{Y}" font-family="sans-serif" font-size="11" '
                   f'text-anchor="end" dominant-baseline="middle">{_label(v)}</text>')
    if xlabel:
        out.append(f'<text x="{_fmt(pad_l + pw / 2)}" y="{height - 10}" font-family="sans-serif" '
                   f'font-size="13" text-anchor="middle">{escape(xlabel)}</text>')
    if ylabel:
        cy = _fmt(pad_t + ph / 2)
        out.append(f'<text x="16" y="{cy}" font-family="sans-serif" font-size="13" '
                   f'text-anchor="middle" transform="rotate(-90 16 {cy})">{escape(ylabel)}</text>')
    out.append(f'<clipPath id="plot"><rect x="{pad_l}" y="{pad_t}" width="{pw}" '
               f'height="{ph}"/></clipPath>')
    for i, (label, x, y) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        d = " ".join(f"{'M' if j == 0 else 'L'}{_fmt(px(a))},{_fmt(py(b))}"
                     for j, (a, b) in enumerate(zip(x.tolist(), y.tolist())))
        out.append(f'<path d="{d}" fill="none" stroke="{color}" stroke-width="1.2" '
                   f'clip-path="url(#plot)"><title>{escape(label)}</title></path>')
    if len(series) > 1:
        for i, (label, _, _) in enumerate(series):
            color = PALETTE[i % len(PALETTE)]
            yy = pad_t + 14 + 16 * i
            out.append(f'<line x1="{pad_l + 10}" y1="{yy}" x2="{pad_l + 30}" y2="{yy}" '
                       f'stroke="{color}" stroke-width="2"/>')
            out.append(f'<text x="{pad_l + 36}" y="{yy + 4}" font-family="sans-serif" '
                       f'font-size="11">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(data, path, **style):
    text = emit_svg(data, **style)
    with open(path, "w") as fh:
        fh.write(text)
    return text
