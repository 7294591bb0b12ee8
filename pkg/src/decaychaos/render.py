"""Deterministic SVG figures.

Every coordinate is written with two decimals and points are emitted in
cloud order, so identical inputs give byte-identical files.
"""
from dataclasses import dataclass
import hashlib
import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .errors import AxisOutOfRange, EmptyCloud, EventIOError
from .series import IntervalSeries, PointCloud

KINDS = ("series_plot", "projection_2d", "projection_3d_views", "correlation_curve", "report")

INK = "#1b2a49"
MARK = "#24588f"
FIT = "#c0392b"
PANEL = 360
MARGIN = 56

# fixed view of the oblique panel, degrees
AZIMUTH = 35.0
ELEVATION = 25.0


@dataclass(frozen=True)
class FigureArtifact:
    kind: str
    path: str
    caption: str
    sha256: str = ""

    def as_dict(self):
        return {"kind": self.kind, "path": self.path, "caption": self.caption,
                "sha256": self.sha256}


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def write_artifact(text, path, kind, caption):
    path = Path(path)
    data = text.encode("utf-8")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    except OSError as exc:
        raise EventIOError(str(path), exc.strerror or exc) from exc
    return FigureArtifact(kind, str(path), caption, hashlib.sha256(data).hexdigest())


def _f(v):
    return f"{v:.2f}"


def _tick(v):
    return f"{v:.3g}"


_SUB = str.maketrans("0123456789+", "\u2080\u2081\u2082\u2083\u2084\u2085\u2086\u2087\u2088\u2089\u208a")


def axis_label(index):
    """``t_i``, ``t_{i+1}``, ... with Unicode subscripts (survive rotation)."""
    sub = "" if index == 0 else f"+{index}".translate(_SUB)
    return f"t\u1d62{sub}"


def _range(values):
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi == lo:
        pad = 0.5 if lo == 0.0 else abs(lo) * 0.5
        return lo - pad, hi + pad
    pad = 0.03 * (hi - lo)
    return lo - pad, hi + pad


class _Canvas:
    def __init__(self, width, height, title):
        self.width = width
        self.height = height
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" font-family="Helvetica, Arial, sans-serif">',
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        ]
        if title:
            self.text(width / 2, 22, escape(title), size=13, anchor="middle")

    def text(self, x, y, body, size=11, anchor="start", rotate=None):
        tr = f' transform="rotate({rotate} {_f(x)} {_f(y)})"' if rotate is not None else ""
        self.parts.append(f'<text x="{_f(x)}" y="{_f(y)}" font-size="{size}" '
                          f'text-anchor="{anchor}" fill="{INK}"{tr}>{body}</text>')

    def add(self, element):
        self.parts.append(element)

    def finish(self):
        return "\n".join(self.parts + ["</svg>"]) + "\n"


class _Panel:
    """Maps data coordinates onto a square plotting area."""

    def __init__(self, x0, y0, size, xrange, yrange):
        self.x0, self.y0, self.size = x0, y0, size
        self.xr, self.yr = xrange, yrange

    def px(self, x):
        lo, hi = self.xr
        return self.x0 + (np.asarray(x) - lo) / (hi - lo) * self.size

    def py(self, y):
        lo, hi = self.yr
        return self.y0 + self.size - (np.asarray(y) - lo) / (hi - lo) * self.size

    def frame(self, canvas, xlabel, ylabel, xticks=None, yticks=None, fmt=_tick):
        s = self.size
        canvas.add(f'<rect x="{_f(self.x0)}" y="{_f(self.y0)}" width="{_f(s)}" height="{_f(s)}" '
                   f'fill="none" stroke="{INK}" stroke-width="1"/>')
        xticks = np.linspace(*self.xr, 3) if xticks is None else xticks
        yticks = np.linspace(*self.yr, 3) if yticks is None else yticks
        for v in xticks:
            x = float(self.px(v))
            canvas.add(f'<line x1="{_f(x)}" y1="{_f(self.y0 + s)}" x2="{_f(x)}" '
                       f'y2="{_f(self.y0 + s + 4)}" stroke="{INK}"/>')
            canvas.text(x, self.y0 + s + 16, fmt(v), size=9, anchor="middle")
        for v in yticks:
            y = float(self.py(v))
            canvas.add(f'<line x1="{_f(self.x0 - 4)}" y1="{_f(y)}" x2="{_f(self.x0)}" '
                       f'y2="{_f(y)}" stroke="{INK}"/>')
            canvas.text(self.x0 - 7, y + 3, fmt(v), size=9, anchor="end")
        canvas.text(self.x0 + s / 2, self.y0 + s + 34, xlabel, anchor="middle")
        canvas.text(self.x0 - 40, self.y0 + s / 2, ylabel, anchor="middle", rotate=-90)


def _markers(canvas, xs, ys, radius=1.3):
    body = "".join(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{radius}"/>' for x, y in zip(xs, ys))
    canvas.add(f'<g fill="{MARK}" fill-opacity="0.65" stroke="none">{body}</g>')


def _scatter_panel(canvas, panel, pts, ax, ay):
    panel.frame(canvas, axis_label(ax), axis_label(ay))
    _markers(canvas, panel.px(pts[:, 0]), panel.py(pts[:, 1]))


def series_svg(series, max_points=None, title=None):
    """Value against index, as connected markers."""
    values = series.values if isinstance(series, IntervalSeries) else np.asarray(series, dtype=np.float64)
    if values.size < 1:
        raise EmptyCloud("nothing to plot")
    if max_points is not None:
        values = values[:max_points]
    plot_w, plot_h = 2 * PANEL, PANEL // 2
    canvas = _Canvas(plot_w + 2 * MARGIN, plot_h + 2 * MARGIN + 20, title)
    xlo, xhi = -0.5, max(values.size - 0.5, 0.5)
    ylo, yhi = _range(values)

    def px(i):
        return MARGIN + (np.asarray(i) - xlo) / (xhi - xlo) * plot_w

    def py(v):
        return MARGIN + plot_h - (np.asarray(v) - ylo) / (yhi - ylo) * plot_h

    canvas.add(f'<rect x="{_f(MARGIN)}" y="{_f(MARGIN)}" width="{_f(plot_w)}" '
               f'height="{_f(plot_h)}" fill="none" stroke="{INK}"/>')
    xs, ys = px(np.arange(values.size)), py(values)
    line = " ".join(f"{_f(x)},{_f(y)}" for x, y in zip(xs, ys))
    canvas.add(f'<polyline points="{line}" fill="none" stroke="{MARK}" stroke-width="0.6" '
               f'stroke-opacity="0.6"/>')
    _markers(canvas, xs, ys, radius=1.6)
    for v in np.linspace(ylo, yhi, 3):
        y = float(py(v))
        canvas.add(f'<line x1="{_f(MARGIN - 4)}" y1="{_f(y)}" x2="{_f(MARGIN)}" y2="{_f(y)}" stroke="{INK}"/>')
        canvas.text(MARGIN - 7, y + 3, _tick(v), size=9, anchor="end")
    for i in sorted({int(round(v)) for v in np.linspace(0, values.size - 1, 5)}):
        x = float(px(i))
        canvas.add(f'<line x1="{_f(x)}" y1="{_f(MARGIN + plot_h)}" x2="{_f(x)}" '
                   f'y2="{_f(MARGIN + plot_h + 4)}" stroke="{INK}"/>')
        canvas.text(x, MARGIN + plot_h + 16, str(i), size=9, anchor="middle")
    canvas.text(MARGIN + plot_w / 2, MARGIN + plot_h + 34, "i", anchor="middle")
    canvas.text(MARGIN - 40, MARGIN + plot_h / 2, axis_label(0), anchor="middle", rotate=-90)
    return canvas.finish()


def _cloud_points(cloud):
    pts = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise EmptyCloud("point cloud is empty")
    return pts


def projection_svg(cloud, axes=(0, 1), title=None):
    """Scatter of two embedding coordinates, e.g. ``t_{i+1}`` against ``t_i``."""
    pts = _cloud_points(cloud)
    axes = tuple(int(a) for a in axes)
    if len(axes) != 2 or any(not 0 <= a < pts.shape[1] for a in axes):
        raise AxisOutOfRange(f"axes {axes} invalid for {pts.shape[1]}-d cloud")
    sel = pts[:, axes]
    canvas = _Canvas(PANEL + 2 * MARGIN, PANEL + 2 * MARGIN + 20, title)
    panel = _Panel(MARGIN, MARGIN, PANEL, _range(sel[:, 0]), _range(sel[:, 1]))
    _scatter_panel(canvas, panel, sel, *axes)
    return canvas.finish()


def oblique(pts, azimuth=AZIMUTH, elevation=ELEVATION):
    """Orthographic view of the unit-normalised cloud; returns screen ``(u, v)``."""
    lo = pts.min(axis=0)
    span = pts.max(axis=0) - lo
    span[span == 0.0] = 1.0
    q = (pts - lo) / span - 0.5
    a, e = math.radians(azimuth), math.radians(elevation)
    u = q[:, 0] * math.cos(a) - q[:, 1] * math.sin(a)
    depth = q[:, 0] * math.sin(a) + q[:, 1] * math.cos(a)
    v = q[:, 2] * math.cos(e) - depth * math.sin(e)
    return u, v


def _cube_edges(azimuth=AZIMUTH, elevation=ELEVATION):
    corners = np.array([[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)], float)
    u, v = oblique(corners, azimuth, elevation)
    edges = []
    for i in range(8):
        for j in range(i + 1, 8):
            if np.sum(np.abs(corners[i] - corners[j])) == 1:
                edges.append(((u[i], v[i]), (u[j], v[j])))
    return edges, corners, u, v


def views_svg(cloud, title=None):
    """Three pairwise projections plus a fixed oblique view of a 3-d cloud."""
    pts = _cloud_points(cloud)
    if pts.shape[1] < 3:
        raise AxisOutOfRange(f"3-D views need a cloud of dimension >= 3, got {pts.shape[1]}")
    pts = pts[:, :3]
    cell = PANEL + 2 * MARGIN
    canvas = _Canvas(2 * cell, 2 * cell + 20, title)
    for n, (ax, ay) in enumerate(((0, 1), (0, 2), (1, 2))):
        ox = (n % 2) * cell + MARGIN
        oy = (n // 2) * cell + MARGIN
        sel = pts[:, (ax, ay)]
        panel = _Panel(ox, oy, PANEL, _range(sel[:, 0]), _range(sel[:, 1]))
        _scatter_panel(canvas, panel, sel, ax, ay)
    ox, oy = cell + MARGIN, cell + MARGIN
    edges, corners, cu, cv = _cube_edges()
    half = PANEL / 2

    def sx(u):
        return ox + half + np.asarray(u) * PANEL * 0.72

    def sy(v):
        return oy + half - np.asarray(v) * PANEL * 0.72

    for (u1, v1), (u2, v2) in edges:
        canvas.add(f'<line x1="{_f(sx(u1))}" y1="{_f(sy(v1))}" x2="{_f(sx(u2))}" y2="{_f(sy(v2))}" '
                   f'stroke="#9aa5b8" stroke-width="0.8"/>')
    # label the three edges leaving the origin corner
    for axis, corner in ((0, 4), (1, 2), (2, 1)):
        mx = (cu[0] + cu[corner]) / 2
        my = (cv[0] + cv[corner]) / 2
        canvas.text(float(sx(mx)), float(sy(my)) + 14, axis_label(axis), size=10, anchor="middle")
    u, v = oblique(pts)
    _markers(canvas, sx(u), sy(v), radius=1.1)
    return canvas.finish()


def _decades(lo, hi):
    a, b = math.floor(lo), math.ceil(hi)
    return [float(k) for k in range(a, b + 1) if lo <= k <= hi]


def correlation_svg(curve, estimate=None, title=None):
    """``log10 C(r)`` against ``log10 r`` with the fitted scaling line."""
    ok = curve.c_values > 0.0
    if not np.any(ok):
        raise EmptyCloud("correlation curve has no positive values")
    x = np.log10(curve.radii[ok])
    y = np.log10(curve.c_values[ok])
    canvas = _Canvas(PANEL + 2 * MARGIN, PANEL + 2 * MARGIN + 20, title)
    xr, yr = _range(x), _range(y)
    panel = _Panel(MARGIN, MARGIN, PANEL, xr, yr)
    xt = _decades(*xr) or list(np.linspace(*xr, 3))
    yt = _decades(*yr) or list(np.linspace(*yr, 3))
    panel.frame(canvas, "log\u2081\u2080 r", "log\u2081\u2080 C(r)",
                xticks=xt, yticks=yt, fmt=lambda v: f"{v:g}")
    _markers(canvas, panel.px(x), panel.py(y), radius=2.2)
    if estimate is not None:
        lo, hi = (math.log10(r) for r in estimate.fit_range)
        ln10 = math.log(10.0)
        ys = [(estimate.d2 * v * ln10 + estimate.intercept) / ln10 for v in (lo, hi)]
        canvas.add(f'<line x1="{_f(panel.px(lo))}" y1="{_f(panel.py(ys[0]))}" '
                   f'x2="{_f(panel.px(hi))}" y2="{_f(panel.py(ys[1]))}" '
                   f'stroke="{FIT}" stroke-width="1.5"/>')
        canvas.text(MARGIN + 8, MARGIN + 16, escape(f"D2 = {estimate.d2:.3f}"), size=11)
    return canvas.finish()


def render_series(series, path, caption="", max_points=None):
    return write_artifact(series_svg(series, max_points, caption or None), path,
                          "series_plot", caption)


def render_projection(cloud, axes, path, caption=""):
    """2-D scatter for two axes, the four-panel 3-D views for three."""
    if len(axes) == 3:
        pts = _cloud_points(cloud)
        if any(not 0 <= int(a) < pts.shape[1] for a in axes):
            raise AxisOutOfRange(f"axes {tuple(axes)} invalid for {pts.shape[1]}-d cloud")
        text = views_svg(pts[:, list(axes)], caption or None)
        return write_artifact(text, path, "projection_3d_views", caption)
    return write_artifact(projection_svg(cloud, axes, caption or None), path,
                          "projection_2d", caption)


def render_correlation(curve, estimate, path, caption=""):
    return write_artifact(correlation_svg(curve, estimate, caption or None), path,
                          "correlation_curve", caption)
