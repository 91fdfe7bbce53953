"""Deterministic SVG figures: planar configurations, cap maps and region scans.

Output is written by hand with fixed float formatting, so identical input
yields identical bytes.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import __version__
from .constructions import separating_line
from .coverage import (
    TWO_PI,
    AngularInterval,
    CoverageVerdict,
    _s1_gaps,
    _tangent_basis,
    configuration_caps,
    great_circle_intervals,
)
from .errors import UnsupportedDimension
from .geom import TOL_ANGLE, Configuration, Mode, SphericalCap, Topology, angle_between


def _f(x: float) -> str:
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Svg:
    def __init__(self, width: int, height: int, title: str):
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            f"<title>{title}</title>",
            f"<!-- umbra {__version__} -->",
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        ]

    def add(self, element: str) -> None:
        self.parts.append(element)

    def polyline(self, pts, **attrs) -> None:
        coords = " ".join(f"{_f(x)},{_f(y)}" for x, y in pts)
        self.add(f'<polyline points="{coords}" fill="none"{_attrs(attrs)}/>')

    def text(self, x, y, s, size=12, **attrs) -> None:
        self.add(f'<text x="{_f(x)}" y="{_f(y)}" font-family="monospace" '
                 f'font-size="{size}"{_attrs(attrs)}>{s}</text>')

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _attrs(attrs: dict) -> str:
    return "".join(f' {k.replace("_", "-")}="{v}"' for k, v in attrs.items())


# ---------------------------------------------------------------------------
# n = 2


def plot_planar(config: Configuration, verdict: CoverageVerdict | None = None) -> str:
    size = 600
    extent = 1.0 + max(b.radius for b in config.balls) + 0.2 if config.balls else 1.5
    extent = max(extent, 1.3)
    scale = size / (2 * extent)

    def X(x):
        return size / 2 + scale * x

    def Y(y):
        return size / 2 - scale * y

    svg = _Svg(size, size, f"{len(config.balls)} balls, {config.mode.value} mode")
    svg.add(f'<circle cx="{_f(X(0))}" cy="{_f(Y(0))}" r="{_f(scale * config.sphere_radius)}" '
            'fill="none" stroke="#888" stroke-dasharray="6,4"/>')
    svg.add(f'<circle cx="{_f(X(0))}" cy="{_f(Y(0))}" r="3" fill="black"/>')
    dash = ' stroke-dasharray="3,2"' if config.topology.value == "open" else ""
    for i, b in enumerate(config.balls):
        cx, cy = b.center
        svg.add(f'<circle cx="{_f(X(cx))}" cy="{_f(Y(cy))}" r="{_f(scale * b.radius)}" '
                f'fill="#4a7ab5" fill-opacity="0.35" stroke="#1f3f66"{dash}/>')
        svg.text(X(cx) + 4, Y(cy) - 4, f"K{i + 1} r={b.radius:.6f}", size=11)
    if verdict is not None and verdict.witness is not None:
        w = np.asarray(verdict.witness)
        t0 = -extent * 1.5 if config.mode is Mode.LINE else 0.0
        t1 = extent * 1.5
        svg.add(f'<line x1="{_f(X(t0 * w[0]))}" y1="{_f(Y(t0 * w[1]))}" '
                f'x2="{_f(X(t1 * w[0]))}" y2="{_f(Y(t1 * w[1]))}" stroke="#c0392b" stroke-width="2"/>')
        svg.text(10, size - 30, f"witness clearance {verdict.clearance:.6g} rad", fill="#c0392b")
    if len(config.balls) == 2:
        nrm, off = separating_line(*config.balls)
        foot = off * nrm
        along = np.array([-nrm[1], nrm[0]]) * extent * 1.5
        a, b = foot - along, foot + along
        svg.add(f'<line x1="{_f(X(a[0]))}" y1="{_f(Y(a[1]))}" x2="{_f(X(b[0]))}" y2="{_f(Y(b[1]))}" '
                'stroke="#27ae60" stroke-width="1.5" stroke-dasharray="8,4"/>')
        svg.text(10, size - 12, f"separating line offset {abs(off):.6f}", fill="#27ae60")
    status = verdict.status.value if verdict is not None else "not evaluated"
    svg.text(10, 20, f"verdict: {status}")
    return svg.render()


# ---------------------------------------------------------------------------
# n = 3


def _lonlat(p: np.ndarray) -> tuple[float, float]:
    return math.atan2(p[1], p[0]), math.asin(max(-1.0, min(1.0, p[2])))


def _cap_outline(cap: SphericalCap, count: int = 361) -> list[list[tuple[float, float]]]:
    a = np.asarray(cap.axis)
    helper = np.array([1.0, 0, 0]) if abs(a[0]) < 0.9 else np.array([0, 1.0, 0])
    e1 = np.cross(a, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(a, e1)
    h = cap.half_angle
    runs, cur, prev = [], [], None
    for phi in np.linspace(0, TWO_PI, count):
        p = math.cos(h) * a + math.sin(h) * (math.cos(phi) * e1 + math.sin(phi) * e2)
        ll = _lonlat(p)
        if prev is not None and abs(ll[0] - prev[0]) > math.pi:
            runs.append(cur)
            cur = []
        cur.append(ll)
        prev = ll
    runs.append(cur)
    return [r for r in runs if len(r) > 1]


def _zero_clearance_gaps(caps: Sequence[SphericalCap], w: np.ndarray):
    """Gaps on the great circle through a witness lying on an open hemisphere boundary."""
    for cap in caps:
        if abs(cap.half_angle - math.pi / 2) < 1e-9 and abs(angle_between(w, cap.axis) - math.pi / 2) < 1e-9:
            arcs = great_circle_intervals(caps, cap.axis)
            arcs = [AngularInterval(iv.lo, iv.hi, Topology.CLOSED) for iv in arcs]
            _, gaps = _s1_gaps(arcs, TOL_ANGLE)
            return np.asarray(cap.axis), gaps
    return None, []


def plot_caps(config: Configuration, verdict: CoverageVerdict | None = None) -> str:
    width, height, pad = 720, 360, 30
    caps = configuration_caps(config)

    def X(lon):
        return pad + (lon + math.pi) / TWO_PI * width

    def Y(lat):
        return pad + (math.pi / 2 - lat) / math.pi * height

    svg = _Svg(width + 2 * pad, height + 2 * pad + 40,
               f"occlusion caps of {len(config.balls)} balls, {config.mode.value} mode")
    svg.add(f'<rect x="{pad}" y="{pad}" width="{width}" height="{height}" fill="none" stroke="#888"/>')
    for lat in (-60, -30, 0, 30, 60):
        y = Y(math.radians(lat))
        svg.add(f'<line x1="{pad}" y1="{_f(y)}" x2="{pad + width}" y2="{_f(y)}" stroke="#ddd"/>')
    for i, cap in enumerate(caps):
        for run in _cap_outline(cap):
            svg.polyline([(X(lo), Y(la)) for lo, la in run], stroke="#1f3f66", stroke_width="1.2")
        lo, la = _lonlat(np.asarray(cap.axis))
        svg.add(f'<circle cx="{_f(X(lo))}" cy="{_f(Y(la))}" r="2" fill="#1f3f66"/>')
    notes = []
    if verdict is not None and verdict.witness is not None:
        w = np.asarray(verdict.witness)
        lo, la = _lonlat(w)
        svg.add(f'<circle cx="{_f(X(lo))}" cy="{_f(Y(la))}" r="5" fill="none" '
                'stroke="#c0392b" stroke-width="2"/>')
        notes.append(f"witness clearance {verdict.clearance:.6g} rad")
        if verdict.clearance == 0.0:
            normal, gaps = _zero_clearance_gaps(caps, w)
            if normal is not None:
                if abs(normal[2]) > 1 - 1e-12:
                    e1, e2 = np.array([1.0, 0, 0]), np.array([0, 1.0, 0]) * np.sign(normal[2])
                else:
                    e1, e2 = _tangent_basis(normal)
                for g0, g1 in gaps:
                    run = []
                    for t in np.linspace(g0, g1, 24):
                        ll = _lonlat(math.cos(t) * e1 + math.sin(t) * e2)
                        if run and abs(ll[0] - run[-1][0]) > math.pi:
                            svg.polyline([(X(a), Y(b)) for a, b in run], stroke="#c0392b", stroke_width="4")
                            run = []
                        run.append(ll)
                    svg.polyline([(X(a), Y(b)) for a, b in run], stroke="#c0392b", stroke_width="4")
                widths = ", ".join(f"{g1 - g0:.6f}" for g0, g1 in gaps)
                notes.append(f"{len(gaps)} gaps on the boundary great circle: {widths}")
    status = verdict.status.value if verdict is not None else "not evaluated"
    svg.text(pad, 20, f"verdict: {status}")
    for k, note in enumerate(notes):
        svg.text(pad, height + 2 * pad + 12 + 16 * k, note, size=11)
    return svg.render()


def plot_config(config: Configuration, verdict: CoverageVerdict | None = None) -> str:
    if config.dimension == 2:
        return plot_planar(config, verdict)
    if config.dimension == 3:
        return plot_caps(config, verdict)
    raise UnsupportedDimension(f"cannot plot dimension {config.dimension}")


# ---------------------------------------------------------------------------
# region scans


def plot_region(x: np.ndarray, y: np.ndarray, inside: np.ndarray, residual: np.ndarray) -> str:
    """Shade the grid cells flagged inside and trace residual sign changes between them."""
    xs, ys = np.unique(x), np.unique(y)
    nx, ny = len(xs), len(ys)
    ix = np.searchsorted(xs, x)
    iy = np.searchsorted(ys, y)
    mask = np.zeros((nx, ny), dtype=bool)
    res = np.full((nx, ny), np.nan)
    mask[ix, iy] = inside
    res[ix, iy] = residual
    size, pad = 500, 40
    x0, x1, y0, y1 = xs[0], xs[-1], ys[0], ys[-1]
    dx = (x1 - x0) / max(nx - 1, 1)
    dy = (y1 - y0) / max(ny - 1, 1)

    def X(v):
        return pad + (v - x0 + dx / 2) / (x1 - x0 + dx) * size

    def Y(v):
        return pad + size - (v - y0 + dy / 2) / (y1 - y0 + dy) * size

    cw = size / nx
    ch = size / ny
    svg = _Svg(size + 2 * pad, size + 2 * pad, f"admissible region, {int(mask.sum())} of {mask.size} grid points")
    svg.add(f'<rect x="{pad}" y="{pad}" width="{size}" height="{size}" fill="none" stroke="#888"/>')
    for i in range(nx):
        col = mask[i]
        j = 0
        while j < ny:
            if col[j]:
                k = j
                while k + 1 < ny and col[k + 1]:
                    k += 1
                svg.add(f'<rect x="{_f(X(xs[i]) - cw / 2)}" y="{_f(Y(ys[k]) - ch / 2)}" '
                        f'width="{_f(cw)}" height="{_f(ch * (k - j + 1))}" fill="#4a7ab5" fill-opacity="0.6"/>')
                j = k + 1
            else:
                j += 1
    # boundary: zero crossings of the residual along each column, next to inside points
    pts = []
    for i in range(nx):
        for j in range(ny - 1):
            a, b = res[i, j], res[i, j + 1]
            if np.isnan(a) or np.isnan(b) or not (mask[i, j] or mask[i, j + 1]):
                continue
            if (a > 0) != (b > 0) and a != b:
                t = a / (a - b)
                pts.append((xs[i], ys[j] + t * (ys[j + 1] - ys[j])))
    if pts:
        svg.polyline([(X(u), Y(v)) for u, v in pts], stroke="#c0392b", stroke_width="1.5")
    svg.text(pad, pad - 10, f"x in [{x0:g}, {x1:g}], y in [{y0:g}, {y1:g}]")
    svg.text(pad, size + pad + 25, f"{int(mask.sum())} admissible grid points")
    return svg.render()
