"""Plot data and static drawings: depth contours, surfaces, depth plots.

Everything here is split into two layers: grid builders that return plain
arrays (testable, bitwise-consistent with pointwise depth calls) and SVG
emitters that turn them into deterministic, byte-stable drawings. No
plotting window is ever opened; files are the product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from .classifier import SeparatorRecord, TrainedModel, _binary_scores
from .depths.api import depth_rows, freeze_cloud
from .depths.spec import DepthSpec
from .errors import ParameterError

__all__ = [
    "ContourResult",
    "SurfaceResult",
    "DDPlotPanel",
    "DDPlotResult",
    "contour_grid",
    "surface_grid",
    "ddplot_from_space",
    "ddplot_from_model",
    "write_grid_csv",
    "render_contours_svg",
    "render_surface_svg",
    "render_ddplot_svg",
    "render_functions_svg",
]

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#e377c2", "#7f7f7f")


# ---------------------------------------------------------------------------
# grid evaluation
# ---------------------------------------------------------------------------


def _as_points(data) -> np.ndarray:
    x = np.asarray(getattr(data, "values", data), dtype=float)
    if x.ndim != 2 or x.shape[1] != 2:
        raise ParameterError("plot data must be an n x 2 matrix")
    return x


def _padded_box(x: np.ndarray, pad: float = 0.1):
    lo = x.min(axis=0)
    hi = x.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    return lo - pad * span, hi + pad * span


def _eval_grid(x: np.ndarray, spec: DepthSpec, xs: np.ndarray, ys: np.ndarray,
               threads: int) -> np.ndarray:
    """Depth of every grid node, shaped (len(xs), len(ys)).

    Uses the same frozen statistics and batch evaluation as pointwise
    calls, so grid values match them bitwise.
    """
    stats = freeze_cloud(x, spec)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    vals = depth_rows(pts, [stats], threads=threads)[:, 0]
    return vals.reshape(len(xs), len(ys))


@dataclass(frozen=True, eq=False)
class ContourResult:
    """A depth field with extracted iso-lines."""

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray
    points: np.ndarray
    levels: tuple[float, ...]
    polylines: tuple  # (level, array of (k, 2) vertices) pairs


def contour_grid(data, spec: DepthSpec, frequency: int = 100,
                 levels: float = 10, threads: int = 1) -> ContourResult:
    """Depth contours of a bivariate cloud on a padded bounding-box grid.

    ``levels`` at most 1 names the single contour's depth value; anything
    larger is the (ceiling) count of iso-lines, equally spaced at
    ``k / (count + 1)`` of the maximum grid depth.
    """
    x = _as_points(data)
    if frequency < 10:
        raise ParameterError(f"`frequency` must be >= 10, got {frequency}")
    if levels <= 0:
        raise ParameterError(f"`levels` must be positive, got {levels}")
    lo, hi = _padded_box(x)
    xs = np.linspace(lo[0], hi[0], frequency)
    ys = np.linspace(lo[1], hi[1], frequency)
    field = _eval_grid(x, spec, xs, ys, threads)

    if levels <= 1:
        level_values = (float(levels),)
    else:
        count = math.ceil(levels)
        top = float(field.max())
        level_values = tuple(top * k / (count + 1) for k in range(1, count + 1))

    polylines = []
    for lv in level_values:
        for line in _marching_squares(xs, ys, field, lv):
            polylines.append((lv, line))
    return ContourResult(xs=xs, ys=ys, values=field, points=x,
                         levels=level_values, polylines=tuple(polylines))


@dataclass(frozen=True, eq=False)
class SurfaceResult:
    """A depth height field over a bivariate cloud."""

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray
    points: np.ndarray
    point_depths: np.ndarray


def surface_grid(data, spec: DepthSpec, xnum: int = 50, ynum: int = 50,
                 threads: int = 1) -> SurfaceResult:
    """Depth landscape of a bivariate cloud on a padded bounding-box grid."""
    x = _as_points(data)
    if xnum < 2 or ynum < 2:
        raise ParameterError("`xnum` and `ynum` must be >= 2")
    lo, hi = _padded_box(x)
    xs = np.linspace(lo[0], hi[0], xnum)
    ys = np.linspace(lo[1], hi[1], ynum)
    field = _eval_grid(x, spec, xs, ys, threads)
    stats = freeze_cloud(x, spec)
    pd = depth_rows(x, [stats], threads=threads)[:, 0]
    return SurfaceResult(xs=xs, ys=ys, values=field, points=x, point_depths=pd)


# ---------------------------------------------------------------------------
# marching squares
# ---------------------------------------------------------------------------

# Segment endpoints are cell edges: 0 bottom, 1 right, 2 top, 3 left.
_CASES = {
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)],
    6: [(0, 2)], 7: [(3, 2)], 8: [(2, 3)], 9: [(0, 2)],
    11: [(1, 2)], 12: [(3, 1)], 13: [(0, 1)], 14: [(3, 0)],
}


def _marching_squares(xs, ys, field, level) -> list[np.ndarray]:
    """Iso-lines of a grid field as chained polylines.

    Linear interpolation along cell edges; the two ambiguous saddle cases
    are resolved by the cell-center average. Vertices are chained into
    maximal polylines in a deterministic order; a closed loop repeats its
    first vertex at the end.
    """
    segments = []
    nx, ny = field.shape

    def cross(va, vb, a, b):
        t = 0.5 if vb == va else (level - va) / (vb - va)
        return a + t * (b - a)

    for ix in range(nx - 1):
        for iy in range(ny - 1):
            v00 = field[ix, iy]
            v10 = field[ix + 1, iy]
            v11 = field[ix + 1, iy + 1]
            v01 = field[ix, iy + 1]
            case = ((v00 >= level) + 2 * (v10 >= level) + 4 * (v11 >= level)
                    + 8 * (v01 >= level))
            if case in (0, 15):
                continue
            x0, x1 = xs[ix], xs[ix + 1]
            y0, y1 = ys[iy], ys[iy + 1]
            edge_pt = {
                0: (cross(v00, v10, x0, x1), y0),
                1: (x1, cross(v10, v11, y0, y1)),
                2: (cross(v01, v11, x0, x1), y1),
                3: (x0, cross(v00, v01, y0, y1)),
            }
            if case in (5, 10):
                center_in = (v00 + v10 + v11 + v01) / 4.0 >= level
                if case == 5:
                    pairs = [(3, 2), (0, 1)] if center_in else [(3, 0), (1, 2)]
                else:
                    pairs = [(3, 0), (1, 2)] if center_in else [(3, 2), (0, 1)]
            else:
                pairs = _CASES[case]
            for a, b in pairs:
                segments.append((edge_pt[a], edge_pt[b]))

    return _chain_segments(segments)


def _chain_segments(segments) -> list[np.ndarray]:
    """Join undirected segments into maximal polylines, deterministically."""
    def key(p):
        return (round(p[0], 9), round(p[1], 9))

    touch: dict = {}
    for i, (a, b) in enumerate(segments):
        touch.setdefault(key(a), []).append(i)
        touch.setdefault(key(b), []).append(i)

    used = [False] * len(segments)
    lines = []
    for start in range(len(segments)):
        if used[start]:
            continue
        used[start] = True
        a, b = segments[start]
        chain = [a, b]
        for grow_end in (True, False):
            while True:
                tip = chain[-1] if grow_end else chain[0]
                nxt = None
                for i in touch.get(key(tip), ()):
                    if not used[i]:
                        nxt = i
                        break
                if nxt is None:
                    break
                used[nxt] = True
                pa, pb = segments[nxt]
                other = pb if key(pa) == key(tip) else pa
                if grow_end:
                    chain.append(other)
                else:
                    chain.insert(0, other)
        lines.append(np.asarray(chain))
    return lines


# ---------------------------------------------------------------------------
# depth plots (pairwise class-depth scatter plus separation boundary)
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DDPlotPanel:
    """One pair of class-depth axes with its scatter and boundary lines."""

    index1: int
    index2: int
    points: np.ndarray
    labels: np.ndarray
    boundary: tuple


@dataclass(frozen=True, eq=False)
class DDPlotResult:
    panels: tuple


def ddplot_from_space(depths, labels) -> DDPlotResult:
    """Pairwise depth-vs-depth scatter panels from a raw depth matrix."""
    d = np.asarray(depths, dtype=float)
    y = np.asarray(labels, dtype=int)
    if d.ndim != 2 or d.shape[1] < 2:
        raise ParameterError("`depths` must have at least 2 columns")
    if y.shape != (d.shape[0],):
        raise ParameterError("`labels` length must match `depths`")
    panels = []
    for i, j in combinations(range(1, d.shape[1] + 1), 2):
        panels.append(DDPlotPanel(index1=i, index2=j,
                                  points=d[:, [i - 1, j - 1]], labels=y,
                                  boundary=()))
    return DDPlotResult(panels=tuple(panels))


def _boundary_lines(record: SeparatorRecord, resolution: int = 200) -> tuple:
    """Zero-crossing polylines of a binary separator over the unit square.

    The separator's signed score is evaluated on a resolution^2 grid of the
    two-class depth square; the boundary is the marching-squares zero level
    of that field (scores in, geometry out, so any separator kind works).
    """
    g = np.linspace(0.0, 1.0, resolution)
    uu, vv = np.meshgrid(g, g, indexing="ij")
    rows = np.column_stack([uu.ravel(), vv.ravel()])
    scores = np.asarray(_binary_scores(record, rows), dtype=float)
    field = scores.reshape(resolution, resolution)
    return tuple(_marching_squares(g, g, field, 0.0))


def ddplot_from_model(model: TrainedModel, draw_separation: bool = True,
                      threads: int = 1) -> DDPlotResult:
    """Depth plot of a trained model's own training clouds.

    For two classes the single panel carries the separation boundary (when
    requested and the rule is not inherently multiclass); more classes give
    one scatter panel per pair without boundaries.
    """
    rows = depth_rows(np.vstack(model.clouds), model.class_stats, threads=threads)
    labels = np.repeat(np.arange(1, model.q + 1), model.cardinalities)
    base = ddplot_from_space(rows, labels)
    if model.q != 2 or not draw_separation:
        return base
    record = model.separators[0]
    if record.kind in ("maxdepth", "dknn"):
        return base
    panel = base.panels[0]
    return DDPlotResult(panels=(DDPlotPanel(
        index1=panel.index1, index2=panel.index2, points=panel.points,
        labels=panel.labels, boundary=_boundary_lines(record)),))


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------


def write_grid_csv(result, path) -> None:
    """Write a grid result as ``x,y,depth`` rows (x-major order)."""
    lines = ["x,y,depth"]
    for i, xv in enumerate(result.xs):
        for j, yv in enumerate(result.ys):
            lines.append(f"{xv:.17g},{yv:.17g},{result.values[i, j]:.17g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# SVG emitters
# ---------------------------------------------------------------------------


def _svg_head(width: float, height: float) -> str:
    return (f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{width:g}" height="{height:g}" '
            f'viewBox="0 0 {width:g} {height:g}">')


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _polyline(points, color: str, width: float = 1.0) -> str:
    coords = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in points)
    return (f'<polyline fill="none" stroke="{color}" '
            f'stroke-width="{width:g}" points="{coords}"/>')


class _Frame:
    """Maps data coordinates into a margined SVG viewport (y up)."""

    def __init__(self, lo, hi, size=480.0, margin=40.0):
        self.lo = np.asarray(lo, dtype=float)
        span = np.maximum(np.asarray(hi, dtype=float) - self.lo, 1e-12)
        self.scale = (size - 2 * margin) / span
        self.margin = margin
        self.size = size

    def map(self, x, y):
        u = self.margin + (x - self.lo[0]) * self.scale[0]
        v = self.size - self.margin - (y - self.lo[1]) * self.scale[1]
        return u, v


def _axes(frame: _Frame, xlabel: str, ylabel: str) -> list[str]:
    m, s = frame.margin, frame.size
    out = [f'<rect x="{m:g}" y="{m:g}" width="{s - 2 * m:g}" '
           f'height="{s - 2 * m:g}" fill="none" stroke="#000000"/>']
    out.append(f'<text x="{s / 2:g}" y="{s - m / 3:g}" font-size="14" '
               f'text-anchor="middle" font-family="sans-serif">{xlabel}</text>')
    out.append(f'<text x="{m / 3:g}" y="{s / 2:g}" font-size="14" '
               f'text-anchor="middle" font-family="sans-serif" '
               f'transform="rotate(-90 {m / 3:g} {s / 2:g})">{ylabel}</text>')
    return out


def render_contours_svg(result: ContourResult, path=None,
                        size: float = 480.0) -> str:
    """Draw contour polylines over the data scatter; returns the SVG text."""
    lo = (result.xs[0], result.ys[0])
    hi = (result.xs[-1], result.ys[-1])
    frame = _Frame(lo, hi, size=size)
    parts = [_svg_head(size, size)]
    parts += _axes(frame, "x", "y")
    for px, py in result.points:
        u, v = frame.map(px, py)
        parts.append(f'<circle cx="{_fmt(u)}" cy="{_fmt(v)}" r="2" '
                     f'fill="#555555"/>')
    for level, line in result.polylines:
        color = _PALETTE[result.levels.index(level) % len(_PALETTE)]
        parts.append(_polyline([frame.map(px, py) for px, py in line], color))
    parts.append("</svg>")
    text = "\n".join(parts) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def render_surface_svg(result: SurfaceResult, path=None, size: float = 480.0,
                       theta: float = 40.0, phi: float = 25.0) -> str:
    """Draw the height field as an isometric wireframe; returns the SVG text.

    ``theta`` rotates the base plane (degrees), ``phi`` tilts it. The mesh
    is drawn back to front; data points ride at their own depth height.
    """
    th = math.radians(theta)
    ph = math.radians(phi)
    xs, ys, zz = result.xs, result.ys, result.values

    def project(x, y, z):
        nx = (x - xs[0]) / max(xs[-1] - xs[0], 1e-12)
        ny = (y - ys[0]) / max(ys[-1] - ys[0], 1e-12)
        rx = nx * math.cos(th) - ny * math.sin(th)
        ry = nx * math.sin(th) + ny * math.cos(th)
        return rx, ry * math.sin(ph) + z * math.cos(ph), ry

    # Corner-based frame so any rotation stays inside the viewport.
    corners = [project(x, y, z) for x in (xs[0], xs[-1])
               for y in (ys[0], ys[-1]) for z in (0.0, max(zz.max(), 1e-12))]
    us = [c[0] for c in corners]
    vs = [c[1] for c in corners]
    frame = _Frame((min(us), min(vs)), (max(us), max(vs)), size=size, margin=30.0)

    rows = []
    for i in range(len(xs)):
        line = [project(xs[i], y, zz[i, j]) for j, y in enumerate(ys)]
        rows.append((np.mean([p[2] for p in line]), 0, i, line))
    for j in range(len(ys)):
        line = [project(x, ys[j], zz[i, j]) for i, x in enumerate(xs)]
        rows.append((np.mean([p[2] for p in line]), 1, j, line))
    rows.sort(key=lambda r: (-r[0], r[1], r[2]))

    parts = [_svg_head(size, size)]
    for _, _, _, line in rows:
        parts.append(_polyline([frame.map(u, v) for u, v, _ in line],
                               "#1f77b4", width=0.6))
    order = np.lexsort((result.points[:, 1], result.points[:, 0]))
    for idx in order:
        px, py = result.points[idx]
        u, v, _ = project(px, py, result.point_depths[idx])
        mu, mv = frame.map(u, v)
        parts.append(f'<circle cx="{_fmt(mu)}" cy="{_fmt(mv)}" r="2.5" '
                     f'fill="#d62728"/>')
    parts.append("</svg>")
    text = "\n".join(parts) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def render_ddplot_svg(result: DDPlotResult, path=None,
                      size: float = 480.0) -> str:
    """Draw depth-plot panels side by side; returns the SVG text.

    Each panel is the unit square with axes labeled by class column
    (``C1``, ``C2``, ...), class-colored scatter, and any boundary lines.
    """
    k = len(result.panels)
    parts = [_svg_head(size * k, size)]
    for p, panel in enumerate(result.panels):
        frame = _Frame((0.0, 0.0), (1.0, 1.0), size=size)
        shift = p * size
        parts.append(f'<g transform="translate({shift:g} 0)">')
        parts += _axes(frame, f"C{panel.index1}", f"C{panel.index2}")
        for (px, py), lab in zip(panel.points, panel.labels):
            u, v = frame.map(px, py)
            color = _PALETTE[(int(lab) - 1) % len(_PALETTE)]
            parts.append(f'<circle cx="{_fmt(u)}" cy="{_fmt(v)}" r="3" '
                         f'fill="{color}"/>')
        for line in panel.boundary:
            parts.append(_polyline([frame.map(px, py) for px, py in line],
                                   "#000000", width=1.5))
        parts.append("</g>")
    parts.append("</svg>")
    text = "\n".join(parts) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def render_functions_svg(sample, path=None, size: float = 480.0) -> str:
    """Draw each function as a polyline, colored by class when labeled."""
    if sample.n == 0:
        raise ParameterError("`sample` must contain at least one function")
    all_args = np.concatenate([a for a, _ in sample.observations])
    all_vals = np.concatenate([v for _, v in sample.observations])
    frame = _Frame((all_args.min(), all_vals.min()),
                   (all_args.max(), all_vals.max()), size=size)
    parts = [_svg_head(size, size)]
    parts += _axes(frame, "t", "f(t)")
    for i, (args, vals) in enumerate(sample.observations):
        color = "#555555" if sample.labels is None else \
            _PALETTE[(int(sample.labels[i]) - 1) % len(_PALETTE)]
        parts.append(_polyline([frame.map(a, v) for a, v in zip(args, vals)],
                               color))
    parts.append("</svg>")
    text = "\n".join(parts) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
