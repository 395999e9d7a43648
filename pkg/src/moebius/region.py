"""Boundary curves of the planar domain ``{g <= delta^2}`` by marching squares.

Cells are processed with corners numbered counter-clockwise.  Each output
segment runs from an inside-to-outside crossing to an outside-to-inside one,
so the region is always on the left of a polyline.  Ambiguous (saddle) cells
are resolved with the value at the cell centre.

``g`` is bounded near the excluded point (-1, 0): its limit along direction
``phi`` is ``4 cos^2 phi``.  A grid node that lands exactly on the point gets
the limit along the cell diagonals, 2.
"""

from __future__ import annotations

import io
import math
from typing import NamedTuple, Optional

import numpy as np

from .core import check_delta

SINGULAR_DIAGONAL_LIMIT = 2.0


class Polyline2(NamedTuple):
    points: np.ndarray  # (n, 2)
    closed: bool


def _g_grid(x, y):
    xp = x + 1.0
    num = (x - 1.0) * xp + y * y
    den = xp * xp + y * y
    with np.errstate(invalid="ignore", divide="ignore"):
        out = num * num / den
    return np.where(den == 0.0, SINGULAR_DIAGONAL_LIMIT, out)


def default_bbox(delta: float) -> tuple[float, float, float, float]:
    # |(x, y)| <= 1 + delta on the whole region
    half = delta + 1.5
    return (-half, half, -half, half)


def _extract(level: float, bbox, resolution: int) -> list[Polyline2]:
    x0, x1, y0, y1 = bbox
    xs = np.linspace(x0, x1, resolution + 1)
    ys = np.linspace(y0, y1, resolution + 1)
    vals = _g_grid(xs[:, None], ys[None, :])
    inside = vals <= level

    corners = np.stack([inside[:-1, :-1], inside[1:, :-1], inside[1:, 1:], inside[:-1, 1:]])
    n_in = corners.sum(axis=0)
    mixed = np.argwhere((n_in > 0) & (n_in < 4))

    point_cache: dict[tuple, tuple[float, float]] = {}

    def edge_point(key):
        if key in point_cache:
            return point_cache[key]
        kind, i, j = key
        if kind == "h":
            va, vb = vals[i, j], vals[i + 1, j]
            s = (level - va) / (vb - va)
            p = (xs[i] + s * (xs[i + 1] - xs[i]), ys[j])
        else:
            va, vb = vals[i, j], vals[i, j + 1]
            s = (level - va) / (vb - va)
            p = (xs[i], ys[j] + s * (ys[j + 1] - ys[j]))
        point_cache[key] = p
        return p

    segments: list[tuple[tuple, tuple]] = []
    for i, j in mixed.tolist():
        c = corners[:, i, j]
        edges = [("h", i, j), ("v", i + 1, j), ("h", i, j + 1), ("v", i, j)]
        crossings = [(e, bool(c[k])) for k, e in enumerate(edges) if c[k] != c[(k + 1) % 4]]
        n = len(crossings)
        step = 1
        if n == 4:
            centre = _g_grid(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]))
            step = 1 if centre <= level else -1
        for p, (edge, leaving) in enumerate(crossings):
            if leaving:
                segments.append((edge, crossings[(p + step) % n][0]))

    nxt = {start: end for start, end in segments}
    ends = set(nxt.values())
    visited: set[tuple] = set()
    chains: list[tuple[list[tuple], bool]] = []
    for start in [s for s, _ in segments if s not in ends]:
        chain = [start]
        cur = start
        while cur in nxt and cur not in visited:
            visited.add(cur)
            cur = nxt[cur]
            chain.append(cur)
        chains.append((chain, False))
    for start, _ in segments:
        if start in visited:
            continue
        chain = [start]
        visited.add(start)
        cur = nxt[start]
        while cur != start:
            visited.add(cur)
            chain.append(cur)
            cur = nxt[cur]
        chains.append((chain, True))

    out = []
    for chain, closed in chains:
        pts = [edge_point(k) for k in chain]
        dedup = [pts[0]]
        for p in pts[1:]:
            if p != dedup[-1]:
                dedup.append(p)
        if closed and len(dedup) > 1 and dedup[-1] == dedup[0]:
            dedup.pop()
        if len(dedup) >= 2:
            out.append(Polyline2(np.array(dedup, dtype=float), closed))
    return out


def _g_gradient(x, y):
    n = x * x + y * y - 1.0
    d = (x + 1.0) ** 2 + y * y
    gx = 2.0 * n * (2.0 * x * d - n * (x + 1.0)) / (d * d)
    gy = 2.0 * n * y * (2.0 * d - n) / (d * d)
    return gx, gy


def snap_to_level(points: np.ndarray, level: float, max_step: float, iterations: int = 8) -> np.ndarray:
    """Newton steps along the gradient of ``g`` toward ``g = level``.

    A vertex keeps its original position if a step would move it farther than
    ``max_step`` or fails to reduce the residual.
    """
    x, y = points[:, 0].copy(), points[:, 1].copy()
    x0, y0 = x.copy(), y.copy()
    for _ in range(iterations):
        with np.errstate(invalid="ignore", divide="ignore"):
            res = _g_grid(x, y) - level
            gx, gy = _g_gradient(x, y)
            scale = res / (gx * gx + gy * gy)
            nx, ny = x - scale * gx, y - scale * gy
            better = np.abs(_g_grid(nx, ny) - level) < np.abs(res)
        ok = np.isfinite(nx) & np.isfinite(ny) & better & (np.hypot(nx - x0, ny - y0) <= max_step)
        x = np.where(ok, nx, x)
        y = np.where(ok, ny, y)
    return np.column_stack([x, y])


def boundary_residual(polylines, delta: float, exclude_radius: float = 0.0) -> float:
    """Largest ``|g - delta^2|`` over polyline vertices farther than ``exclude_radius`` from (-1, 0)."""
    worst = 0.0
    for pl in polylines:
        x, y = pl.points[:, 0], pl.points[:, 1]
        keep = np.hypot(x + 1.0, y) > exclude_radius
        if keep.any():
            worst = max(worst, float(np.abs(_g_grid(x[keep], y[keep]) - delta * delta).max()))
    return worst


def region_boundary(delta: float, bbox: Optional[tuple] = None, resolution: int = 256,
                    tol: Optional[float] = None, max_resolution: int = 4096) -> list[Polyline2]:
    """Polylines of the level set ``g = delta^2`` inside ``bbox = (xmin, xmax, ymin, ymax)``.

    With ``tol``, vertices are first snapped onto the level set by Newton steps,
    then the grid is doubled until every vertex (away from the two cells around
    (-1, 0)) satisfies ``|g - delta^2| <= tol * delta^2``.
    """
    delta = check_delta(delta)
    if resolution < 16:
        raise ValueError(f"resolution must be at least 16, got {resolution}")
    bbox = default_bbox(delta) if bbox is None else tuple(float(v) for v in bbox)
    level = delta * delta
    while True:
        lines = _extract(level, bbox, resolution)
        if tol is None:
            return lines
        cell = max(bbox[1] - bbox[0], bbox[3] - bbox[2]) / resolution
        lines = [Polyline2(snap_to_level(pl.points, level, cell), pl.closed) for pl in lines]
        if resolution * 2 > max_resolution or boundary_residual(lines, delta, exclude_radius=2 * cell) <= tol * level:
            return lines
        resolution *= 2


def polylines_to_csv(polylines) -> str:
    """``x,y`` rows with 9 significant digits; polylines separated by a blank line.

    Closed polylines repeat their first point at the end.
    """
    buf = io.StringIO()
    buf.write("x,y\n")
    for n, pl in enumerate(polylines):
        if n:
            buf.write("\n")
        pts = pl.points
        if pl.closed:
            pts = np.vstack([pts, pts[:1]])
        for x, y in pts.tolist():
            buf.write(f"{x + 0.0:.9g},{y + 0.0:.9g}\n")
    return buf.getvalue()


def axis_crossings(polylines) -> list[float]:
    """x-coordinates where the polylines cross the line y = 0 (linear interpolation)."""
    xs = []
    for pl in polylines:
        pts = pl.points
        if pl.closed:
            pts = np.vstack([pts, pts[:1]])
        for (xa, ya), (xb, yb) in zip(pts[:-1].tolist(), pts[1:].tolist()):
            if ya == 0.0:
                xs.append(xa)
            elif (ya < 0.0) != (yb < 0.0) and yb != 0.0:
                xs.append(xa + (0.0 - ya) * (xb - xa) / (yb - ya))
    return sorted(set(xs))
