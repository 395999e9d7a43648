"""Triangle meshes of the strips, topology checks and OBJ output."""

from __future__ import annotations

import io
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .closed_form import SQRT2
from .core import TWO_PI, RealizationKind, check_delta, map_points
from .errors import PreconditionError


@dataclass
class SurfaceMesh:
    vertices: np.ndarray  # (V, 3)
    params: np.ndarray  # (V, 2), (t, r) per vertex
    faces: np.ndarray  # (F, 3) vertex indices
    welded: bool = False

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)


def _grid_faces(index: np.ndarray) -> np.ndarray:
    """Two triangles per quad of an ``(nt+1, nr+1)`` index grid, split along (i,j)-(i+1,j+1)."""
    a = index[:-1, :-1]
    b = index[1:, :-1]
    c = index[1:, 1:]
    d = index[:-1, 1:]
    lower = np.stack([a, b, c], axis=-1).reshape(-1, 3)
    upper = np.stack([a, c, d], axis=-1).reshape(-1, 3)
    # interleave so each quad's two triangles are adjacent in the face list
    return np.stack([lower, upper], axis=1).reshape(-1, 3)


def tessellate_rect(kind, t_range, r_range, nt: int, nr: int) -> SurfaceMesh:
    """Grid mesh of the image of a parameter rectangle (no seam identification)."""
    kind = RealizationKind.parse(kind)
    if nt < 1 or nr < 1:
        raise PreconditionError(f"need nt >= 1 and nr >= 1, got {nt}, {nr}")
    t = np.linspace(t_range[0], t_range[1], nt + 1)
    r = np.linspace(r_range[0], r_range[1], nr + 1)
    tt, rr = np.meshgrid(t, r, indexing="ij")
    params = np.column_stack([tt.ravel(), rr.ravel()])
    index = np.arange((nt + 1) * (nr + 1)).reshape(nt + 1, nr + 1)
    return SurfaceMesh(map_points(kind, params[:, 0], params[:, 1]), params, _grid_faces(index))


def tessellate(kind, delta: float, nt: int, nr: int, weld: bool = True) -> SurfaceMesh:
    """Mesh of the whole strip on the grid ``t_i = 2pi i/nt``, ``r_j = -delta + 2 delta j/nr``.

    With ``weld`` the column ``t = 2pi`` is not duplicated: its node ``j`` is
    the node ``nr - j`` of column 0, which realises the half-twist gluing.
    """
    kind = RealizationKind.parse(kind)
    delta = check_delta(delta)
    if nt < 3 or nr < 1:
        raise PreconditionError(f"tessellation needs nt >= 3 and nr >= 1, got nt={nt}, nr={nr}")
    if weld and nr % 2:
        raise PreconditionError(f"welding needs an even nr so the flipped seam column matches, got {nr}")
    n_cols = nt if weld else nt + 1
    t = TWO_PI * np.arange(n_cols) / nt
    r = -delta + 2.0 * delta * np.arange(nr + 1) / nr
    tt, rr = np.meshgrid(t, r, indexing="ij")
    params = np.column_stack([tt.ravel(), rr.ravel()])
    index = np.arange(n_cols * (nr + 1)).reshape(n_cols, nr + 1)
    if weld:
        index = np.vstack([index, index[0, ::-1]])
    vertices = map_points(kind, params[:, 0], params[:, 1])
    return SurfaceMesh(vertices, params, _grid_faces(index), welded=weld)


# --------------------------------------------------------------------------
# topology
# --------------------------------------------------------------------------

def edge_face_counts(faces) -> dict[tuple[int, int], int]:
    counts: dict[tuple[int, int], int] = defaultdict(int)
    for a, b, c in np.asarray(faces).tolist():
        for u, v in ((a, b), (b, c), (c, a)):
            counts[(u, v) if u < v else (v, u)] += 1
    return counts


def euler_characteristic(mesh: SurfaceMesh) -> int:
    used = np.unique(mesh.faces)
    return len(used) - len(edge_face_counts(mesh.faces)) + mesh.n_faces


def boundary_loops(mesh: SurfaceMesh) -> list[list[int]]:
    """Closed vertex cycles formed by edges with exactly one incident face."""
    adj: dict[int, list[int]] = defaultdict(list)
    for (u, v), n in edge_face_counts(mesh.faces).items():
        if n == 1:
            adj[u].append(v)
            adj[v].append(u)
    if any(len(nbrs) != 2 for nbrs in adj.values()):
        raise ValueError("boundary is not a disjoint union of simple cycles")
    loops = []
    seen: set[int] = set()
    for start in sorted(adj):
        if start in seen:
            continue
        loop = [start]
        seen.add(start)
        prev, cur = start, adj[start][0]
        while cur != start:
            loop.append(cur)
            seen.add(cur)
            a, b = adj[cur]
            prev, cur = cur, (b if a == prev else a)
        loops.append(loop)
    return loops


def degenerate_faces(mesh: SurfaceMesh) -> int:
    f = mesh.faces
    return int(((f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2])).sum())


# --------------------------------------------------------------------------
# patches around the self-intersection set
# --------------------------------------------------------------------------

class Interval(NamedTuple):
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def within(self, outer: "Interval") -> bool:
        lo_ok = self.lo > outer.lo or (self.lo == outer.lo and (outer.lo_closed or not self.lo_closed))
        hi_ok = self.hi < outer.hi or (self.hi == outer.hi and (outer.hi_closed or not self.hi_closed))
        return lo_ok and hi_ok


@dataclass(frozen=True)
class PatchSpec:
    name: str
    t_range: Interval
    r_range: Interval
    h2: float
    h3: float
    # intermediate box each rectangle is shown to sit in before the strip itself
    t_box: Interval
    r_box: Interval


def patch_angles(delta: float) -> tuple[float, float]:
    h2 = math.asin(min(delta, 2.0) / 2.0)
    return h2, math.pi - h2


def patch_specs(delta: float) -> list[PatchSpec]:
    """The four parameter rectangles bracketing the bottom and top halves of the doubled segment."""
    delta = check_delta(delta)
    if not delta > SQRT2:
        raise PreconditionError(f"patches need delta > sqrt(2) so the self-intersection set is nonempty, got {delta}")
    h2, h3 = patch_angles(delta)
    # 2 sin h2 = min(delta, 2), cos h3 = -cos h2, 2 h3 = 2pi - 2 h2: exact forms keep the
    # inclusions below from failing by an ulp
    s2 = min(delta, 2.0)
    c2 = math.sqrt((2.0 - s2) * (2.0 + s2))
    pi = math.pi
    return [
        PatchSpec("S1_bot", Interval(pi / 2, 2 * h2), Interval(-SQRT2, -c2), h2, h3,
                  Interval(0.0, pi, False, True), Interval(-SQRT2, 0.0)),
        PatchSpec("S1_top", Interval(TWO_PI - 2 * h2, 3 * pi / 2), Interval(c2, SQRT2), h2, h3,
                  Interval(pi, TWO_PI, True, False), Interval(0.0, SQRT2)),
        PatchSpec("S2_bot", Interval(pi - 2 * h2, pi / 2), Interval(-s2, -SQRT2), h2, h3,
                  Interval(0.0, pi, True, False), Interval(-delta, -SQRT2)),
        PatchSpec("S2_top", Interval(3 * pi / 2, pi + 2 * h2, True, False), Interval(SQRT2, s2), h2, h3,
                  Interval(pi, TWO_PI, False, False), Interval(SQRT2, delta)),
    ]


def patch_containments(spec: PatchSpec, delta: float) -> dict[str, bool]:
    strip_t = Interval(0.0, TWO_PI, True, False)
    strip_r = Interval(-delta, delta)
    return {
        "rect_in_box": spec.t_range.within(spec.t_box) and spec.r_range.within(spec.r_box),
        "box_in_strip": spec.t_box.within(strip_t) and spec.r_box.within(strip_r),
    }


def figure_patches(delta: float, nt: int = 64, nr: int = 32) -> list[tuple[PatchSpec, SurfaceMesh]]:
    """Meshes of the four patches (closed parameter rectangles, including S2_top's open end)."""
    out = []
    for spec in patch_specs(delta):
        t_range = (spec.t_range.lo, spec.t_range.hi)
        r_range = (spec.r_range.lo, spec.r_range.hi)
        out.append((spec, tessellate_rect(RealizationKind.SIMPLE, t_range, r_range, nt, nr)))
    return out


# --------------------------------------------------------------------------
# Wavefront OBJ
# --------------------------------------------------------------------------

def _fmt(v: float) -> str:
    return f"{v + 0.0:.9g}"


def export_obj(mesh: SurfaceMesh) -> bytes:
    """``v x y z`` lines (9 significant digits) then 1-based ``f i j k`` lines, LF endings."""
    buf = io.StringIO()
    for x, y, z in mesh.vertices.tolist():
        buf.write(f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}\n")
    for a, b, c in mesh.faces.tolist():
        buf.write(f"f {a + 1} {b + 1} {c + 1}\n")
    return buf.getvalue().encode("utf-8")


def read_obj(data: bytes) -> tuple[np.ndarray, np.ndarray]:
    """Vertices and 0-based triangle faces of an OBJ byte string (``v``/``f`` records only)."""
    verts, faces = [], []
    for line in data.decode("utf-8").splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(p) for p in parts[1:4]])
        elif parts[0] == "f":
            faces.append([int(p.split("/")[0]) - 1 for p in parts[1:4]])
    return np.array(verts, dtype=float).reshape(-1, 3), np.array(faces, dtype=np.int64).reshape(-1, 3)
