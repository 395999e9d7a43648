import math

import numpy as np
import pytest

from moebius import closed_form as cf
from moebius import mesh as M
from moebius.core import RealizationKind, eval_simple
from moebius.errors import PreconditionError

SIMPLE, COMMON = RealizationKind.SIMPLE, RealizationKind.COMMON


def identified_grid_counts(nt, nr):
    """V, E, F of the welded grid by explicit enumeration of identified nodes."""
    def node(i, j):
        return (0, nr - j) if i == nt else (i, j)

    verts, edges, faces = set(), set(), 0
    for i in range(nt):
        for j in range(nr):
            a, b, c, d = node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)
            for tri in ((a, b, c), (a, c, d)):
                faces += 1
                verts.update(tri)
                for u, v in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                    edges.add(frozenset((u, v)))
    return len(verts), len(edges), faces


def test_enumeration_of_small_welded_grid():
    # 8 columns x 3 rows; 24 + 16 + 16 edges (along t, along r, diagonals)
    assert identified_grid_counts(8, 2) == (24, 56, 32)


@pytest.mark.parametrize("nt, nr", [(8, 2), (3, 2), (12, 4), (64, 8)])
def test_welded_topology(nt, nr):
    m = M.tessellate(SIMPLE, 0.6, nt, nr, weld=True)
    V, E, F = identified_grid_counts(nt, nr)
    assert (m.n_vertices, m.n_faces) == (V, F)
    assert len(M.edge_face_counts(m.faces)) == E
    assert M.euler_characteristic(m) == 0
    loops = M.boundary_loops(m)
    assert [len(loop) for loop in loops] == [2 * nt]
    assert M.degenerate_faces(m) == 0


@pytest.mark.parametrize("kind", [SIMPLE, COMMON])
def test_unwelded_topology(kind):
    m = M.tessellate(kind, 1.0, 16, 5, weld=False)
    assert m.n_vertices == 17 * 6 and m.n_faces == 2 * 16 * 5
    assert M.euler_characteristic(m) == 1
    assert [len(loop) for loop in M.boundary_loops(m)] == [2 * (16 + 5)]


def test_weld_preserves_geometry_at_seam():
    m = M.tessellate(SIMPLE, 0.6, 16, 4, weld=True)
    for a, b, c in m.faces:
        for u, v in ((a, b), (b, c), (c, a)):
            assert np.linalg.norm(m.vertices[u] - m.vertices[v]) < 0.8  # an unflipped seam would give ~1.2


def test_vertices_match_map():
    m = M.tessellate(SIMPLE, 0.6, 8, 2)
    for (t, r), p in zip(m.params, m.vertices):
        assert np.allclose(eval_simple((t, r)), p, atol=0)


@pytest.mark.parametrize("nt, nr, weld", [(2, 2, True), (8, 0, False), (8, 3, True)])
def test_tessellate_preconditions(nt, nr, weld):
    with pytest.raises(PreconditionError):
        M.tessellate(SIMPLE, 1.0, nt, nr, weld=weld)


def test_odd_nr_allowed_without_weld():
    assert M.euler_characteristic(M.tessellate(SIMPLE, 1.0, 8, 3, weld=False)) == 1


def test_quad_split_direction():
    m = M.tessellate_rect(SIMPLE, (0.0, 1.0), (0.0, 1.0), 1, 1)
    assert m.faces.tolist() == [[0, 2, 3], [0, 3, 1]]


def test_obj_single_triangle():
    m = M.SurfaceMesh(np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, -0.0]]), np.zeros((3, 2)), np.array([[0, 1, 2]]))
    text = M.export_obj(m).decode()
    assert text == "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n"


def test_obj_round_trip_and_determinism():
    m = M.tessellate(SIMPLE, 0.6, 64, 8, weld=True)
    data = M.export_obj(m)
    assert data == M.export_obj(M.tessellate(SIMPLE, 0.6, 64, 8, weld=True))
    assert b"\r" not in data
    verts, faces = M.read_obj(data)
    assert verts.shape == m.vertices.shape and faces.shape == m.faces.shape
    assert np.array_equal(faces, m.faces)
    assert np.allclose(verts, m.vertices, atol=1e-8)


def test_patch_angles():
    h2, h3 = M.patch_angles(2.5)
    assert h2 == pytest.approx(math.pi / 2) and h3 == pytest.approx(math.pi / 2)
    h2, h3 = M.patch_angles(1.97)
    assert h2 == pytest.approx(1.3973740056992921, abs=1e-15)
    assert h3 == pytest.approx(1.7442186478905011, abs=1e-15)


@pytest.mark.parametrize("delta", [1.5, 1.97, 2.0, 2.5])
def test_patch_containments(delta):
    specs = M.patch_specs(delta)
    assert [s.name for s in specs] == ["S1_bot", "S1_top", "S2_bot", "S2_top"]
    for spec in specs:
        assert M.patch_containments(spec, delta) == {"rect_in_box": True, "box_in_strip": True}


@pytest.mark.parametrize("delta", [1.0, math.sqrt(2)])
def test_patches_need_self_intersections(delta):
    with pytest.raises(PreconditionError):
        M.patch_specs(delta)


def inside(iv, x, slack=1e-12):
    return iv.lo - slack <= x <= iv.hi + slack


def test_bottom_patches_cover_lower_segment():
    delta = 1.97
    s_min = cf.s_delta(delta)
    spec = {s.name: s for s in M.patch_specs(delta)}
    for s in np.linspace(s_min, 1.0, 50, endpoint=False):
        t1 = math.pi - math.asin(s)
        p1 = (t1, -2 * math.cos(t1 / 2))
        p2 = (math.pi - t1, -2 * math.sin(t1 / 2))
        assert inside(spec["S1_bot"].t_range, p1[0]) and inside(spec["S1_bot"].r_range, p1[1])
        assert inside(spec["S2_bot"].t_range, p2[0]) and inside(spec["S2_bot"].r_range, p2[1])
        for p in (p1, p2):
            assert np.allclose(eval_simple(p), (-1, 0, -s), atol=1e-6)


def test_figure_patches_meshes():
    out = M.figure_patches(1.97, 16, 8)
    assert len(out) == 4
    for spec, m in out:
        assert m.n_vertices == 17 * 9 and M.euler_characteristic(m) == 1
        assert m.params[:, 0].min() == spec.t_range.lo and m.params[:, 0].max() == spec.t_range.hi


def test_boundary_loops_rejects_pinched_boundary():
    # two triangles sharing one vertex only: that vertex has boundary degree 4
    m = M.SurfaceMesh(np.zeros((5, 3)), np.zeros((5, 2)), np.array([[0, 1, 2], [0, 3, 4]]))
    with pytest.raises(ValueError):
        M.boundary_loops(m)
