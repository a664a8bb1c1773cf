import numpy as np
import pytest
from PIL import Image

from metagen.discretize import (VIEWS, TriMesh, export_obj, extract_mesh,
                                grid_from_array, obj_text, read_obj, render, render_views,
                                save_png, save_ppm, voxel_surface, voxelize)
from metagen.discretize.render import BACKGROUND
from metagen.errors import EmptyMesh, ResolutionRange
from metagen.frontend import compile_source

from helpers import EMPTY_SRC, corpus_ir, sphere_ir


def test_solid_and_empty_volume():
    assert voxelize(corpus_ir("solid"), 8).volume_fraction == 1.0
    assert voxelize(compile_source(EMPTY_SRC), 8).volume_fraction == 0.0


@pytest.mark.parametrize("R", [1, 513, 2.5, True])
def test_resolution_range(R):
    with pytest.raises(ResolutionRange):
        voxelize(corpus_ir("solid"), R)


def test_sphere_volume_at_100():
    V = voxelize(sphere_ir(0.4), 100).volume_fraction
    assert abs(V - 4 / 3 * np.pi * 0.4 ** 3) < 0.01


def test_center_sampling_rule():
    ir = sphere_ir(0.3)
    g = voxelize(ir, 10)
    c = (np.arange(10) + 0.5) / 10
    X, Y, Z = np.meshgrid(c, c, c, indexing="ij")
    # centred sphere oracle
    inside = (X - 0.5) ** 2 + (Y - 0.5) ** 2 + (Z - 0.5) ** 2 < 0.3 ** 2
    assert np.array_equal(g.occupancy, inside)


def test_supersample_flag():
    ir = sphere_ir(0.3)
    a = voxelize(ir, 16, supersample=3).volume_fraction
    assert abs(a - 4 / 3 * np.pi * 0.027) < 0.01


def test_resolution_monotone_error():
    ir = corpus_ir("bcc_nodes")
    V = {R: voxelize(ir, R).volume_fraction for R in (16, 32, 64)}
    assert abs(V[32] - V[64]) <= abs(V[16] - V[32]) + 1e-3


def test_sphere_mesh_is_genus_zero():
    m = extract_mesh(sphere_ir(0.3), 24)
    assert m.is_closed() and m.euler_characteristic() == 2
    assert m.signed_volume() == pytest.approx(4 / 3 * np.pi * 0.027, rel=0.03)


def test_frame_mesh_half_edge_audit():
    m = extract_mesh(corpus_ir("cube_frame"), 32)
    assert set(m.edge_counts().values()) == {2}
    p = m.vertices[m.triangles]
    assert np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1).min() > 0
    assert m.triangles.min() >= 0 and m.triangles.max() < len(m.vertices)


def test_mesh_volume_matches_voxels():
    for name in ("cube_frame", "bcc_nodes"):
        ir = corpus_ir(name)
        R = 32
        assert abs(extract_mesh(ir, R).signed_volume() - voxelize(ir, R).volume_fraction) < 3 / R


def test_empty_mesh():
    with pytest.raises(EmptyMesh):
        extract_mesh(compile_source(EMPTY_SRC), 8)


def test_obj_single_triangle(tmp_path):
    m = TriMesh(np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0.123456789123]]), np.array([[0, 1, 2]]))
    lines = obj_text(m).splitlines()
    assert [l[0] for l in lines] == ["v", "v", "v", "f"]
    assert lines[-1] == "f 1 2 3"
    assert "0.123456789" in lines[2] and "0.1234567891" not in lines[2]


def test_obj_round_trip_and_determinism(tmp_path):
    m = extract_mesh(sphere_ir(0.3), 16)
    export_obj(m, tmp_path / "a.obj")
    export_obj(extract_mesh(sphere_ir(0.3), 16), tmp_path / "b.obj")
    assert (tmp_path / "a.obj").read_bytes() == (tmp_path / "b.obj").read_bytes()
    back = read_obj(tmp_path / "a.obj")
    assert back.vertices.shape == m.vertices.shape and np.array_equal(back.triangles, m.triangles)


def test_solid_front_view_fills_frame():
    img = render(extract_mesh(corpus_ir("solid"), 8), VIEWS[0], size=64)
    assert img.width == 64 and img.height == 64
    assert img.nonbackground_fraction() > 0.9
    px = img.pixels[8:56, 8:56].reshape(-1, 3)
    assert len(np.unique(px, axis=0)) == 1  # one flat-shaded face


def test_renders_background_and_determinism(tmp_path):
    m = extract_mesh(sphere_ir(0.3), 16)
    views = render_views(m, size=96)
    assert [v.name for v in views] == ["front", "top", "right", "angled"]
    for v in views:
        assert tuple(v.pixels[0, 0]) == BACKGROUND
        assert 0.1 < v.nonbackground_fraction() < 0.5
    again = render_views(m, size=96)
    assert all(np.array_equal(a.pixels, b.pixels) for a, b in zip(views, again))
    save_png(views[3], tmp_path / "x.png")
    assert np.array_equal(np.asarray(Image.open(tmp_path / "x.png")), views[3].pixels)
    save_ppm(views[3], tmp_path / "x.ppm")
    assert (tmp_path / "x.ppm").read_bytes().startswith(b"P6\n96 96\n255\n")


def test_front_view_orientation():
    # one ball near the low-x, low-z corner: front view looks along +y with x right, z up
    from helpers import program
    ir = compile_source(program("""
        v = vertex(cuboid.corners.FRONT_BOTTOM_LEFT)
        e = cuboid.embed_via_minmax([0.25, 0.25, 0.25], [0.5, 0.5, 0.5])
        return Structure(Tile([Spheres(skeleton([v]), 0.1)], e), Identity())
    """))
    img = render(extract_mesh(ir, 16), VIEWS[0], size=64)
    filled = np.any(img.pixels != 255, axis=2)
    rows, cols = np.nonzero(filled)
    assert rows.min() > 32 and cols.max() < 32  # bottom-left quadrant


def test_voxel_surface_debug_mode():
    occ = np.zeros((4, 4, 4), bool)
    occ[1:3, 1:3, 1:3] = True
    m = voxel_surface(occ)
    assert m.is_closed() and m.signed_volume() == pytest.approx(8 / 64)
    assert grid_from_array(occ).volume_fraction == 8 / 64
