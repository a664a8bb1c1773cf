import json

import numpy as np
import pytest
from scipy import ndimage

from metagen import corpus
from metagen.discretize import voxelize
from metagen.homogenize import extract_properties
from metagen.quality import (ValidationReport, boundary_samples, check_compiles, check_physical,
                             check_tilable, validate_model)

from helpers import corpus_ir, program, random_mirror_structure, sphere_ir
from oracles import iso_tensor


def test_compiles_schwarz():
    ok, diag, ir = check_compiles(corpus.load("schwarz_p"))
    assert ok and diag == "" and ir is not None


def test_compiles_rejects_tile_return():
    ok, diag, _ = check_compiles(program("""
        v = vertex(cuboid.corners.FRONT_BOTTOM_LEFT)
        return Tile([Spheres(skeleton([v]), 0.1)], cuboid.embed(0.5, 0.5, 0.5))
    """))
    assert not ok and "TypeError" in diag


def test_compiles_suggests_entity():
    ok, diag, _ = check_compiles(program("""
        v = vertex(cuboid.corners.FRONT_BOTOM_LEFT)
        return Structure(Tile([Spheres(skeleton([v]), 0.1)], cuboid.embed(0.5, 0.5, 0.5)), Identity())
    """))
    assert not ok and "FRONT_BOTTOM_LEFT" in diag


def _flood_spanning(occ):
    """Reference: BFS over the explicit 3x3x3 block, 6-neighbourhood."""
    from collections import deque
    B = np.tile(occ, (3, 3, 3))
    n = B.shape[0]
    seen = np.zeros_like(B, dtype=bool)
    for start in zip(*np.nonzero(B[0])):
        s = (0,) + tuple(start)
        if seen[s]:
            continue
        seen[s] = True
        q, touched = deque([s]), set()
        while q:
            p = q.popleft()
            for ax in range(3):
                if p[ax] == 0:
                    touched.add((ax, 0))
                if p[ax] == n - 1:
                    touched.add((ax, 1))
                for d in (-1, 1):
                    r = list(p)
                    r[ax] += d
                    r = tuple(r)
                    if 0 <= r[ax] < n and B[r] and not seen[r]:
                        seen[r] = True
                        q.append(r)
        if len(touched) == 6:
            return True
    return False


def test_tilable_cases():
    assert check_tilable(np.ones((4, 4, 4), bool)) == (True, "")
    ok, why = check_tilable(voxelize(sphere_ir(0.3), 16))
    assert not ok and "not spanning" in why
    g = voxelize(corpus_ir("cube_frame"), 32)
    assert check_tilable(g)[0] and _flood_spanning(g.occupancy)


def test_tilable_against_flood_fill():
    rng = np.random.default_rng(0)
    for _ in range(30):
        occ = rng.random((6, 6, 6)) < rng.uniform(0.3, 0.7)
        # make opposite faces agree so only spanning is at stake
        occ[-1], occ[:, -1], occ[:, :, -1] = occ[0], occ[:, 0], occ[:, :, 0]
        assert check_tilable(occ)[0] == _flood_spanning(occ)


def test_boundary_mismatch():
    occ = np.zeros((6, 6, 6), bool)
    occ[:, 2:4, 2:4] = True
    occ[0, 0, 0] = True
    ok, why = check_tilable(occ)
    assert not ok and "boundary mismatch" in why


def test_tilable_invariances():
    g = voxelize(corpus_ir("bcc_nodes"), 16).occupancy
    ref = check_tilable(g)[0]
    for perm in ((1, 0, 2), (2, 1, 0)):
        assert check_tilable(np.transpose(g, perm))[0] == ref
    assert check_tilable(np.roll(g, 16, axis=0))[0] == ref


@pytest.mark.parametrize("seed", range(3))
def test_mirror_structures_have_periodic_faces(seed):
    ir = random_mirror_structure(seed)
    for R in (8, 13):
        for lo, hi in boundary_samples(ir, R):
            assert np.array_equal(lo, hi)


def test_physical_cases():
    C = iso_tensor(1.0, 0.45)
    assert check_physical(extract_properties(C, 1.0), C) == (True, "")
    d = extract_properties(C, 1.0).to_dict()
    assert check_physical(dict(d, E=1.5)) == (False, "E>1")
    ok, why = check_physical(dict(d, nu=float("nan")))
    assert not ok and "non-finite" in why
    bad = C.copy()
    bad[0, 1] += 1e-3
    assert check_physical(d, bad)[1] == "C not symmetric"


def test_validate_short_circuits():
    rep = validate_model("from metagen import *\ndef make_structure(:\n", R=8)
    assert not rep.compiled and rep.tilable is None and rep.physical is None
    assert not rep.overall
    rep = validate_model(corpus.load("floating_sphere"), R=16)
    assert rep.compiled and rep.tilable is False and rep.physical is None


def test_validate_frame_and_json():
    rep = validate_model(corpus.load("cube_frame"), R=32)
    assert rep.overall and rep.properties["E"] <= 1
    d = json.loads(rep.to_json(timings=False))
    assert "timings" not in d and d["overall"] is True
    again = validate_model(corpus.load("cube_frame"), R=32)
    assert again.to_json(timings=False) == rep.to_json(timings=False)
    assert isinstance(rep, ValidationReport)
