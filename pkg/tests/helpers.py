"""Shared fixtures for the test suite."""
import functools
import textwrap

import numpy as np

from metagen import corpus
from metagen.frontend import compile_source


def program(body: str, sig: str = "") -> str:
    """Wrap statement lines into a make_structure program."""
    inner = textwrap.indent(textwrap.dedent(body).strip("\n"), "    ")
    return f"from metagen import *\n\ndef make_structure({sig}) -> Structure:\n{inner}\n"


@functools.lru_cache(maxsize=None)
def corpus_ir(name: str, **overrides):
    return compile_source(corpus.load(name), overrides or None)


def sphere_ir(radius: float):
    """Sphere of the given radius centred in the unit cell."""
    return compile_source(corpus.load("floating_sphere"), {"radius": radius})


EMPTY_SRC = program("""
    v = vertex(cuboid.corners.BACK_TOP_RIGHT)
    a = Structure(Tile([Spheres(skeleton([v]), 0.3)], cuboid.embed(0.5, 0.5, 0.5)), CuboidFullMirror())
    return Subtract(a, a)
""")


MIRRORS = {"cuboid": "CuboidFullMirror", "tet": "TetFullMirror", "triPrism": "TriPrismFullMirror"}


def _random_vertex(poly, rng):
    from metagen.cp import POLYTOPES, make_vertex, resolve_entity

    cat = ("corners", "edges", "faces")[rng.integers(3)]
    names = POLYTOPES[poly].names(cat)
    ent = resolve_entity(poly, cat, names[rng.integers(len(names))])
    if cat == "corners":
        return make_vertex(ent)
    if cat == "edges":
        return make_vertex(ent, [float(rng.random())])
    a, b = float(rng.random()), float(rng.random())
    if len(ent.corners) == 3 and a + b > 1:
        a, b = 1 - a, 1 - b
    return make_vertex(ent, [a, b])


def random_mirror_structure(seed):
    """Seeded beam structure on a random CP, patterned with its FullMirror.

    Tile sides are 1/2 or 1/4 so the mirror lattice has even period.
    """
    from metagen.assembly import PatternOp, Tile, embed_cuboid, embed_simplex, make_structure
    from metagen.cp import build_skeleton, make_path
    from metagen.errors import MetagenError
    from metagen.lifting.lift import lift_spheres, lift_uniform_beams

    rng = np.random.default_rng(seed)
    poly = ("cuboid", "tet", "triPrism")[rng.integers(3)]
    if poly == "cuboid":
        w, h, d = (float(x) for x in rng.choice([0.5, 0.25], 3))
        emb = embed_cuboid(w, h, d)
    else:
        emb = embed_simplex(poly, float(rng.choice([0.5, 0.25])))
    while True:
        try:
            if rng.random() < 0.2:
                skel = build_skeleton([_random_vertex(poly, rng) for _ in range(2)])
                lifted = lift_spheres(skel, float(rng.uniform(0.03, 0.1)))
            else:
                n = int(rng.integers(2, 5))
                path = make_path([_random_vertex(poly, rng) for _ in range(n)], bool(rng.random() < 0.5))
                lifted = lift_uniform_beams(build_skeleton([path]), float(rng.uniform(0.02, 0.08)))
            break
        except MetagenError:
            continue
    return make_structure(Tile([lifted], emb), PatternOp(MIRRORS[poly]))
