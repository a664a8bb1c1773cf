'''
sources: {}
file_info:
  author: hand-authored
  description: a single sphere at the cell centre (not load-bearing)
'''
from metagen import *

def make_structure(radius=0.2) -> Structure:
    skel = skeleton([vertex(cuboid.corners.BACK_TOP_RIGHT)])
    tile = Tile([Spheres(skel, radius)], cuboid.embed(0.5, 0.5, 0.5))
    return Structure(tile, CuboidFullMirror())
