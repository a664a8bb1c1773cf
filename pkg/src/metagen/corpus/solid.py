'''
sources: {}
file_info:
  author: hand-authored
  description: fully solid cell (a sphere large enough to cover it)
'''
from metagen import *

def make_structure(radius=1.0) -> Structure:
    skel = skeleton([vertex(cuboid.corners.FRONT_BOTTOM_LEFT)])
    tile = Tile([Spheres(skel, radius)], cuboid.embed(1, 1, 1))
    return Structure(tile, Identity())
