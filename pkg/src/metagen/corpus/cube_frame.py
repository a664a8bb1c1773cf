'''
sources: {}
file_info:
  author: hand-authored
  description: simple cubic frame, one beam per cuboid edge
'''
from metagen import *

def edge_beam(name_a, name_b):
    return Polyline([vertex(name_a), vertex(name_b)])

def make_structure(beam_d=0.06) -> Structure:
    c = cuboid.corners
    paths = [
        edge_beam(c.FRONT_BOTTOM_LEFT, c.FRONT_BOTTOM_RIGHT),
        edge_beam(c.BACK_BOTTOM_LEFT, c.BACK_BOTTOM_RIGHT),
        edge_beam(c.FRONT_TOP_LEFT, c.FRONT_TOP_RIGHT),
        edge_beam(c.BACK_TOP_LEFT, c.BACK_TOP_RIGHT),
        edge_beam(c.FRONT_BOTTOM_LEFT, c.BACK_BOTTOM_LEFT),
        edge_beam(c.FRONT_BOTTOM_RIGHT, c.BACK_BOTTOM_RIGHT),
        edge_beam(c.FRONT_TOP_LEFT, c.BACK_TOP_LEFT),
        edge_beam(c.FRONT_TOP_RIGHT, c.BACK_TOP_RIGHT),
        edge_beam(c.FRONT_BOTTOM_LEFT, c.FRONT_TOP_LEFT),
        edge_beam(c.FRONT_BOTTOM_RIGHT, c.FRONT_TOP_RIGHT),
        edge_beam(c.BACK_BOTTOM_LEFT, c.BACK_TOP_LEFT),
        edge_beam(c.BACK_BOTTOM_RIGHT, c.BACK_TOP_RIGHT),
    ]
    skel = skeleton(paths)
    beams = UniformBeams(skel, beam_d)
    tile = Tile([beams], cuboid.embed(0.5, 0.5, 0.5, cornerAtAABBMin=cuboid.corners.FRONT_BOTTOM_LEFT))
    return Structure(tile, CuboidFullMirror())
