'''
sources: {}
file_info:
  author: hand-authored
  description: body-centred beam lattice unioned with spherical nodes
'''
from metagen import *

def make_structure(beam_d=0.08, node_r=0.1) -> Structure:
    embed = cuboid.embed(0.5, 0.5, 0.5, cornerAtAABBMin=cuboid.corners.FRONT_BOTTOM_LEFT)
    v0 = vertex(cuboid.corners.FRONT_BOTTOM_LEFT)
    v1 = vertex(cuboid.corners.BACK_TOP_RIGHT)
    beams = UniformBeams(skeleton([Polyline([v0, v1])]), beam_d)
    lattice = Structure(Tile([beams], embed), CuboidFullMirror())

    nodes = Spheres(skeleton([vertex(cuboid.corners.FRONT_BOTTOM_LEFT),
                              vertex(cuboid.corners.BACK_TOP_RIGHT)]), node_r)
    joints = Structure(Tile([nodes], embed), CuboidFullMirror())
    return Union(lattice, joints)
