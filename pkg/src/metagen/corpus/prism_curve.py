'''
sources: {}
file_info:
  author: hand-authored
  description: curved beams in a triangular prism, mirrored through the cell
'''
from metagen import *

def make_structure(beam_d=0.08) -> Structure:
    a = vertex(triPrism.corners.FRONT_BOTTOM_LEFT)
    b = vertex(triPrism.faces.RIGHT_QUAD, [0.5, 0.5])
    c = vertex(triPrism.corners.BACK_TOP)
    d = vertex(triPrism.corners.FRONT_BOTTOM_RIGHT)
    skel = skeleton([Curve([a, b, c]), Polyline([a, d])])
    beams = UniformBeams(skel, beam_d)
    tile = Tile([beams], triPrism.embed(0.5))
    return Structure(tile, TriPrismFullMirror())
