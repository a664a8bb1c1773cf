'''
sources:
  /literature/schwarz_p_surface: reference geometry of the primitive minimal surface
file_info:
  author: hand-authored
  description: Schwarz P shell from a four-edge loop in the tet CP
'''
from metagen import *

def make_structure(shell_thickness=0.03) -> Structure:
    v0 = vertex(tet.edges.BOTTOM_LEFT)
    v1 = vertex(tet.edges.TOP_LEFT)
    v2 = vertex(tet.edges.TOP_RIGHT)
    v3 = vertex(tet.edges.BOTTOM_RIGHT)

    c0 = Curve([v0, v1, v2, v3, v0])

    skel = skeleton([c0])
    shell = UniformTPMSShellViaConjugation(skel, shell_thickness)

    embedding = tet.embed(0.5)
    tile = Tile([shell], embedding)
    pat = TetFullMirror()
    obj = Structure(tile, pat)

    return obj
