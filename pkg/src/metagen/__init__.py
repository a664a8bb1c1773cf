"""MetaDSL toolchain for procedural lattice metamaterials.

Programs are compiled by ``metagen.frontend`` into a structure IR whose
signed field (``ir.field``) drives voxelization, meshing, rendering and
periodic homogenization.
"""
__version__ = "0.1.0"
