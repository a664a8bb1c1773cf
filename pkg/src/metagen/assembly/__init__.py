"""Embedding, patterning and CSG composition into a StructureIR."""
from .embedding import Embedding, dyadic_k, embed_cuboid, embed_simplex, embed_via_minmax
from .patterns import (IDENTITY, CustomOp, Isometry, PatternOp, TransformSet, expand_pattern,
                       tri_wave)
from .structure import (Csg, Leaf, Tile, leaves, make_structure, paint_multiplicity,
                        structure_field,
                        transpile_report)

__all__ = [
    "Embedding", "dyadic_k", "embed_cuboid", "embed_simplex", "embed_via_minmax",
    "IDENTITY", "CustomOp", "Isometry", "PatternOp", "TransformSet", "expand_pattern",
    "tri_wave", "Csg", "Leaf", "Tile", "leaves", "make_structure", "paint_multiplicity", "structure_field",
    "transpile_report",
]
