"""Voxels, meshes, OBJ files and renders."""
from .mesh import TriMesh, export_obj, extract_mesh, obj_text, read_obj, voxel_surface, weld
from .render import VIEWS, Camera, RenderImage, render, render_views, save_png, save_ppm
from .voxels import VoxelGrid, check_resolution, grid_from_array, lattice, sample_field, voxelize

__all__ = [
    "TriMesh", "export_obj", "extract_mesh", "obj_text", "read_obj", "voxel_surface", "weld",
    "VIEWS", "Camera", "RenderImage", "render", "render_views", "save_png", "save_ppm",
    "VoxelGrid", "check_resolution", "grid_from_array", "lattice", "sample_field", "voxelize",
]
