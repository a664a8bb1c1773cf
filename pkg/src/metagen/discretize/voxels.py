"""Voxel sampling of a StructureIR on the unit cell."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..assembly.structure import structure_field
from ..errors import ResolutionRange

R_MIN, R_MAX = 2, 512
BATCH = 1 << 15


def check_resolution(R) -> int:
    if isinstance(R, bool) or int(R) != R or not (R_MIN <= R <= R_MAX):
        raise ResolutionRange(f"resolution must be an integer in [{R_MIN}, {R_MAX}], got {R!r}")
    return int(R)


def sample_field(ir, points: np.ndarray, mode: str = "auto", batch: int = BATCH) -> np.ndarray:
    """structure_field in fixed-size batches (bounds peak memory, same values)."""
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    out = np.empty(len(points))
    for s in range(0, len(points), batch):
        out[s:s + batch] = structure_field(ir, points[s:s + batch], mode)
    return out


def lattice(coords: np.ndarray) -> np.ndarray:
    """All (x, y, z) triples with ij indexing, flattened to (n^3, 3)."""
    g = np.meshgrid(coords, coords, coords, indexing="ij")
    return np.stack([a.ravel() for a in g], axis=1)


@dataclass
class VoxelGrid:
    """occupancy[i, j, k] is the cell centred at ((i+.5)/R, (j+.5)/R, (k+.5)/R)."""
    occupancy: np.ndarray

    @property
    def resolution(self) -> int:
        return self.occupancy.shape[0]

    @property
    def volume_fraction(self) -> float:
        return float(np.count_nonzero(self.occupancy)) / self.occupancy.size


def voxelize(ir, R: int, supersample: int = 1, mode: str = "auto") -> VoxelGrid:
    """Center-sampled occupancy.  ``supersample`` > 1 takes a majority vote of
    s^3 sub-samples per voxel instead (off by default)."""
    R = check_resolution(R)
    s = int(supersample)
    if s <= 1:
        c = (np.arange(R) + 0.5) / R
        occ = sample_field(ir, lattice(c), mode) < 0.0
        return VoxelGrid(occ.reshape(R, R, R))
    c = (np.arange(R * s) + 0.5) / (R * s)
    inside = (sample_field(ir, lattice(c), mode) < 0.0).reshape(R, s, R, s, R, s)
    frac = inside.mean(axis=(1, 3, 5))
    return VoxelGrid(frac > 0.5)


def grid_from_array(occ) -> VoxelGrid:
    occ = np.asarray(occ, dtype=bool)
    if occ.ndim != 3 or len(set(occ.shape)) != 1:
        raise ResolutionRange(f"occupancy must be a cube array, got shape {occ.shape}")
    check_resolution(occ.shape[0])
    return VoxelGrid(occ)
