"""Iso-surface extraction and OBJ input/output."""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from skimage.measure import marching_cubes

from ..errors import EmptyMesh, IoFailure
from .voxels import check_resolution, lattice, sample_field

WELD_TOL = 1e-7
# caps on the cell faces sit this fraction of a lattice step outside the cell
CAP_OFFSET = 1e-4


@dataclass
class TriMesh:
    vertices: np.ndarray  # (n, 3) float
    triangles: np.ndarray  # (m, 3) int

    @property
    def normals(self) -> np.ndarray:
        v = self.vertices[self.triangles]
        n = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
        ln = np.linalg.norm(n, axis=1, keepdims=True)
        return n / np.where(ln > 0, ln, 1.0)

    def signed_volume(self) -> float:
        v = self.vertices[self.triangles]
        return float(np.einsum("ij,ij->i", v[:, 0], np.cross(v[:, 1], v[:, 2])).sum() / 6.0)

    def edge_counts(self) -> dict:
        """Undirected edge -> number of incident triangles."""
        e = np.sort(self.triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
        keys, counts = np.unique(e, axis=0, return_counts=True)
        return {tuple(k): int(c) for k, c in zip(keys.tolist(), counts)}

    def is_closed(self) -> bool:
        e = np.sort(self.triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
        _, counts = np.unique(e, axis=0, return_counts=True)
        return bool(len(counts)) and bool(np.all(counts == 2))

    def euler_characteristic(self) -> int:
        e = np.sort(self.triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
        ne = len(np.unique(e, axis=0))
        nv = len(np.unique(self.triangles))
        return nv - ne + len(self.triangles)


def weld(V: np.ndarray, T: np.ndarray, tol: float = WELD_TOL) -> TriMesh:
    """Merge vertices on a tol-grid, drop degenerate and unused entries."""
    key = np.round(V / tol).astype(np.int64)
    _, first, inv = np.unique(key, axis=0, return_index=True, return_inverse=True)
    inv = inv.ravel()
    V, T = V[first], inv[T]
    ok = (T[:, 0] != T[:, 1]) & (T[:, 1] != T[:, 2]) & (T[:, 0] != T[:, 2])
    T = T[ok]
    p = V[T]
    area2 = np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)
    T = T[area2 > 0.0]
    used, T = np.unique(T, return_inverse=True)
    return TriMesh(V[used], T.reshape(-1, 3).astype(np.int64))


def extract_mesh(ir, R: int, mode: str = "auto") -> TriMesh:
    """Closed iso-0 surface of the base cell from an (R+1)^3 field lattice.

    The lattice is padded by one positive layer so solid touching the cell
    faces gets capped; the pad value puts each cap a tiny fraction of a step
    outside the cell, keeping the triangles non-degenerate.
    """
    R = check_resolution(R)
    n = R + 1
    f = sample_field(ir, lattice(np.linspace(0.0, 1.0, n)), mode).reshape(n, n, n)
    if not (f < 0.0).any():
        raise EmptyMesh("the structure has no solid inside the unit cell")
    g = np.pad(f, 1, mode="edge")
    border = np.ones_like(g, dtype=bool)
    border[1:-1, 1:-1, 1:-1] = False
    # linear crossing at CAP_OFFSET of a step: 0 = f + (p - f) * eps
    inside = g < 0
    g[border] = np.where(inside[border], g[border] * (1.0 - 1.0 / CAP_OFFSET), 1.0)
    h = 1.0 / R
    V, T, _, _ = marching_cubes(g, level=0.0, spacing=(h, h, h), allow_degenerate=False)
    V = V - h
    mesh = weld(V.astype(float), T.astype(np.int64))
    if len(mesh.triangles) == 0:
        raise EmptyMesh("iso-surface extraction produced no triangles")
    if mesh.signed_volume() < 0.0:
        mesh.triangles = mesh.triangles[:, ::-1].copy()
    return mesh


def voxel_surface(occ: np.ndarray) -> TriMesh:
    """Boundary quads of occupied voxels as triangles (debug view)."""
    occ = np.asarray(occ, dtype=bool)
    R = occ.shape[0]
    p = np.pad(occ, 1)
    quads = []
    cube = np.array(np.meshgrid([0, 1], [0, 1], [0, 1], indexing="ij")).reshape(3, -1).T
    for axis in range(3):
        for sgn in (-1, 1):
            nb = np.roll(p, -sgn, axis=axis)[1:-1, 1:-1, 1:-1]
            idx = np.argwhere(occ & ~nb)
            if not len(idx):
                continue
            face = cube[cube[:, axis] == (1 if sgn > 0 else 0)].astype(float)
            a, b = [k for k in range(3) if k != axis]
            ang = np.arctan2(face[:, b] - 0.5, face[:, a] - 0.5)
            face = face[np.argsort(ang)]
            nrm = np.cross(face[1] - face[0], face[2] - face[0])
            if nrm[axis] * sgn < 0:
                face = face[::-1]
            quads.append((idx[:, None, :] + face[None]) / R)
    if not quads:
        raise EmptyMesh("no occupied voxels")
    Q = np.concatenate(quads)
    V = Q.reshape(-1, 3)
    base = np.arange(len(Q)) * 4
    T = np.concatenate([np.stack([base, base + 1, base + 2], 1),
                        np.stack([base, base + 2, base + 3], 1)])
    mesh = weld(V, T)
    if mesh.signed_volume() < 0:
        mesh.triangles = mesh.triangles[:, ::-1].copy()
    return mesh


def _g9(x: float) -> str:
    s = f"{x:.9g}"
    return "0" if s == "-0" else s


def obj_text(mesh: TriMesh) -> str:
    lines = [f"v {_g9(x)} {_g9(y)} {_g9(z)}" for x, y, z in mesh.vertices.tolist()]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.triangles.tolist()]
    return "\n".join(lines) + "\n"


def export_obj(mesh: TriMesh, path) -> None:
    try:
        with open(os.fspath(path), "w", encoding="ascii", newline="\n") as fh:
            fh.write(obj_text(mesh))
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from None


def read_obj(path) -> TriMesh:
    V, T = [], []
    try:
        with open(os.fspath(path), encoding="ascii") as fh:
            for line in fh:
                parts = line.split()
                if not parts:
                    continue
                if parts[0] == "v":
                    V.append([float(x) for x in parts[1:4]])
                elif parts[0] == "f":
                    T.append([int(x.split("/")[0]) - 1 for x in parts[1:4]])
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from None
    return TriMesh(np.array(V, dtype=float).reshape(-1, 3), np.array(T, dtype=np.int64).reshape(-1, 3))
