"""Tiles, the StructureIR tree, its solid field and a text report."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ..errors import IncompatiblePattern, MixedPolytopes
from ..lifting.lift import LiftedSkeleton, WorldGeometry
from .embedding import Embedding
from .patterns import PatternOp, TransformSet, expand_pattern

SHIFTS = np.array(list(itertools.product((-1, 0, 1), repeat=3)), dtype=float)


@dataclass(eq=False)
class Tile:
    lifted: tuple
    embedding: Embedding
    _geo: list = field(default=None, repr=False)

    def __post_init__(self):
        self.lifted = tuple(self.lifted)
        if not self.lifted:
            raise IncompatiblePattern("a Tile needs at least one lifted skeleton")
        for ls in self.lifted:
            if ls.polytope != self.embedding.polytope:
                raise MixedPolytopes(f"a {ls.polytope} skeleton cannot use a "
                                     f"{self.embedding.polytope} embedding")

    def geometry(self) -> list:
        if self._geo is None:
            e = self.embedding
            self._geo = [ls.world_geometry(e.A, e.b) for ls in self.lifted]
        return self._geo

    def field(self, pts: np.ndarray) -> np.ndarray:
        out = np.full(len(pts), np.inf)
        for g in self.geometry():
            np.minimum(out, g.field(pts), out=out)
        return out

    def bounds(self):
        geo = self.geometry()
        lo = np.min([g.lo for g in geo], axis=0)
        hi = np.max([g.hi for g in geo], axis=0)
        return lo, hi, max(g.margin for g in geo)


@dataclass(eq=False)
class Leaf:
    tile: Tile
    pattern: PatternOp
    transforms: TransformSet

    def field(self, pts: np.ndarray, mode: str = "auto") -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if mode != "enumerate" and self.transforms.fold is not None:
            return self.tile.field(self.transforms.fold(pts))
        if mode == "fold":
            raise IncompatiblePattern(f"{self.pattern.kind} has no exact fold")
        return self.enumerate_field(pts)

    def enumerate_field(self, pts: np.ndarray) -> np.ndarray:
        """min over isometries and lattice shifts, skipping provably farther copies."""
        lo, hi, margin = self.tile.bounds()
        best = np.full(len(pts), np.inf)
        # nearest candidates first so the culling bound tightens early
        def bound(T, sh):
            q = T.inverse_apply(pts - sh)
            gap = np.maximum(np.maximum(lo - q, q - hi), 0.0)
            return q, np.linalg.norm(gap, axis=1) - margin

        jobs = []
        for T in self.transforms.isometries:
            for sh in SHIFTS:
                jobs.append((float(bound(T, sh)[1].min()), T, sh))
        jobs.sort(key=lambda j: j[0])
        for first, T, sh in jobs:
            if first >= best.max():
                continue
            q, lb = bound(T, sh)
            idx = np.nonzero(lb < best)[0]
            if len(idx):
                best[idx] = np.minimum(best[idx], self.tile.field(q[idx]))
        return best


@dataclass(eq=False)
class Csg:
    op: str  # Union | Subtract | Intersect
    left: object
    right: object

    def field(self, pts: np.ndarray, mode: str = "auto") -> np.ndarray:
        a = self.left.field(pts, mode)
        b = self.right.field(pts, mode)
        if self.op == "Union":
            return np.minimum(a, b)
        if self.op == "Intersect":
            return np.maximum(a, b)
        return np.maximum(a, -b)


def make_structure(tile: Tile, pattern: PatternOp) -> Leaf:
    return Leaf(tile, pattern, expand_pattern(pattern, tile.embedding))


def structure_field(ir, points, mode: str = "auto") -> np.ndarray:
    """Signed solid field (negative inside) at world points.

    mode: "auto" folds mirror patterns when exact, "enumerate" always uses
    the explicit isometry list, "fold" requires folding.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return ir.field(pts, mode)


# generic sub-voxel offset so no sample sits on a shared mirror plane
PAINT_JITTER = np.array([1.0, np.sqrt(2.0), np.sqrt(3.0)]) * 1e-7


def paint_multiplicity(leaf: Leaf, R: int) -> np.ndarray:
    """How many (isometry, lattice shift) copies of the tile's CP domain
    cover each voxel centre of an R^3 grid."""
    emb = leaf.tile.embedding
    normals, offsets = emb.cp.face_planes()
    Ainv = np.linalg.inv(emb.A)
    corners = emb.to_world(emb.cp.corner_coords)
    count = np.zeros((R, R, R), dtype=np.int64)
    for T in leaf.transforms.isometries:
        img = T.apply(corners)
        for sh in SHIFTS:
            lo, hi = img.min(axis=0) + sh, img.max(axis=0) + sh
            # voxel index window whose centres can fall inside the image box
            i0 = np.maximum(np.floor(lo * R - 0.5).astype(int), 0)
            i1 = np.minimum(np.ceil(hi * R - 0.5).astype(int) + 1, R)
            if np.any(i1 <= i0):
                continue
            axes = [(np.arange(a, b) + 0.5) / R + PAINT_JITTER[k]
                    for k, (a, b) in enumerate(zip(i0, i1))]
            pts = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, 3)
            q = (T.inverse_apply(pts - sh) - emb.b) @ Ainv.T
            hit = np.all(q @ normals.T >= offsets, axis=1)
            count[i0[0]:i1[0], i0[1]:i1[1], i0[2]:i1[2]] += hit.reshape(i1 - i0)
    return count


def leaves(ir) -> list:
    if isinstance(ir, Leaf):
        return [ir]
    return leaves(ir.left) + leaves(ir.right)


def _fmt(v) -> str:
    return "[" + ", ".join(f"{x:.6g}" for x in np.asarray(v).ravel()) + "]"


def _report_path(path) -> str:
    kind = "Curve" if path.smooth else "Polyline"
    verts = ", ".join(f"{v.entity}" + (f"(t={_fmt(v.t)})" if v.t and v.entity.category != "corners"
                                       else "") for v in path.vertices)
    return f"{kind}{' closed' if path.closed else ''} [{verts}]"


def _report(ir, depth: int, out: list):
    pad = "  " * depth
    if isinstance(ir, Csg):
        out.append(f"{pad}{ir.op}")
        _report(ir.left, depth + 1, out)
        _report(ir.right, depth + 1, out)
        return
    t = ir.tile
    e = t.embedding
    out.append(f"{pad}Structure")
    out.append(f"{pad}  tile: {e.polytope} embedding {e.describe()}")
    for name, p in e.corner_positions.items():
        out.append(f"{pad}    corner {name} = {_fmt(p)}")
    for i, ls in enumerate(t.lifted):
        sk = ls.skeleton
        out.append(f"{pad}  lift {i}: {ls.describe()}")
        out.append(f"{pad}    skeleton: {sk.topology_class}, {len(sk.nodes)} node(s), "
                   f"{len(sk.components)} component(s), faces touched: "
                   f"{', '.join(sorted(sk.face_touch_set)) or '-'}")
        for item in sk.items:
            if sk.kind == "points":
                out.append(f"{pad}    vertex {item.entity}")
            else:
                out.append(f"{pad}    {_report_path(item)}")
    out.append(f"{pad}  pattern: {ir.pattern.describe()}")
    out.append(f"{pad}  transforms: {len(ir.transforms)}")
    for k, T in enumerate(ir.transforms.isometries):
        out.append(f"{pad}    T{k}: R={_fmt(T.R)} t={_fmt(T.t)}")


def transpile_report(ir) -> str:
    out: list = []
    _report(ir, 0, out)
    return "\n".join(out) + "\n"
