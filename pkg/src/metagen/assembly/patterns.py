"""Pattern operators and their expansion into explicit isometry sets."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..cp import POLYTOPES, EntityRef
from ..errors import IncompatiblePattern, UnsupportedCustomPolytope
from .embedding import Embedding

FULL_MIRRORS = {"CuboidFullMirror": "cuboid", "TetFullMirror": "tet",
                "TriPrismFullMirror": "triPrism"}


@dataclass(frozen=True, eq=False)
class CustomOp:
    """One Mirror / Rotate180 / Translate step; ``inner`` is applied first."""
    op: str
    entities: tuple
    do_copy: bool
    inner: "CustomOp" = None

    def chain(self) -> list:
        """Steps in application order (innermost first)."""
        return (self.inner.chain() if self.inner else []) + [self]


@dataclass(frozen=True, eq=False)
class PatternOp:
    kind: str  # Identity | *FullMirror | Custom
    custom: CustomOp = None

    def describe(self) -> str:
        if self.kind != "Custom":
            return f"{self.kind}()"
        return f"Custom({_describe_op(self.custom)})"


def _describe_op(op: CustomOp) -> str:
    ents = ", ".join(str(e) for e in op.entities)
    if op.op == "Translate":
        args = ents
    elif op.op == "Rotate180":
        args = f"[{ents}]"
    else:
        args = ents
    inner = f", {_describe_op(op.inner)}" if op.inner else ""
    return f"{op.op}({args}, {op.do_copy}{inner})"


@dataclass(frozen=True, eq=False)
class Isometry:
    """p -> R @ p + t with R orthogonal."""
    R: np.ndarray
    t: np.ndarray

    def apply(self, p: np.ndarray) -> np.ndarray:
        return p @ self.R.T + self.t

    def inverse_apply(self, p: np.ndarray) -> np.ndarray:
        return (p - self.t) @ self.R

    def compose(self, other: "Isometry") -> "Isometry":
        """self after other."""
        return Isometry(self.R @ other.R, self.R @ other.t + self.t)

    def key(self) -> tuple:
        return tuple(np.round(np.concatenate([self.R.ravel(), self.t]), 9).tolist())


IDENTITY = Isometry(np.eye(3), np.zeros(3))


@dataclass(frozen=True, eq=False)
class TransformSet:
    isometries: tuple
    fold: object = None  # callable folding world points into the base tile, when exact

    def __len__(self):
        return len(self.isometries)


# ------------------------------------------------------------------ folds

def tri_wave(x: np.ndarray, lo, s) -> np.ndarray:
    """Mirror fold of x into [lo, lo + s] (period 2s)."""
    return lo + s - np.abs(np.mod(x - lo, 2 * s) - s)


def _cuboid_fold(lo, size):
    lo, size = np.asarray(lo, float), np.asarray(size, float)

    def fold(p):
        return tri_wave(p, lo, size)
    return fold


def _tet_fold(s):
    def fold(p):
        q = tri_wave(p, 0.0, s)
        return -np.sort(-q, axis=1)  # x >= y >= z
    return fold


def _prism_fold(s):
    def fold(p):
        q = tri_wave(p, 0.0, s)
        x, z = q[:, 0].copy(), q[:, 2].copy()
        m = x + z > s
        q[m, 0], q[m, 2] = s - z[m], s - x[m]
        return q
    return fold


# ------------------------------------------------------------ enumeration

def _cell_maps(lo, size):
    """Per-axis mirror images of [lo, lo+s] whose lower end wraps into [0, 1)."""
    per_axis = []
    for a in range(3):
        n = int(round(1.0 / size[a]))
        maps = []
        for j in range(n):
            low = lo[a] + j * size[a]
            shift = np.floor(low + 1e-12)
            if j % 2 == 0:
                maps.append((1.0, j * size[a] - shift))
            else:  # reflect across the far face of the base interval, then shift
                maps.append((-1.0, 2 * lo[a] + (j + 1) * size[a] - shift))
        per_axis.append(maps)
    out = []
    for (sx, tx), (sy, ty), (sz, tz) in itertools.product(*per_axis):
        out.append(Isometry(np.diag([sx, sy, sz]), np.array([tx, ty, tz])))
    return out


def _permutations():
    mats = []
    for perm in itertools.permutations(range(3)):
        P = np.zeros((3, 3))
        for i, j in enumerate(perm):
            P[i, j] = 1.0
        mats.append(P)
    return mats


def _full_mirror(kind: str, emb: Embedding) -> TransformSet:
    if FULL_MIRRORS[kind] != emb.polytope:
        raise IncompatiblePattern(f"{kind} cannot pattern a {emb.polytope} tile")
    lo, size = emb.lo, emb.sizes
    cells = _cell_maps(lo, size)
    if kind == "CuboidFullMirror":
        local = [IDENTITY]
        fold = _cuboid_fold(lo, size)
    elif kind == "TetFullMirror":
        local = [Isometry(P, np.zeros(3)) for P in _permutations()]
        fold = _tet_fold(size[0])
    else:
        s = size[0]
        hyp = Isometry(np.array([[0.0, 0, -1], [0, 1, 0], [-1, 0, 0]]), np.array([s, 0, s]))
        local = [IDENTITY, hyp]
        fold = _prism_fold(s)
    isos = [c.compose(l) for c in cells for l in local]
    # folding reproduces the enumeration only when the mirror lattice is 1-periodic
    exact = all(int(round(1.0 / x)) % 2 == 0 for x in size)
    return TransformSet(tuple(isos), fold if exact else None)


def _entity_point_set(ent: EntityRef, lo, hi, flips) -> np.ndarray:
    """World positions of the entity's corners on the box [lo, hi]."""
    cp = POLYTOPES["cuboid"]
    c = cp.corner_coords[list(ent.corners)]
    c = np.where(flips[None, :], 1.0 - c, c)
    return lo + c * (hi - lo)


def _custom_step(op: CustomOp, lo, hi, flips) -> Isometry:
    for e in op.entities:
        if not isinstance(e, EntityRef) or e.polytope != "cuboid":
            raise IncompatiblePattern(f"{op.op} expects cuboid entities, got {e}")
    if op.op == "Mirror":
        if len(op.entities) != 1 or op.entities[0].category != "faces":
            raise IncompatiblePattern("Mirror takes exactly one CP face")
        pts = _entity_point_set(op.entities[0], lo, hi, flips)
        axis = int(np.argmin(np.ptp(pts, axis=0)))
        n = np.zeros(3)
        n[axis] = 1.0
        c = pts.mean(axis=0)
        R = np.eye(3) - 2 * np.outer(n, n)
        return Isometry(R, 2 * (n @ c) * n)
    if op.op == "Rotate180":
        ents = op.entities
        if len(ents) == 1:
            if ents[0].category != "edges":
                raise IncompatiblePattern("a single Rotate180 axis entity must be a CP edge")
            pts = _entity_point_set(ents[0], lo, hi, flips)
            a, b = pts[0], pts[1]
        elif len(ents) == 2:
            a = _entity_point_set(ents[0], lo, hi, flips).mean(axis=0)
            b = _entity_point_set(ents[1], lo, hi, flips).mean(axis=0)
        else:
            raise IncompatiblePattern("Rotate180 takes one edge or two entities")
        d = b - a
        if np.linalg.norm(d) < 1e-12:
            raise IncompatiblePattern("Rotate180 axis entities coincide")
        u = d / np.linalg.norm(d)
        R = 2 * np.outer(u, u) - np.eye(3)
        return Isometry(R, a - R @ a)
    if op.op == "Translate":
        if len(op.entities) != 2 or any(e.category != "faces" for e in op.entities):
            raise IncompatiblePattern("Translate is implemented for CP faces only")
        a = _entity_point_set(op.entities[0], lo, hi, flips).mean(axis=0)
        b = _entity_point_set(op.entities[1], lo, hi, flips).mean(axis=0)
        return Isometry(np.eye(3), b - a)
    raise IncompatiblePattern(f"unknown pattern operation {op.op}")


def _bbox(isos, lo, hi):
    corners = np.array(list(itertools.product(*zip(lo, hi))))
    pts = np.vstack([g.apply(corners) for g in isos])
    return pts.min(axis=0), pts.max(axis=0)


def _custom(op: CustomOp, emb: Embedding) -> TransformSet:
    if emb.polytope != "cuboid":
        raise UnsupportedCustomPolytope(
            f"Custom patterns are only implemented for the cuboid CP, not {emb.polytope}")
    isos = [IDENTITY]
    lo0, hi0 = emb.lo, emb.hi
    lo, hi = lo0, hi0
    for step in op.chain():
        g = _custom_step(step, lo, hi, emb.flips)
        moved = [g.compose(T) for T in isos]
        isos = isos + moved if step.do_copy else moved
        lo, hi = _bbox(isos, lo0, hi0)
    # wrap every copy so its box starts inside [0, 1)
    out, seen = [], set()
    for T in isos:
        blo, _ = _bbox([T], lo0, hi0)
        T = Isometry(T.R, T.t - np.floor(blo + 1e-9))
        if T.key() not in seen:
            seen.add(T.key())
            out.append(T)
    return TransformSet(tuple(out), None)


def expand_pattern(pattern: PatternOp, embedding: Embedding) -> TransformSet:
    if pattern.kind == "Identity":
        return TransformSet((IDENTITY,), None)
    if pattern.kind in FULL_MIRRORS:
        return _full_mirror(pattern.kind, embedding)
    if pattern.kind == "Custom":
        return _custom(pattern.custom, embedding)
    raise IncompatiblePattern(f"unknown pattern {pattern.kind}")
