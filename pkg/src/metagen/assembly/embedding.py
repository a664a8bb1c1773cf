"""Placing a CP in the unit cell."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..cp import POLYTOPES, EntityRef, resolve_entity
from ..errors import InvertedBox, NotPowerOfTwoReciprocal, UnknownCorner

MAX_K = 6
_TOL = 1e-12


def dyadic_k(x, what: str = "length") -> int:
    """Return k if x == 1/2**k with 0 <= k <= 6, else raise."""
    try:
        x = float(x)
    except (TypeError, ValueError):
        raise NotPowerOfTwoReciprocal(f"{what} must be a number, got {x!r}") from None
    if x > 0 and math.isfinite(x):
        k = round(-math.log2(x))
        if 0 <= k <= MAX_K and abs(x - 2.0 ** -k) <= _TOL:
            return k
    raise NotPowerOfTwoReciprocal(f"{what} {x:g} is not 1/2^k for an integer k in [0, {MAX_K}]")


def _on_grid(x: float) -> bool:
    """Multiple of the finest allowed cell size 2^-6."""
    return abs(x * 2 ** MAX_K - round(x * 2 ** MAX_K)) <= 1e-9


@dataclass(frozen=True, eq=False)
class Embedding:
    """Affine placement x_world = A @ x_canonical + b of a CP."""
    polytope: str
    A: np.ndarray
    b: np.ndarray
    corner_at_min: str = None

    @property
    def cp(self):
        return POLYTOPES[self.polytope]

    @property
    def corner_positions(self) -> dict:
        pts = self.to_world(self.cp.corner_coords)
        return {n: pts[i] for i, n in enumerate(self.cp.corner_names)}

    @property
    def lo(self) -> np.ndarray:
        return self.to_world(self.cp.corner_coords).min(axis=0)

    @property
    def hi(self) -> np.ndarray:
        return self.to_world(self.cp.corner_coords).max(axis=0)

    @property
    def sizes(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def flips(self) -> np.ndarray:
        """Axes along which canonical coordinates run opposite to world axes."""
        return np.diag(self.A) < 0

    def to_world(self, pts) -> np.ndarray:
        return np.asarray(pts, dtype=float) @ self.A.T + self.b

    def describe(self) -> str:
        if self.polytope == "cuboid":
            lo, hi = self.lo, self.hi
            return (f"cuboid.embed_via_minmax([{', '.join(f'{x:g}' for x in lo)}], "
                    f"[{', '.join(f'{x:g}' for x in hi)}], {self.corner_at_min})")
        return f"{self.polytope}.embed({self.sizes[0]:g})"


def _corner(corner) -> EntityRef:
    if isinstance(corner, EntityRef):
        if corner.polytope != "cuboid" or corner.category != "corners":
            raise UnknownCorner(f"{corner} is not a cuboid corner")
        return corner
    try:
        return resolve_entity("cuboid", "corners", str(corner))
    except Exception as e:  # UnknownEntity carries suggestions; keep the message
        raise UnknownCorner(str(e)) from None


def embed_via_minmax(min_pt, max_pt, corner_at_min="FRONT_BOTTOM_LEFT") -> Embedding:
    lo = np.asarray(min_pt, dtype=float).reshape(3)
    hi = np.asarray(max_pt, dtype=float).reshape(3)
    if np.any(hi <= lo):
        raise InvertedBox(f"max point {hi.tolist()} must exceed min point {lo.tolist()} "
                          "in every component")
    for axis, (a, c) in enumerate(zip(lo, hi)):
        dyadic_k(c - a, f"side {'xyz'[axis]}")
        if not (0.0 <= a and c <= 1.0 + _TOL and _on_grid(a)):
            raise NotPowerOfTwoReciprocal(
                f"box corner coordinate {a:g} must lie in [0, 1] on the 1/{2 ** MAX_K} grid")
    corner = _corner(corner_at_min)
    cp = POLYTOPES["cuboid"]
    c = cp.corner_coords[cp.corner_names.index(corner.name)]
    size = hi - lo
    # the named corner lands on lo; its edge-neighbours run along +x/+y/+z
    sign = np.where(c > 0.5, -1.0, 1.0)
    A = np.diag(sign * size)
    b = lo + np.where(c > 0.5, size, 0.0)
    return Embedding("cuboid", A, b, corner.name)


def embed_cuboid(width, height, depth, corner_at_min="FRONT_BOTTOM_LEFT") -> Embedding:
    """Axis-aligned box anchored at the origin.

    width runs along x (LEFT-RIGHT), depth along y (FRONT-BACK) and height
    along z (BOTTOM-TOP).
    """
    size = np.array([width, depth, height], dtype=float)
    for name, s in (("width", width), ("height", height), ("depth", depth)):
        dyadic_k(s, name)
    return embed_via_minmax(np.zeros(3), size, corner_at_min)


def embed_simplex(kind: str, bbox_side) -> Embedding:
    if kind not in ("tet", "triPrism"):
        raise ValueError(kind)
    dyadic_k(bbox_side, "bounding box side")
    s = float(bbox_side)
    return Embedding(kind, s * np.eye(3), np.zeros(3))
