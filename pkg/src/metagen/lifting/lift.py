"""Lifting procedures: skeleton -> solid recipe.

A ``LiftedSkeleton`` stores everything in canonical CP coordinates.  Once a
tile supplies the affine embedding, ``world_geometry`` turns the recipe into
world-space primitives (capsule chains, spheres, or a triangle set) whose
signed field is negative inside the solid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..cp import SHELL_KINDS, SkeletonSpec, check_lift_compat
from ..errors import NonPositiveThickness, ProfileNotIncreasing, ProfileRange
from .geometry import (SAMPLES_PER_SEGMENT, TriangleSet, catmull_rom, entity_frame,
                       project_to_affine, round_cone_field, sphere_field, spline_neighbors)
from .surfaces import DEFAULT_CONFIG, SolverConfig, SurfacePatch, solve_shell


def _check_thickness(x, what="thickness") -> float:
    try:
        x = float(x)
    except (TypeError, ValueError):
        raise NonPositiveThickness(f"{what} must be a number, got {x!r}") from None
    if not math.isfinite(x) or x <= 0.0:
        raise NonPositiveThickness(f"{what} must be positive and finite, got {x:g}")
    return x


def validate_profile(profile) -> tuple:
    """Normalize a thickness profile to ((t, diameter), ...)."""
    try:
        rows = [(float(r[0]), float(r[1])) for r in profile]
    except (TypeError, ValueError, IndexError):
        raise ProfileRange("a thickness profile is a list of [t, diameter] pairs") from None
    if len(rows) < 2:
        raise ProfileRange("a thickness profile needs at least 2 samples")
    ts = [t for t, _ in rows]
    for t in ts:
        if not (0.0 <= t <= 1.0):
            raise ProfileRange(f"profile position {t:g} outside [0, 1]")
    if any(b <= a for a, b in zip(ts[:-1], ts[1:])):
        raise ProfileNotIncreasing("profile positions must be strictly increasing")
    if ts[0] != 0.0 or ts[-1] != 1.0:
        raise ProfileRange("profile positions must start at 0 and end at 1")
    for _, d in rows:
        _check_thickness(d, "profile diameter")
    return tuple(rows)


def sample_path(path, cp) -> np.ndarray:
    """Canonical sample points of a path.

    Polylines are returned exactly.  Curves go through a centripetal
    Catmull-Rom spline, 16 samples per segment; every sample is pushed back
    onto the CP edge or face that hosts its segment and clamped into the CP,
    so incidence survives smoothing.
    """
    pts = np.array([v.canonical_position() for v in path.vertices])
    if not path.smooth:
        return pts
    ctrl = pts[:-1] if path.closed else pts
    out = []
    nseg = len(pts) - 1
    taus = np.arange(SAMPLES_PER_SEGMENT) / SAMPLES_PER_SEGMENT
    for i in range(nseg):
        p0, p1, p2, p3 = spline_neighbors(ctrl, i, path.closed)
        seg = catmull_rom(p0, p1, p2, p3, taus)
        seg[0] = pts[i]
        inc, host = path.segment_incidence[i], path.segment_hosts[i]
        if inc in ("on_cp_edge", "in_cp_face"):
            anchor, basis = entity_frame(cp, "edges" if inc == "on_cp_edge" else "faces", host)
            seg[1:] = project_to_affine(seg[1:], anchor, basis)
        seg[1:] = cp.clamp(seg[1:])
        out.append(seg)
    out.append(pts[-1:])
    return np.vstack(out)


# shell fields are exact within this distance of the shell and only
# guaranteed positive beyond it; meshing needs exact values near iso 0 only
SHELL_EXACT_BAND = 0.1


@dataclass
class WorldGeometry:
    """World-space primitives of one lifted skeleton."""
    kind: str
    seg_a: np.ndarray = None
    seg_b: np.ndarray = None
    rad_a: np.ndarray = None
    rad_b: np.ndarray = None
    centers: np.ndarray = None
    radius: float = 0.0
    tris: TriangleSet = None
    half: float = 0.0
    lo: np.ndarray = None  # bounds of the skeleton itself (no thickness)
    hi: np.ndarray = None
    margin: float = 0.0  # max distance from the skeleton to the solid boundary

    def field(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if self.kind == "beams":
            return round_cone_field(points, self.seg_a, self.seg_b, self.rad_a, self.rad_b)
        if self.kind == "spheres":
            return sphere_field(points, self.centers, self.radius)
        return self.tris.distance(points, cap=self.half + SHELL_EXACT_BAND) - self.half


@dataclass(eq=False)
class LiftedSkeleton:
    skeleton: SkeletonSpec
    kind: str
    thickness: float = None
    profile: tuple = None
    config: SolverConfig = field(default=DEFAULT_CONFIG, repr=False)
    _surface: SurfacePatch = field(default=None, repr=False)

    @property
    def polytope(self) -> str:
        return self.skeleton.polytope

    @property
    def is_shell(self) -> bool:
        return self.kind in SHELL_KINDS

    @property
    def surface(self) -> SurfacePatch:
        """Solved surface patch (shell kinds only), computed on first use."""
        if not self.is_shell:
            return None
        if self._surface is None:
            self._surface = solve_shell(self.skeleton, self.kind, self.config)
        return self._surface

    def canonical_paths(self) -> list:
        cp = self.skeleton.cp
        return [sample_path(p, cp) for p in self.skeleton.items]

    def world_geometry(self, A: np.ndarray, b: np.ndarray) -> WorldGeometry:
        """Primitives after the affine map x -> A x + b."""
        if self.kind == "Spheres":
            c = np.array([v.canonical_position() for v in self.skeleton.nodes]) @ A.T + b
            return WorldGeometry("spheres", centers=c, radius=self.thickness,
                                 lo=c.min(axis=0), hi=c.max(axis=0), margin=self.thickness)
        if self.is_shell:
            patch = self.surface
            V = patch.vertices @ A.T + b
            return WorldGeometry("shell", tris=TriangleSet(V, patch.triangles),
                                 half=0.5 * self.thickness, lo=V.min(axis=0), hi=V.max(axis=0),
                                 margin=0.5 * self.thickness)
        sa, sb, ra, rb = [], [], [], []
        for pts in self.canonical_paths():
            w = pts @ A.T + b
            if self.profile is None:
                r = np.full(len(w), 0.5 * self.thickness)
            else:
                w, r = _profile_radii(w, self.profile)
            sa.append(w[:-1])
            sb.append(w[1:])
            ra.append(r[:-1])
            rb.append(r[1:])
        sa, sb = np.vstack(sa), np.vstack(sb)
        ra, rb = np.concatenate(ra), np.concatenate(rb)
        allp = np.vstack([sa, sb])
        return WorldGeometry("beams", seg_a=sa, seg_b=sb, rad_a=ra, rad_b=rb,
                             lo=allp.min(axis=0), hi=allp.max(axis=0),
                             margin=float(max(ra.max(), rb.max())))

    def describe(self) -> str:
        if self.profile is not None:
            prof = ", ".join(f"[{t:g}, {d:g}]" for t, d in self.profile)
            return f"{self.kind}(profile=[{prof}])"
        return f"{self.kind}(thickness={self.thickness:g})"


def _profile_radii(w: np.ndarray, profile) -> tuple:
    """Insert profile breakpoints along normalized arc length; radius = diameter/2."""
    seg = np.linalg.norm(np.diff(w, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    u = s / total if total > 0 else np.linspace(0.0, 1.0, len(w))
    pt = np.array([t for t, _ in profile])
    pd = np.array([d for _, d in profile])
    extra = [t for t in pt if not np.any(np.abs(u - t) < 1e-12)]
    if extra:
        ux = np.array(extra)
        wx = np.stack([np.interp(ux, u, w[:, k]) for k in range(3)], axis=1)
        order = np.argsort(np.concatenate([u, ux]), kind="stable")
        u = np.concatenate([u, ux])[order]
        w = np.vstack([w, wx])[order]
    return w, 0.5 * np.interp(u, pt, pd)


def _make(skel, kind, thickness=None, profile=None, config=DEFAULT_CONFIG) -> LiftedSkeleton:
    check_lift_compat(skel, kind)
    return LiftedSkeleton(skel, kind, thickness, profile, config)


def lift_uniform_beams(skel: SkeletonSpec, thickness) -> LiftedSkeleton:
    return _make(skel, "UniformBeams", _check_thickness(thickness))


def lift_varying_beams(skel: SkeletonSpec, profile) -> LiftedSkeleton:
    """Beams whose diameter follows a piecewise-linear profile in arc length.

    A bare number is accepted as a constant diameter.
    """
    if isinstance(profile, (int, float)):
        d = _check_thickness(profile)
        return _make(skel, "SpatiallyVaryingBeams", d, ((0.0, d), (1.0, d)))
    prof = validate_profile(profile)
    return _make(skel, "SpatiallyVaryingBeams", max(d for _, d in prof), prof)


def lift_spheres(skel: SkeletonSpec, radius) -> LiftedSkeleton:
    return _make(skel, "Spheres", _check_thickness(radius, "radius"))


def lift_shell(skel: SkeletonSpec, kind: str, thickness, config=DEFAULT_CONFIG) -> LiftedSkeleton:
    return _make(skel, kind, _check_thickness(thickness), config=config)


def shell_field(patch: SurfacePatch, thickness: float, query, A=None, b=None) -> np.ndarray:
    """Unsigned distance to the (embedded) patch minus thickness/2."""
    V = patch.vertices if A is None else patch.vertices @ np.asarray(A).T + np.asarray(b)
    q = np.atleast_2d(np.asarray(query, dtype=float))
    return TriangleSet(V, patch.triangles).distance(q) - 0.5 * float(thickness)
