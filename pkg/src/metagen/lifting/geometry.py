"""Low-level geometry: splines, capsule/round-cone fields, triangle distance."""
from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

SAMPLES_PER_SEGMENT = 16


def catmull_rom(p0, p1, p2, p3, tau, alpha=0.5):
    """Centripetal Catmull-Rom point(s) between p1 and p2 at tau in [0, 1]."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))[:, None]

    def knot(t, a, b):
        d = np.linalg.norm(b - a)
        return t + max(d, 1e-12) ** alpha

    t0 = 0.0
    t1 = knot(t0, p0, p1)
    t2 = knot(t1, p1, p2)
    t3 = knot(t2, p2, p3)
    t = t1 + tau * (t2 - t1)
    a1 = (t1 - t) / (t1 - t0) * p0 + (t - t0) / (t1 - t0) * p1
    a2 = (t2 - t) / (t2 - t1) * p1 + (t - t1) / (t2 - t1) * p2
    a3 = (t3 - t) / (t3 - t2) * p2 + (t - t2) / (t3 - t2) * p3
    b1 = (t2 - t) / (t2 - t0) * a1 + (t - t0) / (t2 - t0) * a2
    b2 = (t3 - t) / (t3 - t1) * a2 + (t - t1) / (t3 - t1) * a3
    return (t2 - t) / (t2 - t1) * b1 + (t - t1) / (t2 - t1) * b2


def spline_neighbors(pts: np.ndarray, i: int, closed: bool):
    """Control points (p0, p1, p2, p3) for the segment pts[i] -> pts[i+1]."""
    n = len(pts)
    if closed:
        return pts[(i - 1) % n], pts[i], pts[(i + 1) % n], pts[(i + 2) % n]
    p1, p2 = pts[i], pts[i + 1]
    p0 = pts[i - 1] if i > 0 else 2 * p1 - p2
    p3 = pts[i + 2] if i + 2 < n else 2 * p2 - p1
    return p0, p1, p2, p3


def project_to_affine(pts: np.ndarray, anchor: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto anchor + span(basis rows); basis orthonormal."""
    d = pts - anchor
    return anchor + (d @ basis.T) @ basis


def entity_frame(cp, category: str, index: int):
    """Anchor point and orthonormal direction basis of an edge or face."""
    if category == "edges":
        i, j = cp.edges[index][1]
        a, b = cp.corner_coords[i], cp.corner_coords[j]
        e = (b - a) / np.linalg.norm(b - a)
        return a, e[None, :]
    idx = cp.faces[index][1]
    p = cp.corner_coords[list(idx)]
    e1 = p[1] - p[0]
    e1 /= np.linalg.norm(e1)
    e2 = p[2] - p[0]
    e2 -= (e2 @ e1) * e1
    e2 /= np.linalg.norm(e2)
    return p[0], np.stack([e1, e2])


def round_cone_field(points: np.ndarray, a: np.ndarray, b: np.ndarray,
                     ra: np.ndarray, rb: np.ndarray, chunk: int = 64) -> np.ndarray:
    """min over segments of min_s |p - c(s)| - r(s), radius linear along each segment.

    With ra == rb this is the exact capsule distance.
    """
    points = np.asarray(points, dtype=float)
    out = np.full(len(points), np.inf)
    for s in range(0, len(a), chunk):
        A, B = a[s:s + chunk], b[s:s + chunk]
        r0, r1 = ra[s:s + chunk], rb[s:s + chunk]
        ab = B - A
        L = np.linalg.norm(ab, axis=1)
        Ls = np.where(L > 0, L, 1.0)
        u = ab / Ls[:, None]
        k = np.where(L > 0, (r1 - r0) / Ls, 0.0)
        d = points[:, None, :] - A[None, :, :]
        x = np.einsum("nmk,mk->nm", d, u)
        y2 = np.maximum(np.einsum("nmk,nmk->nm", d, d) - x * x, 0.0)
        y = np.sqrt(y2)
        steep = np.abs(k) >= 1.0
        kk = np.where(steep, 0.0, k)
        sstar = x + kk * y / np.sqrt(1.0 - kk * kk)
        sstar = np.clip(sstar, 0.0, L[None, :])
        g = np.sqrt((x - sstar) ** 2 + y2) - r0[None, :] - k[None, :] * sstar
        if steep.any():
            g0 = np.sqrt(x * x + y2) - r0[None, :]
            gl = np.sqrt((x - L[None, :]) ** 2 + y2) - r1[None, :]
            g = np.where(steep[None, :], np.minimum(g0, gl), g)
        np.minimum(out, g.min(axis=1), out=out)
    return out


def sphere_field(points: np.ndarray, centers: np.ndarray, radius: float) -> np.ndarray:
    d = np.linalg.norm(points[:, None, :] - centers[None, :, :], axis=2)
    return d.min(axis=1) - radius


def point_triangle_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Row-wise Euclidean distance from p[i] to triangle (a[i], b[i], c[i])."""
    ab, ac, ap = b - a, c - a, p - a
    d1 = np.einsum("ij,ij->i", ab, ap)
    d2 = np.einsum("ij,ij->i", ac, ap)
    bp = p - b
    d3 = np.einsum("ij,ij->i", ab, bp)
    d4 = np.einsum("ij,ij->i", ac, bp)
    cp_ = p - c
    d5 = np.einsum("ij,ij->i", ab, cp_)
    d6 = np.einsum("ij,ij->i", ac, cp_)
    va = d3 * d6 - d5 * d4
    vb = d5 * d2 - d1 * d6
    vc = d1 * d4 - d3 * d2

    # default: interior of the face
    denom = va + vb + vc
    denom = np.where(np.abs(denom) > 1e-300, denom, 1e-300)
    v = vb / denom
    w = vc / denom
    q = a + v[:, None] * ab + w[:, None] * ac

    def put(mask, val):
        q[mask] = val[mask] if val.ndim == 2 else val

    # edge bc
    m = (va <= 0) & ((d4 - d3) >= 0) & ((d5 - d6) >= 0)
    t = (d4 - d3) / np.where((d4 - d3) + (d5 - d6) != 0, (d4 - d3) + (d5 - d6), 1)
    put(m, b + t[:, None] * (c - b))
    # edge ac
    m = (vb <= 0) & (d2 >= 0) & (d6 <= 0)
    t = d2 / np.where(d2 - d6 != 0, d2 - d6, 1)
    put(m, a + t[:, None] * ac)
    # edge ab
    m = (vc <= 0) & (d1 >= 0) & (d3 <= 0)
    t = d1 / np.where(d1 - d3 != 0, d1 - d3, 1)
    put(m, a + t[:, None] * ab)
    # vertex regions
    put((d6 >= 0) & (d5 <= d6), c)
    put((d3 >= 0) & (d4 <= d3), b)
    put((d1 <= 0) & (d2 <= 0), a)
    return np.linalg.norm(p - q, axis=1)


class TriangleSet:
    """Exact unsigned distance to a triangle soup with KD-tree candidate pruning."""

    def __init__(self, vertices: np.ndarray, triangles: np.ndarray):
        self.V = np.asarray(vertices, dtype=float)
        self.T = np.asarray(triangles, dtype=np.int64)
        tri = self.V[self.T]
        self.centroids = tri.mean(axis=1)
        self.radii = np.linalg.norm(tri - self.centroids[:, None, :], axis=2).max(axis=1)
        self.rmax = float(self.radii.max())
        self.ctree = cKDTree(self.centroids)
        self.lo = self.V.min(axis=0)
        self.hi = self.V.max(axis=0)

    def brute_distance(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        out = np.full(len(points), np.inf)
        A, B, C = (self.V[self.T[:, k]] for k in range(3))
        for i in range(len(self.T)):
            n = len(points)
            d = point_triangle_distance(points, np.broadcast_to(A[i], (n, 3)),
                                        np.broadcast_to(B[i], (n, 3)),
                                        np.broadcast_to(C[i], (n, 3)))
            np.minimum(out, d, out=out)
        return out

    def distance(self, points: np.ndarray, k: int = 4, chunk: int = 20000,
                 cap: float = np.inf) -> np.ndarray:
        """Exact where the true distance is <= cap; elsewhere some value > cap."""
        points = np.asarray(points, dtype=float)
        out = np.empty(len(points))
        k = min(k, len(self.T))
        A, B, C = (self.V[self.T[:, j]] for j in range(3))
        for s in range(0, len(points), chunk):
            P = points[s:s + chunk]
            # upper bound from the k nearest centroids' exact triangle distances
            _, nn = self.ctree.query(P, k=k)
            nn = nn.reshape(len(P), k)
            rows = np.repeat(np.arange(len(P)), k)
            cols = nn.ravel()
            d = point_triangle_distance(P[rows], A[cols], B[cols], C[cols]).reshape(len(P), k)
            ub = d.min(axis=1)
            # any triangle closer than ub has centroid within ub + its radius
            lists = self.ctree.query_ball_point(P, np.minimum(ub, cap) + self.rmax + 1e-12,
                                               return_sorted=False)
            counts = np.fromiter((len(x) for x in lists), dtype=np.int64, count=len(P))
            cols = np.fromiter((j for x in lists for j in x), dtype=np.int64, count=int(counts.sum()))
            rows = np.repeat(np.arange(len(P)), counts)
            dd = point_triangle_distance(P[rows], A[cols], B[cols], C[cols])
            best = ub.copy()
            np.minimum.at(best, rows, dd)
            out[s:s + chunk] = best
        return out
