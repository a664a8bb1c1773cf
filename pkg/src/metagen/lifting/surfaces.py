"""Surface patches spanning a skeleton loop and the three shell solvers.

Patches live in canonical CP coordinates.  Every solver starts from the same
fan triangulation of the loop (refined by midpoint subdivision) and differs in
how the boundary may move and which energy is reduced:

* direct shell: boundary fixed, uniform-Laplacian smoothing of the interior
* mixed minimal: loop vertices pinned, curved arcs slide in their face planes,
  semi-implicit cotangent mean-curvature flow with a monotone curvature monitor
* conjugate-style free boundary: loop vertices slide along their CP edges and
  arcs slide in their faces; area flow with the enclosed volume held fixed, so
  the patch settles on a constant-mean-curvature surface that meets the CP
  faces orthogonally (the fundamental patch of the periodic surface)
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..cp import POLYTOPES, SkeletonSpec, loop_order, segment_host
from ..errors import ConjugationBoundaryMismatch, IncompatibleLift, SolveDiverged
from .geometry import catmull_rom, entity_frame, project_to_affine, spline_neighbors

REFINE_ROUNDS = 3


@dataclass
class SolverConfig:
    direct_tol: float = 1e-6
    direct_cap: int = 2000
    direct_diverged: float = 1e-3
    mixed_tol: float = 1e-4
    mixed_cap: int = 5000
    conj_tol: float = 1e-3
    conj_cap: int = 3000
    refine_rounds: int = REFINE_ROUNDS


DEFAULT_CONFIG = SolverConfig()


@dataclass(eq=False)
class SurfacePatch:
    vertices: np.ndarray  # canonical CP coordinates
    triangles: np.ndarray
    boundary_loop: np.ndarray
    polytope: str
    # per vertex: -1 interior, otherwise index into boundary_info
    vkind: np.ndarray = field(repr=False, default=None)
    boundary_param: dict = field(repr=False, default_factory=dict)
    history: list = field(repr=False, default_factory=list)

    def corner_weights(self) -> np.ndarray:
        """Barycentric corner weights (exact for the tet; least-norm otherwise)."""
        cp = POLYTOPES[self.polytope]
        A = np.vstack([cp.corner_coords.T, np.ones(cp.n_corners)])
        rhs = np.vstack([self.vertices.T, np.ones(len(self.vertices))])
        return np.linalg.lstsq(A, rhs, rcond=None)[0].T


# ---------------------------------------------------------------- loop data

@dataclass
class _Loop:
    cp: object
    nodes: np.ndarray  # canonical positions, n x 3
    node_specs: list
    smooth: list  # per segment k: node k -> k+1
    hosts: list  # per segment: ("edges"|"faces"|"volume", index)
    node_edge: list  # per node: host edge index or -1

    def point(self, k: int, tau: float) -> np.ndarray:
        n = len(self.nodes)
        a, b = self.nodes[k], self.nodes[(k + 1) % n]
        if tau <= 0.0:
            return a.copy()
        if tau >= 1.0:
            return b.copy()
        if self.smooth[k]:
            p0, p1, p2, p3 = spline_neighbors(self.nodes, k, closed=True)
            p = catmull_rom(p0, p1, p2, p3, [tau])[0]
        else:
            p = (1 - tau) * a + tau * b
        cat, idx = self.hosts[k]
        if cat in ("edges", "faces"):
            anchor, basis = entity_frame(self.cp, cat, idx)
            p = project_to_affine(p[None], anchor, basis)[0]
        return self.cp.clamp(p[None])[0]


def _loop_from_skeleton(skel: SkeletonSpec) -> _Loop:
    cp = skel.cp
    order = loop_order(skel)
    nodes = [skel.nodes[i] for i in order]
    n = len(nodes)
    # smoothness of each loop segment comes from the path that contains it
    seg_smooth = {}
    for item in skel.items:
        verts = item.vertices
        for a, b in zip(verts[:-1], verts[1:]):
            ia = next(i for i, v in enumerate(skel.nodes) if v.same_as(a))
            ib = next(i for i, v in enumerate(skel.nodes) if v.same_as(b))
            seg_smooth[frozenset((ia, ib))] = item.smooth
    smooth, hosts = [], []
    for k in range(n):
        a, b = order[k], order[(k + 1) % n]
        smooth.append(seg_smooth.get(frozenset((a, b)), False))
        inc, h = segment_host(cp, skel.nodes[a], skel.nodes[b])
        hosts.append({"on_cp_edge": ("edges", h), "in_cp_face": ("faces", h)}.get(inc, ("volume", -1)))
    node_edge = []
    for v in nodes:
        e = -1
        for i, (_, idx) in enumerate(cp.edges):
            if v.support <= set(idx):
                e = i
                break
        node_edge.append(e)
    pos = np.array([v.canonical_position() for v in nodes])
    return _Loop(cp, pos, nodes, smooth, hosts, node_edge)


def _build_patch(loop: _Loop, rounds: int) -> SurfacePatch:
    n = len(loop.nodes)
    verts = [loop.nodes.mean(axis=0)] + [p for p in loop.nodes]
    # boundary parameter: vertex -> (segment, tau)
    bparam = {1 + k: (k, 0.0) for k in range(n)}
    tris = [(0, 1 + k, 1 + (k + 1) % n) for k in range(n)]
    for _ in range(rounds):
        edge_count: dict = {}
        for t in tris:
            for e in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                key = (min(e), max(e))
                edge_count[key] = edge_count.get(key, 0) + 1
        mid: dict = {}

        def midpoint(a, b):
            key = (min(a, b), max(a, b))
            if key in mid:
                return mid[key]
            if edge_count[key] == 1 and a in bparam and b in bparam:
                ka, ta = bparam[a]
                kb, tb = bparam[b]
                # orient along the loop: end parameter may wrap to the next node
                if kb == (ka + 1) % n and tb == 0.0:
                    k, t0, t1 = ka, ta, 1.0
                elif ka == (kb + 1) % n and ta == 0.0:
                    k, t0, t1 = kb, tb, 1.0
                elif ka == kb:
                    k, t0, t1 = ka, min(ta, tb), max(ta, tb)
                else:  # pragma: no cover - cannot happen for a fan refinement
                    raise SolveDiverged("inconsistent boundary refinement")
                tau = 0.5 * (t0 + t1)
                verts.append(loop.point(k, tau))
                bparam[len(verts) - 1] = (k, tau)
            else:
                verts.append(0.5 * (verts[a] + verts[b]))
            mid[key] = len(verts) - 1
            return mid[key]

        new = []
        for a, b, c in tris:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
        tris = new
    V = np.array(verts, dtype=float)
    T = np.array(tris, dtype=np.int64)
    order = sorted(bparam, key=lambda v: bparam[v])
    vkind = np.full(len(V), -1)
    for v in bparam:
        vkind[v] = 1
    return SurfacePatch(V, T, np.array(order), loop.cp.kind, vkind, bparam)


# ------------------------------------------------------- discrete operators

def triangle_areas(V, T):
    return 0.5 * np.linalg.norm(np.cross(V[T[:, 1]] - V[T[:, 0]], V[T[:, 2]] - V[T[:, 0]]), axis=1)


def vertex_areas(V, T):
    a = triangle_areas(V, T) / 3.0
    out = np.zeros(len(V))
    for k in range(3):
        np.add.at(out, T[:, k], a)
    return out


def cotan_laplacian(V, T):
    """Sparse L with (L x)_i = sum_j w_ij (x_i - x_j) = area gradient."""
    n = len(V)
    rows, cols, vals = [], [], []
    for k in range(3):
        i, j, o = T[:, (k + 1) % 3], T[:, (k + 2) % 3], T[:, k]
        u, v = V[i] - V[o], V[j] - V[o]
        cross = np.linalg.norm(np.cross(u, v), axis=1)
        cot = np.einsum("ij,ij->i", u, v) / np.maximum(cross, 1e-300)
        w = 0.5 * cot
        rows += [i, j, i, j]
        cols += [j, i, i, j]
        vals += [-w, -w, w, w]
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def area_gradient(V, T):
    """Exact gradient of total area with respect to each vertex position."""
    g = np.zeros_like(V)
    e = [V[T[:, 1]] - V[T[:, 0]], V[T[:, 2]] - V[T[:, 1]], V[T[:, 0]] - V[T[:, 2]]]
    nrm = np.cross(e[0], -e[2])
    nn = np.linalg.norm(nrm, axis=1)
    nhat = nrm / np.maximum(nn, 1e-300)[:, None]
    # d area / d x_k = 0.5 * nhat x (opposite edge, oriented)
    np.add.at(g, T[:, 0], 0.5 * np.cross(nhat, e[1]))
    np.add.at(g, T[:, 1], 0.5 * np.cross(nhat, e[2]))
    np.add.at(g, T[:, 2], 0.5 * np.cross(nhat, e[0]))
    return g


def vertex_normals(V, T):
    n = np.cross(V[T[:, 1]] - V[T[:, 0]], V[T[:, 2]] - V[T[:, 0]])
    out = np.zeros_like(V)
    for k in range(3):
        np.add.at(out, T[:, k], n)
    return out / np.maximum(np.linalg.norm(out, axis=1), 1e-300)[:, None]


def volume_gradient(V, T):
    """Rate of enclosed-volume change per unit displacement of each vertex."""
    nrm = np.cross(V[T[:, 1]] - V[T[:, 0]], V[T[:, 2]] - V[T[:, 0]]) / 6.0
    g = np.zeros_like(V)
    for k in range(3):
        np.add.at(g, T[:, k], nrm)
    return g


# ------------------------------------------------------------- constraints

def _constraint_bases(patch: SurfacePatch, loop: _Loop, mode: str):
    """Per-vertex orthonormal basis of allowed displacement (shape (d, 3)) or None."""
    cp = loop.cp
    n_nodes = len(loop.nodes)
    bases = [np.eye(3)] * len(patch.vertices)
    for v, (k, tau) in patch.boundary_param.items():
        is_node = tau == 0.0
        if mode == "direct":
            bases[v] = None
        elif mode == "mixed":
            if is_node:
                # a loop vertex joining two curved segments is part of the curved
                # region: it slides along its CP edge (the intersection of both planes)
                e = loop.node_edge[k]
                curved = loop.smooth[k] and loop.smooth[(k - 1) % n_nodes]
                bases[v] = entity_frame(cp, "edges", e)[1] if (curved and e >= 0) else None
            elif not loop.smooth[k] or loop.hosts[k][0] == "volume":
                bases[v] = None
            else:
                bases[v] = entity_frame(cp, *loop.hosts[k])[1]
        else:  # conjugate-style free boundary
            if is_node:
                e = loop.node_edge[k]
                bases[v] = None if e < 0 else entity_frame(cp, "edges", e)[1]
            elif loop.hosts[k][0] == "volume":
                bases[v] = None
            else:
                bases[v] = entity_frame(cp, *loop.hosts[k])[1]
    return bases


def _basis_matrix(bases, n):
    rows, cols, vals = [], [], []
    c = 0
    for i, b in enumerate(bases):
        if b is None:
            continue
        for r in range(b.shape[0]):
            for ax in range(3):
                rows.append(3 * i + ax)
                cols.append(c)
                vals.append(b[r, ax])
            c += 1
    return sp.csr_matrix((vals, (rows, cols)), shape=(3 * n, c))


def _projectors(bases) -> np.ndarray:
    """Stack of 3x3 orthogonal projectors onto each vertex's allowed motion."""
    P = np.zeros((len(bases), 3, 3))
    for i, b in enumerate(bases):
        if b is not None:
            P[i] = b.T @ b
    return P


def _project_rows(g, bases):
    P = bases if isinstance(bases, np.ndarray) else _projectors(bases)
    return np.einsum("nij,nj->ni", P, g)


def _monitor(V, T, bases, lam=0.0, interior=None, neighbors=None):
    """L-infinity residual of the (volume-corrected) mean-curvature normal.

    Interior vertices contribute the normal component |H - lam| scaled by the
    vertex area.  Sliding boundary vertices contribute the part of the
    projected area gradient that pushes across the boundary (the free-boundary
    condition); the component along the boundary only redistributes vertices.
    ``neighbors`` is (vertex ids, prev ids, next ids, is-planar mask).
    """
    P = bases if isinstance(bases, np.ndarray) else _projectors(bases)
    g = area_gradient(V, T)
    if lam:
        g = g - lam * volume_gradient(V, T)
    A = np.maximum(vertex_areas(V, T), 1e-300)
    if interior is None:
        interior = np.ones(len(V), dtype=bool)
    r = np.abs(np.einsum("ij,ij->i", g, vertex_normals(V, T)))
    worst = float((r[interior] / A[interior]).max(initial=0.0))
    if neighbors is not None and len(neighbors[0]):
        ids, prev, nxt, planar = neighbors
        Pi = P[ids]
        pg = np.einsum("nij,nj->ni", Pi, g[ids])
        t = np.einsum("nij,nj->ni", Pi, V[nxt] - V[prev])
        t /= np.maximum(np.linalg.norm(t, axis=1), 1e-300)[:, None]
        across = pg - np.einsum("ij,ij->i", pg, t)[:, None] * t
        res = np.where(planar[:, None], across, pg)
        worst = max(worst, float((np.linalg.norm(res, axis=1) / A[ids]).max()))
    return worst


# -------------------------------------------------------------- solvers

def _direct(patch: SurfacePatch, loop: _Loop, cfg: SolverConfig) -> SurfacePatch:
    V = patch.vertices.copy()
    T = patch.triangles
    n = len(V)
    rows = np.concatenate([T[:, 0], T[:, 1], T[:, 1], T[:, 2], T[:, 2], T[:, 0]])
    cols = np.concatenate([T[:, 1], T[:, 0], T[:, 2], T[:, 1], T[:, 0], T[:, 2]])
    A = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    A.data[:] = 1.0  # adjacency (duplicates collapsed)
    deg = np.asarray(A.sum(axis=1)).ravel()
    interior = patch.vkind < 0
    move = np.inf
    for it in range(cfg.direct_cap):
        avg = (A @ V) / deg[:, None]
        step = np.where(interior[:, None], avg - V, 0.0)
        V += step
        move = float(np.abs(step).max())
        if move < cfg.direct_tol:
            break
    if move > cfg.direct_diverged:
        raise SolveDiverged(f"direct shell smoothing did not settle (last move {move:.2e})")
    patch.vertices = loop.cp.clamp(V)
    patch.history = [move]
    return patch


def _semi_implicit(patch, loop, bases, cfg, volume: bool, tol: float, cap: int,
                   dt0: float = 0.05, growth: float = 2.0):
    """Semi-implicit cotangent mean-curvature flow under per-vertex constraints.

    Each step solves (M/dt + L) z = -L x over the allowed displacement basis,
    optionally with the linearized enclosed-volume constraint.  The best iterate
    (smallest curvature monitor) is returned, so the reported monitor history
    is non-increasing.
    """
    V = patch.vertices.copy()
    T = patch.triangles
    n = len(V)
    B = _basis_matrix(bases, n)
    interior = patch.vkind < 0
    bl = np.asarray(patch.boundary_loop)
    slide = np.array([bases[i] is not None for i in bl], dtype=bool)
    nbrs = (bl[slide], np.roll(bl, 1)[slide], np.roll(bl, -1)[slide],
            np.array([bases[i].shape[0] == 2 for i in bl[slide]], dtype=bool))
    fixed = np.array([b is None for b in bases])
    bases = _projectors(bases)
    if B.shape[1] == 0:
        return V, [0.0]
    h2 = float(np.median(triangle_areas(V, T)))
    dt = dt0 * h2
    eye3 = sp.eye(3, format="csr")

    def lagrange(V):
        if not volume:
            return 0.0
        g = _project_rows(area_gradient(V, T), bases)
        q = _project_rows(volume_gradient(V, T), bases)
        return float((g * q).sum() / max((q * q).sum(), 1e-300))

    lam = lagrange(V)
    mon = _monitor(V, T, bases, lam, interior, nbrs)
    best_V, best = V, mon
    history = [mon]
    for it in range(cap):
        if best < tol:
            break
        L3 = sp.kron(cotan_laplacian(V, T), eye3, format="csr")
        M3 = sp.diags(np.repeat(vertex_areas(V, T), 3))
        x = V.ravel()
        BtLB = (B.T @ L3 @ B)
        BtMB = (B.T @ M3 @ B)
        rhs = -(B.T @ (L3 @ x))
        c = B.T @ volume_gradient(V, T).ravel() if volume else None
        accepted = False
        while dt > 1e-12 * h2:
            try:
                lu = spla.splu((BtMB / dt + BtLB).tocsc())
            except RuntimeError:
                dt *= 0.5
                continue
            z = lu.solve(rhs)
            if volume:
                kc = lu.solve(c)
                z = z - kc * ((c @ z) / max(c @ kc, 1e-300))
            Vn = (x + B @ z).reshape(-1, 3)
            Vn = loop.cp.clamp(Vn)
            Vn[fixed] = V[fixed]
            lam_n = lagrange(Vn)
            mon_n = _monitor(Vn, T, bases, lam_n, interior, nbrs)
            if np.isfinite(mon_n) and triangle_areas(Vn, T).min() > 1e-14:
                accepted = True
                break
            dt *= 0.5
        if not accepted:
            break
        V, mon, lam = Vn, mon_n, lam_n
        if mon < best:
            best_V, best = V, mon
        history.append(best)
        dt = min(dt * growth, 1e6 * h2)
    return best_V, history


def _has_sliding(patch, bases) -> bool:
    return any(b is not None and patch.vkind[i] >= 0 for i, b in enumerate(bases))


def _mixed(patch, loop, cfg):
    bases = _constraint_bases(patch, loop, "mixed")
    V, hist = _semi_implicit(patch, loop, bases, cfg, volume=_has_sliding(patch, bases),
                             tol=cfg.mixed_tol, cap=cfg.mixed_cap)
    if not np.all(np.isfinite(V)):
        raise SolveDiverged("mean-curvature flow produced non-finite positions")
    patch.vertices = V
    patch.history = hist
    return patch


def _conjugate(patch, loop, cfg):
    # Plateau solve of the straight contour with the boundary held fixed
    fixed = [None if patch.vkind[i] >= 0 else np.eye(3) for i in range(len(patch.vertices))]
    V, _ = _semi_implicit(patch, loop, fixed, cfg, volume=False, tol=cfg.conj_tol, cap=200)
    patch.vertices = V
    bases = _constraint_bases(patch, loop, "conjugate")
    V, hist = _semi_implicit(patch, loop, bases, cfg, volume=True, tol=cfg.conj_tol,
                             cap=cfg.conj_cap)
    if not np.all(np.isfinite(V)):
        raise SolveDiverged("free-boundary flow produced non-finite positions")
    # every boundary vertex must still lie on the entity it is attached to
    cp = loop.cp
    for v, (k, tau) in patch.boundary_param.items():
        if tau == 0.0:
            e = loop.node_edge[k]
            if e < 0:
                continue
            anchor, basis = entity_frame(cp, "edges", e)
        else:
            cat, idx = loop.hosts[k]
            if cat == "volume":
                continue
            anchor, basis = entity_frame(cp, cat, idx)
        off = np.linalg.norm(V[v] - project_to_affine(V[v][None], anchor, basis)[0])
        if off > 1e-3:
            raise ConjugationBoundaryMismatch(
                f"boundary vertex {v} is {off:.2e} away from its required CP entity")
    patch.vertices = V
    patch.history = hist
    return patch


_CACHE: dict = {}


def _cache_key(kind, skel: SkeletonSpec, cfg: SolverConfig):
    loop = _loop_from_skeleton(skel)
    return (kind, skel.polytope, np.round(loop.nodes, 12).tobytes(), tuple(loop.smooth),
            tuple(loop.hosts), cfg.refine_rounds, cfg.mixed_tol, cfg.conj_tol)


def solve_shell(skel: SkeletonSpec, kind: str, cfg: SolverConfig = DEFAULT_CONFIG) -> SurfacePatch:
    """Solve (or fetch from cache) the surface patch for a shell lift."""
    if skel.kind != "paths" or skel.topology_class != "closed_loop" or len(skel.components) != 1:
        raise IncompatibleLift("shell solves need a single closed loop", "single_closed_loop")
    key = _cache_key(kind, skel, cfg)
    hit = _CACHE.get(key)
    if hit is not None:
        return SurfacePatch(hit.vertices.copy(), hit.triangles.copy(), hit.boundary_loop.copy(),
                            hit.polytope, hit.vkind.copy(), dict(hit.boundary_param), list(hit.history))
    loop = _loop_from_skeleton(skel)
    patch = _build_patch(loop, cfg.refine_rounds)
    direct = _direct(patch, loop, cfg)
    if kind == "UniformDirectShell":
        out = direct
    elif kind == "UniformTPMSShellViaMixedMinimal":
        out = _mixed(direct, loop, cfg)
    elif kind == "UniformTPMSShellViaConjugation":
        out = _conjugate(direct, loop, cfg)
    else:
        raise IncompatibleLift(f"{kind} is not a shell lift", "shell_kind")
    _CACHE[key] = out
    return solve_shell(skel, kind, cfg)


def solve_direct_shell(skel, cfg=DEFAULT_CONFIG):
    return solve_shell(skel, "UniformDirectShell", cfg)


def solve_tpms_mixed(skel, cfg=DEFAULT_CONFIG):
    return solve_shell(skel, "UniformTPMSShellViaMixedMinimal", cfg)


def solve_tpms_conjugate(skel, cfg=DEFAULT_CONFIG):
    return solve_shell(skel, "UniformTPMSShellViaConjugation", cfg)
