"""Prebuilt convex polytopes, entity resolution, vertices, paths and skeletons.

Every geometric quantity in this module lives in the canonical coordinates of
its polytope:

* cuboid: unit box, x = LEFT->RIGHT, y = FRONT->BACK, z = BOTTOM->TOP
* triPrism: right isosceles triangle in the (x, z) plane with the right angle
  at BOTTOM_LEFT, extruded along y from FRONT to BACK
* tet: orthoscheme 0 <= z <= y <= x <= 1 (base right angle at BOTTOM_RIGHT,
  apex TOP_BACK directly above the 45 degree corner BOTTOM_BACK)

Vertices are stored as barycentric weights over the polytope corners, which is
the coordinate used for identity tests and later for embedding.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BarycentricOutOfSimplex,
    EmptySkeleton,
    IncompatibleLift,
    InterpolantArity,
    InterpolantRange,
    MetagenError,
    MixedDimensions,
    MixedPolytopes,
    NotSimple,
    TooShort,
    UnknownEntity,
)

WEIGHT_TOL = 1e-9
CATEGORIES = ("corners", "edges", "faces")


class InteriorNotImplemented(MetagenError):
    """The interior entity category has no names or interpolation scheme."""


@dataclass(frozen=True, eq=False)
class Polytope:
    kind: str
    corner_names: tuple
    corner_coords: np.ndarray
    edges: tuple  # (name, (i, j))
    faces: tuple  # (name, (i, j, k[, l])) ordered cycle

    def names(self, category: str) -> tuple:
        if category == "corners":
            return self.corner_names
        if category == "edges":
            return tuple(n for n, _ in self.edges)
        if category == "faces":
            return tuple(n for n, _ in self.faces)
        raise KeyError(category)

    def entity_corners(self, category: str, name: str) -> tuple:
        if category == "corners":
            return (self.corner_names.index(name),)
        table = self.edges if category == "edges" else self.faces
        for n, idx in table:
            if n == name:
                return tuple(idx)
        raise KeyError(name)

    @property
    def n_corners(self) -> int:
        return len(self.corner_names)

    def face_planes(self):
        """Inward unit normals and offsets, n.x >= d inside, one per face."""
        cached = getattr(self, "_planes", None)
        if cached is not None:
            return cached
        center = self.corner_coords.mean(axis=0)
        normals, offsets = [], []
        for _, idx in self.faces:
            p = self.corner_coords[list(idx)]
            n = np.cross(p[1] - p[0], p[2] - p[0])
            n /= np.linalg.norm(n)
            d = float(n @ p[0])
            if n @ center < d:
                n, d = -n, -d
            normals.append(n)
            offsets.append(d)
        planes = (np.array(normals), np.array(offsets))
        object.__setattr__(self, "_planes", planes)
        return planes

    def clamp(self, pts: np.ndarray, iters: int = 50) -> np.ndarray:
        """Project points (canonical coords) into the polytope.

        Cyclic projection onto violated half-spaces; exact for the box and
        converges quickly for the simplex shapes used here.
        """
        pts = np.array(pts, dtype=float, copy=True)
        normals, offsets = self.face_planes()
        for _ in range(iters):
            viol = offsets[None, :] - pts @ normals.T
            if viol.max(initial=0.0) <= 1e-14:
                break
            for f in range(len(offsets)):
                v = np.maximum(offsets[f] - pts @ normals[f], 0.0)
                pts += v[:, None] * normals[f][None, :]
        return pts

    def __repr__(self):
        return f"Polytope({self.kind})"


def _cuboid() -> Polytope:
    names, coords = [], []
    for fb, y in (("FRONT", 0), ("BACK", 1)):
        for bt, z in (("BOTTOM", 0), ("TOP", 1)):
            for lr, x in (("LEFT", 0), ("RIGHT", 1)):
                names.append(f"{fb}_{bt}_{lr}")
                coords.append((x, y, z))
    coords = np.array(coords, dtype=float)

    def idx(x, y, z):
        return coords.tolist().index([x, y, z])

    edge_names = ["FRONT_BOTTOM", "FRONT_LEFT", "FRONT_TOP", "FRONT_RIGHT",
                  "BACK_BOTTOM", "BACK_LEFT", "BACK_TOP", "BACK_RIGHT",
                  "BOTTOM_LEFT", "TOP_LEFT", "TOP_RIGHT", "BOTTOM_RIGHT"]
    edges = []
    for en in edge_names:
        words = set(en.split("_"))
        members = [i for i, cn in enumerate(names) if words <= set(cn.split("_"))]
        members.sort(key=lambda i: tuple(coords[i]))
        edges.append((en, tuple(members)))
    # face name -> (fixed axis, value); cycle runs over the two free axes
    face_spec = [("FRONT", 1, 0), ("BACK", 1, 1), ("TOP", 2, 1),
                 ("BOTTOM", 2, 0), ("LEFT", 0, 0), ("RIGHT", 0, 1)]
    faces = []
    for fn, ax, val in face_spec:
        free = [a for a in range(3) if a != ax]
        cyc = []
        for u, v in ((0, 0), (1, 0), (1, 1), (0, 1)):
            p = [0, 0, 0]
            p[ax], p[free[0]], p[free[1]] = val, u, v
            cyc.append(idx(*p))
        faces.append((fn, tuple(cyc)))
    return Polytope("cuboid", tuple(names), coords, tuple(edges), tuple(faces))


def _tri_prism() -> Polytope:
    names = ("FRONT_BOTTOM_LEFT", "FRONT_TOP", "FRONT_BOTTOM_RIGHT",
             "BACK_BOTTOM_LEFT", "BACK_TOP", "BACK_BOTTOM_RIGHT")
    coords = np.array([(0, 0, 0), (0, 0, 1), (1, 0, 0),
                       (0, 1, 0), (0, 1, 1), (1, 1, 0)], dtype=float)
    FBL, FT, FBR, BBL, BT, BBR = range(6)
    edges = (("FRONT_LEFT", (FBL, FT)), ("FRONT_RIGHT", (FBR, FT)),
             ("FRONT_BOTTOM", (FBL, FBR)), ("BACK_LEFT", (BBL, BT)),
             ("BACK_RIGHT", (BBR, BT)), ("BACK_BOTTOM", (BBL, BBR)),
             ("BOTTOM_LEFT", (FBL, BBL)), ("TOP", (FT, BT)),
             ("BOTTOM_RIGHT", (FBR, BBR)))
    faces = (("FRONT_TRI", (FBL, FBR, FT)), ("BACK_TRI", (BBL, BBR, BT)),
             ("LEFT_QUAD", (FBL, BBL, BT, FT)),
             ("RIGHT_QUAD", (FBR, BBR, BT, FT)),
             ("BOTTOM_QUAD", (FBL, FBR, BBR, BBL)))
    return Polytope("triPrism", names, coords, edges, faces)


def _tet() -> Polytope:
    names = ("BOTTOM_RIGHT", "BOTTOM_LEFT", "TOP_BACK", "BOTTOM_BACK")
    coords = np.array([(1, 0, 0), (0, 0, 0), (1, 1, 1), (1, 1, 0)], dtype=float)
    BR, BL, TB, BB = range(4)
    edges = (("BOTTOM_FRONT", (BL, BR)), ("TOP_LEFT", (BL, TB)),
             ("BACK", (BB, TB)), ("BOTTOM_RIGHT", (BR, BB)),
             ("TOP_RIGHT", (BR, TB)), ("BOTTOM_LEFT", (BL, BB)))
    faces = (("BOTTOM", (BL, BR, BB)), ("TOP", (BL, BR, TB)),
             ("RIGHT", (BR, BB, TB)), ("LEFT", (BL, BB, TB)))
    return Polytope("tet", names, coords, edges, faces)


CUBOID = _cuboid()
TRI_PRISM = _tri_prism()
TET = _tet()
POLYTOPES = {"cuboid": CUBOID, "triPrism": TRI_PRISM, "tet": TET}


def edit_distance(a: str, b: str) -> int:
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def _norm_category(category: str) -> str:
    c = category.lower()
    if c in ("corner", "corners"):
        return "corners"
    if c in ("edge", "edges"):
        return "edges"
    if c in ("face", "faces"):
        return "faces"
    if c in ("interior", "interiors"):
        raise InteriorNotImplemented("the interior entity category is not supported")
    raise UnknownEntity(f"unknown entity category '{category}'",
                        suggestions=[x for x in CATEGORIES])


@dataclass(frozen=True)
class EntityRef:
    polytope: str
    category: str
    name: str

    @property
    def cp(self) -> Polytope:
        return POLYTOPES[self.polytope]

    @property
    def corners(self) -> tuple:
        return self.cp.entity_corners(self.category, self.name)

    def __str__(self):
        return f"{self.polytope}.{self.category}.{self.name}"


def resolve_entity(polytope, category: str, name: str) -> EntityRef:
    """Match ``name`` against canonical names, ignoring case and word order."""
    cp = polytope if isinstance(polytope, Polytope) else POLYTOPES[polytope]
    category = _norm_category(category)
    key = tuple(sorted(w for w in name.upper().split("_") if w))
    canon = cp.names(category)
    for cn in canon:
        if tuple(sorted(cn.split("_"))) == key:
            return EntityRef(cp.kind, category, cn)
    ranked = sorted(canon, key=lambda cn: (edit_distance(name.upper(), cn), cn))
    raise UnknownEntity(
        f"'{name}' is not a {cp.kind} {category[:-1]}; did you mean "
        + ", ".join(ranked[:3]) + "?",
        suggestions=ranked[:3])


@dataclass(frozen=True, eq=False)
class VertexSpec:
    entity: EntityRef
    t: tuple
    weights: tuple

    @property
    def w(self) -> np.ndarray:
        return np.asarray(self.weights)

    @property
    def support(self) -> frozenset:
        return frozenset(i for i, x in enumerate(self.weights) if abs(x) > 1e-12)

    def same_as(self, other: "VertexSpec") -> bool:
        return (self.entity.polytope == other.entity.polytope
                and np.max(np.abs(self.w - other.w)) <= WEIGHT_TOL)

    def canonical_position(self) -> np.ndarray:
        return self.w @ self.entity.cp.corner_coords


def make_vertex(entity: EntityRef, t=None) -> VertexSpec:
    cp = entity.cp
    w = np.zeros(cp.n_corners)
    corners = entity.corners
    if t is not None and not isinstance(t, (list, tuple)):
        t = [t]
    t = None if t is None else [float(x) for x in t]
    if entity.category == "corners":
        w[corners[0]] = 1.0
        return VertexSpec(entity, tuple(t or ()), tuple(w))
    if t is not None:
        for x in t:
            if not (0.0 <= x <= 1.0):
                raise InterpolantRange(f"interpolant {x} outside [0, 1]")
    if entity.category == "edges":
        if t is None:
            t = [0.5]
        if len(t) != 1:
            raise InterpolantArity(f"an edge vertex takes exactly 1 interpolant, got {len(t)}")
        w[corners[0]], w[corners[1]] = 1.0 - t[0], t[0]
    else:
        if len(corners) == 3:
            if t is None:
                t = [1.0 / 3.0, 1.0 / 3.0]
            if len(t) != 2:
                raise InterpolantArity(f"a triangular face vertex takes 2 interpolants, got {len(t)}")
            if t[0] + t[1] > 1.0 + 1e-12:
                raise BarycentricOutOfSimplex(f"t0 + t1 = {t[0] + t[1]:g} exceeds 1")
            w[corners[0]], w[corners[1]] = t[0], t[1]
            w[corners[2]] = max(0.0, 1.0 - t[0] - t[1])
        else:
            if t is None:
                t = [0.5, 0.5]
            if len(t) != 2:
                raise InterpolantArity(f"a quad face vertex takes 2 interpolants, got {len(t)}")
            u, v = t
            for c, wt in zip(corners, ((1 - u) * (1 - v), u * (1 - v), u * v, (1 - u) * v)):
                w[c] = wt
    return VertexSpec(entity, tuple(t), tuple(w))


def _host(cp: Polytope, supp: frozenset):
    """Lowest-dimensional entity containing a corner support: (category, index)."""
    if len(supp) == 1:
        return ("corners", next(iter(supp)))
    for i, (_, idx) in enumerate(cp.edges):
        if supp <= set(idx):
            return ("edges", i)
    for i, (_, idx) in enumerate(cp.faces):
        if supp <= set(idx):
            return ("faces", i)
    return ("volume", -1)


def segment_host(cp: Polytope, a: VertexSpec, b: VertexSpec):
    """Classify a segment and return (incidence, entity index or -1)."""
    supp = a.support | b.support
    for i, (_, idx) in enumerate(cp.edges):
        if supp <= set(idx):
            return "on_cp_edge", i
    for i, (_, idx) in enumerate(cp.faces):
        if supp <= set(idx):
            return "in_cp_face", i
    return "through_volume", -1


@dataclass(frozen=True, eq=False)
class PathSpec:
    vertices: tuple
    smooth: bool
    closed: bool
    segment_incidence: tuple
    segment_hosts: tuple

    @property
    def polytope(self) -> str:
        return self.vertices[0].entity.polytope

    @property
    def segments(self):
        v = self.vertices
        return [(v[i], v[i + 1]) for i in range(len(v) - 1)]


def make_path(vertices, smooth: bool) -> PathSpec:
    vertices = list(vertices)
    if len(vertices) < 2:
        raise TooShort("a path needs at least 2 vertices")
    for v in vertices:
        if not isinstance(v, VertexSpec):
            raise MixedDimensions("paths are built from vertices only")
    kinds = {v.entity.polytope for v in vertices}
    if len(kinds) > 1:
        raise MixedPolytopes("all vertices of a path must reference the same CP, got "
                             + ", ".join(sorted(kinds)))
    closed = len(vertices) > 2 and vertices[0].same_as(vertices[-1])
    body = vertices[:-1] if closed else vertices
    for i in range(len(body)):
        for j in range(i + 1, len(body)):
            if body[i].same_as(body[j]):
                raise NotSimple(f"vertex {j} repeats vertex {i}; only simple paths are permitted")
    if closed and len(body) < 3:
        raise NotSimple("a closed path needs at least 3 distinct vertices")
    cp = POLYTOPES[vertices[0].entity.polytope]
    inc, hosts = [], []
    for a, b in zip(vertices[:-1], vertices[1:]):
        k, h = segment_host(cp, a, b)
        inc.append(k)
        hosts.append(h)
    return PathSpec(tuple(vertices), bool(smooth), closed, tuple(inc), tuple(hosts))


@dataclass(frozen=True, eq=False)
class SkeletonSpec:
    items: tuple
    kind: str  # "points" | "paths"
    nodes: tuple  # unique VertexSpec
    graph_edges: tuple  # (i, j) node index pairs
    components: tuple  # tuple of tuples of node indices
    component_classes: tuple
    topology_class: str
    face_touch_set: frozenset

    @property
    def polytope(self) -> str:
        return self.nodes[0].entity.polytope

    @property
    def cp(self) -> Polytope:
        return POLYTOPES[self.polytope]

    def degree(self, i: int) -> int:
        return sum((a == i) + (b == i) for a, b in self.graph_edges)


def build_skeleton(items) -> SkeletonSpec:
    items = list(items)
    if not items:
        raise EmptySkeleton("a skeleton needs at least one vertex or path")
    is_pt = [isinstance(x, VertexSpec) for x in items]
    is_path = [isinstance(x, PathSpec) for x in items]
    if not all(a or b for a, b in zip(is_pt, is_path)):
        raise MixedDimensions("skeleton items must be vertices or polylines/curves")
    if any(is_pt) and any(is_path):
        raise MixedDimensions("a skeleton must consist of all points or all polylines/curves")
    kind = "points" if all(is_pt) else "paths"
    verts = items if kind == "points" else [v for p in items for v in p.vertices]
    if len({v.entity.polytope for v in verts}) > 1:
        raise MixedPolytopes("all skeleton items must reference the same CP")

    nodes: list = []

    def node_of(v):
        for i, n in enumerate(nodes):
            if n.same_as(v):
                return i
        nodes.append(v)
        return len(nodes) - 1

    gedges = []
    if kind == "points":
        for v in items:
            node_of(v)
    else:
        for p in items:
            ids = [node_of(v) for v in p.vertices]
            for a, b in zip(ids[:-1], ids[1:]):
                gedges.append((a, b))

    parent = list(range(len(nodes)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in gedges:
        parent[find(a)] = find(b)
    groups: dict = {}
    for i in range(len(nodes)):
        groups.setdefault(find(i), []).append(i)
    comps = tuple(tuple(g) for g in sorted(groups.values()))

    deg = [0] * len(nodes)
    for a, b in gedges:
        deg[a] += 1
        deg[b] += 1
    classes = []
    for comp in comps:
        cset = set(comp)
        n_e = sum(1 for a, b in gedges if a in cset)
        if n_e == 0:
            classes.append("point")
        elif max(deg[i] for i in comp) > 2:
            classes.append("branched")
        elif n_e == len(comp):
            classes.append("closed_loop")
        else:
            classes.append("open_path")
    if kind == "points":
        topo = "point_set"
    elif "branched" in classes:
        topo = "branched"
    elif all(c == "closed_loop" for c in classes):
        topo = "closed_loop"
    else:
        topo = "open_path"

    cp = POLYTOPES[verts[0].entity.polytope]
    touched = set()
    for v in nodes:
        for name, idx in cp.faces:
            if v.support <= set(idx):
                touched.add(name)
    return SkeletonSpec(tuple(items), kind, tuple(nodes), tuple(gedges), comps,
                        tuple(classes), topo, frozenset(touched))


def loop_order(skel: SkeletonSpec) -> list:
    """Node indices of a single closed loop in traversal order (no repeat)."""
    adj: dict = {}
    for a, b in skel.graph_edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    start = skel.components[0][0]
    order, prev, cur = [start], None, start
    while True:
        nxt = [n for n in adj[cur] if n != prev]
        if not nxt:
            break
        n = nxt[0]
        if n == start:
            break
        order.append(n)
        prev, cur = cur, n
        if len(order) > len(skel.nodes):
            break
    return order


LIFT_KINDS = ("UniformBeams", "SpatiallyVaryingBeams", "Spheres", "UniformDirectShell",
              "UniformTPMSShellViaMixedMinimal", "UniformTPMSShellViaConjugation")
SHELL_KINDS = LIFT_KINDS[3:]


def _on_edge(cp: Polytope, v: VertexSpec) -> bool:
    return any(v.support <= set(idx) for _, idx in cp.edges)


def _faces_of(cp: Polytope, v: VertexSpec) -> set:
    return {n for n, idx in cp.faces if v.support <= set(idx)}


def check_lift_compat(skel: SkeletonSpec, lift_kind: str) -> None:
    """Raise IncompatibleLift unless ``skel`` satisfies the lift's requirements."""
    if lift_kind in ("UniformBeams", "SpatiallyVaryingBeams"):
        if skel.kind != "paths":
            raise IncompatibleLift(f"{lift_kind} requires polylines/curves; the skeleton "
                                   "contains standalone vertices", "paths_only")
        return
    if lift_kind == "Spheres":
        if skel.kind != "points":
            raise IncompatibleLift("Spheres requires a skeleton of standalone vertices only",
                                   "points_only")
        return
    if lift_kind not in SHELL_KINDS:
        raise IncompatibleLift(f"unknown lifting procedure {lift_kind}", "unknown_kind")
    if skel.kind != "paths":
        raise IncompatibleLift(f"{lift_kind} requires a closed loop of polylines/curves",
                               "paths_only")
    if len(skel.components) != 1 or skel.topology_class != "closed_loop":
        raise IncompatibleLift(f"{lift_kind} requires a single closed loop "
                               f"(found {skel.topology_class}, {len(skel.components)} component(s))",
                               "single_closed_loop")
    if lift_kind == "UniformDirectShell":
        return
    cp = skel.cp
    for i, v in enumerate(skel.nodes):
        if not _on_edge(cp, v):
            raise IncompatibleLift(f"loop vertex {i} ({v.entity}) does not live on a CP edge",
                                   "vertex_on_edge")
    for a, b in skel.graph_edges:
        if not (_faces_of(cp, skel.nodes[a]) & _faces_of(cp, skel.nodes[b])):
            raise IncompatibleLift(f"adjacent loop vertices {a} and {b} share no CP face",
                                   "adjacent_share_face")
    if lift_kind == "UniformTPMSShellViaConjugation":
        missing = [n for n, _ in cp.faces if n not in skel.face_touch_set]
        if missing:
            raise IncompatibleLift("the loop must touch every CP face; missing "
                                   + ", ".join(missing), "touch_every_face")
        if len(skel.nodes) < len(cp.faces):
            raise IncompatibleLift(f"the loop has {len(skel.nodes)} vertices but the CP has "
                                   f"{len(cp.faces)} faces", "min_vertex_count")


def compatible_lifts(skel: SkeletonSpec) -> list:
    out = []
    for k in LIFT_KINDS:
        try:
            check_lift_compat(skel, k)
        except IncompatibleLift:
            continue
        out.append(k)
    return out
