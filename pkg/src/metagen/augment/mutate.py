"""Seeded structural mutation along the four edit axes."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..assembly.structure import Csg, Leaf, Tile, make_structure
from ..cp import build_skeleton, compatible_lifts, make_path, make_vertex
from ..errors import NoEligibleSites
from ..lifting.lift import (lift_shell, lift_spheres, lift_uniform_beams, lift_varying_beams)

AXES = ("pathkind", "lift", "vertex", "thickness")
THICKNESS_CAP = 0.25


@dataclass(frozen=True)
class MutationConfig:
    p_swap_pathkind: float = 0.7
    p_swap_lift: float = 0.7
    p_vertex: float = 0.9
    p_thickness: float = 0.98
    seed: int = 0

    def __post_init__(self):
        for name in ("p_swap_pathkind", "p_swap_lift", "p_vertex", "p_thickness"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")

    def probabilities(self) -> dict:
        return dict(zip(AXES, (self.p_swap_pathkind, self.p_swap_lift,
                               self.p_vertex, self.p_thickness)))


@dataclass
class MutationTrace:
    gates: dict = field(default_factory=dict)
    applied: list = field(default_factory=list)  # (axis, site, old, new)

    def to_dict(self) -> dict:
        return {"gates": dict(self.gates),
                "applied": [{"axis": a, "site": s, "old": o, "new": n}
                            for a, s, o, n in self.applied]}


def derive_seed(seed: int, index: int) -> int:
    """Per-item seed for batch mutation."""
    return int(np.random.SeedSequence([int(seed) & (2 ** 64 - 1), int(index)]).generate_state(
        1, np.uint64)[0])


def _leaves(ir, out):
    if isinstance(ir, Leaf):
        out.append(ir)
    else:
        _leaves(ir.left, out)
        _leaves(ir.right, out)
    return out


def _unique(objs):
    seen, out = set(), []
    for o in objs:
        if id(o) not in seen:
            seen.add(id(o))
            out.append(o)
    return out


def _vertex_key(v):
    return (v.entity, tuple(round(w, 12) for w in v.weights))


def _sample_t(entity, rng) -> tuple:
    if entity.category == "edges":
        return (float(rng.random()),)
    a, b = float(rng.random()), float(rng.random())
    if len(entity.corners) == 3 and a + b > 1.0:
        a, b = 1.0 - a, 1.0 - b
    return (a, b)


def _fmt(x) -> str:
    if isinstance(x, tuple):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    return f"{x:.6g}" if isinstance(x, float) else str(x)


def _scale(x: float, rng) -> float:
    return float(min(max(x * rng.uniform(0.5, 1.5), 1e-6), THICKNESS_CAP))


def mutate(ir, cfg: MutationConfig = MutationConfig()):
    """Returns (new ir, MutationTrace).  Deterministic in (ir, cfg)."""
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    probs = cfg.probabilities()
    trace = MutationTrace()
    for ax in AXES:
        trace.gates[ax] = bool(rng.random() < probs[ax])

    leaves = _leaves(ir, [])
    lifts = _unique(ls for lf in leaves for ls in lf.tile.lifted)
    skels = _unique(ls.skeleton for ls in lifts)
    paths = _unique(p for sk in skels if sk.kind == "paths" for p in sk.items)

    def site(ax):
        return trace.gates[ax] and rng.random() < probs[ax]

    # (1) Polyline <-> Curve
    smooth = {}
    for i, p in enumerate(paths):
        if site("pathkind"):
            smooth[id(p)] = not p.smooth
            trace.applied.append(("pathkind", f"path{i}", "Curve" if p.smooth else "Polyline",
                                  "Polyline" if p.smooth else "Curve"))

    # (2) lifting procedure, drawn from the type-compatible set
    kinds = {}
    for i, ls in enumerate(lifts):
        options = [k for k in compatible_lifts(ls.skeleton) if k != ls.kind]
        if options and site("lift"):
            kinds[id(ls)] = options[int(rng.integers(len(options)))]
            trace.applied.append(("lift", f"lift{i}", ls.kind, kinds[id(ls)]))

    # (3) vertex position within its CP entity; coincident vertices move together
    groups = {}
    for sk in skels:
        verts = sk.items if sk.kind == "points" else [v for p in sk.items for v in p.vertices]
        for v in verts:
            if v.entity.category != "corners":
                groups.setdefault(_vertex_key(v), []).append(v)
    moved = {}
    for i, (key, vs) in enumerate(groups.items()):
        if site("vertex"):
            ent = vs[0].entity
            t = _sample_t(ent, rng)
            nv = make_vertex(ent, list(t))
            for v in vs:
                moved[id(v)] = nv
            trace.applied.append(("vertex", f"{ent}#{i}", _fmt(tuple(vs[0].t)), _fmt(t)))

    # (4) thickness specification
    thick = {}
    for i, ls in enumerate(lifts):
        kind = kinds.get(id(ls), ls.kind)
        if site("thickness"):
            if kind == "SpatiallyVaryingBeams":
                prof = ls.profile or ((0.0, ls.thickness), (1.0, ls.thickness))
                new = tuple((t, _scale(d, rng)) for t, d in prof)
                thick[id(ls)] = new
                trace.applied.append(("thickness", f"lift{i}",
                                      _fmt(tuple(d for _, d in prof)), _fmt(tuple(d for _, d in new))))
            else:
                new = _scale(ls.thickness, rng)
                thick[id(ls)] = new
                trace.applied.append(("thickness", f"lift{i}", _fmt(ls.thickness), _fmt(new)))

    if not trace.applied:
        raise NoEligibleSites("no mutation was applied under the drawn gates; try another seed")

    # rebuild bottom-up, preserving sharing
    def vert(v):
        return moved.get(id(v), v)

    new_paths = {id(p): make_path([vert(v) for v in p.vertices], smooth.get(id(p), p.smooth))
                 for p in paths}
    new_skels = {}
    for sk in skels:
        items = [vert(v) for v in sk.items] if sk.kind == "points" else [new_paths[id(p)] for p in sk.items]
        new_skels[id(sk)] = build_skeleton(items)
    new_lifts = {}
    for ls in lifts:
        kind = kinds.get(id(ls), ls.kind)
        sk = new_skels[id(ls.skeleton)]
        spec = thick.get(id(ls))
        if kind == "SpatiallyVaryingBeams":
            prof = spec if spec is not None else (
                ls.profile or ((0.0, ls.thickness), (1.0, ls.thickness)))
            new_lifts[id(ls)] = lift_varying_beams(sk, [list(r) for r in prof])
            continue
        t = spec if spec is not None else ls.thickness
        if kind == "UniformBeams":
            new_lifts[id(ls)] = lift_uniform_beams(sk, t)
        elif kind == "Spheres":
            new_lifts[id(ls)] = lift_spheres(sk, t)
        else:
            new_lifts[id(ls)] = lift_shell(sk, kind, t, ls.config)
    tiles = {}

    def rebuild(node):
        if isinstance(node, Leaf):
            t = node.tile
            if id(t) not in tiles:
                tiles[id(t)] = Tile(tuple(new_lifts[id(ls)] for ls in t.lifted), t.embedding)
            return make_structure(tiles[id(t)], node.pattern)
        return Csg(node.op, rebuild(node.left), rebuild(node.right))

    return rebuild(ir), trace
