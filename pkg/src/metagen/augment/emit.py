"""StructureIR -> MetaDSL source text."""
from __future__ import annotations

from ..assembly.structure import Csg, Leaf

def fmt_num(x: float) -> str:
    """Shortest text that parses back to the same float."""
    x = float(x)
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _vec(v) -> str:
    return "[" + ", ".join(fmt_num(x) for x in v) + "]"


class _Namer:
    def __init__(self):
        self.counts = {}

    def __call__(self, base: str) -> str:
        i = self.counts.get(base, 0)
        self.counts[base] = i + 1
        return f"{base}{i}"


class _Emitter:
    def __init__(self, params):
        self.lines = []
        self.names = {}  # id(obj) -> variable
        self.vars = _Namer()
        self.params = list(params or [])

    def value(self, x: float) -> str:
        """A parameter name when x is exactly its default, else a literal."""
        for p in self.params:
            if isinstance(p.default, (int, float)) and float(p.default) == float(x):
                return p.name
        return fmt_num(x)

    def emit(self, name: str, expr: str) -> str:
        self.lines.append(f"    {name} = {expr}")
        return name

    def bind(self, obj, base: str, expr_fn, single: bool):
        key = id(obj)
        if key not in self.names:
            name = base if single else self.vars(base)
            self.names[key] = self.emit(name, expr_fn())
        return self.names[key]

    def vertex(self, v) -> str:
        # coincident vertices share one variable so loops close exactly
        for key, (other, name) in self.vertex_pool.items():
            if other.same_as(v) and other.entity == v.entity and other.t == v.t:
                return name
        e = v.entity
        ref = f"{e.polytope}.{e.category}.{e.name}"
        expr = f"vertex({ref})" if e.category == "corners" or not v.t else \
            f"vertex({ref}, {_vec(v.t)})"
        name = self.emit(f"v{len(self.vertex_pool)}", expr)
        self.vertex_pool[id(v)] = (v, name)
        return name


def emit_program(ir, params=None, header: str = None) -> str:
    """Write a program whose make_structure rebuilds ``ir``.

    ``params`` (ParamSpec list) become the function signature; a literal equal
    to a parameter's default is written as that parameter.
    """
    em = _Emitter(params)
    em.vertex_pool = {}
    leaves = []

    def collect(node):
        if isinstance(node, Leaf):
            leaves.append(node)
        else:
            collect(node.left)
            collect(node.right)

    collect(ir)
    skels = {id(ls.skeleton): ls.skeleton for lf in leaves for ls in lf.tile.lifted}
    lifts = {id(ls): ls for lf in leaves for ls in lf.tile.lifted}
    tiles = {id(lf.tile): lf.tile for lf in leaves}
    single = len(leaves) == 1

    paths = {}
    for sk in skels.values():
        for it in sk.items:
            if sk.kind == "paths" and id(it) not in paths:
                paths[id(it)] = it
    for sk in skels.values():
        for it in sk.items:
            if sk.kind == "points":
                em.vertex(it)
            else:
                for v in it.vertices:
                    em.vertex(v)
    path_names = {}
    for k, p in paths.items():
        vs = ", ".join(em.vertex(v) for v in p.vertices)
        kind = "Curve" if p.smooth else "Polyline"
        path_names[k] = em.emit(f"p{len(path_names)}", f"{kind}([{vs}])")

    def skel_expr(sk):
        if sk.kind == "points":
            items = [em.vertex(v) for v in sk.items]
        else:
            items = [path_names[id(p)] for p in sk.items]
        return f"skeleton([{', '.join(items)}])"

    single_skel = len(skels) == 1
    for sk in skels.values():
        em.bind(sk, "skel", lambda sk=sk: skel_expr(sk), single_skel)

    def lift_expr(ls):
        sk = em.names[id(ls.skeleton)]
        if ls.kind == "SpatiallyVaryingBeams":
            prof = ", ".join(f"[{fmt_num(t)}, {em.value(d)}]" for t, d in ls.profile)
            return f"SpatiallyVaryingBeams({sk}, [{prof}])"
        return f"{ls.kind}({sk}, {em.value(ls.thickness)})"

    single_lift = len(lifts) == 1
    for ls in lifts.values():
        em.bind(ls, "lift", lambda ls=ls: lift_expr(ls), single_lift)

    def embed_expr(e):
        if e.polytope == "cuboid":
            return (f"cuboid.embed_via_minmax({_vec(e.lo)}, {_vec(e.hi)}, "
                    f"cuboid.corners.{e.corner_at_min})")
        return f"{e.polytope}.embed({fmt_num(e.sizes[0])})"

    embeds = {id(t.embedding): t.embedding for t in tiles.values()}
    for e in embeds.values():
        em.bind(e, "embedding", lambda e=e: embed_expr(e), len(embeds) == 1)

    for t in tiles.values():
        em.bind(t, "tile", lambda t=t: "Tile([" + ", ".join(em.names[id(ls)] for ls in t.lifted)
                + f"], {em.names[id(t.embedding)]})", len(tiles) == 1)

    def op_expr(op):
        ents = [f"{e.polytope}.{e.category}.{e.name}" for e in op.entities]
        if op.op == "Rotate180":
            args = "[" + ", ".join(ents) + "]"
        else:
            args = ", ".join(ents)
        inner = f", {op_expr(op.inner)}" if op.inner is not None else ""
        return f"{op.op}({args}, {op.do_copy}{inner})"

    def pattern_expr(p):
        if p.kind == "Custom":
            return f"Custom({op_expr(p.custom)})"
        return f"{p.kind}()"

    pats = {id(lf.pattern): lf.pattern for lf in leaves}
    for p in pats.values():
        em.bind(p, "pat", lambda p=p: pattern_expr(p), len(pats) == 1)

    def struct(node):
        if isinstance(node, Leaf):
            return em.bind(node, "obj", lambda: f"Structure({em.names[id(node.tile)]}, "
                           f"{em.names[id(node.pattern)]})", single)
        a, b = struct(node.left), struct(node.right)
        return em.bind(node, "obj", lambda: f"{node.op}({a}, {b})", False)

    root = struct(ir)
    sig = ", ".join(f"{p.name}={fmt_num(p.default)}" for p in em.params)
    out = []
    if header:
        out.append(header.rstrip("\n"))
    out.append("from metagen import *")
    out.append("")
    out.append(f"def make_structure({sig}) -> Structure:")
    out.extend(em.lines)
    out.append("")
    out.append(f"    return {root}")
    return "\n".join(out) + "\n"

