"""The ``metagen`` namespace seen by programs: CPs, skeleton, lift, tile,
pattern and CSG constructors, plus a handful of numeric helpers."""
from __future__ import annotations

import inspect
import math

from ..assembly import (Csg, CustomOp, Embedding, Leaf, PatternOp, Tile, embed_cuboid,
                        embed_simplex, embed_via_minmax, make_structure)
from ..cp import (POLYTOPES, EntityRef, PathSpec, SkeletonSpec, VertexSpec, build_skeleton,
                  make_path, make_vertex, resolve_entity)
from ..errors import DSLNameError, DSLTypeError
from ..lifting.lift import (LiftedSkeleton, lift_shell, lift_spheres, lift_uniform_beams,
                            lift_varying_beams)

TYPE_NAMES = {
    float: "number", int: "number", bool: "bool", str: "string", list: "list",
    type(None): "None", VertexSpec: "vertex", PathSpec: "path", SkeletonSpec: "skeleton",
    LiftedSkeleton: "lifted skeleton", Embedding: "embedding", Tile: "Tile",
    PatternOp: "pattern", CustomOp: "pattern operation", Leaf: "Structure", Csg: "Structure",
    EntityRef: "CP entity",
}


def type_name(x) -> str:
    return TYPE_NAMES.get(type(x), type(x).__name__)


def _need(x, types, what):
    if not isinstance(x, types) or (isinstance(x, bool) and bool not in _tuple(types)):
        raise DSLTypeError(f"{what} must be {_expected(types)}, got {type_name(x)}")
    return x


def _tuple(t):
    return t if isinstance(t, tuple) else (t,)


def _expected(types) -> str:
    names = []
    for t in _tuple(types):
        n = TYPE_NAMES.get(t, t.__name__)
        if n not in names:
            names.append(n)
    return " or ".join(names)


def _number(x, what) -> float:
    _need(x, (int, float), what)
    return float(x)


def _list_of(x, types, what) -> list:
    _need(x, list, what)
    for i, v in enumerate(x):
        _need(v, types, f"{what}[{i}]")
    return x


class Builtin:
    """Callable exposed to programs; argument binding errors become DSL TypeErrors."""

    def __init__(self, name: str, fn):
        self.name = name
        self.fn = fn
        self.sig = inspect.signature(fn)

    def __call__(self, args, kwargs):
        try:
            self.sig.bind(*args, **kwargs)
        except TypeError as e:
            raise DSLTypeError(f"{self.name}(): {e}") from None
        return self.fn(*args, **kwargs)

    def __repr__(self):
        return f"<builtin {self.name}>"


class EntityNamespace:
    def __init__(self, polytope: str, category: str):
        self.polytope = polytope
        self.category = category

    def dsl_attr(self, name: str):
        return resolve_entity(self.polytope, self.category, name)


class CPNamespace:
    def __init__(self, polytope: str):
        self.polytope = polytope
        if polytope == "cuboid":
            self.methods = {"embed": Builtin("cuboid.embed", _cuboid_embed),
                            "embed_via_minmax": Builtin("cuboid.embed_via_minmax",
                                                        _cuboid_embed_minmax)}
        else:
            def embed(bounding_box_side_length):
                return embed_simplex(polytope, _number(bounding_box_side_length,
                                                       "bounding_box_side_length"))
            self.methods = {"embed": Builtin(f"{polytope}.embed", embed)}

    def dsl_attr(self, name: str):
        if name in ("corners", "edges", "faces"):
            return EntityNamespace(self.polytope, name)
        if name in self.methods:
            return self.methods[name]
        if name in ("corner", "edge", "face", "interior", "interiors"):
            return EntityNamespace(self.polytope, name)
        raise DSLNameError(f"{self.polytope} has no attribute '{name}' (expected corners, edges, "
                           f"faces or {', '.join(self.methods)})")


def _pick_corner(positional, aabb, minpt):
    given = [c for c in (positional, aabb, minpt) if c is not None]
    if len(given) > 1:
        raise DSLTypeError("give the min corner once (positionally, cornerAtAABBMin or "
                           "cornerAtMinPt)")
    c = given[0] if given else resolve_entity("cuboid", "corners", "FRONT_BOTTOM_LEFT")
    return _need(c, EntityRef, "cornerAtAABBMin")


def _cuboid_embed(width, height, depth, corner=None, *, cornerAtAABBMin=None,
                  cornerAtMinPt=None):
    c = _pick_corner(corner, cornerAtAABBMin, cornerAtMinPt)
    return embed_cuboid(_number(width, "width"), _number(height, "height"),
                        _number(depth, "depth"), c)


def _point(x, what):
    _list_of(x, (int, float), what)
    if len(x) != 3:
        raise DSLTypeError(f"{what} must have 3 components, got {len(x)}")
    return [float(v) for v in x]


def _cuboid_embed_minmax(aabb_min_pt, aabb_max_pt, corner=None, *, cornerAtMinPt=None,
                         cornerAtAABBMin=None):
    c = _pick_corner(corner, cornerAtAABBMin, cornerAtMinPt)
    return embed_via_minmax(_point(aabb_min_pt, "aabb_min_pt"),
                            _point(aabb_max_pt, "aabb_max_pt"), c)


# ---------------------------------------------------------------- skeleton

def vertex(cpEntity, t=None):
    _need(cpEntity, EntityRef, "cpEntity")
    if t is not None:
        if isinstance(t, (int, float)) and not isinstance(t, bool):
            t = [t]
        _list_of(t, (int, float), "t")
    return make_vertex(cpEntity, t)


def Polyline(ordered_verts):
    return make_path(_list_of(ordered_verts, VertexSpec, "ordered_verts"), smooth=False)


def Curve(ordered_verts):
    return make_path(_list_of(ordered_verts, VertexSpec, "ordered_verts"), smooth=True)


def skeleton(entities):
    return build_skeleton(_list_of(entities, (VertexSpec, PathSpec), "entities"))


def _skel(x):
    return _need(x, SkeletonSpec, "skel")


def UniformBeams(skel, thickness):
    return lift_uniform_beams(_skel(skel), _number(thickness, "thickness"))


def SpatiallyVaryingBeams(skel, thicknessProfile):
    prof = thicknessProfile
    if not isinstance(prof, (int, float)) or isinstance(prof, bool):
        _need(prof, list, "thicknessProfile")
        for i, row in enumerate(prof):
            _list_of(row, (int, float), f"thicknessProfile[{i}]")
            if len(row) != 2:
                raise DSLTypeError(f"thicknessProfile[{i}] must be [t, thickness]")
    return lift_varying_beams(_skel(skel), prof)


def Spheres(skel, thickness):
    return lift_spheres(_skel(skel), _number(thickness, "thickness"))


def _shell(kind):
    def lift(skel, thickness):
        return lift_shell(_skel(skel), kind, _number(thickness, "thickness"))
    lift.__name__ = kind
    return lift


def TileFn(lifted_skeletons, embedding):
    _list_of(lifted_skeletons, LiftedSkeleton, "lifted_skeletons")
    return Tile(tuple(lifted_skeletons), _need(embedding, Embedding, "embedding"))


# ---------------------------------------------------------------- patterns

def _op(x):
    if x is not None:
        _need(x, CustomOp, "patternOp")
    return x


def _bool(x, what):
    return _need(x, bool, what)


def Mirror(entity, doCopy, patternOp=None):
    _need(entity, EntityRef, "entity")
    return CustomOp("Mirror", (entity,), _bool(doCopy, "doCopy"), _op(patternOp))


def Rotate180(entities, doCopy, patternOp=None):
    if isinstance(entities, EntityRef):
        entities = [entities]
    _list_of(entities, EntityRef, "entities")
    return CustomOp("Rotate180", tuple(entities), _bool(doCopy, "doCopy"), _op(patternOp))


def Translate(fromEntity, toEntity, doCopy, patternOp=None):
    _need(fromEntity, EntityRef, "fromEntity")
    _need(toEntity, EntityRef, "toEntity")
    return CustomOp("Translate", (fromEntity, toEntity), _bool(doCopy, "doCopy"),
                    _op(patternOp))


def Custom(patternOp):
    return PatternOp("Custom", _need(patternOp, CustomOp, "patternOp"))


def _simple_pattern(kind):
    def make():
        return PatternOp(kind)
    make.__name__ = kind
    return make


def StructureFn(tile, pattern):
    return make_structure(_need(tile, Tile, "tile"), _need(pattern, PatternOp, "pattern"))


def _csg(op):
    def combine(A, B):
        return Csg(op, _need(A, (Leaf, Csg), "A"), _need(B, (Leaf, Csg), "B"))
    combine.__name__ = op
    return combine


# ------------------------------------------------------------ numeric helpers

def _range(*args):
    if not 1 <= len(args) <= 3:
        raise DSLTypeError(f"range expects 1 to 3 arguments, got {len(args)}")
    ints = []
    for a in args:
        v = _number(a, "range argument")
        if v != int(v):
            raise DSLTypeError(f"range arguments must be whole numbers, got {v:g}")
        ints.append(int(v))
    return [float(i) for i in range(*ints)]


def _len(x):
    return float(len(_need(x, (list, str), "len argument")))


def _minmax(fn, name):
    def f(*args):
        vals = args[0] if len(args) == 1 and isinstance(args[0], list) else list(args)
        if not vals:
            raise DSLTypeError(f"{name}() of an empty sequence")
        return fn(_number(v, f"{name} argument") for v in vals)
    return f


def _round(x, ndigits=None):
    x = _number(x, "round argument")
    return float(round(x)) if ndigits is None else round(x, int(_number(ndigits, "ndigits")))


def _sqrt(x):
    x = _number(x, "sqrt argument")
    if x < 0:
        raise DSLTypeError("sqrt of a negative number")
    return math.sqrt(x)


def make_namespace() -> dict:
    fns = {
        "vertex": vertex, "Polyline": Polyline, "Curve": Curve, "skeleton": skeleton,
        "UniformBeams": UniformBeams, "SpatiallyVaryingBeams": SpatiallyVaryingBeams,
        "Spheres": Spheres, "Tile": TileFn, "Mirror": Mirror, "Rotate180": Rotate180,
        "Translate": Translate, "Custom": Custom, "Structure": StructureFn,
        "range": _range, "len": _len, "abs": lambda x: abs(_number(x, "abs argument")),
        "min": _minmax(min, "min"), "max": _minmax(max, "max"),
        "float": lambda x: _number(x, "float argument"),
        "int": lambda x: float(int(_number(x, "int argument"))), "round": _round,
        "sqrt": _sqrt,
    }
    for k in ("UniformDirectShell", "UniformTPMSShellViaMixedMinimal",
              "UniformTPMSShellViaConjugation"):
        fns[k] = _shell(k)
    for k in ("TetFullMirror", "TriPrismFullMirror", "CuboidFullMirror", "Identity"):
        fns[k] = _simple_pattern(k)
    for k in ("Union", "Subtract", "Intersect"):
        fns[k] = _csg(k)
    ns = {k: Builtin(k, f) for k, f in fns.items()}
    ns["pi"] = math.pi
    for p in POLYTOPES:
        ns[p] = CPNamespace(p)
    return ns


METAGEN_EXPORTS = tuple(k for k in make_namespace() if k not in (
    "range", "len", "abs", "min", "max", "float", "int", "round"))
