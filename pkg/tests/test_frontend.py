import numpy as np
import pytest

from metagen import corpus
from metagen.assembly import Leaf, transpile_report
from metagen.errors import (DepthLimit, DSLNameError, DSLSyntaxError, DSLTypeError,
                            InterpolantArity, MissingDefault, StepLimit)
from metagen.frontend import compile_source, evaluate, list_params, parse_program
from metagen.frontend import nodes as N

from helpers import program


def test_schwarz_p_parses_to_one_function():
    ast = parse_program(corpus.load("schwarz_p"))
    fn = ast.function("make_structure")
    assigns = [s for s in fn.body if isinstance(s, N.Assign)]
    assert len(assigns) == 11
    assert isinstance(fn.body[-1], N.Return)


def test_header_block_is_skipped():
    ast = parse_program(corpus.load("schwarz_p"))
    assert ast.header is not None and "sources" in ast.header


def test_empty_input_is_a_syntax_error():
    with pytest.raises((DSLSyntaxError, DSLNameError)):
        evaluate(parse_program(""))


@pytest.mark.parametrize("src", [
    "from metagen import *\ndef make_structure():\n    x = [i for i in range(3)]\n",
    "import os\n",
    "from metagen import *\ndef make_structure():\n    while True:\n        pass\n",
])
def test_constructs_outside_the_subset_are_rejected(src):
    with pytest.raises(DSLSyntaxError) as e:
        parse_program(src)
    line, col = e.value.span
    assert 1 <= line <= src.count("\n") + 1 and col >= 1


def test_params_in_declaration_order():
    assert [(p.name, p.default) for p in list_params(parse_program(corpus.load("schwarz_p")))] == \
        [("shell_thickness", 0.03)]
    assert [(p.name, p.default) for p in list_params(parse_program(corpus.load("pentamode")))] == \
        [("beamRadius_narrow", 0.03), ("beamRadius_wide", 0.1)]
    assert list_params(parse_program(program("return 0"))) == []


def test_missing_default():
    src = "from metagen import *\ndef make_structure(a, b=1):\n    return a\n"
    with pytest.raises(MissingDefault):
        list_params(parse_program(src))


def test_schwarz_p_evaluates_to_tet_leaf():
    ir = compile_source(corpus.load("schwarz_p"))
    assert isinstance(ir, Leaf)
    assert ir.tile.embedding.polytope == "tet"
    assert ir.tile.lifted[0].kind == "UniformTPMSShellViaConjugation"
    assert ir.pattern.kind == "TetFullMirror"
    assert ir.tile.lifted[0].thickness == 0.03


def test_override_changes_only_thickness():
    a = compile_source(corpus.load("schwarz_p"))
    b = compile_source(corpus.load("schwarz_p"), {"shell_thickness": 0.05})
    assert b.tile.lifted[0].thickness == 0.05
    ra = transpile_report(a).replace("0.03", "T")
    rb = transpile_report(b).replace("0.05", "T")
    assert ra == rb


def test_vertex_arity_error_has_call_span():
    src = program("""
        v = vertex(cuboid.edges.TOP_LEFT, [0.1, 0.2, 0.3])
        return v
    """)
    with pytest.raises(InterpolantArity) as e:
        compile_source(src)
    assert e.value.span[0] == 4
    assert isinstance(e.value, DSLTypeError)


def test_unknown_identifier():
    with pytest.raises(DSLNameError) as e:
        compile_source(program("return foo"))
    assert e.value.span == (4, 12)


def test_recursion_limit():
    src = ("from metagen import *\ndef f(n):\n    return f(n + 1)\n"
           "def make_structure() -> Structure:\n    return f(0)\n")
    with pytest.raises(DepthLimit):
        compile_source(src)


def test_step_limit():
    src = program("""
        x = 0
        for i in range(1000000):
            for j in range(1000000):
                x = x + 1
        return x
    """)
    with pytest.raises(StepLimit):
        compile_source(src)


def test_loops_helpers_and_branches():
    src = ("from metagen import *\n"
           "def corner_sphere(name, r):\n"
           "    return Spheres(skeleton([vertex(name)]), r)\n"
           "def make_structure(r=0.1) -> Structure:\n"
           "    lifts = []\n"
           "    names = [cuboid.corners.FRONT_BOTTOM_LEFT, cuboid.corners.BACK_TOP_RIGHT]\n"
           "    for n in names:\n"
           "        if r > 0.05:\n"
           "            lifts = lifts + [corner_sphere(n, r)]\n"
           "        else:\n"
           "            lifts = lifts + [corner_sphere(n, 2 * r)]\n"
           "    return Structure(Tile(lifts, cuboid.embed(0.5, 0.5, 0.5)), CuboidFullMirror())\n")
    ir = compile_source(src)
    assert len(ir.tile.lifted) == 2
    small = compile_source(src, {"r": 0.04})
    assert small.tile.lifted[0].thickness == pytest.approx(0.08)


def test_returning_a_tile_is_a_type_error():
    src = program("""
        v = vertex(cuboid.corners.FRONT_BOTTOM_LEFT)
        return Tile([Spheres(skeleton([v]), 0.2)], cuboid.embed(1, 1, 1))
    """)
    with pytest.raises(DSLTypeError):
        compile_source(src)


def test_unknown_keyword_is_an_error():
    src = program("""
        v = vertex(cuboid.corners.FRONT_BOTTOM_LEFT)
        return Structure(Tile([Spheres(skeleton([v]), 0.2)], cuboid.embed(1, 1, 1, corner=1)), Identity())
    """)
    with pytest.raises(DSLTypeError):
        compile_source(src)


def test_evaluation_is_deterministic():
    pts = np.random.default_rng(0).random((2000, 3))
    src = corpus.load("bcc_nodes")
    a, b = compile_source(src), compile_source(src)
    assert transpile_report(a) == transpile_report(b)
    assert np.array_equal(a.field(pts), b.field(pts))
