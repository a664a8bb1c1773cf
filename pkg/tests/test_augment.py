import numpy as np
import pytest

from metagen import corpus
from metagen.augment import (MutationConfig, build_hybrid_prompt, derive_seed, emit_program,
                             extract_code_block, mutate, run_hook)
from metagen.augment.mutate import THICKNESS_CAP
from metagen.assembly import leaves
from metagen.cp import check_lift_compat, compatible_lifts
from metagen.errors import NoEligibleSites
from metagen.frontend import compile_source, list_params, parse_program
from metagen.quality import check_compiles

from helpers import corpus_ir, program

OPEN = dict(p_swap_pathkind=1.0, p_swap_lift=1.0, p_vertex=1.0, p_thickness=1.0)


def _lifts(ir):
    return [ls for lf in leaves(ir) for ls in lf.tile.lifted]


def test_config_validation():
    with pytest.raises(ValueError):
        MutationConfig(p_vertex=1.5)


def test_all_closed_gates():
    cfg = MutationConfig(0.0, 0.0, 0.0, 0.0, seed=3)
    with pytest.raises(NoEligibleSites):
        mutate(corpus_ir("cube_frame"), cfg)


def test_determinism():
    ir = corpus_ir("prism_curve")
    a, ta = mutate(ir, MutationConfig(seed=11))
    b, tb = mutate(ir, MutationConfig(seed=11))
    assert emit_program(a) == emit_program(b)
    assert ta.to_dict() == tb.to_dict()


def test_schwarz_lift_swap_is_type_compatible():
    ir = corpus_ir("schwarz_p")
    old = _lifts(ir)[0]
    cfg = MutationConfig(**{**OPEN, "p_swap_pathkind": 0.0, "p_vertex": 0.0, "p_thickness": 0.0})
    new_kinds = set()
    for seed in range(12):
        child, trace = mutate(ir, MutationConfig(**{**cfg.__dict__, "seed": seed}))
        ls = _lifts(child)[0]
        assert ls.kind != old.kind and ls.kind in compatible_lifts(old.skeleton)
        check_lift_compat(ls.skeleton, ls.kind)
        assert trace.applied[0][:2] == ("lift", "lift0")
        new_kinds.add(ls.kind)
    assert "UniformTPMSShellViaMixedMinimal" in new_kinds


def test_vertices_stay_on_entities():
    ir = corpus_ir("prism_curve")
    child, trace = mutate(ir, MutationConfig(**OPEN, seed=5))
    assert any(a == "vertex" for a, *_ in trace.applied)
    for ls in _lifts(child):
        for p in ls.skeleton.items:
            for v in p.vertices:
                w = np.asarray(v.weights)
                assert abs(w.sum() - 1) < 1e-12 and w.min() >= 0
                off = np.ones(len(w), bool)
                off[list(v.entity.corners)] = False
                assert np.all(w[off] == 0)


def test_corners_untouched():
    ir = corpus_ir("cube_frame")
    child, _ = mutate(ir, MutationConfig(**OPEN, seed=2))
    before = [v.t for ls in _lifts(ir) for p in ls.skeleton.items for v in p.vertices
              if v.entity.category == "corners"]
    after = [v.t for ls in _lifts(child) for p in ls.skeleton.items for v in p.vertices
             if v.entity.category == "corners"]
    assert before == after


def test_thickness_bounds():
    ir = corpus_ir("cube_frame")
    old = _lifts(ir)[0].thickness
    for seed in range(20):
        cfg = MutationConfig(0.0, 0.0, 0.0, 1.0, seed=seed)
        child, trace = mutate(ir, cfg)
        new = _lifts(child)[0].thickness
        assert 0.5 * old <= new <= min(1.5 * old, THICKNESS_CAP)
        assert [a for a, *_ in trace.applied] == ["thickness"]


def test_trace_sites_exist():
    _, trace = mutate(corpus_ir("bcc_nodes"), MutationConfig(**OPEN, seed=9))
    d = trace.to_dict()
    assert set(d["gates"]) == {"pathkind", "lift", "vertex", "thickness"}
    assert all(set(x) == {"axis", "site", "old", "new"} for x in d["applied"])


def test_derive_seed():
    s = {derive_seed(7, i) for i in range(100)}
    assert len(s) == 100 and derive_seed(7, 3) == derive_seed(7, 3)


@pytest.mark.parametrize("name", ["cube_frame", "bcc_nodes", "prism_curve", "pentamode", "solid"])
def test_emit_round_trip(name):
    src = corpus.load(name)
    ir = compile_source(src)
    params = list_params(parse_program(src))
    text = emit_program(ir, params)
    assert check_compiles(text)[0]
    p = np.random.default_rng(0).random((10_000, 3))
    assert np.abs(compile_source(text).field(p) - ir.field(p)).max() < 1e-9


def test_emit_uses_params_and_stable_names():
    src = corpus.load("pentamode")
    text = emit_program(compile_source(src), list_params(parse_program(src)))
    assert "def make_structure(beamRadius_narrow=0.03, beamRadius_wide=0.1)" in text
    assert "beamRadius_wide]" in text
    for name in ("v0 =", "p0 =", "skel =", "tile =", "pat =", "obj ="):
        assert name in text


def test_emit_minimal_program():
    ir = compile_source(program("""
        v = vertex(cuboid.corners.FRONT_BOTTOM_LEFT)
        return Structure(Tile([Spheres(skeleton([v]), 0.2)], cuboid.embed(1, 1, 1)), Identity())
    """))
    body = emit_program(ir).split("-> Structure:\n", 1)[1]
    statements = [l for l in body.splitlines() if l.strip()]
    assert len(statements) <= 12


def test_emit_mutant_reparses():
    ir = corpus_ir("prism_curve")
    child, _ = mutate(ir, MutationConfig(seed=1))
    again = compile_source(emit_program(child))
    p = np.random.default_rng(1).random((2000, 3))
    assert np.abs(again.field(p) - child.field(p)).max() < 1e-9


def test_hybrid_prompt():
    a, b = "A = 1\n", "B = 2\n"
    out = build_hybrid_prompt(a, b, "API TEXT")
    assert "\nI want you to help discover unique new programs." in out
    assert out.index("A = 1") < out.index("B = 2")
    assert out.rstrip("\n").endswith("Return only the resulting code in a single code block.")
    assert out == build_hybrid_prompt(a, b, "API TEXT")
    assert "1)\n```python\nA = 1\n```" in out


def test_hook_and_code_block():
    assert run_hook(["cat"], "hello") == "hello"
    assert extract_code_block("text\n```python\nx = 1\n```\nmore") == "x = 1\n"
    assert extract_code_block("plain") == "plain"
