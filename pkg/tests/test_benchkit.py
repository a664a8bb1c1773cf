import json
import math
import re

import numpy as np
import pytest

from metagen.benchkit import (BenchModel, QUERY_PREFIX, TargetProfile, build_inverse_tasks,
                              build_model_tasks, build_reconstruction_tasks,
                              build_understanding_tasks, make_splits, render_inverse_query,
                              select_active_properties, select_targets)
from metagen.benchkit.metrics import chamfer, eval_inverse, eval_reconstruction, eval_understanding, iou
from metagen.benchkit.records import TaskRecord, read_jsonl, write_jsonl
from metagen.benchkit.reference import DESCRIPTORS, FAMILIES, FAMILY_OF, Coverage, load_ranges
from metagen.benchkit.stats import compute_ranges, coverage, dense_ranges, ranges_to_json
from metagen.benchkit.tasks import Target, query_target
from metagen.benchkit.templates import api_description, system_prompt
from metagen.errors import (BothEmpty, MalformedLine, MissingKey, MissingProperties,
                            MissingRenders, TooFewModels)
from metagen.homogenize import extract_properties

RANGES = load_ranges()
VIEWS = ("top", "front", "right", "angled")


def ortho_props(e=(1.0, 0.3, 0.3), V=0.3):
    """Property map of an orthotropic material with axial stiffnesses ``e``."""
    S = np.zeros((6, 6))
    for i in range(3):
        S[i, i] = 1 / e[i]
    for i in range(3):
        for j in range(3):
            if i != j:
                S[i, j] = -0.3 / max(e[i], e[j])
    S[3:, 3:] = np.diag([5.0, 6.0, 7.0])
    C = np.linalg.inv(S) * 0.05
    return extract_properties(C, V).to_dict()


def model(mid="m1", props=None):
    return BenchModel(mid, f"/models/{mid}/model.py", "from metagen import *\n",
                      {v: f"/models/{mid}/render_{v}.png" for v in VIEWS},
                      props if props is not None else ortho_props())


# ---------------------------------------------------------------- splits

def test_splits_arithmetic_and_determinism():
    ids = [f"m{i}" for i in range(1000)]
    s = make_splits(ids, seed=1, test=50, validate=5)
    assert [len(s[k]) for k in ("test", "validate", "train")] == [50, 5, 945]
    assert sorted(sum(s.values(), [])) == sorted(ids)
    assert s == make_splits(list(reversed(ids)), seed=1, test=50, validate=5)
    assert s != make_splits(ids, seed=2, test=50, validate=5)


def test_splits_paper_defaults():
    s = make_splits(range(13282))
    assert (len(s["test"]), len(s["validate"]), len(s["train"])) == (500, 50, 12732)


def test_too_few_models():
    with pytest.raises(TooFewModels):
        make_splits(["a", "b"], test=1, validate=1)


# ---------------------------------------------------------------- tasks

def test_reconstruction_counts_and_labels():
    m = model()
    counts = [len(build_reconstruction_tasks(m, n)) for n in range(1, 5)]
    assert counts == [math.comb(4, n) for n in range(1, 5)] == [4, 6, 4, 1]
    labels = [r.label for n in range(1, 5) for r in build_reconstruction_tasks(m, n)]
    assert len(set(labels)) == 15
    full = build_reconstruction_tasks(m, 4)[0]
    assert "Angled (Front-Top-Right): <[/models/m1/render_angled.png]>" in full.query
    one = build_reconstruction_tasks(m, 1)[1]
    assert one.label == "m1/reconstruction/front"
    assert "Front: <[/models/m1/render_front.png]>" in one.query and "Top:" not in one.query


def test_reconstruction_missing_renders():
    m = model()
    m.renders.pop("top")
    with pytest.raises(MissingRenders):
        build_reconstruction_tasks(m, 1)


def test_understanding_records():
    props = dict(ortho_props(), V=0.2681)
    recs = build_understanding_tasks(model(props=props))
    assert len(recs) == 2
    body = json.loads(recs[0].response.split("```json\n")[1].split("\n```")[0])
    assert set(body) == {"A", "E", "K", "G", "nu", "V"} and body["V"] == 0.27
    with pytest.raises(MissingProperties):
        build_understanding_tasks(model(props={}))


def test_model_task_counts():
    recs = build_model_tasks(model(), RANGES)
    kinds = [r.task_type for r in recs]
    assert kinds.count("reconstruction") == 15
    assert kinds.count("material_understanding") == 2
    assert kinds.count("inverse_design") == 6


# ---------------------------------------------------- property selection

def test_isotropy_reward_picks_A():
    p = dict(ortho_props((1, 1, 1)), A=0.0001)
    assert select_active_properties(p, RANGES, 1, seed=0) == ["A"]


def test_gap_weight_prefers_directional():
    p = ortho_props((1.0, 0.02, 0.02))
    assert p["A"] > 0.0025 and p["E_1"] > 10 * p["E_2"]
    for seed in range(10):
        ch = select_active_properties(p, RANGES, 2, seed)
        e = [c for c in ch if c in FAMILIES["E"] or c == "E"]
        assert e and e[0] != "E"


@pytest.mark.parametrize("seed", range(25))
def test_overall_xor_directional(seed):
    p = ortho_props((1.0, 0.5, 0.1))
    ch = select_active_properties(p, RANGES, 6, seed)
    assert len(ch) == len(set(ch)) == 6
    for fam, ds in FAMILIES.items():
        assert not (fam in ch and any(d in ch for d in ds))


def test_targets_examples():
    t = select_targets({"nu": -0.1}, ["nu"]).targets[0]
    assert (t.target_type, t.target_value) == ("upper_bound", 0.0)
    assert "auxetic" in [d for d, _ in t.descriptions]
    t = select_targets({"nu": 0.3}, ["nu"]).targets[0]
    assert (t.target_type, t.target_value) == ("lower_bound", 0.0)
    assert "a positive Poisson ratio" in [d for d, _ in t.descriptions]
    t = select_targets({"V": 0.2681}, ["V"], reference={"V": []}).targets[0]
    assert (t.property, t.target_type, t.target_value) == ("V", "value", 0.27)


def test_tightest_group():
    # E = 0.35 satisfies > 0.1 and > 0.3; the 0.3 bound is tighter
    t = select_targets({"E": 0.35}, ["E"]).targets[0]
    assert (t.target_type, t.target_value) == ("lower_bound", 0.3)


# ---------------------------------------------------------------- queries

def test_auxetic_query():
    prof = TargetProfile([Target("nu", "upper_bound", 0.0, [("auxetic", "adjective")])])
    qs = {render_inverse_query(prof, s) for s in range(20)}
    assert "Write a metagen program that creates an auxetic (nu < 0) material." in qs
    assert qs <= {"Write a metagen program that creates an auxetic (nu < 0) material.",
                  "Write a metagen program that creates a material that is auxetic (nu < 0)."}


def test_query_without_adjectives_and_determinism():
    prof = TargetProfile([Target("E", "lower_bound", 0.1, [("resists stretching", "verb")]),
                          Target("V", "value", 0.27, [])])
    q = render_inverse_query(prof, 3)
    assert q.startswith("Write a metagen program that creates a material that resists stretching (E > 0.1)")
    assert "with a volume fraction of 0.27" in q and q.endswith(".")
    assert q == render_inverse_query(prof, 3)


def test_profile_serialization():
    prof = select_targets(ortho_props(), ["E", "nu", "V"], seed=4)
    d = prof.to_dict()
    for t in d["targets"]:
        assert set(t) == {"property", "target_type", "target_value", "target_descriptions"}
    assert TargetProfile.from_dict(json.loads(json.dumps(d))) == prof


GRAMMAR = re.compile(r"^Write a metagen program that creates (a|an) [^\n]*\bmaterial\b[^\n]*\.$")


def test_inverse_records_sound():
    m = model()
    for r in build_inverse_tasks(m, RANGES, seed=5):
        prof = TargetProfile.from_dict(r.data["profile"])
        assert eval_inverse(prof, m.properties, RANGES) == 0.0
        line = next(l for l in r.query.splitlines() if l.startswith(QUERY_PREFIX))
        assert GRAMMAR.match(line), line


# ---------------------------------------------------------------- metrics

def slab(R, lo, hi):
    g = np.zeros((R, R, R), bool)
    g[lo:hi] = True
    return g


def test_metric_identities():
    a = slab(32, 4, 12)
    assert iou(a, a) == 1.0 and chamfer(a, a) == 0.0
    assert iou(slab(32, 0, 16), slab(32, 16, 32)) == 0.0
    # a one-voxel layer shifted by one voxel: every centre is exactly 1/R from the other set
    assert abs(chamfer(slab(32, 4, 5), slab(32, 5, 6)) - 1 / 32) < 1e-9
    # thick slab: only the two unmatched layers contribute
    assert abs(chamfer(slab(32, 4, 12), slab(32, 5, 13)) - 1 / 8 / 32) < 1e-9


def test_chamfer_symmetry_and_empty():
    rng = np.random.default_rng(0)
    a, b = rng.random((8, 8, 8)) < 0.2, rng.random((8, 8, 8)) < 0.2
    assert chamfer(a, b) == pytest.approx(chamfer(b, a)) and iou(a, b) == iou(b, a)
    z = np.zeros((8, 8, 8), bool)
    with pytest.raises(BothEmpty):
        iou(z, z)
    assert chamfer(a, z) == pytest.approx(math.sqrt(3))
    r = eval_reconstruction(a, a)
    assert r == {"iou": 1.0, "chamfer": 0.0}


def test_eval_understanding():
    truth = {"A": 1.0, "E": 0.01, "K": 0.02, "G": 0.003, "nu": 0.3, "V": 0.1}
    assert eval_understanding(truth, truth, RANGES) == 0.0
    assert eval_understanding(dict(truth, nu=0.4), truth, RANGES) == pytest.approx(0.1 / 6)
    with pytest.raises(MissingKey):
        eval_understanding({k: v for k, v in truth.items() if k != "K"}, truth, RANGES)


def test_eval_inverse_overshoot():
    prof = TargetProfile([Target("nu", "upper_bound", 0.0, [])])
    assert eval_inverse(prof, {"nu": 0.2}, RANGES) == pytest.approx(0.2)
    assert eval_inverse(prof, {"nu": -0.2}, RANGES) == 0.0
    val = TargetProfile([Target("V", "value", 0.27, [])])
    assert eval_inverse(val, {"V": 0.2681}, RANGES) == 0.0
    rng = TargetProfile([Target("V", "range", (0.2, 0.5), [])])
    assert eval_inverse(rng, {"V": 0.6}, RANGES) == pytest.approx(0.1 / RANGES["V"].span)


# ---------------------------------------------------------------- records

def test_jsonl_round_trip(tmp_path):
    recs = [TaskRecord("reconstruction", "a", "/models/x/model.py", {"k": [1, 2]}, "q", "r"),
            TaskRecord("inverse_design", "b", None, {}, "q2"),
            TaskRecord("material_understanding", "c", "rel/p", {"u": "é"}, "q3", "")]
    write_jsonl(recs, tmp_path / "x.jsonl")
    lines = (tmp_path / "x.jsonl").read_text().splitlines()
    assert len(lines) == 3 and "response" not in json.loads(lines[1])
    assert read_jsonl(tmp_path / "x.jsonl") == recs


def test_jsonl_malformed(tmp_path):
    p = tmp_path / "bad.jsonl"
    p.write_text('{"task_type": "reconstruction", "label": "a", "query": ""}\n{oops\n')
    with pytest.raises(MalformedLine) as e:
        read_jsonl(p)
    assert e.value.line == 2


# ---------------------------------------------------------------- ranges

def test_bundled_ranges_cover_every_property():
    assert set(RANGES) >= set(DESCRIPTORS)
    for k, c in RANGES.items():
        assert c.min < c.max and c.min <= c.q1 <= c.q3 <= c.max
    assert (RANGES["nu"].min, RANGES["nu"].max) == (-0.5, 0.5)


def test_coverage_and_dense_ranges():
    x = np.concatenate([np.linspace(0, 1, 11), np.full(30, 0.05)])
    c = coverage(x)
    assert c.min == 0 and c.max == 1 and c.q1 <= c.q3
    assert any(lo <= 0.05 <= hi for lo, hi in c.dense)
    assert c.density(0.05) == 1.0 and c.density(0.95) == 0.5 and c.density(2.0) == 0.25
    samples = [dict(ortho_props(), E=0.1 * i) for i in range(1, 6)]
    r = compute_ranges(samples)
    assert r["nu_12"].min == -0.5 and r["E"].max == pytest.approx(0.5)
    assert r["E"].min == pytest.approx(0.1)
    d = json.loads(ranges_to_json(r, {"note": "x"}))
    assert set(d["ranges"]["E"]) == {"min", "max", "q1", "q3", "densely_populated_ranges"}


def test_templates_verbatim_pieces():
    assert "{api_description}" not in system_prompt()
    assert api_description().strip() in system_prompt()
