import json
import subprocess
import sys

import pytest

from metagen import corpus
from metagen.benchkit import read_jsonl
from metagen.cli import main
from metagen.metadb import grid_frame, ingest_model, parse_header
from oracles import iso_closed_form


@pytest.fixture
def src(tmp_path):
    def write(name, text=None):
        p = tmp_path / f"{name}.py"
        p.write_text(corpus.load(name) if text is None else text)
        return str(p)
    return write


def test_compile_schwarz(src, capsys):
    assert main(["compile", src("schwarz_p")]) == 0
    out = capsys.readouterr().out
    assert out.startswith("Structure\n")
    assert "UniformTPMSShellViaConjugation(thickness=0.03)" in out and "transforms: 48" in out


def test_compile_installed_binary(src):
    res = subprocess.run([sys.executable, "-m", "metagen", "compile", src("cube_frame")],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout


def test_compile_broken_file(src, capsys):
    path = src("broken", "from metagen import *\n\ndef make_structure() -> Structure:\n"
                         "    v = vertex(cuboid.corners.NOWHERE)\n    return v\n")
    assert main(["compile", path]) == 1
    err = capsys.readouterr().err
    assert err.startswith(f"{path}:4:") and ": error: " in err


def test_compile_param_override(src, capsys):
    main(["compile", src("schwarz_p")])
    default = capsys.readouterr().out
    assert main(["compile", src("schwarz_p"), "--param", "shell_thickness=0.05"]) == 0
    changed = capsys.readouterr().out
    assert "UniformTPMSShellViaConjugation(thickness=0.05)" in changed
    assert changed.replace("0.05", "0.03") == default


def test_simulate_solid(src, tmp_path):
    out = tmp_path / "props.json"
    assert main(["simulate", src("solid"), "--res", "16", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert abs(doc["properties"]["E"] - 1.0) < 0.01
    c11, c12, c44 = iso_closed_form(1.0, 0.45)
    assert abs(doc["C"][0][0] - c11) < 0.01 * c11


def test_simulate_non_spanning_exit_2(src, capsys):
    assert main(["simulate", src("floating_sphere"), "--res", "16"]) == 2
    assert "SingularSystem" in capsys.readouterr().err


def test_simulate_threads_stable(src, tmp_path):
    outs = []
    for t in ("1", "2"):
        out = tmp_path / f"p{t}.json"
        assert main(["simulate", src("solid"), "--res", "8", "--threads", t,
                     "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_resolution_flag_range(src):
    with pytest.raises(SystemExit):
        main(["simulate", src("solid"), "--res", "1"])


def test_mutate_deterministic(src, tmp_path):
    a, b = tmp_path / "a.py", tmp_path / "b.py"
    for out in (a, b):
        assert main(["mutate", src("cube_frame"), "--seed", "7", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()
    h, _ = parse_header(a.read_text())
    assert h.parsed["file_info"]["provenance"] == "mutated"
    assert main(["compile", str(a)]) == 0


def test_validate_and_geom(src, tmp_path):
    out = tmp_path / "v.json"
    assert main(["validate", src("cube_frame"), "--no-timings", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["overall"] and "timings" not in rep
    assert main(["validate", src("floating_sphere"), "--res", "16"]) == 1
    obj = tmp_path / "g.obj"
    assert main(["geom", src("cube_frame"), "--out", str(obj)]) == 0
    assert obj.read_text().startswith(("v ", "#"))


# ------------------------------------------------------------------ bench

@pytest.fixture(scope="module")
def bench(tmp_path_factory):
    root = tmp_path_factory.mktemp("db")
    progs = grid_frame(1, [0.06 + 0.005 * i for i in range(10)])
    for i, p in enumerate(progs):
        assert ingest_model(root, p, f"g{i}", R=32, render_size=32).ok
    out = root / "benchmark"
    assert main(["bench", "build", "--db", str(root), "--out", str(out)]) == 0
    return root, out


def test_bench_build_counts(bench):
    root, out = bench
    n = {}
    for t in ("reconstruction", "material_understanding", "inverse_design"):
        n[t] = sum(len(read_jsonl(out / t / f"{s}.jsonl")) for s in ("train", "validate", "test"))
    assert n == {"reconstruction": 150, "material_understanding": 20, "inverse_design": 60}
    omni = sum(len(read_jsonl(out / "omnitask" / f"{s}.jsonl"))
               for s in ("train", "validate", "test"))
    assert omni == 230


def test_bench_eval_ground_truth(bench, tmp_path):
    root, out = bench
    records = out / "omnitask" / "test.jsonl"
    preds = tmp_path / "preds.jsonl"
    with open(preds, "w") as fh:
        for rec in read_jsonl(records):
            if rec.task_type == "material_understanding":
                p = {"label": rec.label, "properties": rec.data["properties"]}
            else:
                p = {"label": rec.label, "code": rec.response}
            fh.write(json.dumps(p) + "\n")
    report_path = tmp_path / "report.json"
    assert main(["bench", "eval", str(records), str(preds), "--db", str(root),
                 "--out", str(report_path)]) == 0
    rep = json.loads(report_path.read_text())
    assert rep["reconstruction"]["iou"] == 1.0 and rep["reconstruction"]["chamfer"] == 0.0
    assert rep["material_understanding"]["error"] == 0.0
    assert rep["inverse_design"]["error"] == 0.0
    for t in rep.values():
        assert t["valid_rate"] == 1.0
