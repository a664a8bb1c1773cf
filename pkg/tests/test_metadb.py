import json
import os
import stat

import pytest

from metagen import corpus
from metagen.errors import (DuplicateId, MalformedHeader, MissingField, NotFound, PathEscape,
                            UnknownGenerator)
from metagen.metadb import (LAYOUT, HeaderBlock, db_path, derive_artifacts, generate_family,
                            grid_frame, ingest_model, init_db, list_models, load_model,
                            parse_header, record_provenance, resolve_path, with_header,
                            write_header)
from metagen.metadb.store import GEOMETRY, INDEX, PROGRAM, PROPERTIES, VALIDATION, render_name
from metagen.quality import check_compiles

SOURCES_FILE = """'''
sources:
  /literature/zeta.pdf: frame topology
  /literature/alpha.pdf: beam thickness
  /models/m0/model.py: parent
custom: 3
'''
from metagen import *
"""


# ---------------------------------------------------------------- header

def test_sources_keys_keep_file_order():
    h, body = parse_header(SOURCES_FILE)
    assert list(h.sources) == ["/literature/zeta.pdf", "/literature/alpha.pdf",
                               "/models/m0/model.py"]
    assert h.parsed["custom"] == 3
    assert body == "from metagen import *\n"


def test_no_header_gives_empty_block():
    text = corpus.load("solid")
    text = text.split("'''", 2)[-1] if text.lstrip().startswith("'''") else text
    h, body = parse_header(text)
    assert not h and h.parsed == {} and body == text


def test_unterminated_header_reports_line():
    with pytest.raises(MalformedHeader) as e:
        parse_header("\n\n'''\nsources: {}\nfrom metagen import *\n")
    assert e.value.line == 3


def test_yaml_error_reports_line():
    with pytest.raises(MalformedHeader) as e:
        parse_header("'''\na: 1\nb: [unclosed\n'''\nbody\n")
    assert e.value.line is not None and e.value.line >= 2


def test_non_map_header_rejected():
    with pytest.raises(MalformedHeader):
        parse_header("'''\n- a\n- b\n'''\nbody\n")


def test_parse_write_round_trip():
    h, body = parse_header(SOURCES_FILE)
    h2, body2 = parse_header(write_header(h) + body)
    assert h2.parsed == h.parsed and body2 == body
    # the written form is normalized: writing twice is a fixed point
    assert write_header(h2) == write_header(h)
    assert write_header(HeaderBlock()) == ""


def test_with_header_merges_fragment():
    text = with_header(SOURCES_FILE, {"file_info": {"provenance": "authored"}, "custom": 4})
    h, body = parse_header(text)
    assert h.parsed["custom"] == 4
    assert h.parsed["file_info"] == {"provenance": "authored"}
    assert len(h.sources) == 3 and body == "from metagen import *\n"


# ---------------------------------------------------------------- paths

def test_absolute_path_from_anywhere(tmp_path):
    init_db(tmp_path)
    want = tmp_path.resolve() / "literature" / "x.pdf"
    assert resolve_path(tmp_path, None, "/literature/x.pdf") == want
    assert resolve_path(tmp_path, "/models/a/m.py", "/literature/x.pdf") == want


def test_relative_path_against_referrer(tmp_path):
    root = tmp_path.resolve()
    assert resolve_path(tmp_path, "/models/a/m.py", "sibling.py") == root / "models/a/sibling.py"
    fs_ref = root / "models" / "a" / "m.py"
    assert resolve_path(tmp_path, str(fs_ref), "sibling.py") == root / "models/a/sibling.py"
    assert resolve_path(tmp_path, "/models/a/m.py", "../b/x.py") == root / "models/b/x.py"


def test_path_escape_and_not_found(tmp_path):
    with pytest.raises(PathEscape):
        resolve_path(tmp_path, None, "/../etc")
    with pytest.raises(PathEscape):
        resolve_path(tmp_path, "/models/a/m.py", "../../../x")
    with pytest.raises(PathEscape):
        resolve_path(tmp_path, None, "relative.py")
    with pytest.raises(NotFound):
        resolve_path(tmp_path, None, "/literature/missing.pdf", must_exist=True)


def test_db_path_inverts_resolve(tmp_path):
    init_db(tmp_path)
    assert sorted(os.listdir(tmp_path)) == sorted(LAYOUT)
    p = resolve_path(tmp_path, None, "/models/a/model.py")
    assert db_path(tmp_path, p) == "/models/a/model.py"


# ---------------------------------------------------------------- provenance

def test_mutated_provenance():
    trace = {"seed": 7, "applied": [["thickness", "0", 0.06, 0.07]]}
    frag = record_provenance("mutated", {"parent": "/models/m1", "trace": trace})
    assert "/models/m1" in frag["sources"]
    assert frag["file_info"]["generator_info"]["structure_details"] == trace
    assert frag["file_info"]["provenance"] == "mutated"


def test_authored_provenance_one_source():
    frag = record_provenance("authored", {"sources": {"/literature/x.pdf": "figure 3"}})
    assert list(frag["sources"]) == ["/literature/x.pdf"]


def test_hybrid_provenance_order_stable():
    d = {"parents": ["/models/b", "/models/a"], "prompt_hash": "abc", "model_name": "m"}
    f1 = record_provenance("hybridized", d)
    f2 = record_provenance("hybridized", dict(d))
    assert len(f1["sources"]) == 2 and list(f1["sources"]) == list(f2["sources"])
    assert f1["file_info"]["generator_info"]["structure_details"]["parents"] == d["parents"]
    assert write_header(f1) == write_header(f2)


def test_provenance_missing_fields():
    with pytest.raises(MissingField):
        record_provenance("mutated", {"parent": "/models/m1"})
    with pytest.raises(MissingField):
        record_provenance("generated", {"script": "/generators/x"})
    with pytest.raises(MissingField):
        record_provenance("hybridized", {"parents": ["/models/a"], "prompt_hash": "h",
                                         "model_name": "m"})
    with pytest.raises(MissingField):
        record_provenance("copied", {})


def test_provenance_sorted_keys():
    frag = record_provenance("generated", {"script": "/generators/g", "arguments": {"b": 1, "a": 2},
                                           "structure_details": {}})
    assert list(frag["file_info"]["generator_info"]["arguments"]) == ["a", "b"]


# ---------------------------------------------------------------- generators

def test_grid_frame_single_instance():
    progs = grid_frame(1, 0.06)
    assert len(progs) == 1
    h, body = parse_header(progs[0])
    assert "def make_structure(beam_d=0.06)" in body
    assert h.generator_info["arguments"] == {"beam_d": 0.06, "k_subdiv": 1}


def test_grid_frame_family_distinct_and_compiling():
    progs = generate_family("grid_frame", {"k_subdiv": [1, 2], "beam_d": 0.06})
    assert len(progs) == 2
    args = [parse_header(p)[0].generator_info["arguments"] for p in progs]
    assert args[0] != args[1]
    for p in progs:
        ok, diag, _ = check_compiles(p)
        assert ok, diag


def test_external_generator(tmp_path):
    script = tmp_path / "gen.py"
    script.write_text(
        "#!/usr/bin/env python3\n"
        "import json, sys\n"
        "p = json.load(sys.stdin)\n"
        "print(json.dumps(['# program %d' % i for i in range(p['n'])]))\n")
    script.chmod(script.stat().st_mode | stat.S_IXUSR)
    assert generate_family(str(script), {"n": 3}) == ["# program 0", "# program 1", "# program 2"]
    init_db(tmp_path / "db")
    target = tmp_path / "db" / "generators" / "gen"
    target.write_text(script.read_text())
    target.chmod(0o755)
    assert len(generate_family("gen", {"n": 2}, db_root=tmp_path / "db")) == 2


def test_unknown_generator(tmp_path):
    with pytest.raises(UnknownGenerator):
        generate_family("no_such_generator", {}, db_root=tmp_path)


# ---------------------------------------------------------------- ingest

@pytest.fixture(scope="module")
def ingested(tmp_path_factory):
    root = tmp_path_factory.mktemp("db")
    entry = ingest_model(root, corpus.load("cube_frame"), "frame", R=32, render_size=64)
    return root, entry


def test_ingest_writes_artifacts(ingested):
    root, entry = ingested
    assert entry.ok
    expected = {GEOMETRY, PROPERTIES, VALIDATION} | {render_name(v) for v in
                                                     ("top", "front", "right", "angled")}
    assert set(entry.files) == expected
    for name in expected | {PROGRAM}:
        assert (entry.directory / name).is_file()
    rows = [json.loads(x) for x in (root / INDEX).read_text().splitlines()]
    assert rows == [{"id": "frame", "path": "/models/frame/model.py", "resolution": 32,
                     "V": entry.report.properties["V"], "E": entry.report.properties["E"]}]
    assert list_models(root) == ["frame"]


def test_ingest_duplicate_id(ingested):
    root, _ = ingested
    with pytest.raises(DuplicateId):
        ingest_model(root, corpus.load("cube_frame"), "frame", R=32, render_size=64)


def test_ingest_invalid_writes_nothing(ingested):
    root, _ = ingested
    entry = ingest_model(root, corpus.load("floating_sphere"), "sphere", R=16, render_size=32)
    assert not entry.ok and entry.report.tilable is False
    assert not (root / "models" / "sphere").exists()
    assert list_models(root) == ["frame"]


def test_properties_regenerate_bit_identically(ingested):
    root, entry = ingested
    text = (entry.directory / PROGRAM).read_text()
    _, files = derive_artifacts(text, R=32, render_size=64)
    assert files[PROPERTIES] == (entry.directory / PROPERTIES).read_text()
    assert files[GEOMETRY] == (entry.directory / GEOMETRY).read_text()


def test_load_model_view(ingested):
    root, entry = ingested
    m = load_model(root, "frame")
    assert m.renders["angled"] == "/models/frame/render_angled.png"
    assert len(m.renders) == 4 and m.resolution == 32
    assert m.properties == entry.report.properties
