"""Model ingestion: validate a program and write its derived artifacts."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import DuplicateId, IoFailure, PathEscape
from .paths import init_db

PROGRAM = "model.py"
GEOMETRY = "geometry.obj"
PROPERTIES = "properties.json"
VALIDATION = "validation.json"
RENDER_VIEWS = ("top", "front", "right", "angled")
INDEX = "index.jsonl"
_ID = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_.\-]*$")


def render_name(view: str) -> str:
    return f"render_{view}.png"


@dataclass
class ModelEntry:
    model_id: str
    ok: bool
    report: object  # ValidationReport
    directory: Path = None
    files: list = field(default_factory=list)  # derived artifact names

    @property
    def db_path(self) -> str:
        return f"/models/{self.model_id}/{PROGRAM}"


def model_dir(db_root, model_id: str) -> Path:
    if not _ID.match(model_id):
        raise PathEscape(f"model id {model_id!r} must be a plain file name")
    return Path(db_root) / "models" / model_id


def derive_artifacts(program_text: str, R: int = 32, render_size: int = 512, artifacts=None):
    """-> (report, {file name: bytes or str}) with nothing written."""
    from ..discretize import extract_mesh, obj_text, render_views
    from ..quality import validate_model

    art = {} if artifacts is None else artifacts
    report = validate_model(program_text, R, artifacts=art)
    if not report.overall:
        return report, {}
    mesh = extract_mesh(art["ir"], R)
    out = {GEOMETRY: obj_text(mesh)}
    for img in render_views(mesh, render_size):
        out[render_name(img.name)] = img
    out[PROPERTIES] = json.dumps(report.properties, sort_keys=True, indent=2) + "\n"
    out[VALIDATION] = report.to_json(timings=False) + "\n"
    return report, out


def ingest_model(db_root, program_text: str, model_id: str, R: int = 32,
                 render_size: int = 512) -> ModelEntry:
    """Validate, then write models/<id>/ and append an index row.  A failed
    validation writes nothing and returns the report."""
    from ..discretize import save_png

    d = model_dir(db_root, model_id)
    if d.exists():
        raise DuplicateId(f"model id {model_id!r} already exists")
    report, files = derive_artifacts(program_text, R, render_size)
    if not report.overall:
        return ModelEntry(model_id, False, report)
    init_db(db_root)
    try:
        d.mkdir()  # directory creation is the per-id lock
    except FileExistsError:
        raise DuplicateId(f"model id {model_id!r} already exists") from None
    try:
        (d / PROGRAM).write_text(program_text, encoding="utf-8")
        for name, payload in files.items():
            if isinstance(payload, str):
                (d / name).write_text(payload, encoding="utf-8")
            else:
                save_png(payload, d / name)
        row = {"id": model_id, "path": f"/models/{model_id}/{PROGRAM}", "resolution": R,
               "V": report.properties["V"], "E": report.properties["E"]}
        with open(Path(db_root) / INDEX, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    except OSError as e:
        raise IoFailure(f"cannot write model {model_id}: {e}") from None
    return ModelEntry(model_id, True, report, d, sorted(files))


def list_models(db_root) -> list:
    """Model ids from the index, falling back to a directory scan."""
    idx = Path(db_root) / INDEX
    if idx.exists():
        with open(idx, encoding="utf-8") as fh:
            return [json.loads(line)["id"] for line in fh if line.strip()]
    models = Path(db_root) / "models"
    return sorted(p.name for p in models.iterdir() if (p / PROGRAM).exists()) if models.exists() else []


def load_model(db_root, model_id: str, resolution: int = 32):
    """BenchModel view of an ingested model."""
    from ..benchkit import BenchModel
    from .header import parse_header

    d = model_dir(db_root, model_id)
    try:
        text = (d / PROGRAM).read_text(encoding="utf-8")
    except OSError as e:
        raise IoFailure(f"cannot read model {model_id}: {e}") from None
    _, body = parse_header(text)
    renders = {v: f"/models/{model_id}/{render_name(v)}" for v in RENDER_VIEWS
               if (d / render_name(v)).exists()}
    props = None
    if (d / PROPERTIES).exists():
        props = json.loads((d / PROPERTIES).read_text(encoding="utf-8"))
    if (d / VALIDATION).exists():
        resolution = json.loads((d / VALIDATION).read_text(encoding="utf-8")).get(
            "resolution", resolution)
    return BenchModel(model_id, f"/models/{model_id}/{PROGRAM}", body, renders, props, resolution)


__all__ = ["ModelEntry", "ingest_model", "derive_artifacts", "list_models", "load_model",
           "model_dir", "render_name"]
