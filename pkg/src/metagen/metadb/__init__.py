"""Model database: header blocks, provenance, layout and ingestion."""
from .generators import BUILTIN, generate_family, grid_frame, run_external
from .header import HeaderBlock, deep_merge, parse_header, with_header, write_header
from .paths import LAYOUT, db_path, init_db, resolve_path
from .provenance import KINDS, record_provenance
from .store import (ModelEntry, derive_artifacts, ingest_model, list_models, load_model,
                    model_dir, render_name)

__all__ = ["BUILTIN", "generate_family", "grid_frame", "run_external", "HeaderBlock",
           "deep_merge", "parse_header", "with_header", "write_header", "LAYOUT", "db_path",
           "init_db", "resolve_path", "KINDS", "record_provenance", "ModelEntry",
           "derive_artifacts", "ingest_model", "list_models", "load_model", "model_dir",
           "render_name"]
