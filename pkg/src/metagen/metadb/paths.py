"""Database paths: absolute paths start at the database root, relative ones
at the referring file's directory."""
from __future__ import annotations

import os
from pathlib import Path

from ..errors import NotFound, PathEscape

LAYOUT = ("literature", "models", "generators", "benchmark")


def init_db(root) -> Path:
    root = Path(root)
    for d in LAYOUT:
        (root / d).mkdir(parents=True, exist_ok=True)
    return root


def _inside(root: str, path: str) -> bool:
    return os.path.commonpath([root, path]) == root


def resolve_path(db_root, referrer, ref: str, must_exist: bool = False) -> Path:
    """Filesystem path for ``ref``.

    ``referrer`` is the referring file, either a filesystem path under the
    root or a database path such as "/models/a/m.py"; it is only consulted
    for relative refs.
    """
    root = os.path.realpath(db_root)
    ref = str(ref)
    if ref.startswith("/"):
        joined = os.path.join(root, ref.lstrip("/"))
    else:
        if referrer is None:
            raise PathEscape(f"relative path {ref!r} needs a referring file")
        r = os.path.realpath(referrer) if os.path.isabs(referrer) else ""
        if not (r and _inside(root, r)):
            r = os.path.join(root, str(referrer).lstrip("/"))
        joined = os.path.join(os.path.dirname(r), ref)
    path = os.path.normpath(joined)
    if not _inside(root, path):
        raise PathEscape(f"{ref!r} escapes the database root")
    if must_exist and not os.path.exists(path):
        raise NotFound(f"{ref!r} does not exist under the database root")
    return Path(path)


def db_path(db_root, path) -> str:
    """Inverse of resolve_path for absolute refs: filesystem -> "/..."."""
    root = os.path.realpath(db_root)
    p = os.path.realpath(path)
    if not _inside(root, p):
        raise PathEscape(f"{path} is outside the database root")
    return "/" + os.path.relpath(p, root).replace(os.sep, "/")
