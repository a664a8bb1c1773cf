"""Programmatic generator interface: built-in families plus external executables."""
from __future__ import annotations

import json
import os
import subprocess

from ..augment import fmt_num
from ..errors import IoFailure, UnknownGenerator
from .header import write_header
from .provenance import record_provenance

GRID_FRAME_SCRIPT = "/generators/grid_frame"
_EDGES = (
    ("FRONT_BOTTOM_LEFT", "FRONT_BOTTOM_RIGHT"), ("BACK_BOTTOM_LEFT", "BACK_BOTTOM_RIGHT"),
    ("FRONT_TOP_LEFT", "FRONT_TOP_RIGHT"), ("BACK_TOP_LEFT", "BACK_TOP_RIGHT"),
    ("FRONT_BOTTOM_LEFT", "BACK_BOTTOM_LEFT"), ("FRONT_BOTTOM_RIGHT", "BACK_BOTTOM_RIGHT"),
    ("FRONT_TOP_LEFT", "BACK_TOP_LEFT"), ("FRONT_TOP_RIGHT", "BACK_TOP_RIGHT"),
    ("FRONT_BOTTOM_LEFT", "FRONT_TOP_LEFT"), ("FRONT_BOTTOM_RIGHT", "FRONT_TOP_RIGHT"),
    ("BACK_BOTTOM_LEFT", "BACK_TOP_LEFT"), ("BACK_BOTTOM_RIGHT", "BACK_TOP_RIGHT"),
)


def _as_list(x):
    return list(x) if isinstance(x, (list, tuple, range)) else [x]


def grid_frame(k_subdiv=1, beam_d=0.06) -> list:
    """Cube-edge frames with cell size 1/2^k, one program per (k, beam_d)."""
    out = []
    for k in _as_list(k_subdiv):
        k = int(k)
        if not 0 <= k <= 6:
            raise ValueError(f"k_subdiv must be in 0..6, got {k}")
        # mirroring a box of side 1/2^(k+1) repeats its edges every 1/2^k
        side = fmt_num(0.5 ** (k + 1))
        for d in _as_list(beam_d):
            args = {"k_subdiv": k, "beam_d": float(d)}
            header = record_provenance("generated", {
                "script": GRID_FRAME_SCRIPT, "arguments": args,
                "structure_details": {"cell_size": 0.5 ** k, "edges": len(_EDGES)}})
            lines = ["from metagen import *", "",
                     f"def make_structure(beam_d={fmt_num(float(d))}) -> Structure:",
                     "    c = cuboid.corners"]
            lines.append("    paths = [")
            for a, b in _EDGES:
                lines.append(f"        Polyline([vertex(c.{a}), vertex(c.{b})]),")
            lines += ["    ]",
                      "    beams = UniformBeams(skeleton(paths), beam_d)",
                      f"    tile = Tile([beams], cuboid.embed({side}, {side}, {side}))",
                      "    return Structure(tile, CuboidFullMirror())", ""]
            out.append(write_header(header) + "\n".join(lines))
    return out


BUILTIN = {"grid_frame": grid_frame}


def run_external(executable, params: dict, timeout: float = 600.0) -> list:
    """External generators read the params as JSON on standard input and print
    a JSON array of program strings on standard output."""
    try:
        res = subprocess.run([str(executable)], input=json.dumps(params), capture_output=True,
                             text=True, timeout=timeout, check=True)
    except (OSError, subprocess.SubprocessError) as e:
        raise IoFailure(f"generator {executable} failed: {e}") from None
    try:
        programs = json.loads(res.stdout)
    except json.JSONDecodeError as e:
        raise IoFailure(f"generator {executable} did not print a JSON array: {e}") from None
    if not isinstance(programs, list) or not all(isinstance(p, str) for p in programs):
        raise IoFailure(f"generator {executable} must print a JSON array of strings")
    return programs


def generate_family(generator_id: str, params: dict = None, db_root=None) -> list:
    params = dict(params or {})
    if generator_id in BUILTIN:
        return BUILTIN[generator_id](**params)
    candidates = [generator_id]
    if db_root is not None:
        candidates.append(os.path.join(db_root, "generators", generator_id))
    for c in candidates:
        if os.path.isfile(c) and os.access(c, os.X_OK):
            return run_external(c, params)
    raise UnknownGenerator(f"no generator named {generator_id!r} (built in: {', '.join(BUILTIN)})")
