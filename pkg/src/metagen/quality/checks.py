"""Compilation, tilability and physical-consistency checks."""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import ndimage

from ..errors import MetagenError
from ..frontend import compile_source
from ..homogenize import extract_properties, homogenize

E_TOL = 1e-3
SYM_TOL = 1e-8
PSD_TOL = 1e-10


def check_compiles(program: str, overrides: dict = None):
    """Parse and evaluate with defaults.  Returns (ok, diagnostics, ir)."""
    try:
        ir = compile_source(program, overrides or {})
    except MetagenError as exc:
        return False, exc.format(), None
    except RecursionError:
        return False, "EvaluationError: recursion too deep", None
    return True, "", ir


def boundary_samples(ir, R: int) -> list:
    """Occupancy on the planes x=0 / x=1 (and y, z) at the voxel face centres."""
    from ..discretize import sample_field

    c = (np.arange(R) + 0.5) / R
    u, v = [a.ravel() for a in np.meshgrid(c, c, indexing="ij")]
    out = []
    for ax in range(3):
        pair = []
        for val in (0.0, 1.0):
            pts = np.empty((R * R, 3))
            pts[:, ax] = val
            pts[:, [k for k in range(3) if k != ax]] = np.stack([u, v], 1)
            pair.append((sample_field(ir, pts) < 0.0).reshape(R, R))
        out.append(tuple(pair))
    return out


def check_tilable(grid, boundary=None):
    """Returns (ok, reason).

    The cell boundary must be periodic and one 6-connected component of the
    3x3x3 block must touch all six block faces.  ``boundary`` (from
    ``boundary_samples``) gives the occupancy on the opposite face planes
    themselves; without it the first and last voxel layers are compared,
    which is exact for mirror-symmetric cells.
    """
    occ = np.asarray(getattr(grid, "occupancy", grid), dtype=bool)
    if not occ.any():
        return False, "empty cell"
    for ax, name in enumerate("xyz"):
        if boundary is not None:
            lo, hi = boundary[ax]
        else:
            lo, hi = np.take(occ, 0, axis=ax), np.take(occ, -1, axis=ax)
        if not np.array_equal(lo, hi):
            return False, f"boundary mismatch: faces normal to {name} differ"
    block = np.tile(occ, (3, 3, 3))
    labels, n = ndimage.label(block)  # default structure is the 6-neighbourhood
    touching = None
    for ax in range(3):
        for end in (0, -1):
            ids = set(np.unique(np.take(labels, end, axis=ax)).tolist()) - {0}
            touching = ids if touching is None else touching & ids
            if not touching:
                return False, "not spanning: no component reaches all six faces"
    return True, ""


def check_physical(props, C=None):
    """Returns (ok, reason)."""
    d = props.to_dict() if hasattr(props, "to_dict") else dict(props)
    vals = np.array(list(d.values()), dtype=float)
    if not np.all(np.isfinite(vals)) or (C is not None and not np.all(np.isfinite(C))):
        return False, "non-finite value"
    if d["E"] > 1.0 + E_TOL:
        return False, "E>1"
    if not (0.0 < d["V"] <= 1.0):
        return False, "V outside (0, 1]"
    if C is not None:
        C = np.asarray(C, dtype=float)
        scale = max(np.abs(C).max(), 1e-300)
        if np.abs(C - C.T).max() > SYM_TOL * scale:
            return False, "C not symmetric"
        if np.linalg.eigvalsh(0.5 * (C + C.T)).min() < -PSD_TOL * scale:
            return False, "C not positive semidefinite"
    return True, ""


def simulate(grid, **kw):
    """voxel grid -> (C, PropertyVector)."""
    C = homogenize(grid, **kw)
    return C, extract_properties(C, grid.volume_fraction)


@dataclass
class ValidationReport:
    compiled: bool = False
    diagnostics: str = ""
    tilable: bool = None
    tilable_reason: str = ""
    physical: bool = None
    physical_reason: str = ""
    resolution: int = 0
    timings: dict = field(default_factory=dict)
    properties: dict = None
    C: list = None

    @property
    def overall(self) -> bool:
        return bool(self.compiled and self.tilable and self.physical)

    def to_dict(self, timings: bool = True) -> dict:
        d = asdict(self)
        d["overall"] = self.overall
        if not timings:
            d.pop("timings")
        return d

    def to_json(self, timings: bool = True) -> str:
        return json.dumps(self.to_dict(timings), sort_keys=True, indent=2)


def validate_model(program: str, R: int = 32, overrides: dict = None, artifacts: dict = None):
    """Run the three checks in order; later ones are skipped after a failure.

    If ``artifacts`` is a dict it receives the ir, grid, C and props.
    """
    from ..discretize import voxelize

    rep = ValidationReport(resolution=int(R))
    t0 = time.perf_counter()
    ok, diag, ir = check_compiles(program, overrides)
    rep.timings["compile"] = time.perf_counter() - t0
    rep.compiled, rep.diagnostics = ok, diag
    if not ok:
        return rep
    t0 = time.perf_counter()
    try:
        grid = voxelize(ir, R)
    except MetagenError as exc:
        rep.compiled, rep.diagnostics = False, exc.format()
        return rep
    rep.timings["voxelize"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    rep.tilable, rep.tilable_reason = check_tilable(grid, boundary_samples(ir, R))
    rep.timings["tilable"] = time.perf_counter() - t0
    if artifacts is not None:
        artifacts.update(ir=ir, grid=grid)
    if not rep.tilable:
        return rep
    t0 = time.perf_counter()
    try:
        C, props = simulate(grid)
    except MetagenError as exc:
        rep.physical, rep.physical_reason = False, exc.format()
        rep.timings["simulate"] = time.perf_counter() - t0
        return rep
    rep.timings["simulate"] = time.perf_counter() - t0
    rep.physical, rep.physical_reason = check_physical(props, C)
    rep.properties = props.to_dict()
    rep.C = C.tolist()
    if artifacts is not None:
        artifacts.update(C=C, props=props)
    return rep
