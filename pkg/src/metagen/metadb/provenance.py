"""Provenance header fragments for authored, generated, mutated and hybrid models."""
from __future__ import annotations

from ..errors import MissingField

KINDS = ("authored", "generated", "mutated", "hybridized")
REQUIRED = {
    "authored": ("sources",),
    "generated": ("script", "arguments", "structure_details"),
    "mutated": ("parent", "trace"),
    "hybridized": ("parents", "prompt_hash", "model_name"),
}
MUTATE_SCRIPT = "metagen.augment.mutate"
HYBRID_SCRIPT = "metagen.augment.hybrid"


def _sorted(x):
    if isinstance(x, dict):
        return {k: _sorted(x[k]) for k in sorted(x)}
    if isinstance(x, (list, tuple)):
        return [_sorted(v) for v in x]
    return x


def record_provenance(kind: str, details: dict) -> dict:
    """Header fragment {sources, file_info} with recursively sorted keys."""
    if kind not in REQUIRED:
        raise MissingField(f"unknown provenance kind {kind!r} (expected {', '.join(KINDS)})")
    missing = [k for k in REQUIRED[kind] if k not in details]
    if missing:
        raise MissingField(f"{kind} provenance lacks {', '.join(missing)}", fields=missing)
    d = details
    if kind == "authored":
        frag = {"sources": dict(d["sources"]), "file_info": {"author": d.get("author", "human")}}
    elif kind == "generated":
        frag = {"sources": {d["script"]: "generator script"},
                "file_info": {"generator_info": {"script": d["script"],
                                                 "arguments": d["arguments"],
                                                 "structure_details": d["structure_details"]}}}
    elif kind == "mutated":
        frag = {"sources": {d["parent"]: "mutation parent"},
                "file_info": {"generator_info": {"script": MUTATE_SCRIPT,
                                                 "arguments": d.get("arguments", {}),
                                                 "structure_details": d["trace"]}}}
    else:
        parents = list(d["parents"])
        if len(parents) < 2:
            raise MissingField("hybridized provenance needs at least two parents")
        frag = {"sources": {p: f"hybrid parent {i}" for i, p in enumerate(parents)},
                "file_info": {"generator_info": {
                    "script": HYBRID_SCRIPT,
                    "arguments": {"prompt_hash": d["prompt_hash"], "model_name": d["model_name"]},
                    "structure_details": {"parents": parents}}}}
    frag["file_info"]["provenance"] = kind
    return _sorted(frag)
